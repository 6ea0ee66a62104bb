"""
Metrics Collection Service
Counts operator evaluations, quadrature failures and Monte Carlo work using Prometheus
"""
import logging
from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest, CONTENT_TYPE_LATEST

logger = logging.getLogger(__name__)

registry = CollectorRegistry()

# Operator Metrics
operator_evaluations_total = Counter(
    'operator_evaluations_total', 'Operator evaluations', ['operator'], registry=registry)
quadrature_nodes = Histogram(
    'quadrature_nodes', 'Integrand evaluations per operator value',
    buckets=(21, 63, 105, 231, 525, 1050, 2100, 5250, 10500), registry=registry)
quadrature_failures_total = Counter(
    'quadrature_failures_total', 'Quadrature calls that missed tolerance', ['operator'], registry=registry)

# Series Metrics
series_terms = Histogram(
    'series_terms', 'Terms summed per hypergeometric series',
    buckets=(1, 5, 10, 20, 50, 100, 500, 1000, 10000), registry=registry)

# Monte Carlo Metrics
mc_draws_total = Counter('mc_draws_total', 'Random draws produced', ['density'], registry=registry)
verifications_total = Counter('verifications_total', 'Verification runs', ['theorem', 'outcome'], registry=registry)


class MetricsService:
    def __init__(self):
        logger.debug("Metrics Service initialized")

    def record_operator(self, operator, nodes):
        """Record one operator evaluation"""
        operator_evaluations_total.labels(operator=operator).inc()
        quadrature_nodes.observe(nodes)

    def record_quadrature_failure(self, operator):
        """Record a quadrature tolerance miss"""
        quadrature_failures_total.labels(operator=operator).inc()

    def record_series_terms(self, terms):
        series_terms.observe(terms)

    def record_draws(self, density, count):
        """Record random draws"""
        mc_draws_total.labels(density=density).inc(count)

    def record_verification(self, theorem, passed):
        verifications_total.labels(theorem=theorem, outcome='pass' if passed else 'fail').inc()

    def get_metrics(self):
        """Get current metrics in Prometheus format"""
        return generate_latest(registry)

    def get_content_type(self):
        """Get Prometheus content type"""
        return CONTENT_TYPE_LATEST


# Global metrics service instance
metrics_service = MetricsService()
