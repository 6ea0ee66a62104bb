"""
Numerical configuration.
Tolerances, caps and worker counts, overridable through the environment (.env supported).
"""

import os
import logging
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

# Adaptive quadrature
QUAD_EPSABS = float(os.getenv('KOBER_QUAD_EPSABS', '1e-10'))
QUAD_EPSREL = float(os.getenv('KOBER_QUAD_EPSREL', '1e-9'))
QUAD_LIMIT = int(os.getenv('KOBER_QUAD_LIMIT', '500'))

# Hypergeometric series
PFQ_TOL = float(os.getenv('KOBER_PFQ_TOL', '1e-14'))
PFQ_MAX_TERMS = int(os.getenv('KOBER_PFQ_MAX_TERMS', '1000000'))

# Densities and sampling
CDF_NODES = int(os.getenv('KOBER_CDF_NODES', '2048'))
MC_CHUNK = int(os.getenv('KOBER_MC_CHUNK', '65536'))
THREADS = int(os.getenv('KOBER_THREADS', '4'))

# Inverse Mellin contour
INVERSE_H_MAX = float(os.getenv('KOBER_INVERSE_H_MAX', '400'))
INVERSE_TOL = float(os.getenv('KOBER_INVERSE_TOL', '1e-8'))

LOG_LEVEL = os.getenv('KOBER_LOG_LEVEL', 'INFO')


def describe() -> dict:
    """Current settings, for run manifests."""
    return {
        'quad_epsabs': QUAD_EPSABS,
        'quad_epsrel': QUAD_EPSREL,
        'quad_limit': QUAD_LIMIT,
        'pfq_tol': PFQ_TOL,
        'pfq_max_terms': PFQ_MAX_TERMS,
        'cdf_nodes': CDF_NODES,
        'mc_chunk': MC_CHUNK,
        'threads': THREADS,
        'inverse_h_max': INVERSE_H_MAX,
        'inverse_tol': INVERSE_TOL,
    }
