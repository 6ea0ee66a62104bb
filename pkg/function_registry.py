"""
Function Registry
Named test functions and densities, addressable from the command line
"""

import math
import logging
import threading
from typing import Dict, List, Union

import numpy as np
from scipy import special, stats

from density import (
    Beta1Density,
    Beta1Params,
    Decay,
    Density,
    FunctionDensity,
    Kind,
    PathwayDensity,
    PathwayParams,
    TestFunction,
)
from errors import KoberError, ParameterError, RegistrationError
from mellin import mellin_numeric

logger = logging.getLogger(__name__)

Handle = Union[TestFunction, Density]

# Registration tolerances
NORMALIZATION_TOL = 1e-8
MELLIN_TOL = 1e-8

_PATHWAY_KEYS = {'g': 'gamma', 'd': 'delta', 'e': 'eta', 'a': 'a', 'q': 'q'}


def _exp1() -> TestFunction:
    return TestFunction(
        name='exp1',
        evaluator=lambda x: math.exp(-x),
        mellin_closed_form=lambda s: complex(np.exp(special.loggamma(s))),
        is_density=True,
        reference=stats.expon(),
    )


def _gamma(k: float) -> TestFunction:
    if not k > 0:
        raise ParameterError(f"gamma shape must be positive, got {k}")
    log_norm = special.gammaln(k)
    return TestFunction(
        name=f'gamma:{k:g}',
        evaluator=lambda x: math.exp((k - 1.0) * math.log(x) - x - log_norm),
        mellin_closed_form=lambda s: complex(np.exp(special.loggamma(s + k - 1.0) - log_norm)),
        is_density=True,
        origin_exponent=k - 1.0,
        reference=stats.gamma(k),
    )


def _uniform() -> TestFunction:
    return TestFunction(
        name='uniform',
        evaluator=lambda x: 1.0,
        support=(0.0, 1.0),
        mellin_closed_form=lambda s: 1.0 / s,
        is_density=True,
        decay=Decay.compact(),
        reference=stats.uniform(),
    )


def _power(p: float) -> TestFunction:
    """t^-p on (0, inf); it has no Mellin strip."""
    return TestFunction(
        name=f'power:{p:g}',
        evaluator=lambda t: t ** (-p),
        decay=Decay.power_law(p),
        origin_exponent=-p,
    )


def _monomial(p: float) -> TestFunction:
    return TestFunction(
        name=f'monomial:{p:g}',
        evaluator=lambda v: v ** p,
        decay=Decay.power_law(-p),
        origin_exponent=p,
    )


def _expgrowth() -> TestFunction:
    return TestFunction(name='expgrowth', evaluator=math.exp, decay=Decay.none())


def _numbers(text: str, count: int, name: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(',')]
    except ValueError:
        raise ParameterError(f"cannot parse numbers in '{name}'")
    if len(values) != count:
        raise ParameterError(f"'{name}' needs {count} numbers, got {len(values)}")
    return values


def _pathway(text: str, name: str) -> PathwayDensity:
    fields = {}
    kind = Kind.SECOND_KIND
    for item in text.split(','):
        key, _, value = item.partition('=')
        key = key.strip()
        if key == 'kind':
            kind = Kind.FIRST_KIND if value.strip() == '1' else Kind.SECOND_KIND
            continue
        if key not in _PATHWAY_KEYS:
            raise ParameterError(f"unknown pathway field '{key}' in '{name}'")
        try:
            fields[_PATHWAY_KEYS[key]] = float(value)
        except ValueError:
            raise ParameterError(f"bad value for '{key}' in '{name}'")
    missing = set(_PATHWAY_KEYS.values()) - set(fields)
    if missing:
        raise ParameterError(f"'{name}' is missing {sorted(missing)}")
    return PathwayDensity(PathwayParams(**fields), kind)


class FunctionRegistry:
    """
    Name -> test function or density.

    Built-ins: exp1, uniform, gamma:K, beta1:L,A, pathway:g=..,d=..,e=..,a=..,q=..[,kind=1],
    power:P (t^-P), monomial:P (v^P), expgrowth (e^v). Parametric names are
    built and checked on first use and cached afterwards.
    """

    def __init__(self):
        self._entries: Dict[str, Handle] = {}
        self._densities: Dict[str, Density] = {}
        self._lock = threading.Lock()
        for f in (_exp1(), _uniform(), _gamma(2.0), _expgrowth()):
            self.register(f)
        logger.info("Function Registry initialized with %d entries", len(self._entries))

    def register(self, handle: Handle, check: bool = True) -> Handle:
        """
        Add a function or density under its name.

        Raises:
            RegistrationError: a density that does not integrate to 1, or a
                closed-form Mellin transform that disagrees with quadrature.
        """
        if check:
            self.check(handle)
        with self._lock:
            self._entries[handle.name] = handle
        return handle

    def check(self, handle: Handle) -> None:
        if isinstance(handle, Density):
            self._check_density(handle)
            return
        if handle.is_density:
            self._check_density(FunctionDensity(handle))
        if handle.mellin_closed_form is not None:
            self._check_mellin(handle)

    def _check_density(self, d: Density) -> None:
        lo, hi = d.support
        grid = np.geomspace(max(lo, 1e-6), min(hi, 1e3), 64)
        for x in grid:
            if lo < x < hi and d.pdf(x) < 0:
                raise RegistrationError(f"{d.name}: negative density at x={x:g}")
        total = d.mass(lo, hi)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise RegistrationError(f"{d.name}: integrates to {total:.12g}, not 1")

    def _check_mellin(self, f: TestFunction) -> None:
        try:
            strip = f.mellin_strip
        except KoberError as e:
            logger.warning("%s: Mellin check skipped (%s)", f.name, e)
            return
        for s in _sample_points(strip):
            closed = complex(f.mellin_closed_form(s))
            numeric = mellin_numeric(f, s)
            if abs(closed - numeric) > MELLIN_TOL * max(1.0, abs(closed)):
                raise RegistrationError(
                    f"{f.name}: closed-form Mellin transform {closed} differs from quadrature {numeric} at s={s}")

    def resolve(self, name: str) -> Handle:
        """Look up or build the handle called name."""
        with self._lock:
            if name in self._entries:
                return self._entries[name]
        handle = self.register(self._build(name))
        with self._lock:
            self._entries.setdefault(name, handle)
        return handle

    def function(self, name: str) -> TestFunction:
        handle = self.resolve(name)
        return handle.as_function() if isinstance(handle, Density) else handle

    def density(self, name: str) -> Density:
        handle = self.resolve(name)
        if isinstance(handle, Density):
            return handle
        with self._lock:
            if name not in self._densities:
                self._densities[name] = handle.as_density()
            return self._densities[name]

    def names(self) -> List[str]:
        with self._lock:
            return sorted(self._entries)

    def describe(self) -> List[Dict[str, str]]:
        """One row per registered entry, for listings."""
        with self._lock:
            entries = sorted(self._entries.items())
        rows = []
        for name, handle in entries:
            if isinstance(handle, Density):
                kind, support, decay = 'density', handle.support, handle.decay
            else:
                kind = 'density' if handle.is_density else 'function'
                support, decay = handle.support, handle.decay
            rows.append({'name': name, 'kind': kind,
                         'support': f"({support[0]:g}, {support[1]:g})", 'decay': str(decay)})
        return rows

    def _build(self, name: str) -> Handle:
        family, _, args = name.partition(':')
        family = family.strip().lower()
        if family == 'gamma':
            return _gamma(_numbers(args, 1, name)[0])
        if family == 'beta1':
            lam, alpha = _numbers(args, 2, name)
            return Beta1Density(Beta1Params(lam, alpha))
        if family == 'pathway':
            return _pathway(args, name)
        if family == 'power':
            return _power(_numbers(args, 1, name)[0])
        if family == 'monomial':
            return _monomial(_numbers(args, 1, name)[0])
        raise ParameterError(f"unknown function '{name}'")


def _sample_points(strip) -> List[complex]:
    lo, hi = strip.lower, strip.upper
    if math.isfinite(lo) and math.isfinite(hi):
        width = hi - lo
        sigmas = [lo + 0.25 * width, lo + 0.5 * width, lo + 0.75 * width]
    elif math.isfinite(lo):
        sigmas = [lo + 0.5, lo + 1.0, lo + 1.5]
    elif math.isfinite(hi):
        sigmas = [hi - 1.5, hi - 1.0, hi - 0.5]
    else:
        sigmas = [-0.5, 0.5, 1.5]
    return [complex(sigmas[0], 0.0), complex(sigmas[1], 0.5), complex(sigmas[2], 0.0)]


# Global registry instance
function_registry = FunctionRegistry()
