"""
Mellin transforms.

Numeric transforms of test functions and operator outputs, the closed-form
multipliers each operator applies to f*(s), and synthesis back to u-space along
a truncated vertical contour.
"""

import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import KoberError, ParameterError, StripError, TruncationError
from quadrature import integrate_jacobi, quad_piece
from special_fn import ArgMode, Number, as_complex, complex_gamma_ratio, pfq_complex

logger = logging.getLogger(__name__)

# Width of one contour panel in the imaginary direction
CONTOUR_PANEL = 25.0


@dataclass(frozen=True)
class MellinStrip:
    """Open vertical strip lower < Re(s) < upper."""
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise StripError(f"empty Mellin strip ({self.lower:g}, {self.upper:g})")

    def contains(self, sigma: float) -> bool:
        return self.lower < sigma < self.upper

    def intersect(self, other: 'MellinStrip') -> 'MellinStrip':
        return MellinStrip(max(self.lower, other.lower), min(self.upper, other.upper))

    def shifted(self, shift: float) -> 'MellinStrip':
        """Strip of s when s + shift must lie in this strip."""
        return MellinStrip(self.lower - shift, self.upper - shift)

    def abscissa(self) -> float:
        """Default contour abscissa: the midpoint, or one unit inside a half-infinite strip."""
        lo_finite, hi_finite = math.isfinite(self.lower), math.isfinite(self.upper)
        if lo_finite and hi_finite:
            return 0.5 * (self.lower + self.upper)
        if lo_finite:
            return self.lower + 1.0
        if hi_finite:
            return self.upper - 1.0
        return 0.0

    def __str__(self):
        return f"({self.lower:g}, {self.upper:g})"


def mellin_numeric(f, s: Number, check_strip: bool = True,
                   epsabs: Optional[float] = None, epsrel: Optional[float] = None) -> complex:
    """
    Integral over (0, inf) of x^(s-1) f(x), split at x = 1.

    f needs evaluate(x), support, origin_exponent and mellin_strip. Near 0 the
    power x^(Re s - 1 + k), k the origin exponent, is handed to the quadrature
    as an algebraic weight.

    Raises:
        StripError: Re(s) outside f's strip (or not integrable at 0 at all).
    """
    s = as_complex(s)
    sigma, tau = s.real, s.imag
    if check_strip and not f.mellin_strip.contains(sigma):
        raise StripError(f"s={s}: outside the Mellin strip {f.mellin_strip} of {f.name}")
    lo, hi = f.support
    k = f.origin_exponent if lo == 0 else 0.0
    weight = sigma - 1.0 + k
    if lo == 0 and weight <= -1:
        raise StripError(f"s={s}: x^(s-1) {f.name} is not integrable at 0")

    def part(trig):
        def integrand(x):
            value = f.evaluate(x)
            if k:
                value /= x ** k
            if tau:
                value *= trig(tau * math.log(x))
            return value
        return integrate_jacobi(integrand, 0.0, math.inf, left=weight, span=(lo, hi),
                                epsabs=epsabs, epsrel=epsrel, label=f'mellin:{f.name}').value

    # x^(i tau) = cos(tau ln x) + i sin(tau ln x)
    real = part(math.cos)
    imag = part(math.sin) if tau else 0.0
    return complex(real, imag)


class MultiplierTag(Enum):
    KOBER_2 = 'kober2'
    KOBER_1 = 'kober1'
    HYPER_2_ARGX = 'hyper2-argx'
    HYPER_2_ARG1MX = 'hyper2-arg1mx'
    HYPER_1_ARGX = 'hyper1-argx'
    HYPER_1_ARG1MX = 'hyper1-arg1mx'
    HYPER_2_SERIES = 'hyper2-series'
    HYPER_1_SERIES = 'hyper1-series'
    RL_LEFT = 'rl'
    WEYL_PRODUCT = 'weyl'
    RATIO_GENERIC = 'ratio'


HYPER_SECOND = (MultiplierTag.HYPER_2_ARGX, MultiplierTag.HYPER_2_ARG1MX, MultiplierTag.HYPER_2_SERIES)
HYPER_FIRST = (MultiplierTag.HYPER_1_ARGX, MultiplierTag.HYPER_1_ARG1MX, MultiplierTag.HYPER_1_SERIES)


@dataclass(frozen=True)
class OrderParams:
    """Order of a Weyl or Riemann-Liouville integral. premultiplied: the operator acts on x^-alpha f."""
    alpha: float
    premultiplied: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError(f"order alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class MultiplierSpec:
    """
    An operator tag with its parameter record:
    KoberParams for KOBER_*, HyperDensityParams for HYPER_*, OrderParams for
    RL_LEFT/WEYL_PRODUCT and the kernel Density for RATIO_GENERIC.
    """
    tag: MultiplierTag
    params: Any

    def __post_init__(self):
        _check_mode(self)
        self.strip()

    def strip(self) -> MellinStrip:
        """Where the multiplier itself is analytic."""
        tag, p = self.tag, self.params
        if tag == MultiplierTag.KOBER_2 or tag in HYPER_SECOND:
            return MellinStrip(-p.zeta, math.inf)
        if tag == MultiplierTag.KOBER_1 or tag in HYPER_FIRST:
            return MellinStrip(-math.inf, p.zeta + 1.0)
        if tag == MultiplierTag.RL_LEFT:
            return MellinStrip(-math.inf, 1.0 - p.alpha)
        if tag == MultiplierTag.WEYL_PRODUCT:
            return MellinStrip(0.0, math.inf)
        kernel = p.mellin_strip
        return MellinStrip(2.0 - kernel.upper, 2.0 - kernel.lower)

    @property
    def shift(self) -> float:
        if self.tag == MultiplierTag.WEYL_PRODUCT:
            return self.params.alpha
        if self.tag == MultiplierTag.RL_LEFT and not self.params.premultiplied:
            return self.params.alpha
        return 0.0

    def route_strip(self, f) -> MellinStrip:
        """Strip where both the multiplier and f*(s + shift) exist."""
        return self.strip().intersect(f.mellin_strip.shifted(self.shift))


def _check_mode(spec: MultiplierSpec) -> None:
    from density import Kind
    tag, p = spec.tag, spec.params
    if tag in HYPER_SECOND + HYPER_FIRST:
        want_kind = Kind.SECOND_KIND if tag in HYPER_SECOND else Kind.FIRST_KIND
        if p.kind != want_kind:
            raise ParameterError(f"{tag.name} needs a {want_kind.name} kernel, got {p.kind.name}")
        mode = p.hyper.mode
        if tag in (MultiplierTag.HYPER_2_ARGX, MultiplierTag.HYPER_1_ARGX) and mode != ArgMode.ARG_X:
            raise ParameterError(f"{tag.name} needs mode ARG_X, got {mode.name}")
        if tag in (MultiplierTag.HYPER_2_ARG1MX, MultiplierTag.HYPER_1_ARG1MX) and mode != ArgMode.ARG_ONE_MINUS_X:
            raise ParameterError(f"{tag.name} needs mode ARG_ONE_MINUS_X, got {mode.name}")


def _hyper_closed_form(hp, z: complex, extra: complex) -> complex:
    """(Gamma(alpha)/C) Gamma(z)/Gamma(alpha+z) p+1Fq+1(upper, extra; lower, alpha+z; a)."""
    from density import hyper_norm_const
    h = hp.hyper
    const = hyper_norm_const(hp)
    series = pfq_complex(h.upper + (extra,), h.lower + (hp.alpha + z,), h.scale).value
    return math.gamma(hp.alpha) / const * complex_gamma_ratio([z], [hp.alpha + z]) * series


def multiplier(spec: MultiplierSpec, s: Number) -> Tuple[complex, float]:
    """
    The factor an operator applies to f*(s + shift), and that shift.

    Kober tags are for the bare operator value; hyper tags for the normalized
    density; RATIO_GENERIC returns f1*(2 - s).

    Raises:
        StripError: Re(s) outside the multiplier's strip.
    """
    s = as_complex(s)
    strip = spec.strip()
    if not strip.contains(s.real):
        raise StripError(f"s={s}: outside the {spec.tag.name} strip {strip}")
    tag, p = spec.tag, spec.params
    if tag == MultiplierTag.KOBER_2:
        return complex_gamma_ratio([p.zeta + s], [p.alpha + p.zeta + s]), 0.0
    if tag == MultiplierTag.KOBER_1:
        return complex_gamma_ratio([p.zeta + 1 - s], [p.alpha + p.zeta + 1 - s]), 0.0
    if tag == MultiplierTag.HYPER_2_ARGX:
        z = p.zeta + s
        return _hyper_closed_form(p, z, z), 0.0
    if tag == MultiplierTag.HYPER_2_ARG1MX:
        return _hyper_closed_form(p, p.zeta + s, p.alpha), 0.0
    if tag == MultiplierTag.HYPER_1_ARGX:
        z = p.zeta + 1 - s
        return _hyper_closed_form(p, z, z), 0.0
    if tag == MultiplierTag.HYPER_1_ARG1MX:
        return _hyper_closed_form(p, p.zeta + 1 - s, p.alpha), 0.0
    if tag in (MultiplierTag.HYPER_2_SERIES, MultiplierTag.HYPER_1_SERIES):
        from density import HyperDensity
        kernel = HyperDensity(p)
        point = s if tag == MultiplierTag.HYPER_2_SERIES else 2 - s
        return kernel.mellin(point), 0.0
    if tag == MultiplierTag.RL_LEFT:
        return complex_gamma_ratio([1 - p.alpha - s], [1 - s]), spec.shift
    if tag == MultiplierTag.WEYL_PRODUCT:
        return complex_gamma_ratio([s], [p.alpha + s]), spec.shift
    return complex(p.mellin(2 - s)), 0.0


def operator_function(spec: MultiplierSpec, f):
    """
    The operator output u -> value as a TestFunction, in the convention the
    multiplier is written for. Origin and decay hints keep mellin_numeric accurate.
    """
    from density import Decay, TestFunction, as_density
    from operators import classical, convolution, hypergeometric, kober

    tag, p = spec.tag, spec.params
    if tag == MultiplierTag.KOBER_2:
        return TestFunction(f"K[{f.name}]", lambda u: kober.kober_second(f, p, u).bare,
                            decay=f.decay, origin_exponent=min(p.zeta, 0.0))
    if tag == MultiplierTag.KOBER_1:
        return TestFunction(f"I[{f.name}]", lambda u: kober.kober_first(f, p, u).bare,
                            decay=Decay.power_law(p.zeta + 1.0), origin_exponent=f.origin_exponent)
    if tag in HYPER_SECOND:
        return TestFunction(f"H2[{f.name}]", lambda u: hypergeometric.hyper_second(f, p, u).value,
                            decay=f.decay, origin_exponent=min(p.zeta, 0.0))
    if tag in HYPER_FIRST:
        return TestFunction(f"H1[{f.name}]", lambda u: hypergeometric.hyper_first(f, p, u).value,
                            decay=Decay.power_law(p.zeta + 1.0), origin_exponent=f.origin_exponent)
    if tag == MultiplierTag.RL_LEFT:
        g = f.times_power(-p.alpha) if p.premultiplied else f
        return TestFunction(f"D[{g.name}]", lambda u: classical.rl_left(g, p.alpha, u).value,
                            decay=Decay.power_law(1.0 - p.alpha),
                            origin_exponent=g.origin_exponent + p.alpha)
    if tag == MultiplierTag.WEYL_PRODUCT:
        return TestFunction(f"W[{f.name}]", lambda u: classical.weyl_right(f, p.alpha, u).value,
                            decay=f.decay)
    kernel = as_density(p)
    return TestFunction(f"ratio[{kernel.name},{f.name}]",
                        lambda u: convolution.ratio_density(kernel, f, u).value,
                        decay=Decay.power_law(kernel.origin_exponent + 2.0),
                        origin_exponent=f.origin_exponent)


@dataclass
class MultiplierReport:
    tag: str
    function: str
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def max_rel_error(self) -> float:
        return max((row['rel_error'] for row in self.rows), default=0.0)

    def passed(self, tol: float = 1e-6) -> bool:
        return self.max_rel_error < tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            'tag': self.tag,
            'function': self.function,
            'points': self.rows,
            'max_rel_error': self.max_rel_error,
        }


def verify_multiplier(spec: MultiplierSpec, f, points: Sequence[Number]) -> MultiplierReport:
    """
    Compare the numeric Mellin transform of the operator output with
    multiplier(spec, s) * f*(s + shift) at each point.
    """
    g = operator_function(spec, f)
    report = MultiplierReport(spec.tag.name, f.name)
    for point in points:
        s = as_complex(point)
        try:
            factor, shift = multiplier(spec, s)
            predicted = factor * f.mellin(s + shift)
            numeric = mellin_numeric(g, s, check_strip=False)
        except KoberError as e:
            if f"s={s}" in str(e):
                raise
            raise type(e)(f"s={s}: {e}") from e
        rel = abs(numeric - predicted) / max(abs(predicted), 1e-300)
        report.rows.append({
            's_re': s.real, 's_im': s.imag,
            'numeric_re': numeric.real, 'numeric_im': numeric.imag,
            'predicted_re': predicted.real, 'predicted_im': predicted.imag,
            'rel_error': rel,
        })
        logger.debug("%s at s=%s: numeric %s, predicted %s", spec.tag.name, s, numeric, predicted)
    return report


def inverse_mellin(Fstar: Callable[[complex], complex], c: float, u: float,
                   H: Optional[float] = None, tol: Optional[float] = None,
                   h_max: Optional[float] = None) -> float:
    """
    (1/2 pi) times the integral of Fstar(c+iy) u^-(c+iy) over -H < y < H.

    Fstar is taken to be the transform of a real function, so only y > 0 is
    integrated. Without H, panels of width 25 are added until one contributes
    less than tol.

    Raises:
        TruncationError: the panels still contribute at h_max.
    """
    if not u > 0:
        raise ParameterError(f"inverse Mellin needs u > 0, got {u}")
    tol = config.INVERSE_TOL if tol is None else tol
    h_max = config.INVERSE_H_MAX if h_max is None else h_max
    log_u = math.log(u)

    def integrand(y):
        z = complex(c, y)
        return (as_complex(Fstar(z)) * np.exp(-z * log_u)).real / math.pi

    def panel(a, b):
        return quad_piece(integrand, a, b, label='inverse_mellin').value

    if H is not None:
        edges = np.arange(0.0, H, CONTOUR_PANEL).tolist() + [H]
        return sum(panel(a, b) for a, b in zip(edges[:-1], edges[1:]))

    total = 0.0
    height = 0.0
    while True:
        contribution = panel(height, height + CONTOUR_PANEL)
        total += contribution
        height += CONTOUR_PANEL
        if height > CONTOUR_PANEL and abs(contribution) < tol:
            return total
        if height >= h_max:
            raise TruncationError(
                f"u={u:g}: contour contribution {abs(contribution):.2g} still above {tol:g} at height {height:g}")
