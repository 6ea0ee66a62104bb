#!/usr/bin/env python3
"""
Command line front end.

    eval OPERATOR        operator values on a u grid (CSV u,value,abs_err)
    mellin-check OPERATOR numeric Mellin transform of the output vs the multiplier (JSON)
    mc-verify THEOREM    Monte Carlo KS verification (JSON)
    sweep-q OPERATOR     pathway operator across a q grid (CSV q,u,value)
    reduce-check         reduction identities between the operator families (JSON)
    list                 registered functions, operators and theorems

Exit status: 0 ok, 1 verification failed, 2 invalid input, 3 numerical failure.
"""

import sys
import json
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

import config
from density import Kind, PathwayParams
from errors import DomainError, KoberError, ParameterError
from function_registry import function_registry
from mellin import MultiplierSpec, MultiplierTag, OrderParams, verify_multiplier
from monitoring.metrics import metrics_service
from monitoring.reduction_checks import reduction_check_service
from operators import classical, hypergeometric, kober, pathway
from operators.convolution import OperatorResult, product_density, ratio_density
from special_fn import ArgMode
from stochastic import TheoremId, hyper_params_from, verify_theorem

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

OPERATORS = ('kober2', 'kober1', 'pathway2', 'pathway1', 'hyper2', 'hyper1', 'saigo2', 'saigo1',
             'kratzel', 'weyl', 'rl', 'product', 'ratio')
MELLIN_OPERATORS = ('kober2', 'kober1', 'hyper2', 'hyper1', 'rl', 'weyl', 'ratio')
SWEEP_OPERATORS = ('pathway2', 'pathway1')

# options whose values may start with '-'
_GRID_OPTIONS = ('--grid', '--q')


class Command(Enum):
    EVAL = 'eval'
    MELLIN_CHECK = 'mellin-check'
    MC_VERIFY = 'mc-verify'
    SWEEP_Q = 'sweep-q'
    REDUCE_CHECK = 'reduce-check'
    LIST = 'list'


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.count < 2:
            raise ParameterError(f"grid count must be at least 2, got {self.count}")
        if not self.lo < self.hi:
            raise ParameterError(f"grid needs min < max, got {self.lo:g}:{self.hi:g}")
        if self.log and not self.lo > 0:
            raise ParameterError("a log grid needs min > 0")

    @classmethod
    def parse(cls, text: str) -> 'GridSpec':
        """min:max:count[:log]"""
        parts = text.split(':')
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ('log', 'lin')):
            raise ParameterError(f"grid '{text}' is not min:max:count[:log]")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]), len(parts) == 4 and parts[3] == 'log')
        except ValueError:
            raise ParameterError(f"grid '{text}' has a non-numeric field")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


def parse_step_grid(text: str) -> np.ndarray:
    """start:step:stop, stop included when it falls on the grid."""
    try:
        start, step, stop = (float(v) for v in text.split(':'))
    except ValueError:
        raise ParameterError(f"grid '{text}' is not start:step:stop")
    if not (step > 0 and stop > start):
        raise ParameterError(f"grid '{text}' needs step > 0 and stop > start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    if count < 2:
        raise ParameterError(f"grid '{text}' has fewer than 2 points")
    return start + step * np.arange(count)


def parse_numbers(text: Optional[str]) -> List[float]:
    if not text:
        return []
    try:
        return [float(v) for v in text.split(',')]
    except ValueError:
        raise ParameterError(f"cannot parse the number list '{text}'")


def parse_points(text: str) -> List[complex]:
    try:
        return [complex(v.strip().replace(' ', '')) for v in text.split(',')]
    except ValueError:
        raise ParameterError(f"cannot parse the point list '{text}'")


@dataclass
class RunConfig:
    """Everything one invocation needs; built from argv by config_from_args."""
    command: Command
    operator: Optional[str] = None
    function: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)
    grid: Optional[GridSpec] = None
    out: Optional[str] = None
    seed: int = 0
    epsabs: float = config.QUAD_EPSABS
    epsrel: float = config.QUAD_EPSREL
    threads: int = config.THREADS
    bare: bool = False
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not (self.epsabs > 0 and self.epsrel > 0):
            raise ParameterError(f"tolerances must be positive, got epsabs={self.epsabs}, epsrel={self.epsrel}")
        if self.threads < 1:
            raise ParameterError(f"threads must be at least 1, got {self.threads}")

    @property
    def tolerances(self) -> Dict[str, float]:
        return {'epsabs': self.epsabs, 'epsrel': self.epsrel}


# ---------------------------------------------------------------------------
# Operator construction
# ---------------------------------------------------------------------------

def _require(params: Dict[str, Any], operator: str, *names: str) -> List[Any]:
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise ParameterError(f"{operator} needs " + ', '.join('--' + n for n in missing))
    return [params[n] for n in names]


def _kober(params, operator) -> kober.KoberParams:
    return kober.KoberParams(*_require(params, operator, 'zeta', 'alpha'))


def _pathway(params, operator) -> PathwayParams:
    return PathwayParams(*_require(params, operator, 'gamma', 'delta', 'eta', 'a', 'q'))


def _hyper(params, operator, kind: Kind):
    _require(params, operator, 'zeta', 'alpha')
    return hyper_params_from(params, kind)


def _saigo(params, operator, kind: Kind):
    zeta, alpha, scale = _require(params, operator, 'zeta', 'alpha', 'scale')
    upper, lower = params.get('upper') or [], params.get('lower') or []
    if len(upper) != 2 or len(lower) != 1:
        raise ParameterError(f"{operator} needs --upper a,b and --lower c")
    return hypergeometric.saigo_params(upper[0], upper[1], lower[0], scale, zeta, alpha, kind)


def build_operator(name: str, params: Dict[str, Any], f, kernel=None,
                   tolerances: Optional[Dict[str, float]] = None) -> Callable[[float], OperatorResult]:
    """u -> OperatorResult for one of OPERATORS."""
    tol = tolerances or {}
    if name == 'kober2':
        p = _kober(params, name)
        return lambda u: kober.kober_second(f, p, u, **tol)
    if name == 'kober1':
        p = _kober(params, name)
        return lambda u: kober.kober_first(f, p, u, **tol)
    if name == 'pathway2':
        p = _pathway(params, name)
        return lambda u: pathway.pathway_second(f, p, u, **tol)
    if name == 'pathway1':
        p = _pathway(params, name)
        return lambda u: pathway.pathway_first(f, p, u, **tol)
    if name in ('hyper2', 'saigo2'):
        hp = _hyper(params, name, Kind.SECOND_KIND) if name == 'hyper2' else _saigo(params, name, Kind.SECOND_KIND)
        return lambda u: hypergeometric.hyper_second(f, hp, u, **tol)
    if name in ('hyper1', 'saigo1'):
        hp = _hyper(params, name, Kind.FIRST_KIND) if name == 'hyper1' else _saigo(params, name, Kind.FIRST_KIND)
        return lambda u: hypergeometric.hyper_first(f, hp, u, **tol)
    if name == 'kratzel':
        gamma, delta, a, eta = _require(params, name, 'gamma', 'delta', 'a', 'eta')
        return lambda u: pathway.kratzel_operator(f, gamma, delta, a, eta, u, **tol)
    if name == 'weyl':
        alpha, = _require(params, name, 'alpha')
        return lambda u: classical.weyl_right(f, alpha, u, **tol)
    if name == 'rl':
        alpha, = _require(params, name, 'alpha')
        return lambda u: classical.rl_left(f, alpha, u, **tol)
    if kernel is None:
        raise ParameterError(f"{name} needs --f1 (the x1 density)")
    if name == 'product':
        shift = params.get('shift') or 0.0
        return lambda u: product_density(kernel, f, u, shift=shift, **tol)
    if name == 'ratio':
        return lambda u: ratio_density(kernel, f, u, **tol)
    raise ParameterError(f"unknown operator '{name}'")


def multiplier_spec(name: str, params: Dict[str, Any], kernel=None, series: bool = False,
                    premultiplied: bool = False) -> MultiplierSpec:
    if name == 'kober2':
        return MultiplierSpec(MultiplierTag.KOBER_2, _kober(params, name))
    if name == 'kober1':
        return MultiplierSpec(MultiplierTag.KOBER_1, _kober(params, name))
    if name in ('hyper2', 'hyper1'):
        second = name == 'hyper2'
        hp = _hyper(params, name, Kind.SECOND_KIND if second else Kind.FIRST_KIND)
        if series or hp.hyper.mode not in (ArgMode.ARG_X, ArgMode.ARG_ONE_MINUS_X):
            tag = MultiplierTag.HYPER_2_SERIES if second else MultiplierTag.HYPER_1_SERIES
        elif hp.hyper.mode == ArgMode.ARG_X:
            tag = MultiplierTag.HYPER_2_ARGX if second else MultiplierTag.HYPER_1_ARGX
        else:
            tag = MultiplierTag.HYPER_2_ARG1MX if second else MultiplierTag.HYPER_1_ARG1MX
        return MultiplierSpec(tag, hp)
    if name in ('rl', 'weyl'):
        alpha, = _require(params, name, 'alpha')
        tag = MultiplierTag.RL_LEFT if name == 'rl' else MultiplierTag.WEYL_PRODUCT
        return MultiplierSpec(tag, OrderParams(alpha, premultiplied))
    if name == 'ratio':
        if kernel is None:
            raise ParameterError("ratio needs --f1 (the x1 density)")
        return MultiplierSpec(MultiplierTag.RATIO_GENERIC, kernel)
    raise ParameterError(f"no Mellin multiplier for '{name}'")


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, 'w', newline='') as handle:
            handle.write(text)
        logger.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def write_csv(frame: pd.DataFrame, out: Optional[str]) -> None:
    _emit(frame.to_csv(index=False, float_format='%.17g', lineterminator='\n'), out)


def write_json(payload: Dict[str, Any], out: Optional[str]) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + '\n', out)


def _parallel(func, items: Sequence, threads: int) -> List:
    if threads == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _function(cfg: RunConfig):
    if not cfg.function:
        raise ParameterError(f"{cfg.command.value} needs --f")
    return function_registry.function(cfg.function)


def _kernel(cfg: RunConfig):
    name = cfg.options.get('kernel')
    return function_registry.density(name) if name else None


def run_eval(cfg: RunConfig) -> int:
    if cfg.grid is None:
        raise ParameterError("eval needs --grid min:max:count[:log]")
    operator = build_operator(cfg.operator, cfg.params, _function(cfg), _kernel(cfg), cfg.tolerances)

    def point(u):
        try:
            result = operator(float(u))
        except KoberError as e:
            raise type(e)(f"u={u:.17g}: {e}") from e
        if cfg.bare:
            return u, result.bare, result.bare_error
        return u, result.value, result.abs_error_estimate

    rows = _parallel(point, list(cfg.grid.values()), cfg.threads)
    write_csv(pd.DataFrame(rows, columns=['u', 'value', 'abs_err']), cfg.out)
    return EXIT_OK


def run_mellin_check(cfg: RunConfig) -> int:
    f = _function(cfg)
    spec = multiplier_spec(cfg.operator, cfg.params, _kernel(cfg), cfg.options.get('series', False),
                           cfg.options.get('premultiplied', False))
    points = cfg.options.get('points')
    if not points:
        c = spec.route_strip(f).abscissa()
        points = [complex(c, 0.0), complex(c, 0.5)]
    report = verify_multiplier(spec, f, points)
    tol = cfg.options.get('tol', 1e-6)
    passed = report.passed(tol)
    payload = report.to_dict()
    payload.update({'tolerance': tol, 'pass': passed})
    write_json(payload, cfg.out)
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def run_mc_verify(cfg: RunConfig) -> int:
    try:
        theorem = TheoremId(cfg.operator)
    except ValueError:
        raise ParameterError(f"unknown theorem '{cfg.operator}'")
    if not cfg.function:
        raise ParameterError("mc-verify needs --f (a registered density)")
    try:
        f = function_registry.density(cfg.function)
    except DomainError as e:
        raise ParameterError(str(e)) from e
    report = verify_theorem(theorem, cfg.params, f, cfg.options.get('n', 100000), cfg.seed,
                            constant=cfg.options.get('constant'))
    _emit(report.to_json(), cfg.out)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def run_sweep_q(cfg: RunConfig) -> int:
    if cfg.operator not in SWEEP_OPERATORS:
        raise ParameterError(f"sweep-q works on {', '.join(SWEEP_OPERATORS)}, got '{cfg.operator}'")
    q_values = cfg.options.get('q_grid')
    u_values = cfg.options.get('u_values')
    if q_values is None or not u_values:
        raise ParameterError("sweep-q needs --q start:step:stop and --u")
    f = _function(cfg)
    points = [(float(q), float(u)) for q in q_values for u in u_values]

    def point(item):
        q, u = item
        params = dict(cfg.params, q=q)
        try:
            result = build_operator(cfg.operator, params, f, tolerances=cfg.tolerances)(u)
        except KoberError as e:
            raise type(e)(f"q={q:.17g}, u={u:.17g}: {e}") from e
        return q, u, result.bare if cfg.bare else result.value

    rows = _parallel(point, points, cfg.threads)
    write_csv(pd.DataFrame(rows, columns=['q', 'u', 'value']), cfg.out)
    return EXIT_OK


def run_reduce_check(cfg: RunConfig) -> int:
    result = reduction_check_service.run_all_checks()
    write_json(result, cfg.out)
    return EXIT_OK if result['status'] == 'pass' else EXIT_VERIFICATION_FAILED


def run_list(cfg: RunConfig) -> int:
    functions = pd.DataFrame(function_registry.describe())
    text = ['Functions and densities (parametric families: gamma:K, beta1:L,A, '
            'pathway:g=..,d=..,e=..,a=..,q=..[,kind=1], power:P, monomial:P)',
            functions.to_string(index=False), '',
            'Operators: ' + ', '.join(OPERATORS),
            'Mellin checks: ' + ', '.join(MELLIN_OPERATORS),
            'Theorems: ' + ', '.join(t.value for t in TheoremId), '']
    _emit('\n'.join(text), cfg.out)
    return EXIT_OK


HANDLERS = {
    Command.EVAL: run_eval,
    Command.MELLIN_CHECK: run_mellin_check,
    Command.MC_VERIFY: run_mc_verify,
    Command.SWEEP_Q: run_sweep_q,
    Command.REDUCE_CHECK: run_reduce_check,
    Command.LIST: run_list,
}


def run(cfg: RunConfig) -> int:
    logger.info("running %s %s", cfg.command.value, cfg.operator or '')
    return HANDLERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', '-o', help='output file (default: stdout)')
    common.add_argument('--seed', type=int, default=0, help='random seed')
    common.add_argument('--epsabs', type=float, default=config.QUAD_EPSABS, help='absolute quadrature tolerance')
    common.add_argument('--epsrel', type=float, default=config.QUAD_EPSREL, help='relative quadrature tolerance')
    common.add_argument('--threads', type=int, default=config.THREADS, help='worker threads (KOBER_THREADS)')
    common.add_argument('--metrics-out', help='write Prometheus metrics here after the run')
    common.add_argument('--verbose', '-v', action='store_true', help='debug logging')
    convention = common.add_mutually_exclusive_group()
    convention.add_argument('--bare', dest='bare', action='store_true', help='bare operator values')
    convention.add_argument('--density', dest='bare', action='store_false',
                            help='density-normalized values (default)')
    return common


def _add_operator_params(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('operator parameters')
    for name in ('zeta', 'alpha', 'gamma', 'delta', 'eta', 'a', 'q', 'scale', 'shift'):
        if name == 'q' and parser.prog.endswith('sweep-q'):
            continue
        group.add_argument(f'--{name}', type=float)
    group.add_argument('--upper', help='comma-separated upper hypergeometric parameters')
    group.add_argument('--lower', help='comma-separated lower hypergeometric parameters')
    group.add_argument('--mode', choices=[m.name for m in ArgMode], default=ArgMode.ARG_X.name,
                       help='hypergeometric argument mode')
    group.add_argument('--exponents', help='d1,d2,d3 for the power argument modes')
    parser.add_argument('--f', dest='function', help='input function or density name')
    parser.add_argument('--f1', dest='kernel', help='x1 density for product/ratio')


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(description='Erdelyi-Kober fractional integral toolkit')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('eval', parents=[common], help='evaluate an operator on a u grid')
    p.add_argument('operator', choices=OPERATORS)
    p.add_argument('--grid', help='min:max:count[:log]')
    _add_operator_params(p)

    p = sub.add_parser('mellin-check', parents=[common], help='compare Mellin transforms with the multiplier')
    p.add_argument('operator', choices=MELLIN_OPERATORS)
    p.add_argument('--points', help='comma-separated complex s values, e.g. 1.5,1.5+0.5j')
    p.add_argument('--series', action='store_true', help='use the series form for hyper operators')
    p.add_argument('--premultiplied', action='store_true', help='RL applied to x^-alpha f')
    p.add_argument('--tol', type=float, default=1e-6, help='relative tolerance for pass')
    _add_operator_params(p)

    p = sub.add_parser('mc-verify', parents=[common], help='Monte Carlo verification of a theorem')
    p.add_argument('operator', metavar='theorem', choices=[t.value for t in TheoremId])
    p.add_argument('--n', type=int, default=100000, help='sample size')
    p.add_argument('--constant', type=float, help='override the theorem constant')
    _add_operator_params(p)

    p = sub.add_parser('sweep-q', parents=[common], help='sweep the pathway parameter q')
    p.add_argument('operator', choices=SWEEP_OPERATORS)
    p.add_argument('--q', dest='q_grid', required=True, help='start:step:stop')
    p.add_argument('--u', required=True, help='comma-separated u values')
    _add_operator_params(p)

    sub.add_parser('reduce-check', parents=[common], help='run the reduction identities')
    sub.add_parser('list', parents=[common], help='list functions, operators and theorems')
    return parser


def _join_grid_values(argv: Sequence[str]) -> List[str]:
    """'--q -1:0.25:1.5' -> '--q=-1:0.25:1.5' so argparse does not read the value as an option."""
    joined, items = [], list(argv)
    i = 0
    while i < len(items):
        item = items[i]
        if item in _GRID_OPTIONS and i + 1 < len(items) and items[i + 1].startswith('-') and ':' in items[i + 1]:
            joined.append(f"{item}={items[i + 1]}")
            i += 2
            continue
        joined.append(item)
        i += 1
    return joined


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = Command(args.command)
    params: Dict[str, Any] = {}
    options: Dict[str, Any] = {}
    for name in ('zeta', 'alpha', 'gamma', 'delta', 'eta', 'a', 'q', 'scale', 'shift'):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    if getattr(args, 'upper', None) or getattr(args, 'lower', None):
        params['upper'] = parse_numbers(args.upper)
        params['lower'] = parse_numbers(args.lower)
    if getattr(args, 'operator', None) in ('hyper2', 'hyper1'):
        params['mode'] = args.mode
    if getattr(args, 'exponents', None):
        params['exponents'] = parse_numbers(args.exponents)
    if getattr(args, 'kernel', None):
        options['kernel'] = args.kernel
    grid = GridSpec.parse(args.grid) if getattr(args, 'grid', None) else None
    if command == Command.MELLIN_CHECK:
        options.update(series=args.series, premultiplied=args.premultiplied, tol=args.tol)
        if args.points:
            options['points'] = parse_points(args.points)
    if command == Command.MC_VERIFY:
        if args.n < 2:
            raise ParameterError(f"--n must be at least 2, got {args.n}")
        options['n'] = args.n
        if args.constant is not None:
            options['constant'] = args.constant
    if command == Command.SWEEP_Q:
        options['q_grid'] = parse_step_grid(args.q_grid)
        options['u_values'] = parse_numbers(args.u)
    return RunConfig(command=command, operator=getattr(args, 'operator', None),
                     function=getattr(args, 'function', None), params=params, grid=grid,
                     out=args.out, seed=args.seed, epsabs=args.epsabs, epsrel=args.epsrel,
                     threads=args.threads, bare=args.bare, options=options)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_join_grid_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else config.LOG_LEVEL,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        status = run(config_from_args(args))
    except ParameterError as e:
        logger.error("invalid input: %s", e)
        status = EXIT_INVALID
    except KoberError as e:
        logger.error("numerical failure: %s", e)
        status = EXIT_NUMERICAL
    if args.metrics_out:
        with open(args.metrics_out, 'wb') as handle:
            handle.write(metrics_service.get_metrics())
    return status


if __name__ == '__main__':
    sys.exit(main())
