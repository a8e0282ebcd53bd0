"""Command-line front end: ``qwalk {regime,stationary,simulate,limit,sweep}``.

Exit status: 0 success, 1 usage or input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from .coin import (
    REGIME_EPS,
    Coin,
    Region,
    RegimeParams,
    WalkConfig,
    hadamard,
    make_coin,
    regime_for_xi,
    rotation,
    xi_from_theta,
)
from .dynamics import (
    DEFAULT_T_MAX,
    DEFAULT_TOL,
    MAX_DENSE_SITES,
    eigen_residual,
    empirical_distribution,
    run_until_stationary,
    solve_fixed_point,
)
from .errors import NumericalFailure, QWalkError
from .export import coin_metadata, csv_text, json_text, render_profile, render_sweep
from .limits import (
    FixedXi,
    LawKind,
    LimitLaw,
    ThetaStarOverM,
    convergence_sweep,
    limit_cdf,
    limit_density,
    select_limit_law,
)
from .stationary import stationary_distribution

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

_LAW_NAMES = {
    "pointmass": LawKind.POINT_MASS,
    "cubic": LawKind.CUBIC,
    "sine": LawKind.SINE_SQUARED,
    "uniform": LawKind.UNIFORM,
    "geometric": LawKind.GEOMETRIC,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def parse_coin(spec: str | None, entries: list[float] | None) -> Coin:
    """Coin from a preset (``hadamard``, ``rot:<angle>``) or eight floats."""
    if entries is not None:
        a, b, c, d = (complex(entries[i], entries[i + 1]) for i in range(0, 8, 2))
        return make_coin(a, b, c, d)
    spec = spec or "hadamard"
    if spec == "hadamard":
        return hadamard()
    if spec.startswith("rot:"):
        try:
            angle = float(spec[4:])
        except ValueError:
            raise _UsageError(f"bad rotation angle in --coin {spec!r}") from None
        return rotation(angle)
    raise _UsageError(f"unknown coin preset {spec!r} (use hadamard or rot:<radians>)")


def _add_coin_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--coin", default=None, help="preset: hadamard (default) or rot:<radians>")
    g.add_argument(
        "--entries",
        type=float,
        nargs=8,
        metavar="V",
        help="coin entries as a_re a_im b_re b_im c_re c_im d_re d_im",
    )
    p.add_argument("--eps", type=float, default=REGIME_EPS, help="regime classification tolerance")


def _add_freq_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--xi", type=float, help="inflow frequency in radians")
    g.add_argument("--theta-star", type=float, help="set theta = theta_star / M (Bin)")
    p.add_argument("--branch", type=int, choices=(1, -1), default=1, help="sign of cos(omega) for --theta-star")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwalk", description="Driven quantum walk on a finite path.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("regime", help="print omega, region, theta, lambda")
    _add_coin_args(p)
    _add_freq_args(p)
    p.add_argument("--M", type=int, default=None, help="path length (needed with --theta-star)")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("stationary", help="closed-form stationary profile")
    _add_coin_args(p)
    _add_freq_args(p)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--no-law", action="store_true", help="leave F_limit/abs_diff empty")
    _add_output_args(p)

    p = sub.add_parser("simulate", help="time evolution and direct solve vs closed form")
    _add_coin_args(p)
    _add_freq_args(p)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--t-max", type=int, default=DEFAULT_T_MAX)
    p.add_argument("--no-law", action="store_true")
    _add_output_args(p)

    p = sub.add_parser("limit", help="tabulate a limit law")
    p.add_argument("--law", choices=sorted(_LAW_NAMES), required=True)
    p.add_argument("--theta-star", type=float, default=None)
    p.add_argument("--lambda-plus", type=float, default=None)
    p.add_argument("--points", type=int, default=101, help="grid size on [0,1], or sites for geometric")
    _add_output_args(p)

    p = sub.add_parser("sweep", help="KS distance to the limit law over a list of M")
    _add_coin_args(p)
    _add_freq_args(p)
    p.add_argument("--M-list", required=True, help="comma-separated increasing path lengths")
    _add_output_args(p)
    return parser


def _check_M(M: int | None) -> None:
    if M is not None and M < 1:
        raise _UsageError(f"--M must be >= 1, got {M}")


def _resolve_xi(args, coin: Coin, M: int | None) -> float:
    if args.xi is not None:
        return args.xi
    if M is None:
        raise _UsageError("--theta-star needs --M")
    theta = args.theta_star / M
    if not 0.0 < theta <= math.pi / 2:
        raise _UsageError(f"theta_star/M = {theta!r} must lie in (0, pi/2]")
    return xi_from_theta(coin, theta, args.branch)


def _scaling(args, xi: float):
    if args.theta_star is not None:
        return ThetaStarOverM(args.theta_star, args.branch)
    return FixedXi(xi)


def _regime(args, coin: Coin, xi: float) -> RegimeParams:
    regime = regime_for_xi(coin, xi, args.eps)
    if args.theta_star is not None:
        regime = replace(regime, theta_star=args.theta_star)
    return regime


def _metadata(coin: Coin, regime: RegimeParams, extra: dict | None = None) -> dict:
    meta = {
        "coin": coin_metadata(coin),
        "xi": regime.xi,
        "theta_star": regime.theta_star,
        "omega": regime.omega,
        "regime": regime.region.value,
    }
    if extra:
        meta.update(extra)
    return meta


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _law_for(args, regime: RegimeParams) -> LimitLaw | None:
    if args.no_law:
        return None
    axis = "sites" if regime.region is Region.BOUT else "scaled"
    return select_limit_law(regime, _scaling(args, regime.xi), axis=axis)


def _cmd_regime(args) -> int:
    coin = parse_coin(args.coin, args.entries)
    _check_M(args.M)
    xi = _resolve_xi(args, coin, args.M)
    r = _regime(args, coin, xi)
    fields = {
        "xi": r.xi,
        "omega": r.omega,
        "region": r.region.value,
        "theta": r.theta,
        "theta_star": r.theta_star,
        "lambda_plus": r.lambda_plus,
        "lambda_minus": r.lambda_minus,
    }
    if args.format == "json":
        sys.stdout.write(json.dumps(fields, indent=2) + "\n")
    else:
        for k, v in fields.items():
            if v is not None:
                sys.stdout.write(f"{k}={v if isinstance(v, str) else repr(float(v))}\n")
    return EXIT_OK


def _cmd_stationary(args) -> int:
    coin = parse_coin(args.coin, args.entries)
    _check_M(args.M)
    xi = _resolve_xi(args, coin, args.M)
    regime = _regime(args, coin, xi)
    profile = stationary_distribution(args.M, coin, regime.omega, args.eps)
    meta = _metadata(coin, regime, {"source": "closed_form"})
    _emit(render_profile(profile, _law_for(args, regime), args.format, meta), args.output)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    coin = parse_coin(args.coin, args.entries)
    _check_M(args.M)
    xi = _resolve_xi(args, coin, args.M)
    regime = _regime(args, coin, xi)
    cfg = WalkConfig(args.M, coin, xi)
    phi, residual, t = run_until_stationary(cfg, args.tol, args.t_max)
    empirical = empirical_distribution(phi)
    closed = stationary_distribution(args.M, coin, regime.omega, args.eps)
    report = {
        "steps": t,
        "iteration_residual": residual,
        "iteration_eigen_residual": eigen_residual(phi, cfg),
        "max_rel_site_diff": float(np.max(np.abs(empirical.site_norm_sq / closed.site_norm_sq - 1.0))),
        "rel_comfortability_diff": abs(empirical.comfortability / closed.comfortability - 1.0),
    }
    if args.M <= MAX_DENSE_SITES:
        solved = solve_fixed_point(cfg)
        report["solve_eigen_residual"] = eigen_residual(solved, cfg)
        report["max_iteration_solve_diff"] = float(np.max(np.abs(phi - solved)))
    meta = _metadata(coin, regime, {"source": "dynamics", **report})
    if args.output is not None:
        _emit(render_profile(empirical, _law_for(args, regime), args.format, meta), args.output)
    for k, v in report.items():
        sys.stdout.write(f"{k}={v!r}\n")
    return EXIT_OK


def _cmd_limit(args) -> int:
    kind = _LAW_NAMES[args.law]
    law = LimitLaw(kind, theta_star=args.theta_star, lambda_plus=args.lambda_plus)
    if args.points < 1:
        raise _UsageError("--points must be >= 1")
    if kind is LawKind.GEOMETRIC:
        xs = np.arange(args.points, dtype=np.float64)
        inv2 = law.lambda_plus**-2.0
        dens = (1.0 - inv2) * inv2**xs
    else:
        xs = np.linspace(0.0, 1.0, args.points) if args.points > 1 else np.zeros(1)
        dens = None if kind is LawKind.POINT_MASS else limit_density(law, xs)
    cdf = np.atleast_1d(limit_cdf(law, xs))
    if args.format == "csv":
        dens_col = [None] * len(xs) if dens is None else dens
        text = csv_text(("x", "density", "cdf"), zip(xs, dens_col, cdf))
    else:
        text = json_text({
            "law": law.to_dict(),
            "x": [float(v) for v in xs],
            "density": None if dens is None else [float(v) for v in dens],
            "cdf": [float(v) for v in cdf],
        })
    _emit(text, args.output)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    coin = parse_coin(args.coin, args.entries)
    try:
        M_list = [int(s) for s in args.M_list.split(",") if s.strip()]
    except ValueError:
        raise _UsageError(f"bad --M-list {args.M_list!r}") from None
    if not M_list:
        raise _UsageError("--M-list is empty")
    for m in M_list:
        _check_M(m)
    scaling = ThetaStarOverM(args.theta_star, args.branch) if args.theta_star is not None else FixedXi(args.xi)
    rows = convergence_sweep(coin, scaling, M_list, args.eps)
    _emit(render_sweep(rows, args.format), args.output)
    return EXIT_OK


_COMMANDS = {
    "regime": _cmd_regime,
    "stationary": _cmd_stationary,
    "simulate": _cmd_simulate,
    "limit": _cmd_limit,
    "sweep": _cmd_sweep,
}


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except NumericalFailure as exc:
        sys.stderr.write(f"qwalk: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except (QWalkError, ValueError) as exc:
        sys.stderr.write(f"{parser.format_usage()}qwalk: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"qwalk: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    raise SystemExit(run_cli())
