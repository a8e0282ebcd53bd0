"""
Limit laws of the comfortability distribution and convergence diagnostics.

For the scaled position X_M / M the limit density on [0, 1] is

    Bout                         point mass at 0
    BoundaryB, or Bin, M*theta->0   3 (1-x)^2
    Bin, M*theta -> theta_*         c(theta_*) sin^2((1-x) theta_*)
    Bin, M*theta -> infinity        1

with c(t) = 2 / (1 - sin(2t)/(2t)). In Bout the unscaled site index
converges instead to the geometric law (1 - l^-2) l^(-2j), l = lambda_+.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from .coin import (
    REGIME_EPS,
    Coin,
    Region,
    RegimeParams,
    lambda_roots,
    regime_for_xi,
    xi_from_theta,
)
from .errors import InconsistentScaling, OutOfRegime, Unsupported
from .stationary import StationaryProfile, stationary_distribution

__all__ = [
    "LawKind",
    "LimitLaw",
    "FixedXi",
    "ThetaStarOverM",
    "SweepRow",
    "select_limit_law",
    "c_norm",
    "limit_density",
    "limit_cdf",
    "geometric_limit_pmf",
    "ks_distance",
    "konno_density",
    "convergence_sweep",
]


class LawKind(str, enum.Enum):
    POINT_MASS = "PointMass"
    CUBIC = "Cubic"
    SINE_SQUARED = "SineSquared"
    UNIFORM = "Uniform"
    GEOMETRIC = "Geometric"


@dataclass(frozen=True)
class LimitLaw:
    kind: LawKind
    theta_star: float | None = None
    lambda_plus: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", LawKind(self.kind))
        if self.kind is LawKind.SINE_SQUARED:
            if self.theta_star is None or not 0.0 < self.theta_star < math.inf:
                raise ValueError("SineSquared needs 0 < theta_star < inf")
        if self.kind is LawKind.GEOMETRIC:
            if self.lambda_plus is None or not abs(self.lambda_plus) > 1.0:
                raise ValueError("Geometric needs |lambda_plus| > 1")

    @property
    def on_site_axis(self) -> bool:
        """True when the law lives on the unscaled site index, not on n/M."""
        return self.kind is LawKind.GEOMETRIC

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "theta_star": self.theta_star, "lambda_plus": self.lambda_plus}

    @classmethod
    def from_dict(cls, data: dict) -> LimitLaw:
        return cls(LawKind(data["kind"]), data.get("theta_star"), data.get("lambda_plus"))


@dataclass(frozen=True)
class FixedXi:
    """Keep the inflow frequency fixed while M grows."""

    xi: float


@dataclass(frozen=True)
class ThetaStarOverM:
    """Tune xi with M so that theta = theta_star / M (Bin only)."""

    theta_star: float
    branch: int = 1


Scaling = Union[FixedXi, ThetaStarOverM]


@dataclass(frozen=True)
class SweepRow:
    M: int
    ks: float
    regime: Region
    theta_star_effective: float | None


def select_limit_law(regime: RegimeParams, scaling: Scaling, axis: str = "scaled") -> LimitLaw:
    """
    Pick the limit law for a regime under a given scaling protocol.

    ``axis="sites"`` asks for the unscaled Bout law (geometric); on the
    default scaled axis Bout degenerates to a point mass at 0.
    """
    if axis not in ("scaled", "sites"):
        raise ValueError("axis must be 'scaled' or 'sites'")
    if regime.region is Region.BOUNDARY:
        return LimitLaw(LawKind.CUBIC)
    if regime.region is Region.BOUT:
        if isinstance(scaling, ThetaStarOverM):
            raise InconsistentScaling("theta_star scaling is defined only for Bin frequencies")
        if axis == "sites":
            return LimitLaw(LawKind.GEOMETRIC, lambda_plus=regime.lambda_plus)
        return LimitLaw(LawKind.POINT_MASS)
    if isinstance(scaling, FixedXi):
        return LimitLaw(LawKind.UNIFORM)
    ts = scaling.theta_star
    if ts == 0.0:
        return LimitLaw(LawKind.CUBIC)
    if math.isinf(ts):
        return LimitLaw(LawKind.UNIFORM)
    if not ts > 0.0:
        raise InconsistentScaling(f"theta_star must be >= 0, got {ts!r}")
    return LimitLaw(LawKind.SINE_SQUARED, theta_star=ts)


def _one_minus_sinc(u: float) -> float:
    """1 - sin(u)/u without cancellation for small u."""
    if abs(u) < 0.5:
        u2 = u * u
        term, total = 1.0, 0.0
        for k in range(1, 10):
            term *= -u2 / ((2 * k) * (2 * k + 1))
            total -= term
        return total
    return 1.0 - math.sin(u) / u


def c_norm(theta_star: float) -> float:
    """Normalizer c(t) = 2 / (1 - sin(2t)/(2t)) of the sine-squared density."""
    if not theta_star > 0:
        raise ValueError("theta_star must be positive")
    return 2.0 / _one_minus_sinc(2.0 * theta_star)


def _sine_squared_cdf(theta_star: float, y):
    u = 2.0 * theta_star
    yc = np.clip(y, 0.0, 1.0)
    if u < 0.5:
        # y + sin(u(1-y))/u - sin(u)/u as a series; the order-0 terms cancel exactly
        w = 1.0 - yc
        u2 = u * u
        num = np.zeros_like(yc)
        coef = 1.0
        w_pow = w.copy()
        for k in range(1, 10):
            coef *= -u2 / ((2 * k) * (2 * k + 1))
            w_pow = w_pow * w * w
            num = num + coef * (w_pow - 1.0)
    else:
        num = yc + (np.sin(u * (1.0 - yc)) - math.sin(u)) / u
    return num / _one_minus_sinc(u)


def _scalar_or_array(values, like):
    return float(values) if np.ndim(like) == 0 else values


def limit_density(law: LimitLaw, x):
    """
    Density of a continuous limit law on the scaled axis; 0 outside [0, 1].

    Raises
    ------
    Unsupported
        For PointMass and Geometric, which have no pointwise density.
    """
    xa = np.asarray(x, dtype=np.float64)
    inside = (xa >= 0.0) & (xa <= 1.0)
    if law.kind is LawKind.CUBIC:
        vals = 3.0 * (1.0 - xa) ** 2
    elif law.kind is LawKind.UNIFORM:
        vals = np.ones_like(xa)
    elif law.kind is LawKind.SINE_SQUARED:
        vals = c_norm(law.theta_star) * np.sin((1.0 - xa) * law.theta_star) ** 2
    else:
        raise Unsupported(f"{law.kind.value} has no pointwise density")
    return _scalar_or_array(np.where(inside, vals, 0.0), x)


def limit_cdf(law: LimitLaw, y):
    """
    Cumulative distribution of a limit law.

    Geometric is evaluated on the unscaled site axis:
    1 - lambda_+^(-2(floor(y)+1)) for y >= 0.
    """
    ya = np.asarray(y, dtype=np.float64)
    kind = law.kind
    if kind is LawKind.POINT_MASS:
        vals = np.where(ya >= 0.0, 1.0, 0.0)
    elif kind is LawKind.CUBIC:
        yc = np.clip(ya, 0.0, 1.0)
        vals = 1.0 - (1.0 - yc) ** 3
    elif kind is LawKind.UNIFORM:
        vals = np.clip(ya, 0.0, 1.0)
    elif kind is LawKind.SINE_SQUARED:
        vals = _sine_squared_cdf(law.theta_star, ya)
    else:
        inv2 = law.lambda_plus ** -2.0
        jj = np.floor(np.maximum(ya, 0.0))
        vals = np.where(ya >= 0.0, -np.expm1((jj + 1.0) * math.log(inv2)), 0.0)
    return _scalar_or_array(vals, y)


def geometric_limit_pmf(coin: Coin, omega: float, j):
    """Bout site law (1 - l^-2) l^(-2j), l = lambda_+. Raises OutOfRegime elsewhere."""
    lam, _ = lambda_roots(coin, omega)
    jj = np.asarray(j)
    if np.any(jj < 0):
        raise ValueError("site index must be nonnegative")
    inv2 = lam**-2.0
    return _scalar_or_array((1.0 - inv2) * inv2**jj, j)


def ks_distance(profile: StationaryProfile, law: LimitLaw) -> float:
    """
    Exact sup-distance between the profile's step CDF and a limit CDF.

    On each interval [j/M, (j+1)/M) the step CDF is constant, so for a
    monotone limit CDF the sup is reached at the two endpoints (the right
    one as a left limit, which equals the value for every law here since
    none jumps at a positive n/M). Geometric compares on the site axis.
    """
    steps = profile.cdf
    M = profile.M
    if law.on_site_axis:
        ref = limit_cdf(law, np.arange(M, dtype=np.float64))
        return float(np.max(np.abs(steps - ref)))
    left = limit_cdf(law, np.arange(M) / M)
    right = limit_cdf(law, np.arange(1, M) / M)
    d = np.abs(steps - left)
    if M > 1:
        d = np.maximum(d, np.append(np.abs(steps[:-1] - right), 0.0))
    return float(min(1.0, np.max(d)))


def konno_density(coin: Coin, x):
    """
    Ballistic limit density of the free walk on the line:
    sqrt(1-|a|^2) / (pi (1-x^2) sqrt(|a|^2 - x^2)) on (-|a|, |a|).

    Grows without bound as |x| -> |a| from inside; values there are
    whatever floating point gives.
    """
    xa = np.asarray(x, dtype=np.float64)
    a = coin.abs_a
    inside = np.abs(xa) < a
    xs = np.where(inside, xa, 0.0)
    with np.errstate(divide="ignore"):
        vals = math.sqrt(1.0 - a * a) / (math.pi * (1.0 - xs**2) * np.sqrt(a * a - xs**2))
    return _scalar_or_array(np.where(inside, vals, 0.0), x)


def _thread_cap() -> int:
    raw = os.environ.get("QWALK_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"QWALK_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _sweep_row(coin: Coin, scaling: Scaling, M: int, eps: float) -> SweepRow:
    if isinstance(scaling, ThetaStarOverM):
        ts = scaling.theta_star
        if not 0.0 < ts < math.inf:
            raise InconsistentScaling("sweep needs a finite positive theta_star")
        theta = ts / M
        if theta > math.pi / 2:
            raise ValueError(f"theta_star/M = {theta!r} exceeds pi/2 at M={M}")
        xi = xi_from_theta(coin, theta, scaling.branch)
        regime = regime_for_xi(coin, xi, eps)
        if regime.region is not Region.BIN:
            raise OutOfRegime(f"theta={theta!r} classified as {regime.region.value} at eps={eps!r}")
        regime = replace(regime, theta_star=ts)
    else:
        regime = regime_for_xi(coin, scaling.xi, eps)
    law = select_limit_law(regime, scaling, axis="sites" if regime.region is Region.BOUT else "scaled")
    profile = stationary_distribution(M, coin, regime.omega, eps)
    if regime.region is Region.BIN:
        ts_eff = M * regime.theta
    elif regime.region is Region.BOUNDARY:
        ts_eff = 0.0
    else:
        ts_eff = None
    return SweepRow(M, ks_distance(profile, law), regime.region, ts_eff)


def convergence_sweep(
    coin: Coin,
    scaling: Scaling,
    M_list: Sequence[int],
    eps: float = REGIME_EPS,
    workers: int | None = None,
) -> list[SweepRow]:
    """
    KS distance between the closed-form profile and its limit law for each M.

    Bout frequencies are compared with the geometric law on the site axis,
    since on the scaled axis the limit is a point mass. Rows come back in
    the order of ``M_list``; ``workers`` defaults to $QWALK_THREADS or 1.
    """
    M_list = [int(m) for m in M_list]
    if not M_list:
        raise ValueError("M_list must be nonempty")
    if any(m < 1 for m in M_list):
        raise ValueError("every M must be >= 1")
    if any(b <= a for a, b in zip(M_list, M_list[1:])):
        raise ValueError("M_list must be strictly increasing")
    n = workers if workers is not None else _thread_cap()
    if n <= 1 or len(M_list) == 1:
        return [_sweep_row(coin, scaling, m, eps) for m in M_list]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda m: _sweep_row(coin, scaling, m, eps), M_list))
