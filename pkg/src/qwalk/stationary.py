"""
Closed-form stationary profile of the driven walk.

With x = cos(omega)/|a| and zeta(m) = U_{m-1}(x), the stationary squared
norm at site n of a path of length M is

    |phi(n)|^2 = (|a|^2 + |b|^2 zeta(M-n-1)^2 + |b|^2 zeta(M-n)^2)
                 / (|a|^2 + |b|^2 zeta(M)^2)

and the comfortability E_M(omega) is their sum over n, which also has a
closed form (see :func:`comfortability`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .coin import REGIME_EPS, Coin, Region, classify_regime, cos_ratio, zeta_sequence
from .errors import OutOfRegime

__all__ = [
    "StationaryProfile",
    "site_relative_probability",
    "site_profile",
    "comfortability",
    "stationary_distribution",
    "ab_form",
    "cumulative",
]

# zeta grows like lambda_+^m in Bout; past this log-magnitude switch to ratios
_LOG_SAFE = 250.0


@dataclass(frozen=True)
class StationaryProfile:
    """Per-site stationary weights on the path {0, ..., M-1}.

    ``mu`` is normalized by the direct sum of ``site_norm_sq`` so it sums
    to one at machine precision; ``comfortability`` is whatever the
    producer computed (closed form or direct sum).
    """

    M: int
    site_norm_sq: NDArray[np.float64]
    comfortability: float
    mu: NDArray[np.float64]

    @classmethod
    def from_site_norms(cls, site_norm_sq, comfortability: float | None = None) -> StationaryProfile:
        w = np.asarray(site_norm_sq, dtype=np.float64)
        w.setflags(write=False)
        total = float(np.sum(w))
        mu = w / total
        mu.setflags(write=False)
        return cls(len(w), w, total if comfortability is None else float(comfortability), mu)

    @property
    def x(self) -> NDArray[np.float64]:
        """Scaled positions n/M."""
        return np.arange(self.M) / self.M

    @property
    def cdf(self) -> NDArray[np.float64]:
        """F_M at the jump points n/M, i.e. cumulative mass through site n."""
        return np.cumsum(self.mu)


def _boundary_ratio(coin: Coin, omega: float, eps: float) -> float:
    """cos(omega)/|a|, snapped to +-1 when omega is classified as boundary."""
    x = cos_ratio(coin, omega)
    if classify_regime(coin, omega, eps).region is Region.BOUNDARY:
        return math.copysign(1.0, x)
    return x


def _needs_ratio_form(M: int, x: float) -> bool:
    if abs(x) <= 1.0:
        return False
    return (M + 1) * math.log(abs(x) + math.sqrt(x * x - 1.0)) > _LOG_SAFE


def _zeta_over_last(M: int, x: float) -> tuple[NDArray[np.float64], float]:
    """
    Ratios q[k] = zeta(k)/zeta(M) for k = 0..M, plus zeta(M+1)/zeta(M).

    Built from per-step ratios r[m] = zeta(m)/zeta(m+1), which obey
    r[m] = 1/(2x - r[m-1]) and converge to 1/lambda_+ in Bout. Only valid
    when zeta never vanishes, i.e. |x| > 1.
    """
    r = np.empty(M + 1)
    r[0] = 0.0
    two_x = 2.0 * x
    for m in range(1, M + 1):
        r[m] = 1.0 / (two_x - r[m - 1])
    q = np.empty(M + 1)
    q[M] = 1.0
    for k in range(M - 1, -1, -1):
        q[k] = r[k] * q[k + 1]
    return q, 1.0 / r[M]


def _site_norms(M: int, x: float, a2: float, b2: float) -> NDArray[np.float64]:
    k = np.arange(M, 0, -1)  # k = M - n for n = 0..M-1
    if _needs_ratio_form(M, x):
        q, _ = _zeta_over_last(M, x)
        inv2 = q[1] ** 2  # 1/zeta(M)^2
        return (a2 * inv2 + b2 * (q[k - 1] ** 2 + q[k] ** 2)) / (a2 * inv2 + b2)
    z = zeta_sequence(M, x)
    return (a2 + b2 * (z[k - 1] ** 2 + z[k] ** 2)) / (a2 + b2 * z[M] ** 2)


def site_profile(M: int, coin: Coin, omega: float, eps: float = REGIME_EPS) -> NDArray[np.float64]:
    """Stationary squared norms |phi(n)|^2 for every site n = 0..M-1."""
    if M < 1:
        raise ValueError("M must be >= 1")
    x = _boundary_ratio(coin, omega, eps)
    return _site_norms(M, x, coin.abs_a**2, coin.abs_b**2)


def site_relative_probability(
    n: int, M: int, coin: Coin, omega: float, eps: float = REGIME_EPS
) -> float:
    """
    Stationary relative probability |phi(n)|^2 at a single site.

    Raises
    ------
    IndexError
        If n is outside 0..M-1.
    """
    if not 0 <= n < M:
        raise IndexError(f"site {n} outside 0..{M - 1}")
    return float(site_profile(M, coin, omega, eps)[n])


def comfortability(M: int, coin: Coin, omega: float, eps: float = REGIME_EPS) -> float:
    """
    Closed-form comfortability E_M(omega) = sum of |phi(n)|^2.

    Away from the boundary:

        E_M = (M|a|^2 + |b|^2 (zeta(M+1)^2 - zeta(M-1)^2 - 4M) / (l+ - l-)^2)
              / (|a|^2 + |b|^2 zeta(M)^2)

    with (l+ - l-)^2 = 4(x^2 - 1), real and negative in Bin. Within ``eps``
    of the boundary the 0/0 form is replaced by its continuous limit

        E_M = M (3|a|^2 + |b|^2 + 2|b|^2 M^2) / (3 (|a|^2 + |b|^2 M^2)).
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    a2, b2 = coin.abs_a**2, coin.abs_b**2
    region = classify_regime(coin, omega, eps).region
    if region is Region.BOUNDARY:
        return M * (3.0 * a2 + b2 + 2.0 * b2 * M * M) / (3.0 * (a2 + b2 * M * M))
    x = cos_ratio(coin, omega)
    gap_sq = 4.0 * (x * x - 1.0)
    if _needs_ratio_form(M, x):
        q, up = _zeta_over_last(M, x)
        inv2 = q[1] ** 2
        inner = up**2 - q[M - 1] ** 2 - 4.0 * M * inv2
        return (M * a2 * inv2 + b2 * inner / gap_sq) / (a2 * inv2 + b2)
    z = zeta_sequence(M + 1, x)
    inner = z[M + 1] ** 2 - z[M - 1] ** 2 - 4.0 * M
    return (M * a2 + b2 * inner / gap_sq) / (a2 + b2 * z[M] ** 2)


def stationary_distribution(
    M: int, coin: Coin, omega: float, eps: float = REGIME_EPS
) -> StationaryProfile:
    """Closed-form :class:`StationaryProfile` (site norms, E_M, mu)."""
    return StationaryProfile.from_site_norms(
        site_profile(M, coin, omega, eps), comfortability(M, coin, omega, eps)
    )


def ab_form(M: int, n, coin: Coin, theta: float):
    """
    Unnormalized Bin-regime form mu_M(n) = B_M(n) / A_M.

        A_M    = (|b|^2 + |a|^2 sin^2 t) M - (|b|^2/4) sin(2Mt) sin(2t) / sin^2 t
        B_M(n) = |a|^2 sin^2 t + |b|^2 sin^2((M-n-1)t) + |b|^2 sin^2((M-n)t)

    ``n`` may be an integer or an integer array.

    Raises
    ------
    OutOfRegime
        If theta is not a Bin angle in (0, pi/2].
    """
    if not 0.0 < theta <= math.pi / 2:
        raise OutOfRegime(f"A_M/B_M form needs a Bin angle in (0, pi/2], got {theta!r}")
    n_arr = np.asarray(n)
    if np.any((n_arr < 0) | (n_arr >= M)):
        raise IndexError(f"site index outside 0..{M - 1}")
    a2, b2 = coin.abs_a**2, coin.abs_b**2
    s2 = math.sin(theta) ** 2
    big_a = (b2 + a2 * s2) * M - 0.25 * b2 * math.sin(2 * M * theta) * math.sin(2 * theta) / s2
    big_b = a2 * s2 + b2 * np.sin((M - n_arr - 1) * theta) ** 2 + b2 * np.sin((M - n_arr) * theta) ** 2
    if np.ndim(big_b) == 0:
        big_b = float(big_b)
    return big_a, big_b


def cumulative(profile: StationaryProfile, x: float) -> float:
    """F_M(x): total mass of sites j with j/M <= x."""
    count = int(np.searchsorted(profile.x, x, side="right"))
    if count == 0:
        return 0.0
    if count == profile.M:
        return 1.0
    return float(np.sum(profile.mu[:count]))
