"""
Coin validation, frequency regimes and the Chebyshev recurrence.

The coin C0 = [[a, b], [c, d]] sits on every site of the perturbed path
{0, ..., M-1}; outside it the walk is free. Everything downstream depends
on the coin only through |a|, |b| and the phase of det C0, and on the
inflow frequency xi only through

    omega = arg(det C0) / 2 + xi.

The frequency regime is decided by comparing |cos omega| with |a|:

    Bout       |cos omega| > |a|   (exponential profile)
    BoundaryB  |cos omega| = |a|   (critical, polynomial profile)
    Bin        |cos omega| < |a|   (oscillatory profile)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import NotUnitary, OutOfRegime, TrivialCoin

__all__ = [
    "Coin",
    "Region",
    "RegimeParams",
    "WalkConfig",
    "make_coin",
    "hadamard",
    "rotation",
    "random_coin",
    "omega_of",
    "cos_ratio",
    "classify_regime",
    "regime_for_xi",
    "theta_of",
    "lambda_roots",
    "chebyshev_zeta",
    "zeta_sequence",
    "xi_from_theta",
    "UNITARY_TOL",
    "REGIME_EPS",
]

TWO_PI = 2.0 * math.pi
UNITARY_TOL = 1e-12
TRIVIAL_TOL = 1e-12
REGIME_EPS = 1e-10


def _wrap(angle: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    r = math.fmod(angle, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if r >= TWO_PI else r


@dataclass(frozen=True)
class Coin:
    """Validated 2x2 unitary coin. Build it with :func:`make_coin`."""

    a: complex
    b: complex
    c: complex
    d: complex
    det_phase: float

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def abs_a(self) -> float:
        return abs(self.a)

    @property
    def abs_b(self) -> float:
        return abs(self.b)

    def entries(self) -> tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)


class Region(str, enum.Enum):
    BOUT = "Bout"
    BOUNDARY = "BoundaryB"
    BIN = "Bin"


@dataclass(frozen=True)
class RegimeParams:
    """Everything derived from (coin, omega) that selects the limit law.

    ``theta`` is set only in Bin, ``lambda_plus``/``lambda_minus`` only in
    Bout. ``theta_star`` is the target of M*theta when the caller scales
    theta with the path length; it stays ``None`` otherwise.
    """

    xi: float
    omega: float
    region: Region
    theta: float | None = None
    theta_star: float | None = None
    lambda_plus: float | None = None
    lambda_minus: float | None = None


@dataclass(frozen=True)
class WalkConfig:
    M: int
    coin: Coin
    xi: float

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 1:
            raise ValueError(f"path length M must be a positive integer, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))


def make_coin(a: complex, b: complex, c: complex, d: complex) -> Coin:
    """
    Validate the four entries of a coin and compute its determinant phase.

    Parameters
    ----------
    a, b, c, d : complex
        Entries of C0 = [[a, b], [c, d]].

    Returns
    -------
    Coin
        With ``det_phase = arg(ad - bc)`` in [0, 2*pi).

    Raises
    ------
    NotUnitary
        If any entry of C0^dagger C0 - I exceeds 1e-12 in modulus.
    TrivialCoin
        If any entry has modulus <= 1e-12.
    """
    a, b, c, d = (complex(v) for v in (a, b, c, d))
    mat = np.array([[a, b], [c, d]], dtype=np.complex128)
    dev = np.max(np.abs(mat.conj().T @ mat - np.eye(2)))
    if not dev <= UNITARY_TOL:
        raise NotUnitary(f"C^dagger C deviates from identity by {dev:.3e}")
    if min(abs(a), abs(b), abs(c), abs(d)) <= TRIVIAL_TOL:
        raise TrivialCoin("all coin entries must be nonzero (abcd != 0)")
    det = a * d - b * c
    return Coin(a, b, c, d, _wrap(math.atan2(det.imag, det.real)))


def hadamard() -> Coin:
    s = 1.0 / math.sqrt(2.0)
    return make_coin(s, s, s, -s)


def rotation(angle: float) -> Coin:
    """Real rotation coin [[cos t, sin t], [-sin t, cos t]]; det = 1."""
    co, si = math.cos(angle), math.sin(angle)
    return make_coin(co, si, -si, co)


def random_coin(rng: np.random.Generator) -> Coin:
    """Haar-random unitary coin (QR of a complex Ginibre matrix)."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    return make_coin(q[0, 0], q[0, 1], q[1, 0], q[1, 1])


def omega_of(coin: Coin, xi: float) -> float:
    """Effective frequency ``arg(det C0)/2 + xi`` reduced to [0, 2*pi)."""
    return _wrap(coin.det_phase / 2.0 + xi)


def cos_ratio(coin: Coin, omega: float) -> float:
    """Chebyshev argument cos(omega) / |a|."""
    return math.cos(omega) / coin.abs_a


def _theta_from_ratio(x: float) -> float:
    if not abs(x) < 1.0:
        raise OutOfRegime(f"theta is defined only in Bin (|cos w|/|a| = {abs(x)!r} >= 1)")
    if x > 0.0:
        return math.acos(x)
    return math.pi - math.acos(x)


def _lambdas_from_ratio(x: float) -> tuple[float, float]:
    if not abs(x) > 1.0:
        raise OutOfRegime(f"lambda roots are real and distinct only in Bout (|x| = {abs(x)!r})")
    lam_plus = x + math.copysign(math.sqrt(x * x - 1.0), x)
    return lam_plus, 1.0 / lam_plus


def theta_of(coin: Coin, omega: float) -> float:
    """
    Deformed angle theta in (0, pi/2] for a Bin frequency.

    theta = arccos(x) when x = cos(omega)/|a| > 0, and pi - arccos(x)
    otherwise, so that |a| cos(theta) = |cos(omega)|.

    Raises
    ------
    OutOfRegime
        If |cos omega| >= |a|.
    """
    return _theta_from_ratio(cos_ratio(coin, omega))


def lambda_roots(coin: Coin, omega: float) -> tuple[float, float]:
    """
    Roots (lambda_+, lambda_-) of lambda^2 - 2 x lambda + 1 with x = cos(omega)/|a|.

    The larger-magnitude root comes from the quadratic formula with the
    sign of x; the smaller is its reciprocal, so their product is exactly 1.

    Raises
    ------
    OutOfRegime
        If |cos omega| <= |a| (no real pair with |lambda_+| > 1).
    """
    return _lambdas_from_ratio(cos_ratio(coin, omega))


def classify_regime(
    coin: Coin, omega: float, eps: float = REGIME_EPS, *, xi: float | None = None
) -> RegimeParams:
    """
    Classify omega into Bout / BoundaryB / Bin.

    Frequencies with ||cos omega| - |a|| <= eps count as the boundary.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if xi is None:
        xi = _wrap(omega - coin.det_phase / 2.0)
    gap = abs(math.cos(omega)) - coin.abs_a
    if abs(gap) <= eps:
        return RegimeParams(xi=xi, omega=omega, region=Region.BOUNDARY)
    x = cos_ratio(coin, omega)
    if gap > 0:
        lp, lm = _lambdas_from_ratio(x)
        return RegimeParams(xi=xi, omega=omega, region=Region.BOUT, lambda_plus=lp, lambda_minus=lm)
    return RegimeParams(xi=xi, omega=omega, region=Region.BIN, theta=_theta_from_ratio(x))


def regime_for_xi(coin: Coin, xi: float, eps: float = REGIME_EPS) -> RegimeParams:
    return classify_regime(coin, omega_of(coin, xi), eps, xi=xi)


def zeta_sequence(m_max: int, x: float) -> NDArray[np.float64]:
    """
    Values zeta(0), ..., zeta(m_max) with zeta(m) = U_{m-1}(x).

    Three-term recurrence zeta(0) = 0, zeta(1) = 1,
    zeta(m+1) = 2 x zeta(m) - zeta(m-1). Exact at x = +-1 where the
    trigonometric closed form degenerates.
    """
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    out = np.zeros(m_max + 1)
    if m_max >= 1:
        out[1] = 1.0
    two_x = 2.0 * x
    prev, cur = 0.0, 1.0
    for m in range(2, m_max + 1):
        prev, cur = cur, two_x * cur - prev
        out[m] = cur
    return out


def chebyshev_zeta(m: int, coin: Coin, omega: float) -> float:
    """zeta(m) = U_{m-1}(cos(omega)/|a|), Chebyshev polynomial of the second kind."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return float(zeta_sequence(m, cos_ratio(coin, omega))[m])


def xi_from_theta(coin: Coin, theta: float, branch: int = 1) -> float:
    """
    Inflow frequency xi whose deformed angle equals ``theta``.

    ``branch=+1`` picks cos(omega) = |a| cos(theta), ``branch=-1`` picks
    cos(omega) = -|a| cos(theta). Result reduced to [0, 2*pi).
    """
    if not 0.0 < theta <= math.pi / 2:
        raise ValueError(f"theta must lie in (0, pi/2], got {theta!r}")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    omega = math.acos(branch * coin.abs_a * math.cos(theta))
    return _wrap(omega - coin.det_phase / 2.0)
