"""
Direct time evolution of the driven walk on the path {0, ..., M-1}.

One step of the full-line walk acts on the internal sites as

    new(j)_L = (C0 psi(j+1))_L     for j <= M-2,  new(M-1)_L = 0
    new(j)_R = (C0 psi(j-1))_R     for j >= 1,    new(0)_R   = inflow

The left tail of the initial state moves freely, so its only effect is the
amplitude exp(-i xi (t+1)) entering the R slot of site 0 at step t+1.
Amplitude leaving site 0 to the left or site M-1 to the right never comes
back and is only counted.

In the phase-corrected frame phi_t = exp(i xi t) psi_t the inflow becomes
the constant 1, giving the affine recursion phi_{t+1} = e^{i xi} A phi_t + b
whose fixed point is the stationary state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numba
import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.linalg.lapack import zgecon

from .coin import WalkConfig
from .errors import NoConvergence, SingularSystem, ZeroField
from .stationary import StationaryProfile

__all__ = [
    "WalkState",
    "init_walk",
    "step",
    "run_until_stationary",
    "solve_fixed_point",
    "fixed_point_system",
    "empirical_distribution",
    "eigen_residual",
    "DEFAULT_TOL",
    "DEFAULT_T_MAX",
    "MAX_DENSE_SITES",
]

DEFAULT_TOL = 1e-10
DEFAULT_T_MAX = 100_000
MAX_DENSE_SITES = 2_000
COND_LIMIT = 1e12


@numba.njit(cache=True)
def _advance(L, R, a, b, c, d, inflow, out_L, out_R):
    # writes one step into out_L/out_R; returns the amplitudes that leave the path
    M = L.shape[0]
    left_out = a * L[0] + b * R[0]
    right_out = c * L[M - 1] + d * R[M - 1]
    for j in range(M - 1):
        out_L[j] = a * L[j + 1] + b * R[j + 1]
    out_L[M - 1] = 0.0
    out_R[0] = inflow
    for j in range(1, M):
        out_R[j] = c * L[j - 1] + d * R[j - 1]
    return left_out, right_out


@numba.njit(cache=True)
def _iterate(L, R, a, b, c, d, tol, t_max):
    # phase-corrected affine iteration; the e^{i xi} factor is folded into a..d
    M = L.shape[0]
    nL = np.empty_like(L)
    nR = np.empty_like(R)
    residual = np.inf
    t = 0
    while t <= t_max:
        _advance(L, R, a, b, c, d, 1.0 + 0.0j, nL, nR)
        residual = 0.0
        for j in range(M):
            dl = nL[j] - L[j]
            dr = nR[j] - R[j]
            r = math.sqrt(dl.real * dl.real + dl.imag * dl.imag + dr.real * dr.real + dr.imag * dr.imag)
            if r > residual:
                residual = r
        if residual <= tol:
            return L, R, residual, t, True
        if t == t_max:
            break
        L, nL = nL, L
        R, nR = nR, R
        t += 1
    # best iterate is the newest one
    return nL, nR, residual, t, False


@dataclass(frozen=True)
class WalkState:
    """Internal field of the walk after ``t`` steps (psi frame, not phi)."""

    config: WalkConfig
    t: int
    field: NDArray[np.complex128]  # shape (M, 2), columns L and R
    absorbed_left: float = 0.0
    absorbed_right: float = 0.0
    injected: float = 0.0

    @property
    def internal_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.field) ** 2))


def init_walk(config: WalkConfig) -> WalkState:
    """Empty path at t = 0; the inflow enters through :func:`step`."""
    return WalkState(config, 0, np.zeros((config.M, 2), dtype=np.complex128))


def step(state: WalkState) -> WalkState:
    """One application of U_M restricted to the path, with inflow and absorption."""
    cfg = state.config
    t = state.t + 1
    inflow = cmath.exp(-1j * cfg.xi * t)
    L = np.ascontiguousarray(state.field[:, 0])
    R = np.ascontiguousarray(state.field[:, 1])
    out_L = np.empty_like(L)
    out_R = np.empty_like(R)
    left_out, right_out = _advance(L, R, *cfg.coin.entries(), inflow, out_L, out_R)
    return WalkState(
        cfg,
        t,
        np.column_stack((out_L, out_R)),
        state.absorbed_left + abs(left_out) ** 2,
        state.absorbed_right + abs(right_out) ** 2,
        state.injected + abs(inflow) ** 2,
    )


def _phased_entries(config: WalkConfig):
    ph = cmath.exp(1j * config.xi)
    return tuple(ph * e for e in config.coin.entries())


def run_until_stationary(
    config: WalkConfig, tol: float = DEFAULT_TOL, t_max: int = DEFAULT_T_MAX
) -> tuple[NDArray[np.complex128], float, int]:
    """
    Evolve phi_t = exp(i xi t) psi_t from the empty path until it settles.

    Stops at the first t with max_j |phi_{t+1}(j) - phi_t(j)| <= tol.

    Returns
    -------
    phi_star : ndarray, shape (M, 2)
        phi_t at the stopping index.
    residual : float
        max_j |phi_{t+1}(j) - phi_t(j)| at that index.
    t : int
        The stopping index.

    Raises
    ------
    NoConvergence
        If no t <= t_max passes the test. The newest iterate, its residual
        and t_max are attached to the exception.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    M = config.M
    L = np.zeros(M, dtype=np.complex128)
    R = np.zeros(M, dtype=np.complex128)
    L, R, residual, t, ok = _iterate(L, R, *_phased_entries(config), tol, t_max)
    phi = np.column_stack((L, R))
    if not ok:
        raise NoConvergence(
            f"residual {residual:.3e} > tol {tol:.1e} after {t_max} steps (M={M})",
            phi=phi,
            residual=residual,
            t=t,
        )
    return phi, float(residual), int(t)


def fixed_point_system(config: WalkConfig) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """
    Dense matrix I - e^{i xi} A and source vector b of the stationary equation.

    Unknowns are ordered (L_0, R_0, L_1, R_1, ...).
    """
    M = config.M
    a, b, c, d = _phased_entries(config)
    n = 2 * M
    mat = np.eye(n, dtype=np.complex128)
    j = np.arange(M - 1)
    mat[2 * j, 2 * (j + 1)] -= a
    mat[2 * j, 2 * (j + 1) + 1] -= b
    mat[2 * (j + 1) + 1, 2 * j] -= c
    mat[2 * (j + 1) + 1, 2 * j + 1] -= d
    rhs = np.zeros(n, dtype=np.complex128)
    rhs[1] = 1.0
    return mat, rhs


def solve_fixed_point(config: WalkConfig) -> NDArray[np.complex128]:
    """
    Stationary field by a direct LU solve (partial pivoting) of the 2M x 2M system.

    Raises
    ------
    SingularSystem
        If the LAPACK 1-norm condition estimate exceeds 1e12.
    ValueError
        If M exceeds MAX_DENSE_SITES; use :func:`run_until_stationary`.
    """
    if config.M > MAX_DENSE_SITES:
        raise ValueError(f"dense solve limited to M <= {MAX_DENSE_SITES}; iterate instead")
    mat, rhs = fixed_point_system(config)
    lu, piv = scipy.linalg.lu_factor(mat, check_finite=False)
    rcond, info = zgecon(lu, np.linalg.norm(mat, 1), norm="1")
    if info != 0 or not rcond * COND_LIMIT >= 1.0:
        raise SingularSystem(f"stationary system condition estimate {1.0 / rcond:.3e} exceeds {COND_LIMIT:.0e}")
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False).reshape(config.M, 2)


def eigen_residual(phi_star, config: WalkConfig) -> float:
    """max_j |phi(j) - (e^{i xi} A phi + b)(j)|, the defect of the stationary equation."""
    phi = np.asarray(phi_star, dtype=np.complex128).reshape(config.M, 2)
    L = np.ascontiguousarray(phi[:, 0])
    R = np.ascontiguousarray(phi[:, 1])
    nL = np.empty_like(L)
    nR = np.empty_like(R)
    _advance(L, R, *_phased_entries(config), 1.0 + 0.0j, nL, nR)
    diff = np.column_stack((nL - L, nR - R))
    return float(np.max(np.linalg.norm(diff, axis=1)))


def empirical_distribution(phi_star) -> StationaryProfile:
    """Profile built from a stationary field: |phi(n)|^2, their sum, and mu.

    Raises
    ------
    ZeroField
        If the total squared norm is <= 1e-300.
    """
    phi = np.asarray(phi_star, dtype=np.complex128)
    norms = np.sum(np.abs(phi) ** 2, axis=1)
    if not np.sum(norms) > 1e-300:
        raise ZeroField("stationary field has no weight")
    return StationaryProfile.from_site_norms(norms)
