"""Driven quantum walk on a finite path: stationary comfortability and its limit laws."""

from .coin import (
    Coin,
    Region,
    RegimeParams,
    WalkConfig,
    chebyshev_zeta,
    classify_regime,
    hadamard,
    lambda_roots,
    make_coin,
    omega_of,
    random_coin,
    regime_for_xi,
    rotation,
    theta_of,
    xi_from_theta,
)
from .dynamics import (
    WalkState,
    eigen_residual,
    empirical_distribution,
    init_walk,
    run_until_stationary,
    solve_fixed_point,
    step,
)
from .errors import (
    InconsistentScaling,
    NoConvergence,
    NotUnitary,
    OutOfRegime,
    SingularSystem,
    TrivialCoin,
    Unsupported,
    ZeroField,
)
from .limits import (
    FixedXi,
    LawKind,
    LimitLaw,
    SweepRow,
    ThetaStarOverM,
    c_norm,
    convergence_sweep,
    geometric_limit_pmf,
    konno_density,
    ks_distance,
    limit_cdf,
    limit_density,
    select_limit_law,
)
from .stationary import (
    StationaryProfile,
    ab_form,
    comfortability,
    cumulative,
    site_relative_probability,
    stationary_distribution,
)

__version__ = "0.1.0"
