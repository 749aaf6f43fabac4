"""Free-boundary logistic-front toolkit.

Solves u_t = u_xx + u(1-u) on the eroding habitat ct < x < h(t) with zero
Dirichlet data on both edges and the Stefan law h' = -mu u_x(t, h(t));
computes the semi-wave (c*, q*), compact-wave (L_c, V_c) and bounded
elliptic profiles; classifies runs into vanishing / spreading / transition
with grid-checkable certificates; and locates the sharp threshold
amplitude by certified bisection.
"""

from .dynamics import (
    Certificate,
    ClassifyBudget,
    Outcome,
    bound_monitor,
    classify,
    estimate_extinction_time,
    estimate_speed,
    sign_changes,
    spreading_certificate,
    transition_distance,
    vanishing_constant,
    vanishing_majorant,
)
from .ivp import IntegrationFailure, Trajectory, ZeroCrossing, integrate_ivp
from .profiles import (
    CompactWave,
    EllipticExistenceError,
    EllipticProfile,
    NoCompactWaveError,
    NoSemiWaveError,
    SemiWave,
    compact_wave_shoot,
    elliptic_profile,
    sample_profile,
    semi_wave_slope,
    solve_compact_wave,
    solve_semi_wave,
)
from .reference import RefControls, reference_simulate
from .solver import (
    BoundMonitor,
    FrontFixedState,
    InitialData,
    Nonlinearity,
    ProblemSpec,
    SimControls,
    Trace,
    boundary_flux,
    init_state,
    initial_bump,
    initial_compact_wave,
    initial_custom,
    initial_sine,
    logistic,
    simulate,
    step,
    to_physical,
)
from .stepcore import BACKEND
from .threshold import (
    ProbeReport,
    ThresholdResult,
    find_threshold,
    near_threshold_probe,
    sweep,
)

__version__ = "0.1.0"
