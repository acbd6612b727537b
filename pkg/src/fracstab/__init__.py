"""Stability of two-component incommensurate fractional-order linear systems,
with a fractional FitzHugh-Nagumo application."""

from ._jit import HAVE_NUMBA
from .charfn import (
    BoundaryRoot,
    CharFunction,
    NoConvergence,
    RhpCount,
    UnreliableWinding,
    count_rhp_roots,
    eval_delta,
    eval_delta_ds,
    track_root,
)
from .classify import (
    LinearSystem2,
    StabilityVerdict,
    Verdict,
    classify_coeffs,
    classify_matrix,
    verify_with_oracle,
)
from .critcurve import CriticalCurve, CurveSample, a_star, crossing_frequency, gamma_point
from .fde_solver import DegenerateTail, FdeProblem, Trajectory, estimate_decay_exponent, linear_problem, solve
from .fhn import (
    FhnEquilibrium,
    FhnParams,
    branch_diagram,
    classify_equilibrium,
    equilibrium,
    hopf_curve,
    hopf_q1,
    make_fhn_problem,
)

__version__ = "0.1.0"
