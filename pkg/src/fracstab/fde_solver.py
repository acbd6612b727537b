"""Caputo systems with per-component orders, integrated by fractional ABM.

The scheme is the one-corrector Adams-Bashforth-Moulton method of Diethelm,
Ford and Freed, applied component-wise: component ``i`` uses the product
integration weights of its own order ``orders[i]``. The whole history is
kept (no short-memory truncation), so a run with ``N`` steps costs ``O(N^2)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from ._jit import HAVE_NUMBA, is_jitted, njit

log = logging.getLogger(__name__)

__all__ = [
    "DegenerateTail",
    "FdeProblem",
    "Trajectory",
    "estimate_decay_exponent",
    "linear_problem",
    "solve",
]


class DegenerateTail(ValueError):
    """The tail of a trajectory cannot be fitted by a power law."""


@dataclass(frozen=True)
class FdeProblem:
    """Initial value problem ``D^q x = rhs(t, x)``, ``x(0) = initial_state``.

    ``jit_rhs(t, x, jit_params)`` is an optional numba-compiled twin of
    ``rhs``; only the numba backend uses it.
    """

    orders: np.ndarray
    rhs: Callable
    initial_state: np.ndarray
    t_end: float
    step: float
    jit_rhs: Optional[Callable] = None
    jit_params: Optional[np.ndarray] = None
    n_steps: int = field(init=False)

    def __post_init__(self):
        orders = np.atleast_1d(np.asarray(self.orders, dtype=np.float64))
        x0 = np.atleast_1d(np.asarray(self.initial_state, dtype=np.float64))
        if orders.shape != x0.shape or orders.ndim != 1:
            raise ValueError("orders and initial_state must be 1-d of equal length")
        if np.any(orders <= 0.0) or np.any(orders > 1.0):
            raise ValueError(f"orders must lie in (0, 1], got {orders}")
        if not (self.step > 0 and self.t_end > 0):
            raise ValueError("step and t_end must be positive")
        k = int(round(self.t_end / self.step))
        if k < 1 or abs(k * self.step - self.t_end) > 1e-9 * self.t_end:
            raise ValueError(f"t_end={self.t_end} is not an integer multiple of step={self.step}")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "initial_state", x0)
        object.__setattr__(self, "n_steps", k)
        if self.jit_params is not None:
            object.__setattr__(self, "jit_params", np.asarray(self.jit_params, dtype=np.float64))

    @property
    def dim(self) -> int:
        return self.orders.shape[0]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    orders: np.ndarray
    step: float
    overflowed: bool = False

    def __len__(self):
        return self.times.shape[0]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)


def _pick_backend(problem, backend):
    if backend is None:
        return "numba" if HAVE_NUMBA and is_jitted(problem.jit_rhs) else "numpy"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise ValueError("numba backend requested but numba is disabled or missing")
        if not is_jitted(problem.jit_rhs):
            raise ValueError("numba backend needs a jitted jit_rhs on the problem")
    elif backend != "numpy":
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def solve(problem: FdeProblem, backend: Optional[str] = None) -> Trajectory:
    """Integrate ``problem`` on the uniform grid ``0, step, ..., t_end``.

    If any component leaves ``[-1e12, 1e12]`` the run stops and the returned
    trajectory ends at the last in-range step with ``overflowed=True``.
    """
    backend = _pick_backend(problem, backend)
    n = problem.n_steps
    h = float(problem.step)
    tables = _kernels.build_tables(problem.orders, h, n)
    x0 = problem.initial_state.copy()
    if backend == "numba":
        params = problem.jit_params if problem.jit_params is not None else np.zeros(0)
        states, last = _kernels.abm_loop_numba(problem.jit_rhs, params, x0, h, n, *tables)
    else:
        states, last = _kernels.abm_loop_numpy(problem.rhs, x0, h, n, *tables)
    overflowed = last < n
    if overflowed:
        log.info("solution left the finite range at t=%g; trajectory truncated", (last + 1) * h)
    times = np.arange(last + 1) * h
    return Trajectory(times, states[: last + 1].copy(), problem.orders.copy(), h, overflowed)


@njit(cache=True)
def _linear_rhs(t, x, params):
    n = x.shape[0]
    out = np.zeros(n)
    for i in range(n):
        for j in range(n):
            out[i] += params[i * n + j] * x[j]
    return out


def linear_problem(matrix, orders, initial_state, t_end, step) -> FdeProblem:
    """``D^q x = A x`` with a compiled right-hand side when numba is on."""
    A = np.asarray(matrix, dtype=np.float64)

    def rhs(t, x):
        return A @ x

    return FdeProblem(orders, rhs, initial_state, t_end, step, jit_rhs=_linear_rhs, jit_params=A.ravel())


def estimate_decay_exponent(traj: Trajectory, tail_fraction: float = 0.5) -> float:
    """Fit ``|x(t)| ~ C t^(-p)`` on the last ``tail_fraction`` of the grid and return ``p``.

    Raises DegenerateTail when the norm hits zero on the window or wanders
    more than 50% away from the fitted power law (e.g. undamped oscillation).
    """
    if not 0.0 < tail_fraction < 1.0:
        raise ValueError("tail_fraction must be in (0, 1)")
    t = np.asarray(traj.times, dtype=np.float64)
    norms = traj.norms() if isinstance(traj, Trajectory) else np.linalg.norm(traj.states, axis=1)
    start = max(int(np.floor(len(t) * (1.0 - tail_fraction))), 1 if t[0] == 0.0 else 0)
    t, norms = t[start:], norms[start:]
    if len(t) < 3:
        raise DegenerateTail("tail window has fewer than 3 points")
    if np.any(~np.isfinite(norms)) or np.any(norms <= 0.0):
        raise DegenerateTail("trajectory norm is zero or non-finite on the tail window")
    lt, ln = np.log(t), np.log(norms)
    slope, intercept = np.polyfit(lt, ln, 1)
    wobble = np.max(np.abs(norms / np.exp(intercept + slope * lt) - 1.0))
    if wobble > 0.5:
        raise DegenerateTail(f"tail oscillates {wobble:.0%} around the power-law fit")
    return -float(slope)
