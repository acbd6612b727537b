"""Fractional-order FitzHugh-Nagumo neuron.

    D^q1 v = v - v^3/3 - w + I
    D^q2 w = r (v + c - d w)

With ``phi = r d``, ``alpha = 1/d`` and ``beta = c/d`` the recovery equation
reads ``D^q2 w = phi (alpha v + beta - w)``, and equilibria solve
``I_inf(v) = (alpha - 1) v + v^3/3 + beta = I``. Since ``alpha > 1`` that
cubic is strictly increasing, so the equilibrium is unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._jit import njit
from .classify import StabilityVerdict, classify_coeffs, critical_a
from .fde_solver import FdeProblem

__all__ = [
    "FhnEquilibrium",
    "FhnParams",
    "branch_diagram",
    "classify_equilibrium",
    "equilibrium",
    "hopf_curve",
    "hopf_q1",
    "hopf_q1_all",
    "make_fhn_problem",
]


@dataclass(frozen=True)
class FhnParams:
    r: float
    c: float
    d: float
    I: float = 0.0

    def __post_init__(self):
        if not (self.r > 0 and self.d > 0):
            raise ValueError("r and d must be positive")
        if not 0.0 < self.phi < 1.0:
            raise ValueError(f"phi = r*d must lie in (0, 1), got {self.phi}")
        if not self.alpha > 1.0:
            raise ValueError(f"alpha = 1/d must exceed 1, got {self.alpha}")

    @property
    def phi(self) -> float:
        return self.r * self.d

    @property
    def alpha(self) -> float:
        return 1.0 / self.d

    @property
    def beta(self) -> float:
        return self.c / self.d

    @property
    def v_hat(self) -> float:
        """Threshold ``sqrt(1 - phi)`` on ``|v*|`` above which stability is order-free."""
        return math.sqrt(1.0 - self.phi)

    def with_current(self, I: float) -> "FhnParams":
        return FhnParams(self.r, self.c, self.d, I)

    def i_inf(self, v):
        return (self.alpha - 1.0) * v + v**3 / 3.0 + self.beta

    def i_inf_prime(self, v):
        return v * v + self.alpha - 1.0


@dataclass(frozen=True)
class FhnEquilibrium:
    v_star: float
    w_star: float
    coeff_a: float
    coeff_b: float
    coeff_c: float

    @property
    def jacobian(self) -> np.ndarray:
        # phi*alpha = c - phi*a
        phi = self.coeff_b
        return np.array([[-self.coeff_a, -1.0], [self.coeff_c - phi * self.coeff_a, -phi]])


def _solve_v_star(p: FhnParams) -> float:
    target = p.I
    bound = max(3.0, abs(3.0 * (target - p.beta)) ** (1.0 / 3.0) + 2.0)
    lo, hi = -bound, bound
    v = 0.0
    for _ in range(200):
        g = p.i_inf(v) - target
        if g == 0.0:
            return v
        if g < 0.0:
            lo = v
        else:
            hi = v
        v_new = v - g / p.i_inf_prime(v)
        if not lo < v_new < hi:
            v_new = 0.5 * (lo + hi)
        if abs(v_new - v) <= 1e-16 * max(1.0, abs(v)):
            return v_new
        v = v_new
    return v


def equilibrium(params: FhnParams) -> FhnEquilibrium:
    v = _solve_v_star(params)
    phi = params.phi
    return FhnEquilibrium(
        v_star=v,
        w_star=params.alpha * v + params.beta,
        coeff_a=v * v - 1.0,
        coeff_b=phi,
        coeff_c=phi * params.i_inf_prime(v),
    )


def classify_equilibrium(params: FhnParams, q1: float, q2: float) -> StabilityVerdict:
    eq = equilibrium(params)
    return classify_coeffs(eq.coeff_a, eq.coeff_b, eq.coeff_c, q1, q2)


def _hopf_gap(eq: FhnEquilibrium, q1: float, q2: float) -> float:
    lo, hi = min(q1, q2), max(q1, q2)
    a, b = (eq.coeff_a, eq.coeff_b) if q1 <= q2 else (eq.coeff_b, eq.coeff_a)
    return a - critical_a(b, eq.coeff_c, lo, hi)


def hopf_q1_all(params: FhnParams, q2: float, grid: int = 64, tol: float = 1e-6) -> list[float]:
    """Every sign change of ``a(v*) - a_star`` in ``q1`` over ``(0, q2)``."""
    eq = equilibrium(params)
    if abs(eq.v_star) > params.v_hat:
        return []
    qs = q2 * np.arange(1, grid + 1) / (grid + 1)
    g = np.array([_hopf_gap(eq, q, q2) for q in qs])
    roots = []
    for k in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0):
        lo, hi, glo = qs[k], qs[k + 1], g[k]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            gm = _hopf_gap(eq, mid, q2)
            if np.sign(gm) == np.sign(glo):
                lo, glo = mid, gm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return roots


def hopf_q1(params: FhnParams, q2: float) -> Optional[float]:
    """Critical ``q1`` (smallest, if several) at which the equilibrium loses stability for fixed ``q2``."""
    roots = hopf_q1_all(params, q2)
    return roots[0] if roots else None


def hopf_curve(params: FhnParams, grid_n: int) -> list[tuple[float, float]]:
    """Hopf points ``(q1*, q2)`` for ``q2`` on ``grid_n`` evenly spaced values in ``(0, 1]``."""
    if grid_n < 1:
        raise ValueError("grid_n must be positive")
    out = []
    for k in range(1, grid_n + 1):
        q2 = k / grid_n
        q1 = hopf_q1(params, q2)
        if q1 is not None and q1 < q2:
            out.append((q1, q2))
    return out


def branch_diagram(params: FhnParams, I_min: float, I_max: float, n: int) -> list[tuple[float, float, bool]]:
    """Rows ``(I, v*, order_robust)`` on ``n`` equally spaced currents."""
    if not I_min < I_max:
        raise ValueError("need I_min < I_max")
    if n < 2:
        raise ValueError("need n >= 2")
    rows = []
    for I in np.linspace(I_min, I_max, n):
        v = equilibrium(params.with_current(float(I))).v_star
        rows.append((float(I), v, abs(v) > params.v_hat))
    return rows


@njit(cache=True)
def _fhn_rhs(t, x, p):
    out = np.empty(2)
    v = x[0]
    out[0] = v - v * v * v / 3.0 - x[1] + p[3]
    out[1] = p[0] * (v + p[1] - p[2] * x[1])
    return out


def make_fhn_problem(params: FhnParams, q1, q2, v0, w0, t_end, step) -> FdeProblem:
    p = np.array([params.r, params.c, params.d, params.I], dtype=np.float64)
    rhs_py = getattr(_fhn_rhs, "py_func", _fhn_rhs)

    def rhs(t, x):
        return rhs_py(t, np.asarray(x, dtype=np.float64), p)

    return FdeProblem([q1, q2], rhs, [v0, w0], t_end, step, jit_rhs=_fhn_rhs, jit_params=p)
