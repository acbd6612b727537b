"""Critical curve of pure-imaginary roots in the ``(b, a)`` plane.

For ``c > 0`` and ``0 < q1 < q2 <= 1`` the quasi-polynomial
``s^(q1+q2) + a s^q2 + b s^q1 + c`` has a root ``i*omega`` exactly when

    b = rho1 omega^q2 - c rho2 omega^-q1,
    a = c rho1 omega^-q2 - rho2 omega^q1,

with ``rho1 = sin(q1 pi/2) / sin((q2-q1) pi/2)`` and
``rho2 = sin(q2 pi/2) / sin((q2-q1) pi/2)``. Because ``b(omega)`` increases
and ``a(omega)`` decreases, the curve is the graph of a decreasing convex
function ``a_star(b)``, obtained here by bisection in ``omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "MIN_ORDER_GAP",
    "CriticalCurve",
    "CurveSample",
    "a_star",
    "crossing_frequency",
    "gamma_point",
    "rho_coefficients",
]

MIN_ORDER_GAP = 1e-9


def rho_coefficients(q1: float, q2: float) -> tuple[float, float]:
    gap = math.sin((q2 - q1) * math.pi / 2.0)
    return math.sin(q1 * math.pi / 2.0) / gap, math.sin(q2 * math.pi / 2.0) / gap


@dataclass(frozen=True)
class CriticalCurve:
    c: float
    q1: float
    q2: float
    rho1: float = float("nan")
    rho2: float = float("nan")

    def __post_init__(self):
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"the critical curve needs c > 0, got {self.c}")
        if not (0.0 < self.q1 < self.q2 <= 1.0):
            raise ValueError(f"need 0 < q1 < q2 <= 1, got q1={self.q1}, q2={self.q2}")
        if self.q2 - self.q1 < MIN_ORDER_GAP:
            raise ValueError("orders too close; use the commensurate criterion instead")
        r1, r2 = rho_coefficients(self.q1, self.q2)
        object.__setattr__(self, "rho1", r1)
        object.__setattr__(self, "rho2", r2)

    @property
    def rho(self) -> float:
        return self.rho1 / self.rho2

    @property
    def omega_a(self) -> float:
        """Frequency where ``a(omega) = 0``."""
        return (self.c * self.rho) ** (1.0 / (self.q1 + self.q2))

    @property
    def omega_b(self) -> float:
        """Frequency where ``b(omega) = 0``."""
        return (self.c / self.rho) ** (1.0 / (self.q1 + self.q2))

    def b_of(self, omega: float) -> float:
        return self.rho1 * omega**self.q2 - self.c * self.rho2 * omega ** (-self.q1)

    def a_of(self, omega: float) -> float:
        return self.c * self.rho1 * omega ** (-self.q2) - self.rho2 * omega**self.q1


@dataclass(frozen=True)
class CurveSample:
    omega: float
    b: float
    a: float


def gamma_point(curve: CriticalCurve, omega: float) -> CurveSample:
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    return CurveSample(omega, curve.b_of(omega), curve.a_of(omega))


def _exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def _b_at(curve: CriticalCurve, x: float) -> float:
    """``b(omega)`` at ``omega = exp(x)``, safe where ``omega`` itself would underflow."""
    return curve.rho1 * _exp(curve.q2 * x) - curve.rho2 * _exp(math.log(curve.c) - curve.q1 * x)


def _a_at(curve: CriticalCurve, x: float) -> float:
    return curve.rho1 * _exp(math.log(curve.c) - curve.q2 * x) - curve.rho2 * _exp(curve.q1 * x)


def _log_crossing_frequency(curve: CriticalCurve, b: float) -> float:
    """``log omega`` with ``b(omega) = b``.

    The bracket starts at ``log omega_b`` (where ``b = 0``) and widens with
    doubling steps; bisection then runs to adjacent floating-point numbers.
    """
    if not math.isfinite(b):
        raise ValueError("b must be finite")
    x0 = (math.log(curve.c) - math.log(curve.rho)) / (curve.q1 + curve.q2)
    if b == 0.0:
        return x0
    lo = hi = x0
    step = 1.0
    if b > 0.0:
        while _b_at(curve, hi) < b:
            lo, hi = hi, hi + step
            step *= 2.0
    else:
        while _b_at(curve, lo) > b:
            lo, hi = lo - step, lo
            step *= 2.0
    for _ in range(2200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _b_at(curve, mid) < b:
            lo = mid
        else:
            hi = mid
    # pick the endpoint with the smaller residual
    return lo if abs(_b_at(curve, lo) - b) <= abs(_b_at(curve, hi) - b) else hi


def crossing_frequency(curve: CriticalCurve, b: float) -> float:
    """The unique ``omega > 0`` with ``b(omega) = b``."""
    return math.exp(_log_crossing_frequency(curve, b))


def a_star(curve: CriticalCurve, b: float) -> float:
    """May be +-inf when the threshold exceeds the float range (extreme ``c``)."""
    return _a_at(curve, _log_crossing_frequency(curve, b))
