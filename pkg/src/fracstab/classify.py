"""Stability verdicts for two-dimensional linear Caputo systems.

The system ``D^q1 x = a11 x + a12 y``, ``D^q2 y = a21 x + a22 y`` is reduced
to the coefficients ``a = -a11``, ``b = -a22``, ``c = det A`` of its
characteristic function. Verdicts are decided in this order:

* ``c < 0``: unstable for all orders (a positive real root exists).
* ``c = 0``: zero is a root; no asymptotic claim is made.
* ``a + 1 > 0, a + b > 0, b + c > 0``: stable for all orders.
* ``a + b + c + 1 <= 0``: unstable for all orders (``Delta(1) <= 0``).
* otherwise the sign of ``a - a_star(b)`` decides, with a thin band
  around the critical curve reported as a Hopf-type marginal case.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

from . import critcurve
from .charfn import BoundaryRoot, CharFunction, count_rhp_roots

__all__ = [
    "HOPF_TOL",
    "LinearSystem2",
    "StabilityVerdict",
    "Verdict",
    "classify_coeffs",
    "classify_matrix",
    "critical_a",
    "order_free_verdict",
    "verify_with_oracle",
]

HOPF_TOL = 1e-10


class Verdict(str, enum.Enum):
    STABLE_ALL_ORDERS = "StableAllOrders"
    UNSTABLE_ALL_ORDERS = "UnstableAllOrders"
    STABLE_AT_ORDERS = "StableAtOrders"
    UNSTABLE_AT_ORDERS = "UnstableAtOrders"
    MARGINAL_HOPF = "MarginalHopf"
    DEGENERATE_ZERO_ROOT = "DegenerateZeroRoot"

    @property
    def is_stable(self) -> bool:
        return self in (Verdict.STABLE_ALL_ORDERS, Verdict.STABLE_AT_ORDERS)

    @property
    def is_unstable(self) -> bool:
        return self in (Verdict.UNSTABLE_ALL_ORDERS, Verdict.UNSTABLE_AT_ORDERS)


@dataclass(frozen=True)
class StabilityVerdict:
    kind: Verdict
    rule: str
    decay_order: Optional[float] = None
    margin: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "rule": self.rule,
            "decay_order": self.decay_order,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class LinearSystem2:
    a11: float
    a12: float
    a21: float
    a22: float
    q1: float
    q2: float

    @classmethod
    def from_matrix(cls, A, q1, q2) -> "LinearSystem2":
        (a11, a12), (a21, a22) = A
        return cls(float(a11), float(a12), float(a21), float(a22), q1, q2)

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return -self.a11, -self.a22, self.a11 * self.a22 - self.a12 * self.a21

    @property
    def decoupled(self) -> bool:
        return self.a12 * self.a21 == 0.0

    def relabeled(self) -> "LinearSystem2":
        """Same system with the roles of ``x`` and ``y`` exchanged."""
        return LinearSystem2(self.a22, self.a21, self.a12, self.a11, self.q2, self.q1)

    def char_function(self) -> CharFunction:
        a, b, c = self.coefficients
        return CharFunction.normalized(a, b, c, self.q1, self.q2)


def _check_orders(q1, q2):
    if not (0.0 < q1 <= 1.0 and 0.0 < q2 <= 1.0):
        raise ValueError(f"orders must lie in (0, 1], got q1={q1}, q2={q2}")


def critical_a(b: float, c: float, q1: float, q2: float) -> float:
    """Threshold ``a_star(b)`` for ``c > 0``; orders in any order.

    For (nearly) equal orders ``q`` the quadratic ``l^2 + (a+b) l + c`` in
    ``l = s^q`` gives the closed form ``-b - 2 sqrt(c) cos(q pi / 2)``.
    """
    if q1 > q2:
        raise ValueError("critical_a expects q1 <= q2; swap (a, b) with the orders")
    if q2 - q1 < critcurve.MIN_ORDER_GAP:
        q = 0.5 * (q1 + q2)
        return -b - 2.0 * math.sqrt(c) * math.cos(q * math.pi / 2.0)
    return critcurve.a_star(critcurve.CriticalCurve(c, q1, q2), b)


def order_free_verdict(a: float, b: float, c: float) -> Optional[StabilityVerdict]:
    """The verdict if it follows from ``(a, b, c)`` alone, else None.

    ``a`` must be the coefficient of the larger order's power. The stable
    condition is not symmetric in ``a`` and ``b``: with the roles exchanged
    it can fail. The stable verdict is returned without a decay order.
    """
    if c < 0.0:
        return StabilityVerdict(Verdict.UNSTABLE_ALL_ORDERS, "Cor-1")
    if c == 0.0:
        return StabilityVerdict(Verdict.DEGENERATE_ZERO_ROOT, "Prop-2")
    if a + 1.0 > 0.0 and a + b > 0.0 and b + c > 0.0:
        return StabilityVerdict(Verdict.STABLE_ALL_ORDERS, "Cor-3a")
    if a + b + c + 1.0 <= 0.0:
        return StabilityVerdict(Verdict.UNSTABLE_ALL_ORDERS, "Cor-3b")
    return None


def classify_coeffs(a: float, b: float, c: float, q1: float, q2: float) -> StabilityVerdict:
    _check_orders(q1, q2)
    # equal orders: fix the coefficient order too, so swapping is bit-exact
    if q1 > q2 or (q1 == q2 and a < b):
        a, b, q1, q2 = b, a, q2, q1
    q = min(q1, q2)
    fixed = order_free_verdict(a, b, c)
    if fixed is not None:
        if fixed.kind.is_stable:
            return StabilityVerdict(fixed.kind, fixed.rule, decay_order=q)
        return fixed

    commensurate = q2 - q1 < critcurve.MIN_ORDER_GAP
    astar = critical_a(b, c, q1, q2)
    margin = a - astar
    if math.isfinite(astar) and abs(margin) <= HOPF_TOL * (1.0 + abs(astar)):
        return StabilityVerdict(Verdict.MARGINAL_HOPF, "Prop-3b", margin=margin)
    if margin > 0.0:
        rule = "Comm-a" if commensurate else "Cor-2a"
        return StabilityVerdict(Verdict.STABLE_AT_ORDERS, rule, decay_order=q, margin=margin)
    rule = "Comm-b" if commensurate else "Cor-2b"
    return StabilityVerdict(Verdict.UNSTABLE_AT_ORDERS, rule, margin=margin)


def _classify_decoupled(sys: LinearSystem2) -> StabilityVerdict:
    # each scalar equation D^q x = lam x is stable iff lam < 0, whatever q
    diag = (sys.a11, sys.a22)
    if any(d == 0.0 for d in diag):
        return StabilityVerdict(Verdict.DEGENERATE_ZERO_ROOT, "Decoupled")
    if all(d < 0.0 for d in diag):
        return StabilityVerdict(Verdict.STABLE_ALL_ORDERS, "Decoupled", decay_order=min(sys.q1, sys.q2))
    return StabilityVerdict(Verdict.UNSTABLE_ALL_ORDERS, "Decoupled")


def classify_matrix(sys: LinearSystem2) -> StabilityVerdict:
    _check_orders(sys.q1, sys.q2)
    if sys.decoupled:
        warnings.warn("a12*a21 = 0: classifying the two equations separately", stacklevel=2)
        return _classify_decoupled(sys)
    return classify_coeffs(*sys.coefficients, sys.q1, sys.q2)


def verify_with_oracle(sys: LinearSystem2) -> bool:
    """Check the verdict against the argument-principle root count.

    Stable verdicts need no right half-plane roots, unstable ones at least
    one, and a marginal verdict needs a root on the imaginary axis.
    """
    a, b, c = sys.coefficients
    if c == 0.0:
        raise ValueError("the oracle needs det(A) != 0")
    verdict = classify_matrix(sys)
    try:
        count = count_rhp_roots(sys.char_function()).count
    except BoundaryRoot:
        return verdict.kind is Verdict.MARGINAL_HOPF
    if verdict.kind.is_stable:
        return count == 0
    if verdict.kind.is_unstable:
        return count >= 1
    return False
