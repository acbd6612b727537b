"""The characteristic quasi-polynomial ``s^(q1+q2) + a s^q2 + b s^q1 + c``.

All complex powers are principal values, ``s^q = exp(q Log s)`` with
``arg s`` in ``(-pi, pi]``, and ``0^q = 0``. Roots in the open right
half-plane are counted with the argument principle on the boundary of a
half-disk; this count is the independent check for every stability verdict
produced by :mod:`fracstab.classify`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "BoundaryRoot",
    "CharFunction",
    "NoConvergence",
    "RhpCount",
    "UnreliableWinding",
    "count_rhp_roots",
    "cpow",
    "eval_delta",
    "eval_delta_ds",
    "track_root",
]

BOUNDARY_TOL = 1e-8
RESIDUAL_TOL = 0.1
_MAX_PHASE_STEP = math.pi / 4
_MAX_REFINE_ROUNDS = 60


class BoundaryRoot(ArithmeticError):
    """Delta has a root on (or numerically at) the imaginary axis."""

    def __init__(self, omega, modulus):
        super().__init__(f"|Delta(i w)| ~ {modulus:.3g} (relative) at w = {omega:.12g}")
        self.omega = omega
        self.modulus = modulus


class UnreliableWinding(ArithmeticError):
    pass


class NoConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class CharFunction:
    """Coefficients and orders of Delta. Construct through :meth:`normalized`
    to get ``q1 <= q2``; the swap ``(a, b, q1, q2) -> (b, a, q2, q1)`` leaves
    Delta unchanged."""

    a: float
    b: float
    c: float
    q1: float
    q2: float

    def __post_init__(self):
        for name in ("a", "b", "c", "q1", "q2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if not (0.0 < self.q1 <= 1.0 and 0.0 < self.q2 <= 1.0):
            raise ValueError(f"orders must lie in (0, 1], got q1={self.q1}, q2={self.q2}")

    @classmethod
    def normalized(cls, a, b, c, q1, q2) -> "CharFunction":
        if q1 > q2:
            a, b, q1, q2 = b, a, q2, q1
        return cls(a, b, c, q1, q2)

    def swapped(self) -> "CharFunction":
        return CharFunction(self.b, self.a, self.c, self.q2, self.q1)

    @property
    def decay_order(self) -> float:
        return min(self.q1, self.q2)

    def __call__(self, s):
        return eval_delta(self, s)


def cpow(s, q):
    """Principal power ``s**q`` for complex scalars or arrays, ``0**q = 0``.

    A negative real ``s`` carrying a ``-0.0`` imaginary part is treated as
    lying on the upper side of the cut, matching ``arg s = pi``.
    """
    s = np.asarray(s, dtype=np.complex128)
    s = s.real + 1j * (s.imag + 0.0)  # -0.0 -> +0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(q * np.log(s))
    out = np.where(s == 0, 0.0, out)
    return out[()] if out.ndim == 0 else out


def eval_delta(f: CharFunction, s):
    s = np.asarray(s, dtype=np.complex128)
    val = cpow(s, f.q1 + f.q2) + f.a * cpow(s, f.q2) + f.b * cpow(s, f.q1) + f.c
    return complex(val) if np.ndim(val) == 0 else val


def eval_delta_ds(f: CharFunction, s):
    """Derivative of Delta with respect to ``s`` (undefined at 0)."""
    s = np.asarray(s, dtype=np.complex128)
    if np.any(s == 0):
        raise ValueError("dDelta/ds is singular at s = 0")
    q = f.q1 + f.q2
    val = (
        q * cpow(s, q - 1.0)
        + f.a * f.q2 * cpow(s, f.q2 - 1.0)
        + f.b * f.q1 * cpow(s, f.q1 - 1.0)
    )
    return complex(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class RhpCount:
    count: int
    contour_radius: float
    winding_residual: float


def _log_contour_radius(f: CharFunction) -> float:
    qmin = min(f.q1, f.q2)
    scale = 3.0 * (abs(f.a) + abs(f.b) + abs(f.c))
    if scale <= 0.0:
        return math.log(2.0)
    return max(math.log(2.0), math.log(scale) / qmin)


def contour_radius(f: CharFunction) -> float:
    """Radius beyond which ``s^(q1+q2)`` dominates the other terms threefold.

    May be ``inf`` for very small orders; the counter itself works with
    the logarithm.
    """
    lr = _log_contour_radius(f)
    return math.exp(lr) if lr < 709.0 else math.inf


def _log_inner_radius(f: CharFunction) -> float:
    """``log r0`` with ``|Delta(s) - c| <= |c|/3`` on the closed disk ``|s| <= r0 <= 1``."""
    qmin = min(f.q1, f.q2)
    return min(0.0, (math.log(abs(f.c) / 3.0) - math.log1p(abs(f.a) + abs(f.b))) / qmin)


def _delta_rel(f: CharFunction, ell, theta):
    """``Delta(s) / (1 + |s|^(q1+q2))`` at ``s = exp(ell + i theta)``.

    Evaluated term by term in log-polar form so that neither huge nor tiny
    ``|s|`` overflows.
    """
    ell = np.asarray(ell, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    qs = f.q1 + f.q2
    norm = np.logaddexp(0.0, qs * ell)
    out = np.exp(qs * ell - norm + 1j * qs * theta)
    out = out + f.a * np.exp(f.q2 * ell - norm + 1j * f.q2 * theta)
    out = out + f.b * np.exp(f.q1 * ell - norm + 1j * f.q1 * theta)
    return out + f.c * np.exp(-norm)


def _delta_rel_dell(f: CharFunction, ell: float, theta: float) -> complex:
    """Derivative of ``_delta_rel`` with respect to ``ell`` (scalar)."""
    qs = f.q1 + f.q2
    norm = float(np.logaddexp(0.0, qs * ell))
    dnorm = qs / (1.0 + math.exp(-qs * ell)) if qs * ell > -700 else 0.0
    out = 0j
    for coeff, p in ((1.0, qs), (f.a, f.q2), (f.b, f.q1), (f.c, 0.0)):
        out += coeff * (p - dnorm) * cmath.exp(p * ell - norm + 1j * p * theta)
    return out


def _refine(param, fun, max_rounds=_MAX_REFINE_ROUNDS):
    """Insert midpoints until consecutive phase increments of ``fun`` are small.

    Returns the final parameter grid, function values and phase increments.
    """
    vals = fun(param)
    for _ in range(max_rounds):
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.flatnonzero(np.abs(dphi) >= _MAX_PHASE_STEP)
        if bad.size == 0:
            return param, vals, dphi
        mids = 0.5 * (param[bad] + param[bad + 1])
        if np.any((mids == param[bad]) | (mids == param[bad + 1])):
            break
        param = np.insert(param, bad + 1, mids)
        vals = np.insert(vals, bad + 1, fun(mids))
    raise UnreliableWinding("phase increments did not resolve below pi/4 along the contour")


def _axis_min(f, ell, rel):
    """Smallest ``|Delta(i w)| / (1 + w^(q1+q2))`` on the upper imaginary
    axis, polished around sampled local minima that look suspicious."""
    k = int(np.argmin(rel))
    best, best_ell = float(rel[k]), float(ell[k])
    interior = np.arange(1, len(rel) - 1)
    minima = interior[(rel[interior] <= rel[interior - 1]) & (rel[interior] <= rel[interior + 1])]
    # a true zero can read as large as |dDelta| * spacing on the grid
    for i in minima[rel[minima] < 5e-2]:
        lo, hi = sorted((ell[i - 1], ell[i + 1]))
        res = minimize_scalar(
            lambda x: abs(complex(_delta_rel(f, x, 0.5 * math.pi))),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-15},
        )
        x, val = float(res.x), float(res.fun)
        # Brent stalls near sqrt(eps) in x; Gauss-Newton on the complex value
        # reaches a true zero to rounding
        for _ in range(8):
            g = complex(_delta_rel(f, x, 0.5 * math.pi))
            dg = _delta_rel_dell(f, x, 0.5 * math.pi)
            if dg == 0:
                break
            x_new = min(max(x - (g * dg.conjugate()).real / abs(dg) ** 2, lo), hi)
            val_new = abs(complex(_delta_rel(f, x_new, 0.5 * math.pi)))
            if not val_new < val:
                break
            x, val = x_new, val_new
        if val < best:
            best, best_ell = val, x
    return best, math.exp(best_ell)


def _count_commensurate(f: CharFunction) -> RhpCount:
    """Equal orders: with ``lam = s^q`` the function is ``lam^2 + (a+b) lam + c``.

    A root ``lam`` comes from a principal-branch ``s`` iff ``|arg lam| < q pi``,
    and that ``s`` lies in the right half-plane iff ``|arg lam| < q pi / 2``.
    """
    q = f.q1
    count = 0
    for lam in np.roots([1.0, f.a + f.b, f.c]):
        lam = complex(lam)
        gap = abs(abs(cmath.phase(lam)) - 0.5 * q * math.pi)
        if gap < BOUNDARY_TOL:
            raise BoundaryRoot(abs(lam) ** (1.0 / q), gap)
        if abs(cmath.phase(lam)) < 0.5 * q * math.pi:
            count += 1
    return RhpCount(count, contour_radius(f), 0.0)


def count_rhp_roots(f: CharFunction, n_initial: int = 2048) -> RhpCount:
    """Number of roots of Delta with ``Re s > 0``, counted with multiplicity.

    The closed contour, traversed counter-clockwise, is: the arc
    ``|s| = R`` from ``-iR`` to ``iR``; the imaginary axis down to ``i r0``;
    the half-circle ``|s| = r0`` through ``r0``; the axis from ``-i r0`` to
    ``-iR``. No root lies in ``|s| <= r0`` (there ``|Delta - c| <= |c|/3``)
    and none outside ``|s| < R``, so every right half-plane root is enclosed.

    Raises BoundaryRoot if Delta (nearly) vanishes on the imaginary axis and
    UnreliableWinding if the phase cannot be tracked.
    """
    if f.c == 0.0:
        raise ValueError("Delta(0) = c = 0: the contour passes through a root")
    if f.q1 == f.q2:
        return _count_commensurate(f)
    log_r = _log_contour_radius(f)
    log_r0 = _log_inner_radius(f)
    half_pi = 0.5 * math.pi
    n_arc = n_initial // 4 + 1

    pieces = [
        (np.linspace(-half_pi, half_pi, n_arc), lambda th: _delta_rel(f, log_r, th)),
        (np.linspace(log_r, log_r0, n_initial), lambda el: _delta_rel(f, el, half_pi)),
        (np.linspace(half_pi, -half_pi, n_arc), lambda th: _delta_rel(f, log_r0, th)),
        (np.linspace(log_r0, log_r, n_initial), lambda el: _delta_rel(f, el, -half_pi)),
    ]
    # real coefficients: the lower axis mirrors the upper one, so one check
    # covers both, and it must come first since refinement stalls at a root
    axis = pieces[1][0]
    rel_min, w_min = _axis_min(f, axis, np.abs(pieces[1][1](axis)))
    if rel_min < BOUNDARY_TOL:
        raise BoundaryRoot(w_min, rel_min)

    total = 0.0
    ends = []
    for param, fun in pieces:
        param, vals, dphi = _refine(param, fun)
        total += float(np.sum(dphi))
        ends.append((vals[0], vals[-1]))
    # consecutive pieces share endpoints up to rounding; add the seams anyway
    for k in range(4):
        total += float(np.angle(ends[(k + 1) % 4][0] / ends[k][1]))

    turns = total / (2.0 * math.pi)
    count = int(round(turns))
    residual = abs(total - 2.0 * math.pi * count)
    if residual >= RESIDUAL_TOL:
        raise UnreliableWinding(f"winding integral {turns:.6f} turns is not close to an integer")
    if count < 0:
        raise UnreliableWinding(f"negative winding number {count}")
    return RhpCount(count, contour_radius(f), residual)


def track_root(f: CharFunction, s0, max_iter: int = 100) -> complex:
    """Newton iteration for a root of Delta starting at ``s0``.

    Steps are halved while they fail to reduce ``|Delta|``; the result meets
    ``|Delta(s)| <= 1e-12 (1 + |s|^(q1+q2))``.
    """
    s = complex(s0)
    qsum = f.q1 + f.q2
    fs = eval_delta(f, s)
    for _ in range(max_iter):
        tol = 1e-12 * (1.0 + abs(s) ** qsum)
        if s != 0 and abs(fs) <= tol:
            # one extra step to land on the root rather than the tolerance edge
            ds = fs / eval_delta_ds(f, s)
            s_new = s - ds
            f_new = eval_delta(f, s_new)
            return s_new if abs(f_new) <= abs(fs) else s
        if s == 0:
            raise NoConvergence("Newton iterate hit the branch point s = 0")
        step = fs / eval_delta_ds(f, s)
        lam = 1.0
        for _ in range(30):
            cand = s - lam * step
            fc = eval_delta(f, cand)
            if abs(fc) < abs(fs):
                break
            lam *= 0.5
        s, fs = cand, fc
    if s != 0 and abs(fs) <= 1e-12 * (1.0 + abs(s) ** qsum):
        return s
    raise NoConvergence(f"no root found from s0={s0!r} (|Delta| = {abs(fs):.3g})")
