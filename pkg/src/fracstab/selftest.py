"""Cross-validation suite behind ``fracstab selftest``."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import critcurve
from .charfn import CharFunction, eval_delta
from .classify import LinearSystem2, classify_coeffs, verify_with_oracle
from .fhn import FhnParams, classify_equilibrium, equilibrium, hopf_q1

ANCHOR_FHN = FhnParams(r=0.08, c=0.7, d=0.8, I=1.24567)


@dataclass
class Check:
    name: str
    passed: int = 0
    failed: int = 0
    notes: list = field(default_factory=list)

    def record(self, ok, note=None):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if note is not None and len(self.notes) < 5:
                self.notes.append(note)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0


def random_systems(rng, n):
    """Random systems with entries U[-3, 3] and orders U[0.05, 1], away
    from ``c = 0`` and from the critical curve."""
    out = []
    while len(out) < n:
        A = rng.uniform(-3.0, 3.0, size=(2, 2))
        q1, q2 = rng.uniform(0.05, 1.0, size=2)
        sys = LinearSystem2.from_matrix(A, float(q1), float(q2))
        a, b, c = sys.coefficients
        if abs(c) < 1e-6 or sys.decoupled:
            continue
        try:
            margin = classify_coeffs(a, b, c, sys.q1, sys.q2).margin
        except Exception:  # leave it to the oracle check to report
            margin = None
        if margin is not None and abs(margin) < 1e-6:
            continue
        out.append(sys)
    return out


def check_oracle(rng, n) -> Check:
    chk = Check("classifier vs argument-principle oracle")
    for sys in random_systems(rng, n):
        try:
            ok = verify_with_oracle(sys)
        except Exception as exc:
            ok = False
            sys = (sys, repr(exc))
        chk.record(ok, sys)
    return chk


def _curve_case(c, q1, q2, omega):
    curve = critcurve.CriticalCurve(c, q1, q2)
    pt = critcurve.gamma_point(curve, omega)
    f = CharFunction(pt.a, pt.b, c, q1, q2)
    resid = abs(eval_delta(f, 1j * omega)) / (1.0 + omega ** (q1 + q2))
    vals = np.array([critcurve.a_star(curve, b) for b in np.linspace(-10.0, 10.0, 41)])
    decreasing = bool(np.all(np.diff(vals) < 0.0))
    convex = bool(np.all(0.5 * (vals[:-2] + vals[2:]) - vals[1:-1] >= -1e-9))
    return resid, decreasing, convex


def check_curve(rng, n=100) -> Check:
    chk = Check("critical curve self-consistency")
    configs = [(4.0, 0.4, 0.8)]
    while len(configs) < n:
        c = float(np.exp(rng.uniform(-3, 3)))
        q1, q2 = sorted(rng.uniform(0.05, 1.0, size=2))
        if q2 - q1 > 1e-3:
            configs.append((c, float(q1), float(q2)))
    for c, q1, q2 in configs:
        omega = float(np.exp(rng.uniform(-3, 3)))
        try:
            resid, decreasing, convex = _curve_case(c, q1, q2, omega)
        except Exception as exc:
            chk.record(False, (c, q1, q2, repr(exc)))
            continue
        chk.record(resid < 1e-9, (c, q1, q2, omega, resid))
        chk.record(decreasing, (c, q1, q2, "not decreasing"))
        chk.record(convex, (c, q1, q2, "not convex"))
    return chk


def check_fhn() -> Check:
    chk = Check("FitzHugh-Nagumo anchors")

    def exact_equilibrium():
        eq = equilibrium(ANCHOR_FHN.with_current(ANCHOR_FHN.i_inf(0.8)))
        return abs(eq.v_star - 0.8) < 1e-12 and abs(eq.w_star - 1.875) < 1e-12, eq

    def rounded_equilibrium():
        eq = equilibrium(ANCHOR_FHN)
        return abs(eq.v_star - 0.8) < 1e-5 and abs(eq.w_star - 1.875) < 1e-5, eq

    def hopf():
        q1 = hopf_q1(ANCHOR_FHN, 0.8)
        return q1 is not None and abs(q1 - 0.599) <= 0.005, q1

    def verdict(q1, expected):
        kind = classify_equilibrium(ANCHOR_FHN, q1, 0.8).kind.value
        return kind == expected, (q1, kind)

    cases = [
        exact_equilibrium,
        rounded_equilibrium,
        hopf,
        lambda: verdict(0.58, "StableAtOrders"),
        lambda: verdict(0.63, "UnstableAtOrders"),
    ]
    for case in cases:
        try:
            chk.record(*case())
        except Exception as exc:
            chk.record(False, repr(exc))
    return chk


def run_selftest(seed: int = 0, n_systems: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [check_oracle(rng, n_systems), check_curve(rng), check_fhn()]


def format_report(checks) -> str:
    lines = []
    for chk in checks:
        total = chk.passed + chk.failed
        status = "PASS" if chk.ok else "FAIL"
        lines.append(f"{status} {chk.name}: {chk.passed}/{total} passed, {chk.failed} failed")
        for note in chk.notes:
            lines.append(f"    e.g. {note}")
    ok = all(c.ok for c in checks)
    lines.append("all checks passed" if ok else "SELFTEST FAILED")
    return "\n".join(lines)
