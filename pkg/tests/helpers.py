"""Shared test utilities built on the package."""

import numpy as np

from fracstab.charfn import track_root
from fracstab.critcurve import CriticalCurve, gamma_point


def transversality_slope(f_at, s0, a_star, eps=1e-6):
    """Central difference of Re(root) in a at a*, following the root from s0."""
    hi = track_root(f_at(a_star + eps), s0)
    lo = track_root(f_at(a_star - eps), s0)
    return (hi.real - lo.real) / (2.0 * eps), hi, lo


def random_boundary_configs(rng, n):
    """(curve, omega, sample) triples with c > 0, q1 < q2 and omega > 0."""
    out = []
    while len(out) < n:
        c = float(np.exp(rng.uniform(-2.0, 2.0)))
        q1, q2 = sorted(rng.uniform(0.05, 1.0, size=2))
        if q2 - q1 < 0.02:
            continue
        curve = CriticalCurve(c, float(q1), float(q2))
        omega = float(np.exp(rng.uniform(-2.0, 2.0)))
        out.append((curve, omega, gamma_point(curve, omega)))
    return out
