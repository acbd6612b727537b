import math
import os
import subprocess
import sys
import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from fracstab import _kernels
from fracstab._jit import HAVE_NUMBA
from fracstab.classify import LinearSystem2, Verdict, classify_matrix
from fracstab.fde_solver import (
    DegenerateTail,
    FdeProblem,
    Trajectory,
    estimate_decay_exponent,
    linear_problem,
    solve,
)
from oracles import mittag_leffler_relaxation

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba disabled")


def test_zero_rhs_keeps_initial_state():
    prob = FdeProblem([0.3, 0.9], lambda t, x: np.zeros(2), [1.0, 2.0], 2.0, 0.01)
    traj = solve(prob)
    assert len(traj) == 201
    assert np.array_equal(traj.states, np.tile([1.0, 2.0], (201, 1)))
    assert traj.times[-1] == pytest.approx(2.0)


def test_first_state_is_initial_and_metadata_copied():
    traj = solve(linear_problem([[-1.0]], [0.6], [0.7], 1.0, 0.1))
    assert traj.states[0, 0] == 0.7
    assert traj.states.shape == (11, 1)
    assert np.array_equal(traj.orders, [0.6])
    assert traj.step == 0.1 and not traj.overflowed


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_relaxation_matches_mittag_leffler(t):
    traj = solve(linear_problem([[-1.0]], [0.7], [1.0], 1.0, 1e-3))
    k = int(round(t / 1e-3))
    assert abs(traj.states[k, 0] - mittag_leffler_relaxation(0.7, t)) < 1e-4


def test_mittag_leffler_oracle_sanity():
    # E_1(-t) = exp(-t), E_{1/2}(-sqrt t) = exp(t) erfc(sqrt t)
    assert mittag_leffler_relaxation(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert mittag_leffler_relaxation(0.5, 0.7) == pytest.approx(math.exp(0.7) * math.erfc(math.sqrt(0.7)), rel=1e-12)


def test_integer_orders_match_classical_integrator():
    A = np.array([[-0.5, 1.0], [-1.0, -0.3]])
    x0 = [1.0, 0.5]
    ref = solve_ivp(lambda t, x: A @ x, (0, 5), x0, method="DOP853", rtol=1e-13, atol=1e-14).y[:, -1]
    traj = solve(linear_problem(A, [1.0, 1.0], x0, 5.0, 1e-3))
    assert np.max(np.abs(traj.states[-1] - ref)) < 1e-6


@needs_numba
def test_backends_agree():
    A = np.array([[-0.4, 1.2], [-0.9, 0.1]])
    prob = linear_problem(A, [0.45, 0.85], [1.0, -0.5], 20.0, 0.01)
    a = solve(prob, backend="numba")
    b = solve(prob, backend="numpy")
    assert np.allclose(a.states, b.states, rtol=1e-12, atol=1e-13)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        solve(linear_problem([[-1.0]], [0.5], [1.0], 1.0, 0.1), backend="cuda")


def test_numba_backend_needs_compiled_rhs():
    prob = FdeProblem([0.5], lambda t, x: -x, [1.0], 1.0, 0.1)
    with pytest.raises(ValueError):
        solve(prob, backend="numba")
    assert solve(prob).states[-1, 0] < 1.0  # falls back to numpy by default


def test_pure_numpy_mode_via_environment():
    code = (
        "import numpy as np\n"
        "from fracstab._jit import HAVE_NUMBA\n"
        "from fracstab.fde_solver import linear_problem, solve\n"
        "assert not HAVE_NUMBA\n"
        "t = solve(linear_problem([[-1.0]], [0.7], [1.0], 1.0, 0.01))\n"
        "print(repr(float(t.states[-1, 0])))\n"
    )
    env = dict(os.environ, FRACSTAB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    here = solve(linear_problem([[-1.0]], [0.7], [1.0], 1.0, 0.01))
    assert float(out.stdout) == pytest.approx(here.states[-1, 0], rel=1e-12)


def test_step_halving_converges():
    A = np.array([[-0.6, 1.0], [-1.0, -0.2]])
    ends = [solve(linear_problem(A, [0.5, 0.9], [1.0, 0.0], 4.0, h)).states[-1] for h in (0.04, 0.02, 0.01, 0.005)]
    diffs = [np.linalg.norm(ends[i + 1] - ends[i]) for i in range(3)]
    for d_prev, d_next in zip(diffs, diffs[1:]):
        assert d_next <= d_prev / 2.0


def test_history_is_deterministic():
    A = np.array([[-0.3, 0.8], [-1.1, 0.05]])
    short = solve(linear_problem(A, [0.4, 0.8], [0.2, 1.0], 5.0, 0.01))
    long = solve(linear_problem(A, [0.4, 0.8], [0.2, 1.0], 10.0, 0.01))
    assert np.array_equal(short.states, long.states[: len(short)])


def test_overflow_truncates_and_flags():
    traj = solve(linear_problem([[2.0, 0.0], [0.0, 1.0]], [0.9, 0.9], [1.0, 1.0], 50.0, 0.01))
    assert traj.overflowed
    assert len(traj) < 5001
    assert np.all(np.isfinite(traj.states))
    assert np.max(np.abs(traj.states)) <= _kernels.OVERFLOW_LIMIT


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(orders=[0.0], initial_state=[1.0]),
        dict(orders=[1.2], initial_state=[1.0]),
        dict(orders=[0.5, 0.5], initial_state=[1.0]),
        dict(orders=[0.5], initial_state=[1.0], t_end=1.0, step=0.3),
        dict(orders=[0.5], initial_state=[1.0], step=-0.1),
    ],
)
def test_problem_validation(kwargs):
    base = dict(rhs=lambda t, x: x, t_end=1.0, step=0.1) | kwargs
    with pytest.raises(ValueError):
        FdeProblem(**base)


def test_weights_are_positive_and_decreasing():
    b_rev, c_rev, a0 = _kernels.abm_weights(0.6, 500)
    b = b_rev[::-1]
    assert b[0] == 1.0 and np.all(np.diff(b) < 0)
    assert np.all(c_rev > 0) and np.all(a0[1:] > 0)


# --- decay exponent -------------------------------------------------------


def _synthetic(t, norm):
    states = np.column_stack([norm, np.zeros_like(norm)])
    return Trajectory(t, states, np.array([0.4, 0.8]), t[1] - t[0])


def test_exact_power_law():
    t = np.linspace(10.0, 100.0, 901)
    assert estimate_decay_exponent(_synthetic(t, t**-0.4)) == pytest.approx(0.4, abs=1e-6)


def test_constant_trajectory():
    t = np.linspace(0.0, 50.0, 501)
    try:
        p = estimate_decay_exponent(_synthetic(t, np.ones_like(t)))
    except DegenerateTail:
        return
    assert abs(p) < 1e-9


def test_zero_tail_is_degenerate():
    t = np.linspace(0.0, 50.0, 501)
    norm = np.where(t < 30, 1.0, 0.0)
    with pytest.raises(DegenerateTail):
        estimate_decay_exponent(_synthetic(t, norm))


def test_undamped_oscillation_is_degenerate():
    t = np.linspace(0.0, 200.0, 2001)
    with pytest.raises(DegenerateTail):
        estimate_decay_exponent(_synthetic(t, np.abs(np.sin(t)) + 1e-3))


def test_tail_fraction_validated():
    t = np.linspace(1.0, 10.0, 10)
    with pytest.raises(ValueError):
        estimate_decay_exponent(_synthetic(t, t**-1.0), tail_fraction=1.0)


def test_stable_linear_system_decays_algebraically():
    A = [[-1.0, 1.0], [-1.0, -1.0]]
    traj = solve(linear_problem(A, [0.4, 0.8], [1.0, 1.0], 500.0, 0.05))
    assert 0.25 <= estimate_decay_exponent(traj) <= 0.55


@pytest.mark.slow
def test_trajectories_follow_verdicts(rng):
    stable = unstable = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        while stable < 4 or unstable < 4:
            A = rng.uniform(-3, 3, size=(2, 2))
            q1, q2 = rng.uniform(0.3, 1.0, size=2)
            v = classify_matrix(LinearSystem2.from_matrix(A, q1, q2))
            if v.margin is None or abs(v.margin) < 0.2 or v.kind not in (Verdict.STABLE_AT_ORDERS, Verdict.UNSTABLE_AT_ORDERS):
                continue
            if (v.kind is Verdict.STABLE_AT_ORDERS and stable >= 4) or (v.kind is Verdict.UNSTABLE_AT_ORDERS and unstable >= 4):
                continue
            x0 = np.array([1.0, -0.5])
            traj = solve(linear_problem(A, [q1, q2], x0, 500.0, 0.05))
            norms = traj.norms()
            if v.kind is Verdict.STABLE_AT_ORDERS:
                stable += 1
                assert norms[-1] < norms[0]
            else:
                unstable += 1
                assert traj.overflowed or norms.max() > 10 * norms[0]
