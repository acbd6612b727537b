import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, example, given
from hypothesis import strategies as st

from fracstab.charfn import BoundaryRoot, CharFunction, count_rhp_roots
from fracstab.classify import (
    HOPF_TOL,
    LinearSystem2,
    Verdict,
    classify_coeffs,
    classify_matrix,
    critical_a,
    verify_with_oracle,
)

FHN_J = [[1 - 0.64, -1.0], [0.064 * 1.25, -0.064]]
entry = st.floats(-3.0, 3.0)
order = st.floats(0.05, 1.0)


def test_coefficient_examples():
    for q1, q2 in [(0.2, 0.9), (0.7, 0.3), (1.0, 1.0)]:
        v = classify_coeffs(1, 1, 2, q1, q2)
        assert v.kind is Verdict.STABLE_ALL_ORDERS and v.rule == "Cor-3a"
        v = classify_coeffs(-3, 0, 1, q1, q2)
        assert v.kind is Verdict.UNSTABLE_ALL_ORDERS and v.rule == "Cor-3b"


def test_fhn_coefficients_flip_between_orders():
    v = classify_coeffs(-0.36, 0.064, 0.05696, 0.58, 0.8)
    assert v.kind is Verdict.STABLE_AT_ORDERS and v.rule == "Cor-2a"
    v = classify_coeffs(-0.36, 0.064, 0.05696, 0.63, 0.8)
    assert v.kind is Verdict.UNSTABLE_AT_ORDERS and v.rule == "Cor-2b"


def test_matrix_examples():
    v = classify_matrix(LinearSystem2.from_matrix([[0, 1], [1, 0]], 0.3, 0.9))
    assert v.kind is Verdict.UNSTABLE_ALL_ORDERS and v.rule == "Cor-1"
    v = classify_matrix(LinearSystem2.from_matrix([[-1, 1], [-1, -1]], 0.3, 0.9))
    assert v.kind is Verdict.STABLE_ALL_ORDERS
    v = classify_matrix(LinearSystem2.from_matrix(FHN_J, 0.58, 0.8))
    assert v.kind is Verdict.STABLE_AT_ORDERS


def test_unit_diagonal_example_is_unstable():
    # a = -1, b = 0.064, c = 0.016: Delta has real positive roots near 0.0081 and 0.859
    sys = LinearSystem2(1, -1, 0.08, -0.064, 0.58, 0.8)
    v = classify_matrix(sys)
    assert v.kind is Verdict.UNSTABLE_AT_ORDERS
    assert count_rhp_roots(sys.char_function()).count == 2
    assert verify_with_oracle(sys)


def test_zero_determinant():
    v = classify_coeffs(1.0, -2.0, 0.0, 0.5, 0.7)
    assert v.kind is Verdict.DEGENERATE_ZERO_ROOT and v.rule == "Prop-2"
    with pytest.raises(ValueError):
        verify_with_oracle(LinearSystem2(1, 2, 1, 2, 0.5, 0.7))


def test_rejects_bad_orders():
    with pytest.raises(ValueError):
        classify_coeffs(1, 1, 1, 0.0, 0.5)
    with pytest.raises(ValueError):
        classify_coeffs(1, 1, 1, 0.5, 1.5)


def test_decay_order_present_only_for_stable_kinds():
    for a in np.linspace(-4, 4, 33):
        for b in (-1.0, 0.5, 2.0):
            for c in (-1.0, 0.3, 3.0):
                v = classify_coeffs(a, b, c, 0.45, 0.85)
                assert (v.decay_order is not None) == v.kind.is_stable
                if v.decay_order is not None:
                    assert v.decay_order == 0.45


def test_marginal_band():
    b, c, q1, q2 = -0.5, 1.5, 0.3, 0.9
    ast = critical_a(b, c, q1, q2)
    assert classify_coeffs(ast, b, c, q1, q2).kind is Verdict.MARGINAL_HOPF
    tol = HOPF_TOL * (1 + abs(ast))
    assert classify_coeffs(ast + 0.5 * tol, b, c, q1, q2).kind is Verdict.MARGINAL_HOPF
    assert classify_coeffs(ast + 3 * tol, b, c, q1, q2).kind is Verdict.STABLE_AT_ORDERS
    assert classify_coeffs(ast - 3 * tol, b, c, q1, q2).kind is Verdict.UNSTABLE_AT_ORDERS
    with pytest.raises(BoundaryRoot):
        count_rhp_roots(CharFunction(ast, b, c, q1, q2))


def test_commensurate_formula():
    q = 0.6
    expected = 0.3 - 2 * math.sqrt(2.0) * math.cos(q * math.pi / 2)
    assert critical_a(-0.3, 2.0, q, q) == pytest.approx(expected, rel=1e-14)
    v = classify_coeffs(expected + 0.1, -0.3, 2.0, q, q)
    assert v.kind is Verdict.STABLE_AT_ORDERS and v.rule == "Comm-a"
    v = classify_coeffs(expected - 0.1, -0.3, 2.0, q, q)
    assert v.kind is Verdict.UNSTABLE_AT_ORDERS and v.rule == "Comm-b"


@given(st.floats(-3, 3), st.floats(0.1, 4.0), st.floats(0.05, 1.0))
def test_commensurate_limit_is_continuous(b, c, q):
    q2 = min(1.0, q + 1e-5)
    q1 = q2 - 1e-5
    assert critical_a(b, c, q1, q2) == pytest.approx(critical_a(b, c, q, q), abs=1e-3 * (1 + abs(b) + c))


@given(entry, entry, entry, entry, order, order)
def test_relabeling_invariance(a11, a12, a21, a22, q1, q2):
    sys = LinearSystem2(a11, a12, a21, a22, q1, q2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        v1, v2 = classify_matrix(sys), classify_matrix(sys.relabeled())
    assert v1.kind is v2.kind


@example(1.0, -1.0, 1.0, 1.0, 1.0)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), order, order)
def test_swap_invariance(a, b, c, q1, q2):
    assert classify_coeffs(a, b, c, q1, q2) == classify_coeffs(b, a, c, q2, q1)


@given(st.floats(-5, 5), st.floats(0.05, 5), order, order)
def test_single_threshold_in_a(b, c, q1, q2):
    lo, hi = min(q1, q2), max(q1, q2)
    ast = critical_a(b, c, lo, hi)
    a_grid = np.linspace(-12, 12, 241)
    a_grid = a_grid[np.abs(a_grid - ast) > 1e-9 * (1 + abs(ast))]
    kinds = [classify_coeffs(a, b, c, lo, hi).kind for a in a_grid]
    assert Verdict.MARGINAL_HOPF not in kinds
    stable = np.array([k.is_stable for k in kinds])
    # once stable, stays stable as a grows
    first = int(np.argmax(stable)) if stable.any() else len(stable)
    assert stable[first:].all()
    if a_grid[0] < ast < a_grid[-1] and not (ast + 1 > 0 and ast + b > 0 and b + c > 0):
        assert a_grid[first - 1] < ast < a_grid[first]


def test_order_free_region_is_order_independent(rng):
    grid = np.linspace(0.05, 1.0, 20)
    hits = 0
    while hits < 15:
        a, b = rng.uniform(-3, 3, size=2)
        c = rng.uniform(0.01, 3)
        if not (a + 1 > 0 and a + b > 0 and b + c > 0):
            continue
        hits += 1
        for q1 in grid:
            for q2 in grid[grid >= q1]:
                v = classify_coeffs(a, b, c, q1, q2)
                assert v.kind is Verdict.STABLE_ALL_ORDERS and v.rule == "Cor-3a"


def test_order_free_condition_needs_a_on_the_larger_order():
    # the raw condition holds, but here a multiplies the smaller order's power
    a, b, c, q1, q2 = 3.700885023275033, -2.726814748390919, 4.477345748831216, 0.8747515586638483, 0.03814687331680654
    assert a + 1 > 0 and a + b > 0 and b + c > 0
    v = classify_coeffs(a, b, c, q1, q2)
    assert v.kind is Verdict.UNSTABLE_AT_ORDERS
    assert count_rhp_roots(CharFunction(a, b, c, q1, q2)).count == 2


def test_decoupled_systems():
    with pytest.warns(UserWarning):
        v = classify_matrix(LinearSystem2(-1, 0, 5, -2, 0.4, 0.9))
    assert v.kind is Verdict.STABLE_ALL_ORDERS and v.rule == "Decoupled"
    with pytest.warns(UserWarning):
        assert classify_matrix(LinearSystem2(-1, 3, 0, 0.5, 0.4, 0.9)).kind is Verdict.UNSTABLE_ALL_ORDERS
    with pytest.warns(UserWarning):
        assert classify_matrix(LinearSystem2(0, 3, 0, -1, 0.4, 0.9)).kind is Verdict.DEGENERATE_ZERO_ROOT


def test_oracle_examples():
    assert verify_with_oracle(LinearSystem2.from_matrix([[0, 1], [1, 0]], 0.5, 0.6))
    assert verify_with_oracle(LinearSystem2.from_matrix(FHN_J, 0.58, 0.8))
    assert verify_with_oracle(LinearSystem2.from_matrix(FHN_J, 0.63, 0.8))


@given(entry, entry, entry, entry, order, order)
def test_oracle_agreement_property(a11, a12, a21, a22, q1, q2):
    sys = LinearSystem2(a11, a12, a21, a22, q1, q2)
    a, b, c = sys.coefficients
    assume(abs(c) > 1e-6 and not sys.decoupled)
    margin = classify_coeffs(a, b, c, q1, q2).margin
    assume(margin is None or abs(margin) > 1e-6)
    assert verify_with_oracle(sys)


def test_commensurate_oracle_agreement(rng):
    for _ in range(300):
        A = rng.uniform(-3, 3, size=(2, 2))
        q = float(rng.uniform(0.05, 1.0))
        sys = LinearSystem2.from_matrix(A, q, q)
        a, b, c = sys.coefficients
        margin = classify_coeffs(a, b, c, q, q).margin
        if abs(c) < 1e-6 or (margin is not None and abs(margin) < 1e-6):
            continue
        assert verify_with_oracle(sys)


def test_verdict_serializes():
    d = classify_coeffs(-0.36, 0.064, 0.05696, 0.58, 0.8).to_dict()
    assert set(d) == {"kind", "rule", "decay_order", "margin"}
    assert d["kind"] == "StableAtOrders"
