import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_bracket import (
    INFINITY,
    DegenerateTransformError,
    DivisorPoleError,
    OneGapCurve,
    ProjectivePoint,
    coefficient_A,
    divisor,
    floquet_multiplier,
    floquet_solution,
    lft_transform,
    periodic_spectrum,
    recover_field,
    weyl_function,
    wronskian_W,
    xi,
)
from spectral_bracket import onegap
from spectral_bracket.weyl import is_infinite

finite = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


def test_zero_potential_sheets(zero_pot):
    lam = 0.4 + 0.3j
    qp = floquet_multiplier(zero_pot, lam, "plus")
    qm = floquet_multiplier(zero_pot, lam, "minus")
    assert coefficient_A(zero_pot, -np.pi, qp) == 0
    assert abs(coefficient_A(zero_pot, -np.pi, qm) - 1) < 1e-14
    assert is_infinite(weyl_function(zero_pot, 0.3, qp).X)
    assert weyl_function(zero_pot, 0.3, qm).X == 0
    assert wronskian_W(zero_pot, 0.1, qp) == pytest.approx(1, abs=1e-14)
    assert wronskian_W(zero_pot, 0.1, qm) == pytest.approx(-1, abs=1e-14)
    assert xi(zero_pot, 0.1, qp) == pytest.approx(1, abs=1e-14)
    assert xi(zero_pot, 0.1, qm) == pytest.approx(1, abs=1e-14)


def test_zero_floquet_solution(zero_pot):
    lam, x, y = 0.4 + 0.3j, 1.1, -0.6
    e = floquet_solution(zero_pot, x, y, floquet_multiplier(zero_pot, lam, "plus"))
    np.testing.assert_allclose(e, np.exp(0.5j * lam * (x - y)) * np.array([0, 1]), atol=1e-10)


def test_floquet_solution_properties(two_mode):
    rng = np.random.default_rng(8)
    Q = floquet_multiplier(two_mode, 0.9 + 0.35j, "plus")
    y = 0.3
    e0 = floquet_solution(two_mode, y, y, Q)
    assert abs(e0.sum() - 1) < 1e-12
    for x in rng.uniform(-3, 3, 10):
        a = floquet_solution(two_mode, x + 2 * two_mode.l, y, Q)
        b = floquet_solution(two_mode, x, y, Q)
        assert np.max(np.abs(a - Q.w * b)) < 1e-7 * max(1, np.max(np.abs(b)))
    ea = floquet_solution(two_mode, 1.2, y, Q.conjugated())
    eb = floquet_solution(two_mode, 1.2, y, Q)
    np.testing.assert_allclose(ea, np.conj(eb[::-1]), atol=1e-8)


def test_weyl_value_invariants(two_mode):
    rng = np.random.default_rng(12)
    for _ in range(20):
        lam = complex(rng.uniform(-3, 3), rng.uniform(0.1, 1.0) * rng.choice([-1, 1]))
        Q = floquet_multiplier(two_mode, lam, str(rng.choice(["plus", "minus"])))
        x = rng.uniform(-3, 3)
        v = weyl_function(two_mode, x, Q)
        assert v.consistency_residual <= 1e-8
        assert abs(v.X - (1 - v.A) / v.A) < 1e-9 * max(1, abs(v.X))
        assert abs(v.A - 1 / (1 + v.X)) < 1e-9
        vp = weyl_function(two_mode, x + 2 * two_mode.l, Q)
        assert abs(vp.X - v.X) < 1e-8 * max(1, abs(v.X))
        va = weyl_function(two_mode, x, Q.conjugated())
        assert abs(va.X * np.conj(v.X) - 1) < 1e-7


def test_one_gap_weyl_and_A(one_gap):
    curve = OneGapCurve.from_potential(one_gap)
    for lam, sheet in ((0.7 + 0.4j, "plus"), (1.6 - 0.3j, "minus"), (3.0 + 0.2j, "minus")):
        Q = floquet_multiplier(one_gap, lam, sheet)
        z = onegap.z_from_curve_point(curve, lam, Q.w)
        for x in (-2.0, 0.9):
            assert abs(weyl_function(one_gap, x, Q).X - onegap.closed_weyl(curve, x, z)) < 1e-7
            assert abs(coefficient_A(one_gap, x, Q) - onegap.closed_A(curve, x, z)) < 1e-7
            ez = onegap.involutions(curve, z)[0]
            closed_xi = onegap.closed_A(curve, x, z) + onegap.closed_A(curve, x, ez)
            assert abs(xi(one_gap, x, Q) - closed_xi) < 1e-7


def test_wronskian_and_xi_sheet_symmetry(two_mode):
    Q = floquet_multiplier(two_mode, 1.1 - 0.6j, "plus")
    for y in (-1.0, 0.4):
        assert abs(wronskian_W(two_mode, y, Q.swapped()) + wronskian_W(two_mode, y, Q)) < 1e-10
        assert abs(xi(two_mode, y, Q.swapped()) - xi(two_mode, y, Q)) < 1e-10


def test_wronskian_vanishes_at_branch_point(one_gap):
    vals = []
    for eps in (1e-3, 1e-5):
        Q = floquet_multiplier(one_gap, 0.0 + eps * 1j, "plus")
        vals.append(abs(wronskian_W(one_gap, 0.3, Q)))
    # W vanishes like the square root of the distance to the branch point
    assert vals[1] / vals[0] == pytest.approx(0.1, rel=0.05)
    assert vals[1] < 1e-2


def test_wronskian_asymptotics(one_gap):
    tau, y = 30.0 / one_gap.l, 0.4
    Q = floquet_multiplier(one_gap, 1j * tau, "plus")
    W = wronskian_W(one_gap, y, Q)
    pred = 1 + (1j * one_gap.conj_eval(y) - 1j * one_gap(y)) / Q.lam
    assert abs(W - pred) < 5 / tau**2


def test_coefficient_A_divisor_pole(one_gap):
    rep = periodic_spectrum(one_gap, (-1.5, 3.5))
    g = divisor(one_gap, 0.4, rep)[0]
    with pytest.raises(DivisorPoleError):
        coefficient_A(one_gap, 0.4, g)


def test_lft_examples():
    X = 0.3 - 2j
    assert lft_transform(X, 1, 0, 0, 1) == X
    assert lft_transform(INFINITY, 2, 1, 3, 5) == pytest.approx(5 / 3)
    inv = lft_transform(X, 0, 1, 1, 0)
    assert abs(inv - 1 / X) < 1e-15
    assert abs(lft_transform(inv, 0, 1, 1, 0) - X) < 1e-15
    assert is_infinite(lft_transform(0, 0, 1, 1, 0))
    with pytest.raises(DegenerateTransformError):
        lft_transform(X, 1, 2, 2, 4)
    assert isinstance(lft_transform(ProjectivePoint(1, 0), 1, 0, 0, 1), ProjectivePoint)


@given(finite, st.lists(finite, min_size=8, max_size=8))
def test_lft_composition(X, c):
    a1, b1, c1, d1, a2, b2, c2, d2 = c
    if abs(a1 * d1 - b1 * c1) < 1e-3 or abs(a2 * d2 - b2 * c2) < 1e-3:
        return
    # X -> (dX + b)/(cX + a) corresponds to the matrix [[d, b], [c, a]]
    m1, m2 = np.array([[d1, b1], [c1, a1]]), np.array([[d2, b2], [c2, a2]])
    m = m2 @ m1
    once = lft_transform(ProjectivePoint.from_value(X), a1, b1, c1, d1)
    twice = lft_transform(once, a2, b2, c2, d2)
    direct = lft_transform(ProjectivePoint.from_value(X), m[1, 1], m[0, 1], m[1, 0], m[0, 0])
    assert twice.chordal_distance(direct) < 1e-9


def test_recover_field_zero(zero_pot):
    assert recover_field(zero_pot, 0.2, 10.0) == (0, 0)


def test_recover_field_one_gap(one_gap):
    x, tau = 0.7, 40.0
    psi, psibar = recover_field(one_gap, x, tau)
    assert abs(psi - one_gap(x)) < 5 / tau
    assert abs(psibar - np.conj(psi)) < 5 / tau


def test_recover_field_richardson_order(one_gap):
    x = -1.3
    taus = np.array([10.0, 20.0, 40.0]) / one_gap.l
    est = np.array([recover_field(one_gap, x, t)[0] for t in taus])
    err = np.abs(est - one_gap(x))
    order = np.log2(err[:-1] / err[1:])
    assert np.all(order >= 0.9)
    extrap = 2 * est[2] - est[1]
    assert abs(extrap - one_gap(x)) < err[2]


def test_projective_point_distance():
    a = ProjectivePoint.from_value(INFINITY)
    b = ProjectivePoint(1e-20, 0)
    assert a.chordal_distance(b) < 1e-12
    assert ProjectivePoint(1, 1).chordal_distance(ProjectivePoint(2, 2)) < 1e-15
