import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_bracket import (
    TodaState,
    casimir_bracket,
    jacobi_matrix,
    toda_bracket,
    toda_flow_step,
    toda_spectral_data,
    toda_weyl,
    verify_mah,
)
from spectral_bracket.toda import hamiltonian, resolvent_11

reals = st.floats(-1.5, 1.5)


def states(n_min=2, n_max=6):
    return st.integers(n_min, n_max).flatmap(
        lambda n: st.tuples(st.lists(reals, min_size=n, max_size=n), st.lists(reals, min_size=n, max_size=n))
    ).map(lambda qp: TodaState(np.array(qp[0]), np.array(qp[1])))


def test_jacobi_examples(rng):
    np.testing.assert_array_equal(jacobi_matrix(TodaState(np.zeros(2), np.zeros(2))), [[0, 1], [1, 0]])
    s = TodaState.random(rng, 3)
    L = jacobi_matrix(s)
    np.testing.assert_array_equal(L, L.T)
    assert np.all(np.diag(L, 1) > 0)
    assert np.all(np.triu(L, 2) == 0)
    assert abs(np.trace(L) + s.p.sum()) < 1e-14
    q, p = s.q, s.p
    np.testing.assert_allclose(np.diag(L, 1), np.exp((q[:-1] - q[1:]) / 2))


def test_spectral_data_two_sites():
    d = toda_spectral_data(TodaState(np.zeros(2), np.zeros(2)))
    np.testing.assert_allclose(d.eigenvalues, [-1, 1], atol=1e-15)
    np.testing.assert_allclose(d.residues, [0.5, 0.5], atol=1e-15)


def test_weyl_two_sites():
    d = toda_spectral_data(TodaState(np.zeros(2), np.zeros(2)))
    assert abs(toda_weyl(d, 2.0) + 2 / 3) < 1e-14
    lam = 0.3 + 0.2j
    assert abs(toda_weyl(d, lam) - lam / (1 - lam**2)) < 1e-14
    with pytest.raises(Exception):
        toda_weyl(d, 1.0)


def test_residue_normalisation_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        s = TodaState.random(rng, int(rng.integers(2, 8)))
        d = toda_spectral_data(s)
        assert abs(d.residues.sum() - 1) <= 1e-12
        assert np.all(d.residues > 0)
        assert np.all(np.diff(d.eigenvalues) > 0)
        assert abs(d.eigenvalues.sum() + s.p.sum()) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(states(), st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False))
def test_weyl_matches_resolvent(s, lam):
    d = toda_spectral_data(s)
    if np.min(np.abs(d.eigenvalues - lam)) < 1e-2:
        return
    assert abs(toda_weyl(d, lam) - resolvent_11(s, lam)) < 1e-10 * max(1, abs(toda_weyl(d, lam)))


def test_weyl_asymptotics_and_sign(rng):
    d = toda_spectral_data(TodaState.random(rng, 4))
    big = 1e7
    assert abs(big * toda_weyl(d, big) + 1) < 1e-6
    assert toda_weyl(d, d.eigenvalues[0] - 0.5).real > 0


def test_canonical_pairs(rng):
    s = TodaState.random(rng, 3)
    for k in range(3):
        for n in range(3):
            b = toda_bracket(s, lambda t, k=k: t.q[k], lambda t, n=n: t.p[n])
            assert abs(b - (k == n)) < 1e-9


def test_bracket_antisymmetry(rng):
    s = TodaState.random(rng, 4)
    F = lambda t: hamiltonian(t) * t.q[0]  # noqa: E731
    G = lambda t: toda_weyl(toda_spectral_data(t), 0.3 + 0.5j)  # noqa: E731
    assert abs(toda_bracket(s, F, G) + toda_bracket(s, G, F)) < 1e-10


def test_casimir(rng):
    for n in (2, 3, 4, 6):
        s = TodaState.random(rng, n)
        assert abs(casimir_bracket(s, complex(rng.uniform(-2, 2), rng.uniform(0.2, 1)))) <= 1e-8


def test_mah_two_sites():
    s = TodaState(np.zeros(2), np.zeros(2))
    assert verify_mah(s, 0.3, -0.4j)["residual"] <= 1e-6
    a, b = verify_mah(s, 0.3, -0.4j), verify_mah(s, -0.4j, 0.3)
    assert abs(a["lhs"] + b["lhs"]) <= 1e-9


def test_mah_random_sweep():
    rng = np.random.default_rng(3)
    worst = 0.0
    for n in (2, 3, 4, 6):
        s = TodaState.random(rng, n)
        for _ in range(10 if n == 4 else 3):
            lam, mu = rng.uniform(-2, 2, 2) + 1j * rng.uniform(-1, 1, 2)
            worst = max(worst, verify_mah(s, lam, mu)["residual"])
    assert worst <= 1e-5


def test_flow_initial_force():
    s = toda_flow_step(TodaState(np.zeros(2), np.zeros(2)), 0.01, 1)
    assert s.p[0] < 0 < s.p[1]


def test_flow_preserves_spectrum_and_momentum(rng):
    s = TodaState.random(rng, 6)
    t = toda_flow_step(s, 0.01, 1000)
    d0, d1 = toda_spectral_data(s), toda_spectral_data(t)
    assert np.max(np.abs(d0.eigenvalues - d1.eigenvalues)) <= 1e-8
    assert abs(s.p.sum() - t.p.sum()) < 1e-12
    assert abs(hamiltonian(s) - hamiltonian(t)) < 1e-8


def test_state_json_round_trip(rng):
    s = TodaState.random(rng, 5)
    t = TodaState.from_dict(s.to_dict())
    np.testing.assert_array_equal(s.q, t.q)
    np.testing.assert_array_equal(s.p, t.p)
    with pytest.raises(ValueError):
        TodaState(np.zeros(1), np.zeros(1))
