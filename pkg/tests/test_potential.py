import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_bracket import Potential, conserved_quantities, eval_potential, make_plane_wave

coef = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


def test_zero_potential_vanishes():
    pot = Potential.zero(2.0)
    assert np.all(pot(np.linspace(-5, 5, 11)) == 0)
    assert pot.is_zero


def test_plane_wave_at_pi():
    pot = make_plane_wave(1.0, 1, np.pi)
    assert abs(eval_potential(pot, np.pi) - (-1)) < 1e-15


def test_plane_wave_constructors():
    assert make_plane_wave(0, 3, 1.0).is_zero
    assert abs(make_plane_wave(1 + 0j, 2, np.pi)(0.0) - 1) < 1e-15


def test_two_mode_matches_termwise_sum():
    pot = Potential(1.0, [1, -2], [0.3, 0.1j])
    x = 0.4
    expected = 0.3 * np.exp(1j * np.pi * x) + 0.1j * np.exp(-2j * np.pi * x)
    assert abs(pot(x) - expected) < 1e-15
    assert abs(pot.conj_eval(x) - np.conj(expected)) < 1e-15


def test_derivative_matches_finite_difference(rng):
    pot = Potential.random(rng, 1.3, max_mode=3)
    x, h = 0.37, 1e-5
    fd = (pot(x + h) - pot(x - h)) / (2 * h)
    assert abs(pot.derivative(x) - fd) < 1e-8


@given(st.lists(coef, min_size=1, max_size=4), st.floats(-10, 10))
def test_exact_periodicity(cs, x):
    pot = Potential(1.7, list(range(len(cs))), cs)
    assert abs(pot(x + 2 * pot.l) - pot(x)) < 1e-12


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        Potential(0.0, [], [])
    with pytest.raises(ValueError):
        Potential(1.0, [1, 1], [1, 2])
    with pytest.raises(ValueError):
        Potential(1.0, [1], [1, 2])


def test_immutable():
    pot = Potential(1.0, [1], [0.5])
    with pytest.raises(ValueError):
        pot.coeffs[0] = 1.0


def test_json_round_trip(rng):
    pot = Potential.random(rng, 2.5, max_mode=2)
    back = Potential.from_json(pot.to_json())
    assert back.l == pot.l
    np.testing.assert_array_equal(back.modes, pot.modes)
    np.testing.assert_array_equal(back.coeffs, pot.coeffs)
    d = json.loads(pot.to_json())
    assert set(d) == {"l", "coeffs"} and set(d["coeffs"][0]) == {"k", "re", "im"}


def test_from_samples_recovers_coefficients(rng):
    pot = Potential.random(rng, 1.1, max_mode=3)
    n = 32
    x = -pot.l + 2 * pot.l * np.arange(n) / n
    back = Potential.from_samples(pot(x), pot.l, cutoff=3)
    xs = np.linspace(-1, 1, 7)
    assert np.max(np.abs(back(xs) - pot(xs))) < 1e-13


def test_conserved_quantities_zero():
    assert conserved_quantities(Potential.zero()) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("C,n,l", [(0.5, 1, np.pi), (0.3 - 0.2j, -2, 1.3), (1.1j, 3, 2.0)])
def test_conserved_quantities_plane_wave(C, n, l):
    a = np.pi * n / l
    h1, h2, h3 = conserved_quantities(make_plane_wave(C, n, l))
    c2 = abs(C) ** 2
    assert abs(h1 - l * c2) < 1e-12
    assert abs(h2 + a * l * c2) < 1e-12
    assert abs(h3 - l * (a**2 * c2 + c2**2)) < 1e-12


def _dense_quadrature(pot, n=4096):
    x = -pot.l + 2 * pot.l * np.arange(n) / n
    h = 2 * pot.l / n
    psi, dpsi = pot(x), pot.derivative(x)
    return (0.5 * h * np.sum(abs(psi) ** 2), (h * np.sum(psi * np.conj(dpsi)) / 2j).real,
            0.5 * h * np.sum(abs(dpsi) ** 2 + abs(psi) ** 4))


def test_conserved_quantities_match_dense_oracle(rng):
    for _ in range(5):
        pot = Potential.random(rng, np.pi, max_mode=2, n_modes=2)
        np.testing.assert_allclose(conserved_quantities(pot), _dense_quadrature(pot), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.lists(coef, min_size=1, max_size=3), st.floats(-3, 3))
def test_conserved_quantities_translation_invariant(cs, a):
    pot = Potential(np.pi, list(range(-1, len(cs) - 1)), cs)
    np.testing.assert_allclose(conserved_quantities(pot.shifted(a)), conserved_quantities(pot), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.lists(coef, min_size=1, max_size=3))
def test_h1_nonnegative(cs):
    pot = Potential(np.pi, list(range(len(cs))), cs)
    h1 = conserved_quantities(pot)[0]
    assert h1 >= 0
    if pot.is_zero:
        assert h1 == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(coef, min_size=1, max_size=3))
def test_h2_under_conjugation_and_reflection(cs):
    pot = Potential(np.pi, list(range(-1, len(cs) - 1)), cs)
    h2 = conserved_quantities(pot)[1]
    conj = Potential(pot.l, -pot.modes, np.conj(pot.coeffs))  # psi -> conj(psi)
    refl = Potential(pot.l, -pot.modes, pot.coeffs)  # x -> -x
    assert abs(conserved_quantities(conj)[1] + h2) < 1e-10
    assert abs(conserved_quantities(refl)[1] + h2) < 1e-10
    # the two sign flips cancel for conj(psi(-x))
    assert abs(conserved_quantities(pot.reflected_conjugate())[1] - h2) < 1e-10
