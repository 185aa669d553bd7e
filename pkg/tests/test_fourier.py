import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pikl.fourier import (CapacityError, ModeSet, enumerate_modes, feature_map,
                          features, synthesize)


def naive_features(modes, x):
    out = []
    for k in enumerate_modes(modes):
        phase = sum(np.pi * ki * xi / (2 * Li) for ki, xi, Li in zip(k, x, modes.L))
        out.append(np.exp(1j * phase) / np.sqrt(np.prod(4 * np.asarray(modes.L))))
    return np.array(out)


def test_size_and_ordering():
    ms = ModeSet(2, 2, 1.0)
    assert ms.size == 25
    assert enumerate_modes(ms)[0] == (-2, -2)
    assert enumerate_modes(ms)[1] == (-2, -1)
    assert enumerate_modes(ms)[12] == (0, 0)


def test_negative_mode_is_mirror_index():
    ms = ModeSet(3, 2, 1.0)
    k = ms.modes
    assert np.array_equal(k[::-1], -k)


def test_capacity_error():
    with pytest.raises(CapacityError):
        ModeSet(100, 3, 1.0)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        ModeSet(-1, 1, 1.0)
    with pytest.raises(ValueError):
        ModeSet(1, 0, 1.0)
    with pytest.raises(ValueError):
        ModeSet(1, 1, -1.0)


@given(st.integers(0, 4), st.integers(1, 3), st.data())
@settings(max_examples=40, deadline=None)
def test_index_round_trip(m, d, data):
    ms = ModeSet(m, d, 1.0)
    i = data.draw(st.integers(0, ms.size - 1))
    assert ms.index_of(ms.k_of(i)) == i


def test_feature_map_matches_loop(rng):
    ms = ModeSet(3, 2, (1.0, 2.5))
    for _ in range(5):
        x = rng.uniform(-1, 1, 2) * np.array([1.0, 2.5])
        np.testing.assert_allclose(feature_map(ms, x), naive_features(ms, x),
                                   rtol=0, atol=1e-14)


def test_feature_modulus():
    ms = ModeSet(2, 1, np.pi)
    phi = feature_map(ms, [0.3])
    np.testing.assert_allclose(np.abs(phi), (4 * np.pi) ** -0.5)


def test_synthesize_matches_inner_product(rng):
    ms = ModeSet(3, 2, 1.0)
    z = rng.standard_normal(ms.size) + 1j * rng.standard_normal(ms.size)
    X = rng.uniform(-1, 1, (7, 2))
    # <z, Phi> = sum z conj(Phi)
    naive = np.array([np.sum(z * np.conj(naive_features(ms, x))) for x in X])
    np.testing.assert_allclose(synthesize(ms, z, X), naive, atol=1e-13)


def test_conjugate_symmetric_coefficients_give_real_values(rng):
    ms = ModeSet(4, 2, 1.0)
    z = rng.standard_normal(ms.size) + 1j * rng.standard_normal(ms.size)
    z = 0.5 * (z + np.conj(z[::-1]))
    vals = synthesize(ms, z, rng.uniform(-1, 1, (20, 2)))
    assert np.max(np.abs(vals.imag)) < 1e-13 * max(1, np.max(np.abs(vals.real)))


def test_orthonormal_on_extended_torus(rng):
    # features are orthonormal in L2([-2L, 2L]^d); check by quadrature on a
    # uniform periodic grid, which is exact for these trigonometric products
    ms = ModeSet(3, 1, 0.7)
    x = np.linspace(-1.4, 1.4, 64, endpoint=False)
    Phi = features(ms, x.reshape(-1, 1))
    G = Phi.conj().T @ Phi * (2.8 / 64)
    np.testing.assert_allclose(G, np.eye(ms.size), atol=1e-13)


def test_orthonormal_monte_carlo(rng):
    ms = ModeSet(2, 2, 1.0)
    N = 200_000
    X = rng.uniform(-2, 2, (N, 2))
    Phi = features(ms, X)
    G = Phi.conj().T @ Phi * (16.0 / N)
    # each entry is a mean of unit-modulus terms times 16
    assert np.max(np.abs(G - np.eye(ms.size))) < 5 * 16 / np.sqrt(N)


def test_wrong_lengths():
    ms = ModeSet(1, 2, 1.0)
    with pytest.raises(ValueError):
        synthesize(ms, np.zeros(3), [[0.0, 0.0]])
    with pytest.raises(ValueError):
        feature_map(ms, [0.0])
