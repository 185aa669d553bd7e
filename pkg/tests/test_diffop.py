import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pikl.diffop import (LinearDiffOp, apply_in_hm, convection, ddx,
                         harmonic_oscillator, heat, identity, laplace, op_from_config,
                         symbol, wave)
from pikl.fourier import ModeSet, synthesize


def test_identity_symbol():
    assert symbol(identity(2), [3, -1], 1.0) == 1


def test_ddx_symbol_modulus():
    # d/dx on [-pi, pi] at k=2 has modulus pi/(2 pi) * 2 = 1
    assert abs(abs(symbol(ddx(), [2], np.pi)) - 1.0) < 1e-15


def test_symbol_matches_derivative_of_synthesis():
    # the sign convention is whatever makes symbol * z the coefficients of f'
    ms = ModeSet(3, 1, np.pi)
    rng = np.random.default_rng(0)
    z = rng.standard_normal(ms.size) + 1j * rng.standard_normal(ms.size)
    x = np.linspace(-3, 3, 41)
    h = 1e-5
    fd = (synthesize(ms, z, x + h) - synthesize(ms, z, x - h)) / (2 * h)
    exact = synthesize(ms, apply_in_hm(ddx(), z, ms), x)
    np.testing.assert_allclose(fd, exact, atol=1e-8)


def test_second_derivative_finite_difference():
    ms = ModeSet(4, 1, 1.0)
    rng = np.random.default_rng(1)
    z = rng.standard_normal(ms.size) + 1j * rng.standard_normal(ms.size)
    op = LinearDiffOp([((2,), 1.0)])
    x = np.linspace(-0.9, 0.9, 57)
    h = 1e-4
    fd = (synthesize(ms, z, x + h) - 2 * synthesize(ms, z, x)
          + synthesize(ms, z, x - h)) / h ** 2
    exact = synthesize(ms, apply_in_hm(op, z, ms), x)
    assert np.max(np.abs(fd - exact)) <= 1e-6 * max(1, np.max(np.abs(exact)))


def test_heat_symbol_degrees():
    L = np.pi
    a = symbol(heat(), [1, 0], L)
    b = symbol(heat(), [2, 0], L)
    c = symbol(heat(), [0, 1], L)
    d = symbol(heat(), [0, 2], L)
    assert np.isclose(b, 2 * a)          # linear in k1
    assert np.isclose(d, 4 * c)          # quadratic in k2
    assert np.isclose(c, (np.pi / (2 * L)) ** 2)


def test_apply_identity_and_zero_mode():
    ms = ModeSet(2, 1, 1.0)
    z = np.arange(ms.size) + 1j
    np.testing.assert_array_equal(apply_in_hm(identity(1), z, ms), z)
    assert apply_in_hm(ddx(), z, ms)[ms.index_of([0])] == 0


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=2),
       st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=60, deadline=None)
def test_linearity_and_conjugate_symmetry(k, a, b):
    L = 0.7
    op1, op2 = heat(), wave(4.0)
    combo = a * op1 + b * op2
    lhs = symbol(combo, k, L)
    rhs = a * symbol(op1, k, L) + b * symbol(op2, k, L)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs))
    assert abs(symbol(combo, [-v for v in k], L) - np.conj(lhs)) <= 1e-12 * (1 + abs(lhs))


def test_construction_errors():
    with pytest.raises(ValueError):
        LinearDiffOp([])
    with pytest.raises(ValueError):
        LinearDiffOp([((1,), 1.0), ((1,), 2.0)])
    with pytest.raises(TypeError):
        LinearDiffOp([((1,), 1j)])
    with pytest.raises(ValueError):
        symbol(ddx(), [1, 2], 1.0)


def test_orders():
    assert harmonic_oscillator().order == 2
    assert convection(3).order == 1
    assert laplace(3).order == 2


def test_config_round_trip():
    for op in (heat(), wave(4.0), convection(40), harmonic_oscillator()):
        assert op_from_config(op.to_config()) == op
    assert op_from_config("wave(4)") == wave(4.0)
    assert op_from_config("convection(40)") == convection(40.0)
