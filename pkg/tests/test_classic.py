import numpy as np
import pytest

from pikl import classic
from pikl.classic import (NOISELESS, NoisySpec, SOLVERS, exact_solution, rows_for,
                          solver_error, split_grid)

METHODS = sorted(SOLVERS)


def test_split_grid():
    l1, l2 = split_grid(10_000)
    assert (l1, l2) == (4038, 1923) and 2 * l1 + l2 <= 10_000
    assert split_grid(10_000, ratio=2) == (4000, 2000)
    for n in (1000, 4321, 40_000, 99_999):
        a, b = split_grid(n)
        assert 2 * a + b <= n and abs(a - 2.1 * b) <= 1
    assert split_grid(10_000, ratio=1) == (3333, 3333)
    with pytest.raises(ValueError):
        split_grid(5)


@pytest.mark.parametrize("method", METHODS)
def test_zero_data_gives_zero_grid(method, backend):
    g = SOLVERS[method](60, 30, backend=backend, profile=lambda x: 0 * x)
    assert np.all(g.values == 0)


@pytest.mark.parametrize("method", METHODS)
def test_boundary_exactness(method, backend):
    g = SOLVERS[method](80, 40, backend=backend)
    # the corner (0, 1) belongs to the initial row, where sin(pi) is -1.2e-16
    assert np.all(g.values[1:, 0] == 0) and np.all(g.values[1:, -1] == 0)
    assert abs(g.values[0, -1]) < 1e-15 and g.values[0, 0] == 0
    x = np.arange(41) / 40
    np.testing.assert_array_equal(g.row(0), classic.initial_profile(x))


@pytest.mark.parametrize("method", METHODS)
def test_zero_sigma_is_bit_identical(method):
    a = SOLVERS[method](80, 40, NoisySpec(0.0, seed=7))
    b = SOLVERS[method](80, 40, NOISELESS)
    assert a.values.tobytes() == b.values.tobytes()


@pytest.mark.parametrize("method", METHODS)
def test_backends_identical(method):
    from pikl import _accel
    if _accel.BACKEND != "cython":
        pytest.skip("compiled backend not built")
    noisy = NoisySpec(0.1, seed=3)
    a = SOLVERS[method](300, 100, noisy, backend="python")
    b = SOLVERS[method](300, 100, noisy, backend="cython")
    assert np.max(np.abs(a.values - b.values)) <= 1e-12


@pytest.mark.parametrize("method", ["euler", "rk4"])
@pytest.mark.parametrize("ratio", [2, 3])
def test_convergence_probe(method, ratio):
    e1 = solver_error(method, ratio * 40, 40)
    e2 = solver_error(method, ratio * 80, 80)
    e3 = solver_error(method, ratio * 160, 160)
    assert e2 / e1 <= 0.5 and e3 / e2 <= 0.5


def test_crank_nicolson_converges():
    errs = [solver_error("cn", 2 * l, l) for l in (40, 80, 160)]
    assert errs[2] < errs[1] < errs[0]


def test_noisy_is_seeded():
    a = classic.solve_rk4(80, 40, NoisySpec(0.1, seed=1))
    b = classic.solve_rk4(80, 40, NoisySpec(0.1, seed=1))
    c = classic.solve_rk4(80, 40, NoisySpec(0.1, seed=2))
    assert a.values.tobytes() == b.values.tobytes()
    assert not np.array_equal(a.values, c.values)


def test_keep_rows_and_evaluate():
    full = classic.solve_crank_nicolson(50, 20)
    t = np.array([0.0, 0.33, 1.0])
    part = classic.solve_crank_nicolson(50, 20, keep=rows_for(50, t))
    x = np.full(3, 0.4)
    np.testing.assert_array_equal(full.evaluate(t, x), part.evaluate(t, x))
    with pytest.raises(KeyError):
        part.row(5)


def test_grid_csv(tmp_path):
    g = classic.solve_euler_explicit(4, 2, keep=[0, 4])
    path = tmp_path / "g.csv"
    g.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,value" and len(lines) == 1 + 2 * 3


@pytest.mark.parametrize("method,tol", [("euler", 1.2e-5), ("rk4", 2e-5), ("cn", 1.7e-2)])
def test_noiseless_accuracy_stable_split(method, tol):
    # the default split at n = 1e4
    assert solver_error(method, *split_grid(10_000)) <= tol


def test_exact_solution_initial_row():
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(exact_solution(0.0, x), classic.initial_profile(x))


def test_invalid_grid():
    with pytest.raises(ValueError):
        classic.solve_rk4(1, 10)
    with pytest.raises(ValueError):
        NoisySpec(-1.0)
