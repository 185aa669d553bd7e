import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pikl.diffop import ddx, heat, identity
from pikl.domain import Ball2D, Cube, Torus
from pikl.effdim import (EffDimCurve, compute_spectrum, effdim_curve,
                         effective_dimension, m_convergence_diagnostic,
                         preset_template, sandwich_bounds, spectrum_direct, with_m)
from pikl.fourier import ModeSet
from pikl.gram import GramSpec, sobolev_weight
from pikl.precision import PrecisionError, check_precision_name


def ddx_spec(m, lam=0.01, mu=1.0):
    return GramSpec(ModeSet(m, 1, np.pi), 1, lam, mu, ddx(), Cube(1, np.pi))


def test_trivial_values():
    assert effective_dimension(np.zeros(5)) == 0
    assert effective_dimension([1.0]) == 0.5
    with pytest.raises(ValueError):
        effective_dimension([-1.0])


def test_pure_ridge_top_eigenvalue():
    sp = GramSpec(ModeSet(5, 2, 1.0), 2, 0.1, 0.0, heat(), Cube(2, 1.0))
    assert compute_spectrum(sp).eigenvalues[0] <= 1 / 0.1


def test_sorted_nonnegative():
    ev = compute_spectrum(ddx_spec(30)).eigenvalues
    assert np.all(np.diff(ev) <= 0) and np.all(ev >= 0)


@pytest.mark.parametrize("m", [3, 10, 20])
def test_factored_matches_direct(m):
    sp = GramSpec(ModeSet(m, 1, np.pi), 2, 0.05, 2.0, heat().__class__(
        [((2,), 1.0), ((0,), 1.0)]), Cube(1, np.pi))
    a = compute_spectrum(sp).eigenvalues
    b = spectrum_direct(sp)
    assert np.max(np.abs(a - b)) <= 1e-8 * a[0]


def test_sandwich_small():
    ev = compute_spectrum(ddx_spec(60)).eigenvalues
    k = np.arange(3, 31)
    lo, hi = sandwich_bounds(k, 0.01, 1.0)
    sig = ev[k - 1]
    assert np.all(lo <= sig) and np.all(sig <= hi)


def test_doubling_m_converges():
    a = compute_spectrum(ddx_spec(50)).eigenvalues[:20]
    b = compute_spectrum(ddx_spec(100)).eigenvalues[:20]
    assert np.max(np.abs(a - b) / b) < 0.05
    k = np.arange(3, 21)
    _, hi = sandwich_bounds(k, 0.01, 1.0)
    assert np.all(b[k - 1] <= hi)


def test_torus_diagonal_closed_form():
    # C = I on the full torus with mu = 0, so N = sum 1 / (1 + lam (1 + w))
    for m in (10, 40, 80):
        modes = ModeSet(m, 1, 1.0)
        sp = GramSpec(modes, 1, 0.01, 0.0, identity(1), Torus(1, 1.0))
        N = effective_dimension(compute_spectrum(sp))
        w = sobolev_weight(modes, 1)
        assert np.isclose(N, np.sum(1 / (1 + 0.01 * (1 + w))), rtol=1e-10)


@given(st.floats(-3, 0), st.floats(-2, 1), st.floats(1.1, 4))
@settings(max_examples=20, deadline=None)
def test_bounds_and_monotonicity(log_lam, log_mu, factor):
    lam, mu = 10 ** log_lam, 10 ** log_mu
    sp = GramSpec(ModeSet(8, 2, np.pi), 2, lam, mu, heat(), Ball2D(np.pi))
    N = effective_dimension(compute_spectrum(sp))
    assert 0 <= N <= sp.size
    assert effective_dimension(compute_spectrum(sp.with_params(lam=lam * factor))) <= N * (1 + 1e-10)
    assert effective_dimension(compute_spectrum(sp.with_params(mu=mu * factor))) <= N * (1 + 1e-10)


def test_curve_and_csv(tmp_path):
    curve = effdim_curve(preset_template("oscillator", 40), [100, 1000])
    assert len(curve.points) == 2 and curve.slope() < 0.3
    path = tmp_path / "curve.csv"
    curve.to_csv(path)
    assert path.read_text().splitlines()[0] == "m,n,lambda,mu,N_eff"


def test_single_m_warns(caplog):
    with caplog.at_level(logging.WARNING):
        res = m_convergence_diagnostic(preset_template("ddx"), [20], [100])
    assert res.m_star is None
    assert "single m" in caplog.text


@pytest.mark.parametrize("preset", ["ddx", "oscillator"])
def test_m_star_order_of_magnitude(preset):
    res = m_convergence_diagnostic(preset_template(preset), [25, 50, 100, 200, 400],
                                   [100, 1000, 10000])
    assert res.m_star is not None and 25 <= res.m_star <= 400


def test_with_m():
    t = with_m(preset_template("heat_disk"), 4)
    assert t.modes.m == 4 and t.modes.d == 2


def test_unknown_preset():
    with pytest.raises(ValueError):
        preset_template("nope")


def test_32_bit_rejected():
    with pytest.raises(PrecisionError):
        check_precision_name("float32")
    with pytest.raises(PrecisionError):
        check_precision_name("complex64")
    assert check_precision_name("float64") == np.float64
