import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qflicker.errors import InputError
from qflicker.spectral import (
    ODD_DIVERGENCE_NOTE,
    OddSpectrum,
    SpectrumSeries,
    correlation_from_odd_psd,
    psd_parity_decompose,
    total_power_convergence,
)


def test_correlation_examples():
    assert correlation_from_odd_psd(3.0, 2.0) == 1.5
    assert correlation_from_odd_psd(3.0, -2.0) == -1.5
    assert correlation_from_odd_psd(3.0, 0.0) == 0.0
    gibbs = correlation_from_odd_psd(1.0, 1.0, 0.5)
    assert gibbs == pytest.approx(1.85194 / math.pi, abs=1e-6)
    assert gibbs / 0.5 == pytest.approx(1.179, abs=1e-3)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1e3), st.floats(1e-6, 1e3), st.floats(1e-3, 1e6), st.floats(0.1, 10))
def test_correlation_odd_and_linear(A, tau, F, s):
    c = correlation_from_odd_psd(A, tau, F)
    assert correlation_from_odd_psd(A, -tau, F) == -c
    assert correlation_from_odd_psd(s * A, tau, F) == pytest.approx(s * c, rel=1e-15, abs=0)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e4), st.floats(1e-6, 1e6))
def test_correlation_vs_sine_integral_oracle(tau, F):
    exact = float(mpmath.si(2 * mpmath.pi * F * tau)) / math.pi
    assert correlation_from_odd_psd(1.0, tau, F) == pytest.approx(exact, rel=1e-12)


def test_correlation_continuous_at_zero():
    vals = [abs(correlation_from_odd_psd(1.0, t, 10.0)) for t in (1e-3, 1e-6, 1e-9, 1e-12)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-10


def test_correlation_rejects_bad_band():
    for F in (0.0, -1.0, math.nan):
        with pytest.raises(InputError):
            correlation_from_odd_psd(1.0, 1.0, F)


def test_gamma_range_rejected():
    for g in (0.0, 2.0, -1.0, 2.5):
        with pytest.raises(InputError, match=ODD_DIVERGENCE_NOTE):
            total_power_convergence(g, 1.0, [1.0, 10.0])
        with pytest.raises(InputError):
            OddSpectrum(1.0, g)


def test_convergence_input_checks():
    with pytest.raises(InputError):
        total_power_convergence(1.0, 0.0, [1.0, 2.0])
    with pytest.raises(InputError):
        total_power_convergence(1.0, 1.0, [2.0, 1.0])


def test_convergence_limits():
    F = np.logspace(-1, 5, 13)
    assert total_power_convergence(1.0, 2.0, F).limit == pytest.approx(math.pi / 2, rel=1e-12)
    assert total_power_convergence(1.0, -2.0, F).limit == pytest.approx(-math.pi / 2, rel=1e-12)
    assert total_power_convergence(0.5, 1.0, F).limit == pytest.approx(0.5, rel=1e-12)
    rep = total_power_convergence(1.0, 1.0, F)
    assert rep.even_verdict.startswith("logarithmic")
    np.testing.assert_allclose(rep.even_low, np.log(F))
    short = total_power_convergence(0.5, 1.0, [0.1, 0.2])
    assert short.verdict != "convergent"


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 1.9), st.floats(0.05, 20.0))
def test_tail_bounds_hold(gamma, tau):
    rep = total_power_convergence(gamma, tau, np.logspace(-2, 4, 20))
    assert rep.bounds_hold
    assert np.all(np.abs(rep.partials[-1] - rep.partials) <= rep.tail_bounds * (1 + 1e-9) + 1e-15)


def test_odd_spectrum():
    s = OddSpectrum(2.0, 1.0)
    assert s(-3.0) == -s(3.0)
    with pytest.raises(InputError):
        s(0.0)


# -- parity decomposition ---------------------------------------------------------

POS = np.logspace(-2, 3, 40)
GRID = np.concatenate([-POS[::-1], POS])


def test_parity_real_even():
    vals = 1.0 / np.abs(GRID)
    dec = psd_parity_decompose(SpectrumSeries(GRID, vals))
    np.testing.assert_array_equal(dec.odd, 0.0)
    np.testing.assert_array_equal(dec.residual, 0.0)
    np.testing.assert_allclose(dec.even, 1.0 / POS, rtol=1e-15)


def test_parity_odd_imaginary():
    A = 2.5
    vals = -1j * A / GRID
    dec = psd_parity_decompose(SpectrumSeries(GRID, vals))
    np.testing.assert_array_equal(dec.even, 0.0)
    np.testing.assert_allclose(dec.odd, -A / POS, rtol=1e-15)
    assert np.max(np.abs(dec.residual)) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_parity_hermitian_random(seed):
    rng = np.random.default_rng(seed)
    even = rng.normal(size=POS.size)
    odd = rng.normal(size=POS.size)
    vals = np.concatenate([even[::-1], even]) + 1j * np.concatenate([-odd[::-1], odd])
    dec = psd_parity_decompose(SpectrumSeries(GRID, vals))
    assert np.linalg.norm(dec.residual) <= 1e-12 * np.linalg.norm(vals)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_parity_reconstruct_and_idempotent(seed):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=GRID.size) + 1j * rng.normal(size=GRID.size)
    dec = psd_parity_decompose(SpectrumSeries(GRID, vals))
    np.testing.assert_allclose(dec.reconstruct(), vals, rtol=0, atol=1e-14 * np.abs(vals).max())
    model = np.concatenate([dec.even[::-1], dec.even]) + 1j * np.concatenate([-dec.odd[::-1], dec.odd])
    again = psd_parity_decompose(SpectrumSeries(GRID, model))
    np.testing.assert_array_equal(again.even, dec.even)
    np.testing.assert_array_equal(again.odd, dec.odd)
    assert np.max(np.abs(again.residual)) == 0.0


def test_parity_rejects_asymmetric_grid():
    with pytest.raises(InputError):
        psd_parity_decompose(SpectrumSeries(np.array([-2.0, -1.0, 1.0, 3.0]), np.ones(4)))
    with pytest.raises(InputError):
        psd_parity_decompose(SpectrumSeries(np.array([-1.0, 0.0, 1.0]), np.ones(3)))
    with pytest.raises(InputError):
        SpectrumSeries(np.array([1.0, 0.5]), np.ones(2))
