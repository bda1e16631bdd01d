import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from gsense import fading as fd
from gsense.fading import Constant, Nakagami, Rayleigh, Rician, SignalBand
from gsense.gnormal import GNormalParams
from oracles import k_closed, limit_closed

NOISE = GNormalParams(1.0, math.sqrt(2.0))
UNIT = SignalBand(1.0, 3.0)
MODELS = [Constant(1.2), Rayleigh(0.8), Rician(1.0, 1.0), Rician(0.6, 2.0), Nakagami(2.0, 1.0), Nakagami(0.5, 3.0)]
DENSE = [m for m in MODELS if not isinstance(m, Constant)]


# --- construction / parsing -------------------------------------------------

@pytest.mark.parametrize(
    "ctor",
    [lambda: Constant(0.0), lambda: Rayleigh(-1), lambda: Rician(1, -0.1), lambda: Rician(0, 1),
     lambda: Nakagami(0.4, 1), lambda: Nakagami(1, 0), lambda: SignalBand(2, 1), lambda: SignalBand(0, 1)],
)
def test_invalid_parameters(ctor):
    with pytest.raises(ValueError):
        ctor()


@pytest.mark.parametrize(
    "text, model",
    [("constant:eps=1.2", Constant(1.2)), ("rayleigh:sigma=1", Rayleigh(1.0)),
     ("rician:sigma=1,v=1", Rician(1.0, 1.0)), ("nakagami:m=2,omega=1", Nakagami(2.0, 1.0))],
)
def test_parse_spec_roundtrip(text, model):
    assert fd.parse_fading(text) == model
    assert fd.parse_fading(fd.fading_spec(model)) == model


@pytest.mark.parametrize("bad", ["", "foo:x=1", "rayleigh", "rayleigh:sigma=", "rayleigh:s=1", "rician:sigma=1",
                                 "nakagami:m=2, omega=1", "constant:eps=abc", "rayleigh:sigma=-1"])
def test_parse_spec_rejects(bad):
    with pytest.raises(ValueError):
        fd.parse_fading(bad)


# --- laplace_sq ---------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS)
def test_laplace_at_zero_is_one(model):
    assert fd.laplace_sq(model, 0.0) == 1.0


def test_laplace_examples():
    assert fd.laplace_sq(Rayleigh(1.0), 0.5) == pytest.approx(0.5, rel=1e-15)
    assert fd.laplace_sq(Rician(1.0, 1.0), 0.5) == pytest.approx(0.5 * math.exp(-0.25), rel=1e-15)


def test_rician_laplace_against_monte_carlo():
    rng = np.random.default_rng(20240601)
    eps = fd.sample(Rician(1.0, 1.0), rng, 1_000_000)
    vals = np.exp(-0.5 * eps**2)
    se = vals.std() / math.sqrt(vals.size)
    assert abs(vals.mean() - 0.5 * math.exp(-0.25)) <= 3 * se


@pytest.mark.parametrize("model", MODELS)
def test_laplace_rejects_negative(model):
    with pytest.raises(ValueError):
        fd.laplace_sq(model, -1e-3)


@pytest.mark.parametrize("model", MODELS)
@given(a=st.floats(0, 50), da=st.floats(1e-3, 10))
def test_laplace_strictly_decreasing_in_unit_interval(model, a, da):
    hi = fd.laplace_sq(model, a)
    lo = fd.laplace_sq(model, a + da)
    assert 0 < lo < hi <= 1


@pytest.mark.parametrize("model", DENSE)
@pytest.mark.parametrize("A", [0.1, 0.5, 2.0])
def test_laplace_matches_quadrature(model, A):
    val = integrate.quad(lambda x: math.exp(-A * x * x) * float(fd.pdf(model, x)), 0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=400)[0]
    assert val == pytest.approx(fd.laplace_sq(model, A), abs=1e-8)


@pytest.mark.parametrize("A", [0.1, 0.5, 2.0])
def test_constant_laplace(A):
    assert fd.laplace_sq(Constant(1.3), A) == pytest.approx(math.exp(-A * 1.69), rel=1e-15)


def test_reductions_to_rayleigh():
    for A in (0.0, 0.3, 4.0):
        assert fd.laplace_sq(Rician(1.1, 0.0), A) == pytest.approx(fd.laplace_sq(Rayleigh(1.1), A), rel=1e-15)
        assert fd.laplace_sq(Nakagami(1.0, 2.0), A) == pytest.approx(fd.laplace_sq(Rayleigh(1.0), A), rel=1e-15)
    for x in (0.0, 0.2, 1.0, 3.5):
        assert fd.pdf(Rician(1.1, 0.0), x) == pytest.approx(fd.pdf(Rayleigh(1.1), x), rel=1e-14)
        assert fd.pdf(Nakagami(1.0, 2.0), x) == pytest.approx(fd.pdf(Rayleigh(1.0), x), rel=1e-14)


def test_laplace_large_argument_no_underflow_in_log():
    assert fd.log_laplace_sq(Constant(1.0), 1e300) == -1e300
    assert math.isfinite(fd.log_laplace_sq(Nakagami(50.0, 1.0), 1e200))
    assert fd.log_laplace_sq(Rayleigh(1.0), 1e-20) == pytest.approx(-2e-20, rel=1e-12)


# --- pdf ----------------------------------------------------------------------

def test_pdf_examples():
    assert fd.pdf(Rayleigh(1.0), 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert fd.pdf(Nakagami(1.0, 2.0), 1.0) == pytest.approx(math.exp(-0.5), rel=1e-14)
    assert fd.pdf(Rayleigh(1.0), -0.5) == 0.0
    with pytest.raises(ValueError):
        fd.pdf(Constant(1.0), 1.0)


def test_pdf_against_scipy_formulas():
    # scipy.special is used here only as a reference implementation
    for x in (0.1, 1.0, 2.7, 9.0):
        rice = x * math.exp(-(x * x + 4.0) / (2 * 0.36)) * special.i0(x * 2.0 / 0.36) / 0.36
        assert fd.pdf(Rician(0.6, 2.0), x) == pytest.approx(rice, rel=1e-12, abs=1e-300)
        naka = 2 * 2.5**2.5 / (special.gamma(2.5) * 1.5**2.5) * x**4 * math.exp(-2.5 * x * x / 1.5)
        assert fd.pdf(Nakagami(2.5, 1.5), x) == pytest.approx(naka, rel=1e-12)


@pytest.mark.parametrize("model", DENSE)
def test_pdf_integrates_to_one(model):
    val = integrate.quad(lambda x: float(fd.pdf(model, x)), 0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=400)[0]
    assert val == pytest.approx(1.0, abs=1e-8)


def test_pdf_vectorized():
    xs = np.array([-1.0, 0.0, 0.5, 2.0])
    out = fd.pdf(Rician(1.0, 1.0), xs)
    assert out.shape == xs.shape
    assert out[0] == 0.0
    assert out[2] == pytest.approx(float(fd.pdf(Rician(1.0, 1.0), 0.5)))


# --- sampling -----------------------------------------------------------------

def test_sample_examples():
    assert fd.sample(Constant(2.0), np.random.default_rng(5)) == 2.0
    rng = np.random.default_rng(11)
    r = fd.sample(Rayleigh(1.0), rng, 1_000_000)
    assert abs(r.mean() - math.sqrt(math.pi / 2)) <= 3 * r.std() / 1000
    rng = np.random.default_rng(12)
    sq = fd.sample(Nakagami(1.0, 2.0), rng, 1_000_000) ** 2
    assert abs(sq.mean() - 2.0) <= 3 * sq.std() / 1000


@pytest.mark.parametrize("model", MODELS)
def test_sample_mean_square_and_determinism(model):
    a = fd.sample(model, np.random.default_rng(3), 200_000)
    b = fd.sample(model, np.random.default_rng(3), 200_000)
    np.testing.assert_array_equal(a, b)
    assert np.all(a >= 0)
    sq = a**2
    se = max(sq.std(), 1e-12) / math.sqrt(sq.size)
    assert abs(sq.mean() - model.mean_square()) <= 3 * se + 1e-12


@pytest.mark.parametrize("model", DENSE)
def test_sample_matches_laplace(model):
    eps = fd.sample(model, np.random.default_rng(99), 400_000)
    vals = np.exp(-0.7 * eps**2)
    assert abs(vals.mean() - fd.laplace_sq(model, 0.7)) <= 3.5 * vals.std() / math.sqrt(vals.size)


# --- k_beta -------------------------------------------------------------------

def test_k_beta_examples():
    band = SignalBand(1.0, 1.0)
    assert fd.k_beta(Constant(1.0), 1.0, NOISE, band) == pytest.approx(0.5 + math.log(2), rel=1e-14)
    assert fd.k_beta(Constant(1.0), 1.0, NOISE, band) == pytest.approx(1.19315, abs=1e-5)
    assert fd.k_beta(Rayleigh(1.0), 1e-8, NOISE, band) == pytest.approx(3.0, rel=1e-5)
    assert fd.k_beta(Nakagami(2.0, 1.0), 1e-8, NOISE, band) == pytest.approx(2.0, rel=1e-5)


@pytest.mark.parametrize("model", MODELS)
def test_k_beta_rejects_nonpositive_beta(model):
    for b in (0.0, -1.0):
        with pytest.raises(ValueError):
            fd.k_beta(model, b, NOISE, UNIT)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("upper", [False, True])
def test_k_beta_matches_closed_forms(model, upper):
    s = UNIT.sigma_x_upper if upper else UNIT.sigma_x_lower
    for beta in np.logspace(-3, 3, 100):
        ref = k_closed(model, beta, NOISE, s)
        assert abs(fd.k_beta(model, beta, NOISE, UNIT, upper) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_k_beta_limit_examples():
    band = SignalBand(1.0, 2.0)
    assert fd.k_beta_limit(Constant(1.2), NOISE, band) == pytest.approx(2.44, rel=1e-14)
    assert fd.k_beta_limit(Rician(1.0, 0.0), NOISE, band) == pytest.approx(3.0, rel=1e-14)
    assert fd.k_beta_limit(Rayleigh(1.0), NOISE, band) == pytest.approx(3.0, rel=1e-14)


@pytest.mark.parametrize("model", MODELS)
def test_k_beta_limits(model):
    for band in (UNIT, SignalBand(0.3, 0.4)):
        lim = fd.k_beta_limit(model, NOISE, band)
        assert lim == pytest.approx(limit_closed(model, NOISE, band.sigma_x_lower), rel=1e-14)
        assert fd.k_beta(model, 1e-8, NOISE, band) == pytest.approx(lim, rel=1e-5)
        assert fd.k_beta(model, 1e8, NOISE, band) < 1e-4 * lim


def test_decay_condition_examples():
    band = SignalBand(1.0, 3.0)
    assert fd.decay_condition(Constant(1.2), NOISE, band) is True
    assert fd.decay_condition(Constant(1.0), NOISE, band) is False
    assert fd.decay_condition(Nakagami(1.0, 2.0), NOISE, band) is True
