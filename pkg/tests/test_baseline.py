import math

import numpy as np
import pytest
from scipy import integrate, stats

from gsense import baseline as bl


def test_signal_table():
    table = {(m.Gamma, m.chi) for m in bl.SIGNAL_MODELS.values()}
    assert table == {(0.01, 0.59), (0.055, 0.051), (0.23, 0.24), (0.29, 0.17), (0.7, 0.23)}
    assert set(bl.SIGNAL_MODELS) == {"dtv", "dabt", "egsm", "atv", "umts"}


def test_kappa_examples():
    assert bl.normalization_kappa(10.0, 1.0) == pytest.approx(1.0, abs=1e-10)
    assert bl.normalization_kappa(2.0, 2.0) == pytest.approx(1 / stats.norm.cdf(1.0), rel=1e-14)
    assert bl.normalization_kappa(2.0, 2.0) == pytest.approx(1.188573, abs=1e-6)
    for bad in [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)]:
        with pytest.raises(ValueError):
            bl.normalization_kappa(*bad)


@pytest.mark.parametrize("g0, s", [(1.0, 1.0), (0.1, 0.3), (2.0, 0.05)])
def test_density_integrates_to_one(g0, s):
    d = bl.SnrDistribution(g0, s)
    val = integrate.quad(d.pdf, 0.0, d.upper, points=[g0], epsabs=1e-13, epsrel=1e-13, limit=400)[0]
    assert val == pytest.approx(1.0, abs=1e-8)
    assert d.pdf(-0.1) == 0.0


def test_sigma_gamma_from_model():
    d = bl.SnrDistribution.for_signal(0.5, bl.SIGNAL_MODELS["egsm"], 100)
    assert d.sigma_gamma == pytest.approx(math.sqrt(0.23 * 100**-0.24) * 0.5, rel=1e-14)
    assert d.N == 100


def test_averaged_examples():
    d = bl.SnrDistribution(5.0, 0.5)
    assert bl.averaged_probability(lambda y: 0.37, d) == pytest.approx(0.37, abs=1e-8)
    assert bl.averaged_probability(lambda y: 1.0 if y >= 5.0 else 0.0, d) == pytest.approx(0.5, abs=1e-8)
    top = d.gamma0 + 12 * d.sigma_gamma
    got = bl.averaged_probability(lambda y: y / top, d)
    # midpoint rule at 1e5 nodes over [0, top]
    h = top / 100_000
    mid = (np.arange(100_000) + 0.5) * h
    pdf = np.array([d.pdf(y) for y in mid])
    assert got == pytest.approx(float(np.sum(mid / top * pdf) * h), abs=1e-6)


def test_averaged_monotone_in_curve():
    d = bl.SnrDistribution(1.0, 0.4)
    f = lambda y: 0.5 * math.exp(-y)
    g = lambda y: min(1.0, f(y) + 0.1 * y)
    assert bl.averaged_probability(f, d) <= bl.averaged_probability(g, d)


def test_averaged_narrow_limit():
    curve = lambda y: bl.classical_fa_at_md(y, 100, 0.01, 1.0)
    g0 = 0.8
    d = bl.SnrDistribution(g0, 1e-6 * g0)
    assert bl.averaged_probability(curve, d) == pytest.approx(curve(g0), abs=1e-4)


def test_classical_examples():
    p_md, p_fa = bl.classical_ed_probabilities(0.3, 50, 50.0, 1.0)
    assert p_fa == 0.5
    p_md, p_fa = bl.classical_ed_probabilities(0.0, 50, 57.0, 1.0)
    assert p_md == pytest.approx(1 - p_fa, abs=1e-15)
    p_md, p_fa = bl.classical_ed_probabilities(0.5, 100, 120.0, 1.0)
    assert p_fa == pytest.approx(stats.norm.sf(20 / math.sqrt(200)), rel=1e-12)
    assert p_fa == pytest.approx(0.0786, abs=1e-4)
    assert p_md == pytest.approx(stats.norm.cdf((120 - 150) / (math.sqrt(200) * 1.5)), rel=1e-12)


def test_classical_lambda_for_md_inverts():
    for snr in (0.1, 1.0, 5.0):
        lam = bl.classical_lambda_for_md(snr, 200, 0.05, 1.3)
        assert bl.classical_ed_probabilities(snr, 200, lam, 1.3)[0] == pytest.approx(0.05, rel=1e-10)


@pytest.mark.parametrize("key", sorted(bl.SIGNAL_MODELS))
def test_signal_curve_monotone_in_snr(key):
    vals = [bl.signal_model_fa_curve(10 ** (db / 10), bl.SIGNAL_MODELS[key], 100, 0.01) for db in np.arange(-10, 10.5, 1.0)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(0 <= v <= 1 for v in vals)
