import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from sscp.channel import (
    FadingSpec,
    count_terms,
    enumerate_orderstat_terms,
    gamma_power_cdf,
    gamma_power_pdf,
    link_geometry,
    orderstat_cdf,
    orderstat_pdf,
    orderstat_upper,
    sample_best_of,
    sample_channel_power,
)
from sscp.sysmodel import ConfigError, Coord3, EnvProfile, ScenarioConfig

ENV = ScenarioConfig().env
UAV = Coord3(0.0, 0.0, 50.0)
FAR = Coord3(-100.0, -100.0, 0.0)


def test_distance_and_elevation():
    g = link_geometry(FAR, UAV, ENV)
    assert g.distance == pytest.approx(150.0, rel=1e-15)
    assert g.elevation == pytest.approx(0.33984, abs=5e-6)
    assert g.elevation == pytest.approx(math.asin(1 / 3), rel=1e-14)


def test_path_loss_hand_evaluation():
    g = link_geometry(FAR, UAV, ENV)
    scale = ENV.c / (4 * math.pi * ENV.f_c)
    k_los, k_nlos = ENV.mu_los / scale, ENV.mu_nlos / scale
    blend = 1 + ENV.tau1 * math.exp(-(180 / math.pi) * ENV.tau2 * math.asin(1 / 3)
                                    + ENV.tau2 * ENV.tau1)
    assert g.mean_path_loss == pytest.approx((k_nlos + (k_los - k_nlos) / blend) * 150.0 ** 2,
                                             rel=1e-13)


def test_tau1_zero_gives_pure_los():
    env = EnvProfile(0.0, ENV.tau2, ENV.mu_los, ENV.mu_nlos, ENV.theta, ENV.c, ENV.f_c)
    g = link_geometry(FAR, UAV, env)
    k_los = ENV.mu_los * 4 * math.pi * ENV.f_c / ENV.c
    assert g.mean_path_loss == pytest.approx(k_los * 150.0 ** 2, rel=1e-14)


def test_fspl_squared_variant():
    a = link_geometry(FAR, UAV, ENV, "as-printed").mean_path_loss
    b = link_geometry(FAR, UAV, ENV, "fspl-squared").mean_path_loss
    scale = ENV.c / (4 * math.pi * ENV.f_c)
    assert b == pytest.approx(a / scale, rel=1e-12)


def test_ground_link_has_zero_elevation():
    g = link_geometry(FAR, Coord3(80.0, 80.0, 0.0), ENV)
    assert g.elevation == 0.0


def test_degenerate_link():
    with pytest.raises(ConfigError) as info:
        link_geometry(UAV, UAV, ENV)
    assert info.value.code == "degenerate-link"


@given(st.floats(1.0, 500.0), st.floats(1.05, 3.0))
def test_path_loss_grows_with_distance_at_fixed_elevation(d, k):
    # scale both coordinates so the elevation stays fixed
    a = link_geometry(Coord3(d, 0, 0), Coord3(0, 0, d), ENV).mean_path_loss
    b = link_geometry(Coord3(k * d, 0, 0), Coord3(0, 0, k * d), ENV).mean_path_loss
    assert b >= a


def test_blend_monotone_in_elevation():
    from sscp.channel import _los_blend
    phis = np.linspace(0, math.pi / 2, 200)
    vals = _los_blend(ENV, phis)
    assert np.all(np.diff(vals) <= 0)


def test_gamma_power_forms():
    s = FadingSpec(2, 1.0)
    assert gamma_power_cdf(0.0, s) == 0.0
    assert gamma_power_pdf(0.0, s) == 0.0
    assert gamma_power_cdf(1.0, s) == pytest.approx(1 - 3 * math.exp(-2), rel=1e-14)
    assert gamma_power_cdf(1.0, s) == pytest.approx(0.59399, abs=5e-6)
    u = np.linspace(0, 10, 50)
    np.testing.assert_allclose(gamma_power_cdf(u, FadingSpec(1, 1.0)), 1 - np.exp(-u), atol=1e-15)


@given(st.integers(1, 5), st.floats(0.2, 5.0), st.floats(0.0, 30.0))
def test_gamma_power_matches_scipy(m, xi, u):
    s = FadingSpec(m, xi)
    assert gamma_power_cdf(u, s) == pytest.approx(stats.gamma.cdf(u, m, scale=xi / m), abs=1e-12)
    assert gamma_power_pdf(u, s) == pytest.approx(stats.gamma.pdf(u, m, scale=xi / m), abs=1e-12)


def test_single_device_terms():
    (t,) = enumerate_orderstat_terms(1, FadingSpec(2, 1.0))
    assert (t.p, t.coefficient, t.pbar) == (0, 1.0, 0)


def test_two_devices_m2_terms_match_hand_expansion():
    # F(u) = 1 - e^{-2u} - 2u e^{-2u} for m=2, xi=1
    terms = enumerate_orderstat_terms(2, FadingSpec(2, 1.0))
    got = sorted((t.p, t.indices, t.coefficient, t.pbar) for t in terms)
    assert got == [(0, (0,), 1.0, 0), (1, (0,), -2.0, 1), (1, (1,), -1.0, 0)]


@pytest.mark.parametrize("Z, m", [(1, 2), (3, 2), (4, 3), (5, 4), (12, 10)])
def test_term_invariants(Z, m):
    terms = enumerate_orderstat_terms(Z, FadingSpec(m, 1.3))
    assert len(terms) == count_terms(Z, m)
    for t in terms:
        assert math.isfinite(t.coefficient)
        assert sum(t.indices) <= t.p
        counts = (*t.indices, t.p - sum(t.indices))
        assert t.pbar == sum(s * c for s, c in enumerate(counts)) >= 0
    assert [t for t in terms if t.p == 0][0].coefficient > 0


def test_series_matches_brute_force_polynomial():
    # expand [F(u)]^(Z-1) symbolically on a grid of u and compare
    spec = FadingSpec(3, 0.7)
    u = np.linspace(0.01, 6, 80)
    for Z in range(1, 6):
        lam = spec.rate
        series = sum(t.coefficient * u ** t.pbar * np.exp(-lam * u * t.p)
                     for t in enumerate_orderstat_terms(Z, spec))
        np.testing.assert_allclose(series, gamma_power_cdf(u, spec) ** (Z - 1), atol=1e-12)


def test_log_space_branch_agrees_with_exact():
    # m + Z > 20 switches to log-space coefficients
    spec = FadingSpec(3, 1.0)
    u = np.linspace(0.05, 12, 60)
    np.testing.assert_allclose(orderstat_cdf(u, 19, spec), gamma_power_cdf(u, spec) ** 19,
                               atol=1e-9)


def test_orderstat_reduces_for_one_device():
    spec = FadingSpec(2, 1.5)
    u = np.linspace(0, 10, 40)
    np.testing.assert_allclose(orderstat_cdf(u, 1, spec), gamma_power_cdf(u, spec), atol=1e-15)
    np.testing.assert_allclose(orderstat_pdf(u, 1, spec), gamma_power_pdf(u, spec), atol=1e-15)


@pytest.mark.parametrize("Z", [1, 2, 4])
@pytest.mark.parametrize("m", [2, 3])
def test_orderstat_pdf_normalized(Z, m):
    spec = FadingSpec(m, 1.0)
    total, _ = integrate.quad(lambda u: float(orderstat_pdf(u, Z, spec)), 0, np.inf,
                              epsabs=1e-12, epsrel=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)


@given(st.integers(1, 5), st.sampled_from([2, 3]), st.floats(0.5, 3.0),
       st.floats(0.0, 10.0), st.floats(0.0, 2.0))
def test_orderstat_cdf_monotone(Z, m, xi, u, du):
    spec = FadingSpec(m, xi)
    assert orderstat_cdf(u + du, Z, spec) >= orderstat_cdf(u, Z, spec) - 1e-12
    assert orderstat_cdf(u, Z + 1, spec) <= orderstat_cdf(u, Z, spec) + 1e-12


def test_upper_level_tail():
    spec = FadingSpec(2, 1.0)
    top = orderstat_upper(3, spec, 1e-10)
    assert 1 - gamma_power_cdf(top, spec) ** 3 <= 1e-10 * 1.0001


def test_sampling_reproducible_and_mean():
    spec = FadingSpec(2, 1.7)
    a = sample_channel_power(spec, np.random.default_rng(5), 10)
    b = sample_channel_power(spec, np.random.default_rng(5), 10)
    np.testing.assert_array_equal(a, b)
    draws = sample_channel_power(spec, np.random.default_rng(1), 1_000_000)
    se = draws.std() / math.sqrt(draws.size)
    assert abs(draws.mean() - 1.7) < 4 * se


@pytest.mark.parametrize("Z", [1, 3])
def test_best_of_sampling_matches_cdf(Z):
    spec = FadingSpec(2, 1.0)
    draws = sample_best_of(Z, spec, np.random.default_rng(11), 1_000_000)
    ks = stats.kstest(draws, lambda u: orderstat_cdf(u, Z, spec))
    assert ks.statistic < 0.005


def test_enumerate_rejects_m_one():
    with pytest.raises(ValueError):
        enumerate_orderstat_terms(2, FadingSpec(1, 1.0))
