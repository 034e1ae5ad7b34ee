import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import poisson

from leaguephase.domain import MatchObservation, ModelParams
from leaguephase.errors import FitDegenerateError, InvalidArgumentError, InvalidRhoError
from leaguephase.fitting import (EloScale, FitOptions, ModelKind, fit, log_likelihood,
                                 log_likelihood_gradient, standard_errors, standardisation_constants)
from synth import TRUTH, synthetic_matches


@pytest.fixture(scope="module")
def dc_data():
    matches, _ = synthetic_matches(5000, np.random.default_rng(7), **TRUTH)
    return matches


@pytest.fixture(scope="module")
def indep_data():
    truth = dict(TRUTH, rho=0.0)
    matches, _ = synthetic_matches(5000, np.random.default_rng(8), **truth)
    return matches


@pytest.fixture(scope="module")
def dc_fit(dc_data):
    return fit(dc_data, ModelKind.DIXON_COLES)


def test_single_goalless_match():
    m = [MatchObservation("a", "b", 0, 0, 1500.0, 1500.0)]
    assert log_likelihood(ModelParams(0.0, 0.0, 0.0), m) == pytest.approx(-2.0)


def test_independent_likelihood_factorises(dc_data):
    p = ModelParams(0.15, 0.2, 0.3, 0.0, elo_mean=1700, elo_sd=150)
    total = 0.0
    for m in dc_data[:300]:
        d = (m.home_elo - m.away_elo) / 150
        total += poisson.logpmf(m.home_goals, math.exp(0.15 + 0.2 * d + 0.3))
        total += poisson.logpmf(m.away_goals, math.exp(0.15 - 0.2 * d))
    assert log_likelihood(p, dc_data[:300]) == pytest.approx(total, rel=1e-12)


def test_tau_violation_names_match():
    ms = [MatchObservation("a", "b", 2, 2, 1500.0, 1500.0), MatchObservation("c", "d", 0, 0, 1500.0, 1500.0)]
    with pytest.raises(InvalidRhoError) as info:
        log_likelihood(ModelParams(0.5, 0.0, 0.5, rho=0.9), ms)
    assert info.value.match_index == 1


def _fd_gradient(params, matches, h=1e-6):
    theta = np.array([params.beta0, params.beta1, params.beta2, params.rho])
    g = np.empty(4)
    for i in range(4):
        up, dn = theta.copy(), theta.copy()
        up[i] += h
        dn[i] -= h
        f = [log_likelihood(ModelParams(*t, elo_mean=params.elo_mean, elo_sd=params.elo_sd), matches)
             for t in (up, dn)]
        g[i] = (f[0] - f[1]) / (2 * h)
    return g


def test_gradient_matches_finite_differences(dc_data):
    data = dc_data[:400]
    rng = np.random.default_rng(11)
    for _ in range(20):
        b0, b1, b2 = rng.uniform(-0.2, 0.5), rng.uniform(-0.3, 0.6), rng.uniform(-0.2, 0.5)
        rho = rng.uniform(-0.1, 0.15)
        p = ModelParams(b0, b1, b2, rho, elo_mean=1700, elo_sd=150)
        assert np.allclose(log_likelihood_gradient(p, data), _fd_gradient(p, data), rtol=1e-5, atol=1e-4)


def test_standardisation_constants():
    ms = [MatchObservation("a", "b", 1, 0, 1600.0, 1400.0), MatchObservation("a", "c", 1, 0, 1700.0, 1500.0)]
    mean, sd = standardisation_constants(ms, EloScale.APPEARANCES)
    assert mean == pytest.approx(1550.0)
    assert sd == pytest.approx(np.std([1600, 1400, 1700, 1500], ddof=1))
    mean, sd = standardisation_constants(ms, EloScale.TEAMS)
    assert mean == pytest.approx(np.mean([1650, 1400, 1500]))
    same = [MatchObservation("a", "b", 1, 0, 1500.0, 1500.0)] * 3
    with pytest.raises(FitDegenerateError):
        standardisation_constants(same)


def test_dc_fit_recovers_truth(dc_fit):
    assert dc_fit.converged and dc_fit.n_obs == 5000
    assert set(dc_fit.std_errors) == {"beta0", "beta1", "beta2", "rho"}
    for name, true in TRUTH.items():
        se = dc_fit.std_errors[name]
        assert se > 0
        assert abs(getattr(dc_fit.params, name) - true) < 3 * se, name


def test_fit_is_a_maximum(dc_data, dc_fit):
    best = dc_fit.log_likelihood
    assert log_likelihood(dc_fit.params, dc_data) == pytest.approx(best, abs=1e-9)
    p = dc_fit.params
    for delta in (-1e-3, 1e-3):
        moved = ModelParams(p.beta0 + delta, p.beta1, p.beta2, p.rho, p.elo_mean, p.elo_sd)
        assert log_likelihood(moved, dc_data) < best
    assert np.all(np.abs(log_likelihood_gradient(p, dc_data)) < 0.5)


def test_dc_on_independent_data(indep_data):
    r = fit(indep_data, "dixon-coles")
    assert abs(r.params.rho) < 3 * r.std_errors["rho"]


def test_nesting(dc_data, dc_fit):
    ind = fit(dc_data, ModelKind.INDEPENDENT)
    assert ind.params.rho == 0.0
    assert set(ind.std_errors) == {"beta0", "beta1", "beta2"}
    assert dc_fit.log_likelihood >= ind.log_likelihood


def test_duplicated_data_shrinks_errors(dc_data, dc_fit):
    se1 = standard_errors(dc_fit.params, dc_data)
    se2 = standard_errors(dc_fit.params, list(dc_data) * 2)
    for name in se1:
        assert se2[name] / se1[name] == pytest.approx(1 / math.sqrt(2), rel=1e-3)


def test_fit_errors():
    few = [MatchObservation("a", "b", i % 3, 0, 1500.0 + i, 1500.0) for i in range(10)]
    with pytest.raises(InvalidArgumentError):
        fit(few)
    same = [MatchObservation("a", "b", 1, 1, 1500.0 + i, 1400.0) for i in range(30)]
    with pytest.raises(FitDegenerateError):
        fit(same)


def test_iteration_limit_reports_not_converged(dc_data):
    r = fit(dc_data[:500], options=FitOptions(max_iter=5))
    assert not r.converged and r.std_errors is None
    assert math.isfinite(r.log_likelihood)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fit_never_worse_than_start(seed):
    ms, _ = synthetic_matches(300, np.random.default_rng(seed), **TRUTH)
    r = fit(ms, options=FitOptions(std_errors=False))
    start = ModelParams(math.log(np.mean([m.home_goals + m.away_goals for m in ms]) / 2), 0.1, 0.2, 0.0,
                        r.params.elo_mean, r.params.elo_sd)
    assert r.log_likelihood >= log_likelihood(start, ms)


def test_bundled_ucl_fit(ucl_results):
    """Coefficients for the 2024/25 league phase, published to three decimals."""
    r = fit(ucl_results, ModelKind.DIXON_COLES)
    published = dict(beta0=0.242, beta1=0.286, beta2=0.301, rho=0.105)
    for name, value in published.items():
        assert getattr(r.params, name) == pytest.approx(value, abs=0.01), name
    assert r.std_errors["rho"] == pytest.approx(0.095, abs=0.02)


@pytest.mark.skip(reason="2023/24 domestic-league training data is not bundled")
def test_national_league_fit():
    pass
