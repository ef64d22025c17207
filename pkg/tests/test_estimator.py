"""Estimator facade: sklearn conventions around the alternating solver."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from bdris.channel import draw_scenario
from bdris.config import ScenarioConfig
from bdris.estimator import BdRisWmmse
from bdris.exceptions import ConfigError
from bdris.solver import SolverOptions, run_ao
from bdris.validation import unitarity_residual


@pytest.fixture(scope="module")
def scenario():
    return ScenarioConfig(ris_elements=4)


@pytest.fixture(scope="module")
def channels(scenario):
    return draw_scenario(scenario, np.random.default_rng(41))


@pytest.fixture(scope="module")
def fitted(scenario, channels):
    return BdRisWmmse(scenario=scenario, random_state=0).fit(channels)


def test_params_round_trip(scenario):
    est = BdRisWmmse(scenario=scenario, max_iter=50, reflection="diagonal")
    params = est.get_params()
    assert params["max_iter"] == 50
    assert params["reflection"] == "diagonal"
    other = BdRisWmmse().set_params(**params)
    assert other.get_params() == params
    assert clone(est).get_params() == params


def test_fit_exposes_solution(fitted, scenario, channels):
    cfg = scenario
    assert fitted.beamformers_.shape == (cfg.num_cells, cfg.users_per_cell,
                                         cfg.tx_antennas, cfg.num_streams)
    assert fitted.reflection_.shape == (cfg.ris_elements, cfg.ris_elements)
    assert unitarity_residual(fitted.reflection_) <= 1e-8
    assert fitted.rate_ > 0.0
    assert fitted.n_iter_ == fitted.trace_.n_iterations
    assert fitted.rate_ == fitted.trace_.weighted_sum_rate[-1]


def test_fit_matches_functional_solver(scenario, channels):
    est = BdRisWmmse(scenario=scenario, random_state=123).fit(channels)
    _, trace = run_ao(channels, scenario, SolverOptions(),
                      rng=np.random.default_rng(123))
    assert est.rate_ == pytest.approx(trace.weighted_sum_rate[-1], rel=1e-12)


def test_predict_and_score(fitted, scenario, channels):
    rates = fitted.predict(channels)
    assert rates.shape == (scenario.num_cells, scenario.users_per_cell)
    assert np.all(rates >= 0.0)
    assert fitted.score(channels) == pytest.approx(fitted.rate_, rel=1e-9)


def test_predict_before_fit_raises(channels):
    with pytest.raises(NotFittedError):
        BdRisWmmse().predict(channels)


def test_scenario_type_is_checked(channels):
    with pytest.raises(ConfigError):
        BdRisWmmse(scenario={"num_cells": 2}).fit(channels)


def test_channel_shape_mismatch_is_rejected(scenario):
    other = draw_scenario(ScenarioConfig(ris_elements=6), np.random.default_rng(2))
    with pytest.raises(Exception):
        BdRisWmmse(scenario=scenario).fit(other)


def test_default_scenario_and_seed(channels):
    cfg = ScenarioConfig(ris_elements=4)
    est = BdRisWmmse(scenario=cfg)
    est.fit(channels)
    ref = BdRisWmmse(scenario=cfg, random_state=cfg.rng_seed).fit(channels)
    assert est.rate_ == ref.rate_


def test_diagonal_reflection_mode(scenario, channels):
    est = BdRisWmmse(scenario=scenario, reflection="diagonal").fit(channels)
    off = est.reflection_ - np.diag(np.diagonal(est.reflection_))
    assert np.abs(off).max() == 0.0
    assert np.allclose(np.abs(np.diagonal(est.reflection_)), 1.0, atol=1e-8)
