import dataclasses

import numpy as np
import pytest

from bdris import (check_feasibility, interference_covariance, mse_matrix,
                   user_rate, weighted_sum_rate)
from bdris.channel import effective_channels

from conftest import make_variables
from oracles import (mse_matrix_loops, total_covariance_loops, user_rate_loops,
                     weighted_sum_rate_loops)


@pytest.fixture(scope="module")
def variables(small_config):
    return make_variables(small_config, np.random.default_rng(17))


def test_weighted_sum_rate_matches_loop_oracle(small_config, small_channels, variables):
    h_eff = effective_channels(small_channels, variables.reflection)
    expected = weighted_sum_rate_loops(h_eff, variables.beamformers,
                                       small_config.noise_mw,
                                       small_config.weights_array)
    got = weighted_sum_rate(variables, small_channels, small_config)
    assert got == pytest.approx(expected, rel=1e-10)


def test_user_rate_matches_loop_oracle(small_config, small_channels, variables):
    h_eff = effective_channels(small_channels, variables.reflection)
    for l in range(small_config.num_cells):
        for k in range(small_config.users_per_cell):
            expected = user_rate_loops(h_eff, variables.beamformers,
                                       small_config.noise_mw, l, k)
            got = user_rate(variables, small_channels, small_config, l, k)
            assert got == pytest.approx(expected, rel=1e-10)
            assert got >= 0.0


def test_interference_covariance_structure(small_config, small_channels, variables):
    h_eff = effective_channels(small_channels, variables.reflection)
    total = total_covariance_loops(h_eff, variables.beamformers, small_config.noise_mw)
    for l in range(small_config.num_cells):
        for k in range(small_config.users_per_cell):
            got = interference_covariance(variables, small_channels, small_config, l, k)
            s = h_eff[l, l, k] @ variables.beamformers[l, k]
            assert np.allclose(got, total[l, k] - s @ s.conj().T, atol=1e-12)
            assert np.allclose(got, got.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(got)[0] >= -1e-10


def test_mse_matrix_matches_loop_oracle(small_config, small_channels, variables):
    h_eff = effective_channels(small_channels, variables.reflection)
    for l in range(small_config.num_cells):
        for k in range(small_config.users_per_cell):
            expected = mse_matrix_loops(h_eff, variables.beamformers,
                                        variables.decoders, small_config.noise_mw, l, k)
            got = mse_matrix(variables, small_channels, small_config, l, k)
            assert np.allclose(got, expected, atol=1e-12)
            assert np.allclose(got, got.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(got)[0] >= -1e-10


def test_rate_scales_linearly_with_weights(small_config, small_channels, variables):
    doubled = dataclasses.replace(small_config, weights=2.0)
    base = weighted_sum_rate(variables, small_channels, small_config)
    assert weighted_sum_rate(variables, small_channels, doubled) == pytest.approx(
        2.0 * base, rel=1e-12)


def test_zero_beamformers_give_zero_rate(small_config, small_channels, variables):
    silent = dataclasses.replace(variables,
                                 beamformers=np.zeros_like(variables.beamformers))
    assert weighted_sum_rate(silent, small_channels, small_config) == pytest.approx(0.0, abs=1e-12)


def test_feasibility_report_flags_violations(small_config, variables):
    report = check_feasibility(variables, small_config)
    assert report.ok()
    assert np.all(report.power_slack >= -1e-9)

    hot = dataclasses.replace(variables, beamformers=1.5 * variables.beamformers)
    assert not check_feasibility(hot, small_config).ok()

    bent = dataclasses.replace(variables, reflection=1.1 * variables.reflection)
    assert not check_feasibility(bent, small_config).ok()
