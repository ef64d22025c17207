import numpy as np
import pytest

from bdris import ScenarioConfig, SolverVariables, draw_scenario
from bdris._linalg import haar_unitary, hermitianize


@pytest.fixture(scope="session")
def small_config():
    """Default two-cell scenario shrunk to a 4-element surface."""
    return ScenarioConfig(ris_elements=4)


@pytest.fixture(scope="session")
def small_channels(small_config):
    return draw_scenario(small_config, np.random.default_rng(11))


def complex_randn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def make_variables(config, rng, power_fraction=1.0):
    """Random feasible solver variables for a given scenario size."""
    cells, users = config.num_cells, config.users_per_cell
    tx, rx, streams = config.tx_antennas, config.rx_antennas, config.num_streams
    m = config.ris_elements

    f = complex_randn(rng, (cells, users, tx, streams))
    per_cell = np.sqrt(np.einsum("lkns,lkns->l", f, f.conj()).real)
    budget = np.sqrt(config.tx_power_mw * power_fraction)
    f = f / per_cell[:, None, None, None] * budget[:, None, None, None]

    phi = haar_unitary(m, rng)
    u = 0.1 * complex_randn(rng, (cells, users, rx, streams))
    a = complex_randn(rng, (cells, users, streams, streams))
    w = hermitianize(a @ np.conj(np.swapaxes(a, -1, -2))) + np.eye(streams)
    return SolverVariables(f, phi, u, w)
