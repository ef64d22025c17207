"""Input validation helpers shared by the functional API and the estimator."""

from __future__ import annotations

import numbers

import numpy as np

from ._linalg import unitarity_residual
from .exceptions import ConfigError


def check_rng(seed):
    """Turn None / int / Generator into a numpy Generator.

    None gives a freshly seeded (non-reproducible) generator; pass an
    integer seed for reproducible runs.
    """
    if seed is None:
        return np.random.default_rng()
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, numbers.Integral) and not isinstance(seed, bool):
        return np.random.default_rng(int(seed))
    raise ConfigError(f"expected None, an integer seed or a numpy Generator, got {seed!r}")


def check_complex_array(a, name, shape=None, ndim=None):
    """Validate finiteness and shape, return a complex128 ndarray."""
    arr = np.asarray(a)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must have {ndim} dimensions, got {arr.ndim}")
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name} must have shape {tuple(shape)}, got {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr.astype(np.complex128, copy=False)


def check_unitary(phi, name="reflection", tol=1e-6):
    """Check Phi^H Phi = I to the given Frobenius tolerance."""
    phi = check_complex_array(phi, name, ndim=2)
    if phi.shape[0] != phi.shape[1]:
        raise ValueError(f"{name} must be square, got shape {phi.shape}")
    resid = float(unitarity_residual(phi))
    if resid > tol:
        raise ValueError(f"{name} is not unitary: residual {resid:.3e} exceeds {tol:.1e}")
    return phi


def check_channel_set(channels, config):
    """Verify that a ChannelSet matches the dimensions of a ScenarioConfig."""
    L = config.num_cells
    K = config.users_per_cell
    nt, nr, m = config.tx_antennas, config.rx_antennas, config.ris_elements
    check_complex_array(channels.direct, "direct channels", shape=(L, L, K, nr, nt))
    check_complex_array(channels.bs_to_ris, "bs_to_ris channels", shape=(L, m, nt))
    check_complex_array(channels.ris_to_user, "ris_to_user channels", shape=(L, K, nr, m))
    return channels


def check_solver_variables(vars_, config, power_tol=1e-9, unitary_tol=1e-8):
    """Validate shapes and both feasibility constraints of a solution."""
    L, K = config.num_cells, config.users_per_cell
    nt, nr, ns, m = (config.tx_antennas, config.rx_antennas,
                     config.num_streams, config.ris_elements)
    check_complex_array(vars_.beamformers, "beamformers", shape=(L, K, nt, ns))
    check_complex_array(vars_.reflection, "reflection", shape=(m, m))
    check_complex_array(vars_.decoders, "decoders", shape=(L, K, nr, ns))
    check_complex_array(vars_.weights, "weights", shape=(L, K, ns, ns))
    resid = float(unitarity_residual(vars_.reflection))
    if resid > unitary_tol:
        raise ValueError(f"reflection unitarity residual {resid:.3e} exceeds {unitary_tol:.1e}")
    used = np.einsum("lkns,lkns->l", vars_.beamformers, vars_.beamformers.conj()).real
    budget = config.tx_power_mw
    if np.any(used > budget * (1.0 + power_tol)):
        raise ValueError(f"per-BS power exceeded: used {used}, budget {budget}")
    return vars_
