"""Comparison schemes run against the joint design.

Every scheme consumes the same ChannelSet and ScenarioConfig and reports
its converged weighted sum rate, so results are directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .channel import effective_channels
from .exceptions import ConfigError, NumericalError
from .solver import (SolverOptions, _init_beamformers, _update_beamformers_core,
                     _update_decoders_core, _update_weights_core, run_ao)
from .system_model import SolverVariables, _weighted_sum_rate, weighted_sum_rate
from .validation import check_rng

__all__ = [
    "SchemeId", "SchemeRun", "random_unitary_qr", "best_of_random",
    "no_ris", "diagonal_ris", "non_cooperative", "run_scheme",
]


class SchemeId(str, Enum):
    """Stable string tags used in result files."""

    PROPOSED = "proposed"
    DIAGONAL_RIS = "diag_ris"
    RANDOM_BDRIS = "random_bdris"
    NO_RIS = "no_ris"
    NON_COOPERATIVE = "non_coop"


@dataclass
class SchemeRun:
    """Outcome of one scheme on one channel realization."""

    scheme: SchemeId
    rate: float
    iterations: int
    variables: SolverVariables = None


def random_unitary_qr(m, rng):
    """Unitary draw from the QR decomposition of a uniform complex matrix.

    Real and imaginary parts are uniform on [0, 1].  The Q factor is
    phase-normalized (diagonal of R made positive) so the result does
    not depend on LAPACK sign conventions.
    """
    if int(m) < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    s = rng.random((m, m)) + 1j * rng.random((m, m))
    q, r = np.linalg.qr(s)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _fixed_reflection_solve(channels, config, options, phis, f0):
    """WMMSE iterations with frozen reflection(s), batched over draws.

    phis has shape (B, M, M) and f0 (B, L, K, Nt, Ns).  The loop keeps
    updating every draw until all of them meet the relative tolerance
    (extra iterations only improve a draw, updates are monotone).
    Returns final (rates, first_hit_iterations, F, U, W).
    """
    alpha = config.weights_array
    noise = config.noise_mw
    power = config.tx_power_mw
    h_eff = effective_channels(channels, phis)
    beamformers = f0
    wsr = _weighted_sum_rate(h_eff, beamformers, noise, alpha)
    n_draws = phis.shape[0]
    first_hit = np.full(n_draws, -1, dtype=int)
    decoders = weights = None
    for iteration in range(1, options.max_ao_iters + 1):
        decoders = _update_decoders_core(h_eff, beamformers, noise)
        weights, _ = _update_weights_core(h_eff, beamformers, decoders, noise)
        beamformers = _update_beamformers_core(h_eff, decoders, weights, alpha, power,
                                               options.bisection_tol,
                                               options.max_bisection_iters)
        new_wsr = _weighted_sum_rate(h_eff, beamformers, noise, alpha)
        if np.any(new_wsr < wsr - 1e-9 * np.maximum(1.0, np.abs(wsr))):
            raise NumericalError("weighted sum rate decreased in a fixed-reflection solve")
        rel = np.abs(new_wsr - wsr) / np.maximum(np.abs(wsr), 1e-12)
        wsr = new_wsr
        first_hit = np.where((rel < options.ao_rel_tol) & (first_hit < 0),
                             iteration, first_hit)
        if np.all(first_hit >= 0):
            break
    iterations = np.where(first_hit < 0, options.max_ao_iters, first_hit)
    return wsr, iterations, beamformers, decoders, weights


def _best_of_random(channels, config, options, n_draws, rng):
    if int(n_draws) < 1:
        raise ConfigError(f"n_draws must be >= 1, got {n_draws}")
    m = config.ris_elements
    num_cells, users = config.num_cells, config.users_per_cell
    tx, streams = config.tx_antennas, config.num_streams

    children = rng.spawn(int(n_draws))
    phis = np.stack([random_unitary_qr(m, child) for child in children])
    f0 = np.stack([
        _init_beamformers(child, (), num_cells, users, tx, streams, config.tx_power_mw)
        for child in children
    ])
    rates, iterations, beamformers, decoders, weights = _fixed_reflection_solve(
        channels, config, options, phis, f0)
    best = int(np.argmax(rates))
    vars_ = SolverVariables(beamformers[best], phis[best], decoders[best], weights[best])
    return vars_, float(rates[best]), int(iterations[best])


def best_of_random(channels, config, options=None, n_draws=100, rng=None):
    """Best weighted sum rate over random unitary reflections.

    Each draw gets its own child RNG (reflection first, then the
    beamformer start), so the first n draws of a longer run form a
    prefix of the same stream and the best rate is monotone in n_draws.
    """
    options = options if options is not None else SolverOptions()
    rng = check_rng(config.rng_seed if rng is None else rng)
    vars_, rate, _ = _best_of_random(channels, config, options, n_draws, rng)
    return vars_, rate


def _without_reflection_paths(channels):
    return replace(channels,
                   bs_to_ris=np.zeros_like(channels.bs_to_ris),
                   ris_to_user=np.zeros_like(channels.ris_to_user))


def no_ris(channels, config, options=None, rng=None):
    """Baseline with the reflecting surface removed (both hops zeroed)."""
    options = options if options is not None else SolverOptions()
    options = replace(options, optimize_reflection=False, reflection_mode="full")
    vars_, trace = run_ao(_without_reflection_paths(channels), config, options, rng=rng)
    return vars_, float(trace.weighted_sum_rate[-1])


def diagonal_ris(channels, config, options=None, rng=None):
    """Conventional diagonal phase-shift surface, same AO machinery.

    The reflection is restricted to unit-modulus diagonal entries, i.e.
    a block-diagonal unitary with all blocks of size one.
    """
    options = options if options is not None else SolverOptions()
    options = replace(options, reflection_mode="diagonal", optimize_reflection=True)
    vars_, trace = run_ao(channels, config, options, rng=rng)
    return vars_, float(trace.weighted_sum_rate[-1])


def _single_cell_config(config, cell):
    return replace(config,
                   num_cells=1,
                   tx_power_dbm=(config.tx_power_dbm[cell],),
                   weights=(config.weights[cell],),
                   bs_positions=(config.bs_positions[cell],),
                   user_disk_centers=(config.user_disk_centers[cell],))


def _single_cell_channels(channels, cell):
    return replace(channels,
                   direct=channels.direct[cell:cell + 1, cell:cell + 1],
                   bs_to_ris=channels.bs_to_ris[cell:cell + 1],
                   ris_to_user=channels.ris_to_user[cell:cell + 1],
                   user_positions=channels.user_positions[cell:cell + 1])


def _frozen_reflection_channels(channels, cell, phi):
    """Single-cell view with the reflected path folded into the direct one."""
    folded = channels.direct[cell, cell] + np.einsum(
        "krm,mq,qn->krn", channels.ris_to_user[cell], phi, channels.bs_to_ris[cell])
    m = channels.num_elements
    users, nr, nt = folded.shape
    return replace(channels,
                   direct=folded[None, None],
                   bs_to_ris=np.zeros((1, m, nt), dtype=np.complex128),
                   ris_to_user=np.zeros((1, users, nr, m), dtype=np.complex128),
                   user_positions=channels.user_positions[cell:cell + 1])


def _non_cooperative(channels, config, options, rng):
    num_cells, users = config.num_cells, config.users_per_cell
    tx, streams = config.tx_antennas, config.num_streams
    rx = config.rx_antennas
    children = iter(rng.spawn(num_cells * num_cells))
    fixed_options = replace(options, optimize_reflection=False, reflection_mode="full")

    slot_rates = []
    total_iterations = 0
    for active in range(num_cells):
        active_vars, active_trace = run_ao(
            _single_cell_channels(channels, active),
            _single_cell_config(config, active),
            options, rng=next(children))
        total_iterations += active_trace.n_iterations
        phi = active_vars.reflection

        beamformers = np.zeros((num_cells, users, tx, streams), dtype=np.complex128)
        beamformers[active] = active_vars.beamformers[0]
        for other in range(num_cells):
            if other == active:
                continue
            other_vars, other_trace = run_ao(
                _frozen_reflection_channels(channels, other, phi),
                _single_cell_config(config, other),
                fixed_options, rng=next(children))
            total_iterations += other_trace.n_iterations
            beamformers[other] = other_vars.beamformers[0]

        slot = SolverVariables(
            beamformers, phi,
            np.zeros((num_cells, users, rx, streams), dtype=np.complex128),
            np.zeros((num_cells, users, streams, streams), dtype=np.complex128))
        slot_rates.append(weighted_sum_rate(slot, channels, config))
    return float(np.mean(slot_rates)), total_iterations


def non_cooperative(channels, config, options=None, rng=None):
    """Round-robin single-cell design evaluated under the true interference.

    In each of L slots one cell owns the surface and jointly designs its
    beamformers and the reflection for its own users only; every other
    BS then designs single-cell beamformers against its effective
    channels under that frozen reflection.  No BS accounts for
    inter-cell interference at design time, but the reported rate is
    the full-network weighted sum rate, averaged over the L slots.
    """
    options = options if options is not None else SolverOptions()
    rng = check_rng(config.rng_seed if rng is None else rng)
    rate, _ = _non_cooperative(channels, config, options, rng)
    return rate


def run_scheme(scheme, channels, config, options=None, rng=None, n_draws=100):
    """Dispatch one scheme; returns a SchemeRun with rate and iteration count."""
    scheme = SchemeId(scheme)
    options = options if options is not None else SolverOptions()
    rng = check_rng(config.rng_seed if rng is None else rng)
    if scheme is SchemeId.PROPOSED:
        vars_, trace = run_ao(channels, config, options, rng=rng)
        return SchemeRun(scheme, float(trace.weighted_sum_rate[-1]),
                         trace.n_iterations, vars_)
    if scheme is SchemeId.DIAGONAL_RIS:
        options = replace(options, reflection_mode="diagonal", optimize_reflection=True)
        vars_, trace = run_ao(channels, config, options, rng=rng)
        return SchemeRun(scheme, float(trace.weighted_sum_rate[-1]),
                         trace.n_iterations, vars_)
    if scheme is SchemeId.RANDOM_BDRIS:
        vars_, rate, iterations = _best_of_random(channels, config, options, n_draws, rng)
        return SchemeRun(scheme, rate, iterations, vars_)
    if scheme is SchemeId.NO_RIS:
        options = replace(options, optimize_reflection=False, reflection_mode="full")
        vars_, trace = run_ao(_without_reflection_paths(channels), config, options, rng=rng)
        return SchemeRun(scheme, float(trace.weighted_sum_rate[-1]),
                         trace.n_iterations, vars_)
    if scheme is SchemeId.NON_COOPERATIVE:
        rate, iterations = _non_cooperative(channels, config, options, rng)
        return SchemeRun(scheme, rate, iterations, None)
    raise ConfigError(f"unknown scheme {scheme!r}")
