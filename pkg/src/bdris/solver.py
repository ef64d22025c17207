"""Alternating optimization of beamformers, decoders, weights and reflection.

The driver cycles four block updates.  Decoders and weights have closed
forms, beamformers come from a per-BS dual problem solved by bisection,
and the reflection matrix is improved by geodesic descent.  Every block
update can only lower the weighted MSE objective, so the weighted sum
rate recorded once per outer iteration never decreases.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._linalg import dagger, haar_unitary, hermitianize, logdet2_hermitian_pd, unitarity_residual
from .channel import _complex_normal, effective_channels
from .exceptions import ConfigError, NumericalError
from .manifold import ManifoldOptions, _assemble_core, optimize_reflection
from .system_model import (SolverVariables, _mse_matrices, _own_channels,
                           _signal_matrices, _total_covariance, _weighted_sum_rate)
from .validation import check_rng

__all__ = [
    "SolverOptions", "IterationTrace", "update_decoders", "update_weights",
    "update_beamformers", "solve_dual_mu", "wmmse_objective", "run_ao",
    "reflection_blocks",
]

logger = logging.getLogger(__name__)

_WEIGHT_RIDGE = 1e-12
# absolute slack allowed before a rate decrease counts as a numerical failure
_MONOTONE_GUARD = 1e-9


@dataclass
class SolverOptions:
    """Iteration limits, tolerances and structural switches for run_ao."""

    max_ao_iters: int = 500
    ao_rel_tol: float = 1e-4
    bisection_tol: float = 1e-10
    max_bisection_iters: int = 200
    manifold: ManifoldOptions = field(default_factory=ManifoldOptions)
    init_strategy: str = "identity"
    reflection_mode: str = "full"
    optimize_reflection: bool = True

    def __post_init__(self):
        if self.max_ao_iters < 1 or self.max_bisection_iters < 1:
            raise ConfigError("iteration caps must be >= 1")
        if self.ao_rel_tol <= 0 or self.bisection_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if self.init_strategy not in ("identity", "random_unitary"):
            raise ConfigError(f"unknown init_strategy {self.init_strategy!r}")
        if self.reflection_mode not in ("full", "diagonal", "per_surface"):
            raise ConfigError(f"unknown reflection_mode {self.reflection_mode!r}")


@dataclass
class IterationTrace:
    """Per-outer-iteration progress record.

    Row 0 holds the initial point.  weight_logdet stores the weighted
    log-determinant of the weight matrices at that iteration's weight
    update; it should match the previous row's weighted sum rate, which
    is the classical rate-MSE link.
    """

    weighted_sum_rate: np.ndarray
    objective: np.ndarray
    weight_logdet: np.ndarray
    unitarity: np.ndarray
    power: np.ndarray
    converged: bool

    @property
    def n_iterations(self):
        return len(self.weighted_sum_rate) - 1


def reflection_blocks(mode, config):
    """Block sizes of the unitary constraint for a reflection mode."""
    m = config.ris_elements
    if mode == "full":
        return (m,)
    if mode == "diagonal":
        return (1,) * m
    if mode == "per_surface":
        return tuple(config.surface_sizes)
    raise ConfigError(f"unknown reflection_mode {mode!r}")


def _update_decoders_core(h_eff, beamformers, noise_mw):
    total = _total_covariance(h_eff, beamformers, noise_mw)
    sig = _signal_matrices(h_eff, beamformers)
    try:
        return np.linalg.solve(total, sig)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("receive covariance is singular (zero noise?)") from exc


def _update_weights_core(h_eff, beamformers, decoders, noise_mw):
    """Weight update W = E^{-1}; returns (W, E)."""
    e = _mse_matrices(h_eff, beamformers, decoders, noise_mw)
    smallest = np.linalg.eigvalsh(e)[..., 0]
    bad = smallest < _WEIGHT_RIDGE
    if np.any(bad):
        logger.warning("ridge-regularized %d nearly singular MSE matrices", int(np.sum(bad)))
        ns = e.shape[-1]
        e = e + (_WEIGHT_RIDGE * bad[..., None, None]) * np.eye(ns)
    try:
        w = np.linalg.inv(e)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("MSE matrix is singular") from exc
    return hermitianize(w), e


def solve_dual_mu(eigvals, diag_weights, power, tol=1e-10, max_iters=200):
    """Bisection for the power dual variable of one (or many) BS problems.

    Finds mu >= 0 with sum_n c_n / (lambda_n + mu)^2 = P whenever the
    unconstrained solution (mu = 0) overshoots the budget; otherwise
    returns 0.  The bracket [0, sqrt(sum c / P)] always contains the
    root because the power function is strictly decreasing in mu and
    bounded by sum(c) / mu^2.

    eigvals and diag_weights have shape (..., N); power broadcasts
    against the leading axes.  Scalar (1-D) inputs give a float back.
    """
    lam = np.asarray(eigvals, dtype=float)
    c = np.asarray(diag_weights, dtype=float)
    if lam.shape != c.shape:
        raise ValueError("eigvals and diag_weights must share a shape")
    if np.any(lam < -1e-12) or np.any(c < 0):
        raise ValueError("eigvals and diag_weights must be nonnegative")
    lam = np.clip(lam, 0.0, None)
    batch = lam.shape[:-1]
    p = np.broadcast_to(np.asarray(power, dtype=float), batch).astype(float)
    if np.any(p <= 0):
        raise ValueError("power budgets must be positive")

    def used(mu):
        denom = (lam + mu[..., None]) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(c > 0, c / denom, 0.0)
        return terms.sum(axis=-1)

    mu = np.zeros(batch)
    unresolved = used(mu) > p
    if not np.any(unresolved):
        return float(mu) if lam.ndim == 1 else mu
    lo = np.zeros(batch)
    hi = np.sqrt(np.sum(c, axis=-1) / p)
    for _ in range(max_iters):
        mid = 0.5 * (lo + hi)
        usage = used(mid)
        done = np.abs(usage - p) <= tol * p
        newly = unresolved & done
        mu = np.where(newly, mid, mu)
        unresolved = unresolved & ~done
        if not np.any(unresolved):
            break
        go_up = usage > p
        lo = np.where(unresolved & go_up, mid, lo)
        hi = np.where(unresolved & ~go_up, mid, hi)
    else:
        warnings.warn("dual bisection stopped at max_iters with residual power error",
                      RuntimeWarning)
        mu = np.where(unresolved, 0.5 * (lo + hi), mu)
    return float(mu) if lam.ndim == 1 else mu


def _update_beamformers_core(h_eff, decoders, weights, alpha, power_mw, tol, max_iters):
    """Per-BS beamformer update F = (Q + mu I)^{-1} G through the EVD of Q."""
    uw = decoders @ weights
    v = hermitianize(uw @ dagger(decoders))
    q = np.einsum("lk,...tlkrn,...lkrs,...tlksm->...tnm", alpha, h_eff.conj(), v, h_eff)
    q = hermitianize(q)
    own = _own_channels(h_eff)
    rhs = alpha[:, :, None, None] * (dagger(own) @ uw)

    lam, basis = np.linalg.eigh(q)
    lam = np.clip(lam, 0.0, None)
    rhs_eig = np.einsum("...lnm,...lkns->...lkms", basis.conj(), rhs)
    c = np.sum(np.abs(rhs_eig) ** 2, axis=(-3, -1))
    mu = solve_dual_mu(lam, c, power_mw, tol=tol, max_iters=max_iters)
    mu = np.asarray(mu)

    denom = lam + mu[..., None]
    with np.errstate(divide="ignore"):
        inv = np.where(denom > 0, 1.0 / np.where(denom > 0, denom, 1.0), 0.0)
    scaled = rhs_eig * inv[..., None, :, None]
    return np.matmul(basis[..., None, :, :], scaled)


def _objective_core(h_eff, beamformers, decoders, weights, noise_mw, alpha):
    e = _mse_matrices(h_eff, beamformers, decoders, noise_mw)
    tr_we = np.einsum("...lkij,...lkji->...lk", weights, e).real
    logdet_w = logdet2_hermitian_pd(weights, "weight matrix")
    return np.sum(alpha * (tr_we - logdet_w), axis=(-2, -1))


def _init_beamformers(rng, prefix, num_cells, users, tx, streams, power_mw):
    """Random feasible start: every BS transmits its full budget, split equally."""
    z = _complex_normal(rng, tuple(prefix) + (num_cells, users, tx, streams))
    norms2 = np.einsum("...lkns,...lkns->...lk", z, z.conj()).real
    target = power_mw[:, None] / users
    return z * np.sqrt(target / norms2)[..., None, None]


def _initial_reflection(strategy, blocks, m, rng):
    if strategy == "identity":
        return np.eye(m, dtype=np.complex128)
    phi = np.zeros((m, m), dtype=np.complex128)
    pos = 0
    for size in blocks:
        phi[pos:pos + size, pos:pos + size] = haar_unitary(size, rng)
        pos += size
    return phi


def update_decoders(vars_, channels, config):
    """MMSE receive filters U = J^{-1} H F for every user."""
    h_eff = effective_channels(channels, vars_.reflection)
    return _update_decoders_core(h_eff, vars_.beamformers, config.noise_mw)


def update_weights(vars_, channels, config):
    """Weight matrices W = E^{-1} for the current decoders."""
    h_eff = effective_channels(channels, vars_.reflection)
    w, _ = _update_weights_core(h_eff, vars_.beamformers, vars_.decoders, config.noise_mw)
    return w


def update_beamformers(vars_, channels, config, options=None):
    """Optimal per-BS beamformers under the exact power budgets."""
    options = options if options is not None else SolverOptions()
    h_eff = effective_channels(channels, vars_.reflection)
    return _update_beamformers_core(h_eff, vars_.decoders, vars_.weights,
                                    config.weights_array, config.tx_power_mw,
                                    options.bisection_tol, options.max_bisection_iters)


def wmmse_objective(vars_, channels, config):
    """Weighted MSE objective sum alpha (tr(W E) - log2 det W)."""
    h_eff = effective_channels(channels, vars_.reflection)
    return float(_objective_core(h_eff, vars_.beamformers, vars_.decoders,
                                 vars_.weights, config.noise_mw, config.weights_array))


def run_ao(channels, config, options=None, rng=None, phi0=None):
    """Full alternating optimization; returns (SolverVariables, IterationTrace).

    The trace records the weighted sum rate, the weighted MSE objective,
    the weighted log-det of the weight matrices, the reflection
    unitarity residual and per-BS power usage, one row per outer
    iteration plus the initial point.
    """
    options = options if options is not None else SolverOptions()
    rng = check_rng(config.rng_seed if rng is None else rng)
    alpha = config.weights_array
    noise = config.noise_mw
    power = config.tx_power_mw
    num_cells, users = config.num_cells, config.users_per_cell
    tx, streams, m = config.tx_antennas, config.num_streams, config.ris_elements
    blocks = reflection_blocks(options.reflection_mode, config)

    if phi0 is not None:
        phi = np.asarray(phi0, dtype=np.complex128).copy()
        if phi.shape != (m, m):
            raise ConfigError(f"phi0 must be {m}x{m}, got {phi.shape}")
        if unitarity_residual(phi) > 1e-8:
            raise ConfigError("phi0 must be unitary")
    else:
        phi = _initial_reflection(options.init_strategy, blocks, m, rng)
    beamformers = _init_beamformers(rng, (), num_cells, users, tx, streams, power)

    h_eff = effective_channels(channels, phi)
    wsr = float(_weighted_sum_rate(h_eff, beamformers, noise, alpha))
    total_weight_streams = float(alpha.sum() * streams)

    def power_used(f):
        return np.einsum("lkns,lkns->l", f, f.conj()).real

    wsr_rows = [wsr]
    # at an exact decoder/weight update the objective equals
    # sum(alpha)*Ns minus the sum rate, which also seeds row 0
    obj_rows = [total_weight_streams - wsr]
    logdet_rows = [wsr]
    unitarity_rows = [float(unitarity_residual(phi))]
    power_rows = [power_used(beamformers)]

    decoders = None
    weights = None
    converged = False
    for _ in range(options.max_ao_iters):
        decoders = _update_decoders_core(h_eff, beamformers, noise)
        weights, _ = _update_weights_core(h_eff, beamformers, decoders, noise)
        weight_logdet = float(np.sum(alpha * logdet2_hermitian_pd(weights, "weight matrix")))
        beamformers = _update_beamformers_core(h_eff, decoders, weights, alpha, power,
                                               options.bisection_tol,
                                               options.max_bisection_iters)
        if options.optimize_reflection:
            objective = _assemble_core(channels, beamformers, decoders, weights, alpha, noise)
            outcome = optimize_reflection(objective, phi, options.manifold, blocks=blocks)
            phi = outcome.reflection
            h_eff = effective_channels(channels, phi)

        new_wsr = float(_weighted_sum_rate(h_eff, beamformers, noise, alpha))
        wsr_rows.append(new_wsr)
        obj_rows.append(float(_objective_core(h_eff, beamformers, decoders, weights,
                                              noise, alpha)))
        logdet_rows.append(weight_logdet)
        unitarity_rows.append(float(unitarity_residual(phi)))
        power_rows.append(power_used(beamformers))

        if new_wsr < wsr - _MONOTONE_GUARD * max(1.0, abs(wsr)):
            raise NumericalError(
                f"weighted sum rate decreased from {wsr:.12g} to {new_wsr:.12g}; "
                "this indicates a numerical failure in a block update")
        rel_change = abs(new_wsr - wsr) / max(abs(wsr), 1e-12)
        wsr = new_wsr
        if rel_change < options.ao_rel_tol:
            converged = True
            break

    trace = IterationTrace(
        weighted_sum_rate=np.array(wsr_rows),
        objective=np.array(obj_rows),
        weight_logdet=np.array(logdet_rows),
        unitarity=np.array(unitarity_rows),
        power=np.array(power_rows),
        converged=converged,
    )
    final = SolverVariables(beamformers, phi, decoders, weights)
    return final, trace
