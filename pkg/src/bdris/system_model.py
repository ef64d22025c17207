"""Physical-layer quantities: covariances, rates, MSE matrices, feasibility.

Public functions operate on one (cell, user) pair for clarity; the
underscore-prefixed helpers are batched over arbitrary leading axes and
are shared with the solver, so the tested public surface and the hot
path compute identical numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import dagger, hermitianize, logdet2_hermitian_pd, unitarity_residual
from .channel import effective_channels

__all__ = [
    "SolverVariables", "FeasibilityReport", "interference_covariance",
    "user_rate", "weighted_sum_rate", "mse_matrix", "check_feasibility",
]


@dataclass
class SolverVariables:
    """One iterate of the alternating optimization.

    beamformers: (L, K, Nt, Ns) transmit precoders F.
    reflection:  (M, M) unitary reflection matrix.
    decoders:    (L, K, Nr, Ns) receive filters U.
    weights:     (L, K, Ns, Ns) Hermitian PSD weight matrices W.
    """

    beamformers: np.ndarray
    reflection: np.ndarray
    decoders: np.ndarray
    weights: np.ndarray

    def copy(self):
        return SolverVariables(self.beamformers.copy(), self.reflection.copy(),
                               self.decoders.copy(), self.weights.copy())


def _gram_per_cell(beamformers):
    """Per-cell transmit covariance sum_k F_lk F_lk^H, shape (..., L, Nt, Nt)."""
    return np.einsum("...lkns,...lkms->...lnm", beamformers, beamformers.conj())


def _total_covariance(h_eff, beamformers, noise_mw):
    """Signal-plus-interference-plus-noise covariance per user.

    h_eff is indexed (..., transmitter, cell, user, Nr, Nt); the result
    is the (..., L, K, Nr, Nr) receive covariance including the desired
    signal, all interference and the noise floor.
    """
    gram = _gram_per_cell(beamformers)
    cov = np.einsum("...tlkrn,...tnm,...tlksm->...lkrs", h_eff, gram, h_eff.conj())
    nr = cov.shape[-1]
    return hermitianize(cov) + noise_mw * np.eye(nr)


def _own_channels(h_eff):
    """Extract the serving-cell channel H[l, l, k] for every user."""
    return np.einsum("...llkrn->...lkrn", h_eff)


def _signal_matrices(h_eff, beamformers):
    """Desired-signal response H_own F per user, shape (..., L, K, Nr, Ns)."""
    return _own_channels(h_eff) @ beamformers


def _per_user_rates(h_eff, beamformers, noise_mw):
    """Achievable rates log2 det(I + H F F^H H^H Y^-1), shape (..., L, K)."""
    total = _total_covariance(h_eff, beamformers, noise_mw)
    sig = _signal_matrices(h_eff, beamformers)
    interference = hermitianize(total - sig @ dagger(sig))
    return (logdet2_hermitian_pd(total, "receive covariance")
            - logdet2_hermitian_pd(interference, "interference covariance"))


def _weighted_sum_rate(h_eff, beamformers, noise_mw, alpha):
    rates = _per_user_rates(h_eff, beamformers, noise_mw)
    return np.sum(alpha * rates, axis=(-2, -1))


def _mse_matrices(h_eff, beamformers, decoders, noise_mw):
    """MSE matrices E = U^H J U - U^H HF - (HF)^H U + I, shape (..., L, K, Ns, Ns)."""
    total = _total_covariance(h_eff, beamformers, noise_mw)
    sig = _signal_matrices(h_eff, beamformers)
    udag = dagger(decoders)
    ns = beamformers.shape[-1]
    e = udag @ total @ decoders - udag @ sig - dagger(sig) @ decoders + np.eye(ns)
    return hermitianize(e)


def interference_covariance(vars_, channels, config, l, k):
    """Interference-plus-noise covariance at user (l, k), Nr x Nr Hermitian."""
    h_eff = effective_channels(channels, vars_.reflection)
    total = _total_covariance(h_eff, vars_.beamformers, config.noise_mw)
    sig = _signal_matrices(h_eff, vars_.beamformers)[l, k]
    return hermitianize(total[l, k] - sig @ dagger(sig))


def user_rate(vars_, channels, config, l, k):
    """Achievable rate of user (l, k) in bps/Hz."""
    h_eff = effective_channels(channels, vars_.reflection)
    return float(_per_user_rates(h_eff, vars_.beamformers, config.noise_mw)[l, k])


def weighted_sum_rate(vars_, channels, config):
    """Network utility sum_{l,k} alpha_{l,k} R_{l,k} in bps/Hz."""
    h_eff = effective_channels(channels, vars_.reflection)
    return float(_weighted_sum_rate(h_eff, vars_.beamformers, config.noise_mw,
                                    config.weights_array))


def mse_matrix(vars_, channels, config, l, k):
    """MSE matrix of user (l, k) for the current decoders, Ns x Ns Hermitian."""
    h_eff = effective_channels(channels, vars_.reflection)
    return _mse_matrices(h_eff, vars_.beamformers, vars_.decoders, config.noise_mw)[l, k]


@dataclass
class FeasibilityReport:
    """Residuals of the two feasibility constraints.

    unitarity_residual: Frobenius norm of Phi^H Phi - I.
    power_used: per-BS transmit power sum_k ||F_lk||_F^2 in mW.
    power_slack: per-BS budget minus usage (negative means violated).
    """

    unitarity_residual: float
    power_used: np.ndarray
    power_slack: np.ndarray

    def ok(self, unitary_tol=1e-8, power_tol=1e-9):
        budget = self.power_used + self.power_slack
        return (self.unitarity_residual <= unitary_tol
                and bool(np.all(self.power_slack >= -power_tol * np.maximum(budget, 1.0))))


def check_feasibility(vars_, config):
    """Report constraint residuals for a candidate solution (never raises)."""
    used = np.einsum("lkns,lkns->l", vars_.beamformers, vars_.beamformers.conj()).real
    budget = config.tx_power_mw
    return FeasibilityReport(
        unitarity_residual=float(unitarity_residual(vars_.reflection)),
        power_used=used,
        power_slack=budget - used,
    )
