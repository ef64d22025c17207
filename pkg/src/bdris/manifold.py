"""Geodesic steepest descent for the reflection matrix.

The reflection subproblem minimizes the real quadratic form

    g(Phi) = tr(A1 Phi A2 Phi^H) + 2 Re tr(B Phi) + offset

over unitary Phi.  The optimizer walks geodesics Phi <- exp(-xi S) Phi
with S the skew-Hermitian lifted gradient and xi picked by Armijo
backtracking.  Passing ``blocks`` restricts Phi to a block-diagonal
unitary structure, which covers a diagonal phase-shift surface
(blocks of size one) and physically separate surfaces (one block per
surface) with the same machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import (anti_hermitianize, dagger, frob, hermitianize,
                      nearest_unitary)
from .system_model import _mse_matrices
from .validation import check_unitary

__all__ = [
    "QuadraticReflectionObjective", "ManifoldOptions", "ReflectionResult",
    "assemble_objective", "euclidean_gradient", "riemannian_gradient",
    "lifted_gradient", "expm_skew_hermitian", "optimize_reflection",
]


@dataclass
class QuadraticReflectionObjective:
    """Coefficients of the reflection objective; a1 and a2 are Hermitian PSD."""

    a1: np.ndarray
    a2: np.ndarray
    b: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        self.a1 = np.asarray(self.a1, dtype=np.complex128)
        self.a2 = np.asarray(self.a2, dtype=np.complex128)
        self.b = np.asarray(self.b, dtype=np.complex128)
        m = self.a1.shape[0]
        for name, mat in (("a1", self.a1), ("a2", self.a2), ("b", self.b)):
            if mat.shape != (m, m):
                raise ValueError(f"{name} must be square of matching size, got {mat.shape}")
        for name, mat in (("a1", self.a1), ("a2", self.a2)):
            if frob(mat - dagger(mat)) > 1e-10 * max(1.0, frob(mat)):
                raise ValueError(f"{name} must be Hermitian")
        self.offset = float(self.offset)

    @property
    def size(self):
        return self.a1.shape[0]

    def value(self, phi):
        quad = np.trace(self.a1 @ phi @ self.a2 @ dagger(phi)).real
        lin = 2.0 * np.trace(self.b @ phi).real
        return float(quad + lin + self.offset)

    def gradient(self, phi):
        """Conjugate-Wirtinger gradient d g / d conj(Phi)."""
        return self.a1 @ phi @ self.a2 + dagger(self.b)


@dataclass
class ManifoldOptions:
    """Knobs of the geodesic descent loop."""

    max_iters: int = 100
    grad_tol: float = 1e-6
    armijo_init_step: float = None
    armijo_shrink: float = 0.5
    armijo_slope: float = 1e-4
    max_backtracks: int = 30
    reunitarize_every: int = 20

    def __post_init__(self):
        if self.max_iters < 1 or self.max_backtracks < 1:
            raise ValueError("iteration caps must be >= 1")
        if not (0.0 < self.armijo_shrink < 1.0):
            raise ValueError("armijo_shrink must lie in (0, 1)")
        if not (0.0 < self.armijo_slope < 1.0):
            raise ValueError("armijo_slope must lie in (0, 1)")
        if self.armijo_init_step is not None and self.armijo_init_step <= 0:
            raise ValueError("armijo_init_step must be positive")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")
        if self.reunitarize_every < 1:
            raise ValueError("reunitarize_every must be >= 1")


@dataclass
class ReflectionResult:
    """Outcome of optimize_reflection."""

    reflection: np.ndarray
    iterations: int
    stalled: bool
    grad_norm: float


def _assemble_core(channels, beamformers, decoders, weights, alpha, noise_mw):
    """Build the quadratic reflection objective from raw arrays.

    The coefficients are chosen so that value(Phi) equals the weighted
    MSE trace sum_{l,k} alpha tr(W E) evaluated through the effective
    channels, for any unitary Phi.
    """
    t_ch = channels.bs_to_ris
    r_ch = channels.ris_to_user
    direct = channels.direct
    uw = decoders @ weights
    v = hermitianize(uw @ dagger(decoders))
    gram = np.einsum("lkns,lkms->lnm", beamformers, beamformers.conj())

    a1 = np.einsum("lk,lkrm,lkrs,lksn->mn", alpha, r_ch.conj(), v, r_ch)
    a2 = np.einsum("tmn,tnp,tqp->mq", t_ch, gram, t_ch.conj())
    # cross terms: one hop through the surface, the other via the direct path
    cross = np.einsum("tmn,tnp,tlkrp->lkmr", t_ch, gram, direct.conj())
    b1 = np.einsum("lk,lkmr,lkrs,lksn->mn", alpha, cross, v, r_ch)
    fw = beamformers @ weights
    b2 = -np.einsum("lk,lmn,lkns,lkrs,lkrq->mq", alpha, t_ch, fw, decoders.conj(), r_ch)

    # everything Phi-independent equals the weighted MSE of the direct-only links
    e_direct = _mse_matrices(direct, beamformers, decoders, noise_mw)
    offset = float(np.einsum("lk,lkij,lkji->", alpha, weights, e_direct).real)
    return QuadraticReflectionObjective(hermitianize(a1), hermitianize(a2), b1 + b2, offset)


def assemble_objective(vars_, channels, config):
    """Quadratic reflection objective at the current decoders/weights/beamformers."""
    return _assemble_core(channels, vars_.beamformers, vars_.decoders, vars_.weights,
                          config.weights_array, config.noise_mw)


def euclidean_gradient(obj, phi):
    """Flat-space gradient A1 Phi A2 + B^H of the quadratic objective."""
    return obj.gradient(np.asarray(phi, dtype=np.complex128))


def riemannian_gradient(grad, phi):
    """Project the Euclidean gradient onto the tangent space at unitary Phi."""
    phi = check_unitary(phi, "phi")
    grad = np.asarray(grad, dtype=np.complex128)
    return grad - phi @ dagger(grad) @ phi


def lifted_gradient(grad, phi):
    """Translate the Riemannian gradient to the identity: grad Phi^H - Phi grad^H.

    The result is explicitly anti-symmetrized so it is exactly
    skew-Hermitian up to rounding.
    """
    grad = np.asarray(grad, dtype=np.complex128)
    phi = np.asarray(phi, dtype=np.complex128)
    return anti_hermitianize(grad @ dagger(phi) - phi @ dagger(grad))


def expm_skew_hermitian(s):
    """Matrix exponential of a skew-Hermitian matrix; exactly unitary output.

    Computed through the eigendecomposition of the Hermitian matrix
    i*S, whose real eigenvalues theta give exp(S) = V e^{-i theta} V^H.
    """
    s = np.asarray(s, dtype=np.complex128)
    if frob(s + dagger(s)) > 1e-10 * max(1.0, frob(s)):
        raise ValueError("input must be skew-Hermitian")
    theta, vecs = np.linalg.eigh(hermitianize(1j * s))
    return (vecs * np.exp(-1j * theta)) @ dagger(vecs)


def _block_mask(blocks, m):
    mask = np.zeros((m, m), dtype=bool)
    pos = 0
    for size in blocks:
        mask[pos:pos + size, pos:pos + size] = True
        pos += size
    return mask


def _block_expm(s, blocks):
    """exp of a block-diagonal skew-Hermitian matrix, block by block."""
    if len(blocks) == 1:
        return expm_skew_hermitian(s)
    if all(size == 1 for size in blocks):
        # diagonal entries are purely imaginary, the exponential is a phase
        return np.diag(np.exp(np.diagonal(s)))
    out = np.zeros_like(s)
    pos = 0
    for size in blocks:
        sl = slice(pos, pos + size)
        out[sl, sl] = expm_skew_hermitian(s[sl, sl]) if size > 1 else np.exp(s[sl, sl])
        pos += size
    return out


def _project_unitary_blocks(phi, blocks):
    """Nearest block-diagonal unitary (polar projection per block)."""
    if len(blocks) == 1:
        return nearest_unitary(phi)
    out = np.zeros_like(phi)
    pos = 0
    for size in blocks:
        sl = slice(pos, pos + size)
        if size == 1:
            entry = phi[sl, sl]
            out[sl, sl] = entry / np.abs(entry)
        else:
            out[sl, sl] = nearest_unitary(phi[sl, sl])
        pos += size
    return out


def optimize_reflection(obj, phi0, options=None, blocks=None):
    """Geodesic steepest descent over (block-diagonal) unitary matrices.

    Returns a ReflectionResult whose objective value never exceeds the
    starting one; every accepted step satisfies the Armijo condition
    g(P Phi) <= g(Phi) - c * xi * ||S||_F^2 with S the lifted gradient.
    """
    options = options if options is not None else ManifoldOptions()
    phi = check_unitary(np.asarray(phi0, dtype=np.complex128), "phi0", tol=1e-8)
    m = phi.shape[0]
    blocks = tuple(int(x) for x in (blocks if blocks is not None else (m,)))
    if sum(blocks) != m or any(x < 1 for x in blocks):
        raise ValueError(f"blocks {blocks} do not partition a {m}-element surface")
    mask = None
    if len(blocks) > 1:
        mask = _block_mask(blocks, m)
        spill = frob(np.where(mask, 0.0, phi))
        if spill > 1e-8:
            raise ValueError(f"phi0 violates the block structure (off-block mass {spill:.2e})")

    grad = obj.gradient(phi)
    if mask is not None:
        grad = np.where(mask, grad, 0.0)
    scale = max(1.0, frob(grad))

    g_cur = obj.value(phi)
    accepted = 0
    stalled = False
    grad_norm = 0.0
    for _ in range(options.max_iters):
        grad = obj.gradient(phi)
        if mask is not None:
            grad = np.where(mask, grad, 0.0)
        lift = anti_hermitianize(grad @ dagger(phi) - phi @ dagger(grad))
        sq_norm = float(frob(lift) ** 2)
        grad_norm = math.sqrt(sq_norm)
        if grad_norm <= options.grad_tol * scale:
            break
        xi = options.armijo_init_step
        if xi is None:
            xi = 1.0 / max(1.0, grad_norm)
        step_taken = False
        for _ in range(options.max_backtracks):
            rotation = _block_expm(-xi * lift, blocks)
            candidate = rotation @ phi
            g_new = obj.value(candidate)
            if g_new <= g_cur - options.armijo_slope * xi * sq_norm:
                step_taken = True
                break
            xi *= options.armijo_shrink
        if not step_taken:
            stalled = True
            break
        phi = candidate
        g_cur = g_new
        accepted += 1
        if accepted % options.reunitarize_every == 0:
            phi = _project_unitary_blocks(phi, blocks)
            g_cur = obj.value(phi)
    return ReflectionResult(phi, accepted, stalled, grad_norm)
