"""Small complex linear-algebra helpers used throughout the package.

All helpers broadcast over leading batch dimensions; matrices live in the
trailing two axes.
"""

from __future__ import annotations

import numpy as np

from .exceptions import NumericalError

_LOG2 = np.log(2.0)


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose of the trailing two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Symmetrize (A + A^H)/2 to suppress rounding asymmetry."""
    return 0.5 * (a + dagger(a))


def anti_hermitianize(a: np.ndarray) -> np.ndarray:
    """Project onto skew-Hermitian matrices: (A - A^H)/2."""
    return 0.5 * (a - dagger(a))


def frob(a: np.ndarray) -> np.ndarray:
    """Frobenius norm over the trailing two axes."""
    return np.linalg.norm(a, axis=(-2, -1))


def trace(a: np.ndarray) -> np.ndarray:
    return np.trace(a, axis1=-2, axis2=-1)


def logdet2_hermitian_pd(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    """log2(det(A)) of a Hermitian positive-definite matrix via Cholesky.

    Raises NumericalError when the factorization fails (A not PD).
    """
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"{what} is not positive definite") from exc
    d = np.diagonal(chol, axis1=-2, axis2=-1).real
    return 2.0 * np.sum(np.log(d), axis=-1) / _LOG2


def unitarity_residual(phi: np.ndarray) -> np.ndarray:
    """Frobenius norm of Phi^H Phi - I."""
    m = phi.shape[-1]
    gram = dagger(phi) @ phi
    return frob(gram - np.eye(m))


def nearest_unitary(a: np.ndarray) -> np.ndarray:
    """Polar projection onto the unitary group (U V^H from the SVD)."""
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
