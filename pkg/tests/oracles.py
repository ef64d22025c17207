"""Independent reference implementations used to cross-check the library.

Everything here is written the slow way on purpose (explicit loops,
scipy root finding, accelerated projected gradient, brute-force grids)
and shares no code with the package internals.
"""

import numpy as np
import scipy.linalg
import scipy.optimize


def effective_channel_loops(direct, ris_to_user, reflection, bs_to_ris):
    out = np.zeros_like(direct)
    n_cells, _, n_users = direct.shape[:3]
    for t in range(n_cells):
        for l in range(n_cells):
            for k in range(n_users):
                out[t, l, k] = (direct[t, l, k]
                                + ris_to_user[l, k] @ reflection @ bs_to_ris[t])
    return out


def total_covariance_loops(h_eff, beamformers, noise_mw):
    n_cells, _, n_users = h_eff.shape[:3]
    n_rx = h_eff.shape[-2]
    out = np.zeros((n_cells, n_users, n_rx, n_rx), dtype=complex)
    for l in range(n_cells):
        for k in range(n_users):
            acc = noise_mw * np.eye(n_rx, dtype=complex)
            for t in range(n_cells):
                for j in range(n_users):
                    hf = h_eff[t, l, k] @ beamformers[t, j]
                    acc = acc + hf @ hf.conj().T
            out[l, k] = acc
    return out


def user_rate_loops(h_eff, beamformers, noise_mw, l, k):
    total = total_covariance_loops(h_eff, beamformers, noise_mw)[l, k]
    s = h_eff[l, l, k] @ beamformers[l, k]
    interference = total - s @ s.conj().T
    _, ld_total = np.linalg.slogdet(total)
    _, ld_interference = np.linalg.slogdet(interference)
    return (ld_total - ld_interference) / np.log(2.0)


def weighted_sum_rate_loops(h_eff, beamformers, noise_mw, alpha):
    n_cells, n_users = alpha.shape
    total = 0.0
    for l in range(n_cells):
        for k in range(n_users):
            total += alpha[l, k] * user_rate_loops(h_eff, beamformers, noise_mw, l, k)
    return total


def mse_matrix_loops(h_eff, beamformers, decoders, noise_mw, l, k):
    n_streams = beamformers.shape[-1]
    u = decoders[l, k]
    total = total_covariance_loops(h_eff, beamformers, noise_mw)[l, k]
    hf = h_eff[l, l, k] @ beamformers[l, k]
    e = np.eye(n_streams, dtype=complex)
    return e - u.conj().T @ hf - hf.conj().T @ u + u.conj().T @ total @ u


def dual_mu_brentq(eigvals, diag_weights, power, tol=1e-12):
    """Root of the water-level equation via scipy brentq."""
    eigvals = np.asarray(eigvals, dtype=float)
    diag_weights = np.asarray(diag_weights, dtype=float)

    def used(mu):
        denom = (eigvals + mu) ** 2
        with np.errstate(divide="ignore"):
            terms = np.where(diag_weights > 0, diag_weights / np.where(
                denom > 0, denom, 1.0), 0.0)
            terms = np.where((diag_weights > 0) & (denom == 0), np.inf, terms)
        return terms.sum()

    if used(0.0) <= power:
        return 0.0
    hi = np.sqrt(diag_weights.sum() / power)
    while used(hi) > power:
        hi *= 2.0
    return scipy.optimize.brentq(lambda m: used(m) - power, 0.0, hi, xtol=tol)


def quadratic_beamformer_objective(q_matrix, rhs, f):
    """tr(F^H Q F) - 2 Re tr(rhs^H F), the per-cell surrogate cost."""
    val = np.trace(f.conj().T @ q_matrix @ f) - 2.0 * np.real(
        np.trace(rhs.conj().T @ f))
    return float(np.real(val))


def pgd_beamformer(q_matrix, rhs, power, iters=50000, tol=1e-14):
    """Accelerated projected gradient on the per-cell beamformer problem.

    Minimizes quadratic_beamformer_objective over the Frobenius ball
    ||F||_F^2 <= power; F stacks all users of the cell column-wise.
    """
    lam = float(np.linalg.eigvalsh(q_matrix)[-1])
    step = 1.0 / max(lam, 1e-12)
    radius = np.sqrt(power)

    def project(f):
        norm = np.linalg.norm(f)
        return f if norm <= radius else f * (radius / norm)

    f = np.zeros_like(rhs)
    z = f.copy()
    t_acc = 1.0
    for _ in range(iters):
        grad = q_matrix @ z - rhs
        f_new = project(z - step * grad)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_acc ** 2))
        z = f_new + ((t_acc - 1.0) / t_next) * (f_new - f)
        if quadratic_beamformer_objective(q_matrix, rhs, f_new) > \
                quadratic_beamformer_objective(q_matrix, rhs, f):
            z = f_new  # restart momentum on non-monotone step
            t_next = 1.0
        moved = np.linalg.norm(f_new - f)
        f, t_acc = f_new, t_next
        if moved <= tol * max(1.0, np.linalg.norm(f)):
            break
    return f


def directional_derivative(fn, phi, direction, step=1e-6):
    """Central finite difference of a real function along a matrix direction."""
    return (fn(phi + step * direction) - fn(phi - step * direction)) / (2.0 * step)


def expm_reference(s):
    return scipy.linalg.expm(s)


def linear_trace_minimum(b):
    """min over unitary Phi of 2 Re tr(B Phi) equals -2 sum of singular values."""
    return -2.0 * float(np.linalg.svd(b, compute_uv=False).sum())


def linear_trace_minimizer(b):
    u, _, vh = np.linalg.svd(b)
    return -(vh.conj().T @ u.conj().T)


def u2_matrices(alpha, beta, gamma, theta):
    """Batched 2x2 unitaries from the phase/rotation parameterization."""
    alpha, beta, gamma, theta = np.broadcast_arrays(alpha, beta, gamma, theta)
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(alpha.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(1j * beta) * c
    out[..., 0, 1] = np.exp(1j * gamma) * s
    out[..., 1, 0] = -np.exp(-1j * gamma) * s
    out[..., 1, 1] = np.exp(-1j * beta) * c
    return np.exp(1j * alpha)[..., None, None] * out


def u2_grid_max(batched_fn, rounds=4, points=13):
    """Coarse-to-fine grid search over U(2) for a batched objective.

    batched_fn maps an (N, 2, 2) stack of unitaries to N objective values.
    Returns (best value, best matrix).
    """
    centers = np.array([0.0, 0.0, 0.0, np.pi / 4.0])
    widths = np.array([np.pi, np.pi, np.pi, np.pi / 4.0])
    best_val, best_phi = -np.inf, None
    for _ in range(rounds):
        axes = [np.linspace(c - w, c + w, points) for c, w in zip(centers, widths)]
        grids = np.meshgrid(*axes, indexing="ij")
        flat = [g.ravel() for g in grids]
        phis = u2_matrices(*flat)
        vals = batched_fn(phis)
        idx = int(np.argmax(vals))
        if vals[idx] > best_val:
            best_val = float(vals[idx])
            best_phi = phis[idx]
            centers = np.array([f[idx] for f in flat])
        widths = widths * (2.0 / (points - 1))
    return best_val, best_phi
