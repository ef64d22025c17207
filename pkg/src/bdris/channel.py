"""Random channel generation and effective-channel assembly.

Direct BS-to-user links fade Rayleigh; the two hops through each
reflecting surface fade Rician with a deterministic line-of-sight part
built from uniform-linear-array steering vectors (half-wavelength
spacing, arrays laid out along the y axis).  All geometry is planar.

The draw order inside :func:`draw_scenario` is part of the determinism
contract and must not change:

1. user positions, cell by cell, user by user (radius then angle);
2. direct channels, looping transmitter, cell, user;
3. BS-to-surface channels, looping transmitter then surface;
4. surface-to-user channels, looping cell, user, then surface.

Complex Gaussian entries are drawn as interleaved (real, imag) pairs so
that stacking per-surface draws reproduces a single full-surface draw
bit for bit when surfaces are co-located.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import GeometryError
from .validation import check_rng, check_unitary

__all__ = [
    "ChannelSet", "path_loss_db", "gen_rayleigh", "gen_rician",
    "los_steering", "draw_scenario", "effective_channel", "effective_channels",
]


def _complex_normal(rng, shape):
    """i.i.d. CN(0, 1) samples, drawn as (real, imag) pairs per entry."""
    pairs = rng.standard_normal(tuple(shape) + (2,))
    return (pairs[..., 0] + 1j * pairs[..., 1]) / math.sqrt(2.0)


def path_loss_db(distance, exponent, ref_db):
    """Log-distance path loss PL(d) = ref_db + 10*exponent*log10(d).

    Distances below 1 m are clamped to 1 m so the loss never drops
    under the reference value.
    """
    distance = float(distance)
    if not math.isfinite(distance) or distance <= 0.0:
        raise GeometryError(f"distance must be positive and finite, got {distance!r}")
    distance = max(distance, 1.0)
    return float(ref_db) + 10.0 * float(exponent) * math.log10(distance)


def _check_dims(rows, cols):
    if int(rows) < 1 or int(cols) < 1:
        raise ValueError(f"matrix dimensions must be >= 1, got ({rows}, {cols})")
    return int(rows), int(cols)


def gen_rayleigh(rows, cols, pathloss_db, rng):
    """Rayleigh-faded channel matrix with per-entry power 10^(-PL/10)."""
    rows, cols = _check_dims(rows, cols)
    scale = 10.0 ** (-float(pathloss_db) / 20.0)
    return scale * _complex_normal(rng, (rows, cols))


def gen_rician(rows, cols, pathloss_db, kappa, los_matrix, rng):
    """Rician-faded channel matrix.

    H = scale * (sqrt(kappa/(1+kappa)) * H_los + sqrt(1/(1+kappa)) * H_nlos)
    with H_nlos i.i.d. CN(0, 1); total per-entry power is 10^(-PL/10).
    """
    rows, cols = _check_dims(rows, cols)
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa < 0:
        raise ValueError(f"rician factor must be nonnegative and finite, got {kappa!r}")
    los = np.asarray(los_matrix, dtype=np.complex128)
    if los.shape != (rows, cols):
        raise ValueError(f"los_matrix must have shape ({rows}, {cols}), got {los.shape}")
    if not np.allclose(np.abs(los), 1.0, atol=1e-6):
        raise ValueError("los_matrix entries must have unit modulus")
    scale = 10.0 ** (-float(pathloss_db) / 20.0)
    nlos = _complex_normal(rng, (rows, cols))
    return scale * (math.sqrt(kappa / (1.0 + kappa)) * los
                    + math.sqrt(1.0 / (1.0 + kappa)) * nlos)


def los_steering(tx_position, rx_position, rows, cols, *, row_offset=0, col_offset=0):
    """Rank-one unit-modulus LOS matrix a_rx * a_tx^H from 2-D geometry.

    Arrays are uniform-linear along the y axis with half-wavelength
    spacing; the phase gradient follows the y component of the unit
    direction between the endpoints.  The offsets shift the element
    indices, which lets one surface be split into co-located sub-arrays
    that together reproduce the full array exactly.
    """
    rows, cols = _check_dims(rows, cols)
    tx = np.asarray(tx_position, dtype=float)
    rx = np.asarray(rx_position, dtype=float)
    delta = rx - tx
    dist = float(np.hypot(delta[0], delta[1]))
    if not math.isfinite(dist) or dist == 0.0:
        raise GeometryError(f"tx and rx positions must be distinct, got {tx} and {rx}")
    uy = delta[1] / dist
    a_rx = np.exp(-1j * np.pi * (np.arange(rows) + row_offset) * uy)
    a_tx = np.exp(1j * np.pi * (np.arange(cols) + col_offset) * uy)
    return np.outer(a_rx, a_tx.conj())


@dataclass
class ChannelSet:
    """One realization of every channel in the network.

    direct[t, l, k] is the Nr x Nt link from BS t to user k of cell l,
    bs_to_ris[t] the M x Nt link from BS t to the (stacked) surface,
    ris_to_user[l, k] the Nr x M link from the surface to user (l, k).
    Multiple surfaces are stacked along the element axis in config
    order; surface_sizes records the block structure.
    """

    direct: np.ndarray
    bs_to_ris: np.ndarray
    ris_to_user: np.ndarray
    user_positions: np.ndarray
    surface_sizes: tuple

    @property
    def num_elements(self):
        return self.bs_to_ris.shape[-2]


def draw_scenario(config, rng=None):
    """Draw a complete ChannelSet for one Monte-Carlo trial."""
    rng = check_rng(config.rng_seed if rng is None else rng)
    L, K = config.num_cells, config.users_per_cell
    nt, nr = config.tx_antennas, config.rx_antennas
    m_total = config.ris_elements
    sizes = config.surface_sizes
    offsets = np.concatenate(([0], np.cumsum(sizes)))[:-1]
    bs = np.asarray(config.bs_positions, dtype=float)
    centers = np.asarray(config.user_disk_centers, dtype=float)

    users = np.empty((L, K, 2))
    for l in range(L):
        for k in range(K):
            # sqrt law keeps the placement uniform over the disk area
            radius = config.user_disk_radius * math.sqrt(rng.random())
            angle = 2.0 * math.pi * rng.random()
            users[l, k] = centers[l] + radius * np.array([math.cos(angle), math.sin(angle)])

    direct = np.empty((L, L, K, nr, nt), dtype=np.complex128)
    for t in range(L):
        for l in range(L):
            for k in range(K):
                dist = float(np.linalg.norm(users[l, k] - bs[t]))
                pl = path_loss_db(dist, config.pathloss_exp_direct, config.pathloss_ref_db)
                direct[t, l, k] = gen_rayleigh(nr, nt, pl, rng)

    bs_to_ris = np.empty((L, m_total, nt), dtype=np.complex128)
    for t in range(L):
        blocks = []
        for pos, m_s, off in zip(config.ris_positions, sizes, offsets):
            dist = float(np.linalg.norm(np.asarray(pos) - bs[t]))
            pl = path_loss_db(dist, config.pathloss_exp_ris, config.pathloss_ref_db)
            los = los_steering(bs[t], pos, m_s, nt, row_offset=int(off))
            blocks.append(gen_rician(m_s, nt, pl, config.rician_factor, los, rng))
        bs_to_ris[t] = np.concatenate(blocks, axis=0)

    ris_to_user = np.empty((L, K, nr, m_total), dtype=np.complex128)
    for l in range(L):
        for k in range(K):
            blocks = []
            for pos, m_s, off in zip(config.ris_positions, sizes, offsets):
                dist = float(np.linalg.norm(users[l, k] - np.asarray(pos)))
                pl = path_loss_db(dist, config.pathloss_exp_ris, config.pathloss_ref_db)
                los = los_steering(pos, users[l, k], nr, m_s, col_offset=int(off))
                # draw with the reflecting side leading so surface blocks
                # concatenate exactly like one full-surface draw, then
                # transpose (no conjugation, entries are i.i.d.)
                raw = gen_rician(m_s, nr, pl, config.rician_factor, los.T, rng)
                blocks.append(raw.T)
            ris_to_user[l, k] = np.concatenate(blocks, axis=1)

    return ChannelSet(direct, bs_to_ris, ris_to_user, users, tuple(int(s) for s in sizes))


def effective_channel(direct, ris_to_user, reflection, bs_to_ris, check=True):
    """Single-link effective channel direct + R @ Phi @ T."""
    direct = np.asarray(direct)
    r = np.asarray(ris_to_user)
    t = np.asarray(bs_to_ris)
    phi = np.asarray(reflection)
    if check:
        check_unitary(phi)
    if r.shape[-1] != phi.shape[0] or phi.shape[1] != t.shape[0]:
        raise ValueError(
            f"reflection shape {phi.shape} does not join R {r.shape} to T {t.shape}")
    out = direct + r @ phi @ t
    if out.shape != direct.shape:
        raise ValueError(
            f"direct shape {direct.shape} inconsistent with reflected path {out.shape}")
    return out


def effective_channels(channels, reflection):
    """All effective channels for a reflection matrix (batchable).

    reflection may carry leading batch axes; the result has shape
    (..., L, L, K, Nr, Nt) indexed [transmitter, cell, user].
    """
    r_phi = np.einsum("lkrm,...mn->...lkrn", channels.ris_to_user, reflection)
    reflected = np.einsum("...lkrm,tmn->...tlkrn", r_phi, channels.bs_to_ris)
    return channels.direct + reflected
