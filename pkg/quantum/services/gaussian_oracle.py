"""Exact Gaussian-state propagation of the seeded two-mode squeezer.

Quadratures use hbar = 1, so the vacuum covariance is I/2 and the ordering
is (x_probe, p_probe, x_conj, p_conj). Photon-number statistics follow
from the first and second quadrature moments via Isserlis' theorem.
"""

from typing import Sequence, Tuple

import numpy as np

from quantum.services.loss_chain import LossChain
from quantum.services.twin_beam import TwinBeamSource


VACUUM_VARIANCE = 0.5
PROBE_MODE = 0
CONJUGATE_MODE = 1


def two_mode_squeezer(squeeze_param: float) -> np.ndarray:
    """Symplectic matrix of a1 = a cosh r + b^dagger sinh r, b1 = b cosh r + a^dagger sinh r."""
    c, s = np.cosh(squeeze_param), np.sinh(squeeze_param)
    z = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])


def beamsplitter_loss(
    covariance: np.ndarray,
    displacement: np.ndarray,
    mode: int,
    transmission: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Mix one mode with a vacuum ancilla on a beamsplitter and trace the ancilla out."""
    size = covariance.shape[0]
    full_cov = np.zeros((size + 2, size + 2))
    full_cov[:size, :size] = covariance
    full_cov[size:, size:] = VACUUM_VARIANCE * np.eye(2)
    full_disp = np.concatenate([displacement, np.zeros(2)])

    t, r = np.sqrt(transmission), np.sqrt(1.0 - transmission)
    mixer = np.eye(size + 2)
    mode_slice = slice(2 * mode, 2 * mode + 2)
    ancilla_slice = slice(size, size + 2)
    mixer[mode_slice, mode_slice] = t * np.eye(2)
    mixer[mode_slice, ancilla_slice] = r * np.eye(2)
    mixer[ancilla_slice, mode_slice] = -r * np.eye(2)
    mixer[ancilla_slice, ancilla_slice] = t * np.eye(2)

    mixed_cov = mixer @ full_cov @ mixer.T
    mixed_disp = mixer @ full_disp
    return mixed_cov[:size, :size], mixed_disp[:size]


def photon_number_statistics(
    covariance: np.ndarray,
    displacement: np.ndarray,
    modes: Sequence[int] = (PROBE_MODE, CONJUGATE_MODE),
) -> Tuple[np.ndarray, np.ndarray]:
    """Means and covariance matrix of the photon numbers of the given modes."""
    blocks = [slice(2 * m, 2 * m + 2) for m in modes]
    means = np.array([
        0.5 * (np.trace(covariance[b, b]) + displacement[b] @ displacement[b]) - 0.5
        for b in blocks
    ])

    number_cov = np.empty((len(modes), len(modes)))
    for i, bi in enumerate(blocks):
        for j, bj in enumerate(blocks):
            block = covariance[bi, bj]
            number_cov[i, j] = 0.5 * np.trace(block @ block.T) + displacement[bi] @ block @ displacement[bj]
            if i == j:
                number_cov[i, j] -= 0.25
    return means, number_cov


def covariance_oracle_variance(source: TwinBeamSource, chain: LossChain) -> Tuple[np.ndarray, float]:
    """Detected photon-number means and Var(N_p - N_c) from the exact Gaussian state.

    The seed is a coherent state of amplitude sqrt(seed_flux) on the probe
    input; the conjugate input is vacuum.

    Returns:
        (means, variance) with means ordered (probe, conjugate).
    """
    squeezer = two_mode_squeezer(source.squeeze_param)
    covariance = squeezer @ (VACUUM_VARIANCE * np.eye(4)) @ squeezer.T
    displacement = squeezer @ np.array([np.sqrt(2.0 * source.seed_flux), 0.0, 0.0, 0.0])

    for mode, stages in ((PROBE_MODE, chain.probe_stages), (CONJUGATE_MODE, chain.conjugate_stages)):
        for stage in stages:
            covariance, displacement = beamsplitter_loss(covariance, displacement, mode, stage.transmission)

    means, number_cov = photon_number_statistics(covariance, displacement)
    variance = number_cov[0, 0] + number_cov[1, 1] - 2.0 * number_cov[0, 1]
    return means, float(variance)
