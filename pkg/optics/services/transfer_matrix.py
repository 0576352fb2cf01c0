"""TM characteristic-matrix model of a stratified medium.

Angles are internal incidence angles at the prism in degrees and may be
scalars or numpy arrays; array inputs broadcast over every quantity, so a
whole sweep is evaluated in one call.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from optics.services.exceptions import (
    BranchPointError,
    DegenerateAdmittanceError,
    DegenerateMediumError,
    ResonanceSingularityError,
)
from optics.services.media import LayerStack


@dataclass(frozen=True)
class TmLayerParams:
    """Phase thickness and TM admittance of one layer.

    beta is zero for the semi-infinite incidence and exit media.
    """
    beta: np.ndarray
    q: np.ndarray


def longitudinal_wavevector(eps_layer: complex, eps_incidence: complex, theta1_deg: ArrayLike, wavenumber: float):
    """k_z in a layer for the tangential wavevector fixed by the prism, Im(k_z) >= 0."""
    sin_theta = np.sin(np.deg2rad(np.asarray(theta1_deg, dtype=float)))
    kz = wavenumber * np.sqrt(np.asarray(eps_layer - eps_incidence * sin_theta ** 2, dtype=complex))
    # np.sqrt returns Im < 0 for arguments carrying a signed -0.0 imaginary part
    return np.where(kz.imag < 0, -kz, kz)


def tm_layer_params(stack: LayerStack, layer_index: int, theta1_deg: ArrayLike) -> TmLayerParams:
    """Compute beta = h * k_z and q_l = k_z / (eps_l * omega / c) for one layer.

    q_l equals sqrt(mu_l / eps_l) * cos(theta_l) with cos(theta_l) continued to
    complex media on the decaying branch.

    Args:
        stack: The stratified medium.
        layer_index: 0 for the prism, 1..n for films, n + 1 for the exit medium.
        theta1_deg: Internal incidence angle(s) at the prism, degrees.

    Returns:
        TmLayerParams for the addressed layer.

    Raises:
        DegenerateMediumError: If the layer permittivity is zero.
        BranchPointError: If k_z vanishes at any requested angle.
    """
    medium = stack.medium_at(layer_index)
    eps = medium.permittivity
    if eps == 0:
        raise DegenerateMediumError(f"Layer {layer_index} ('{medium.label}') has zero permittivity")

    kz = longitudinal_wavevector(eps, stack.incidence_medium.permittivity, theta1_deg, stack.wavenumber)
    if np.any(kz == 0):
        raise BranchPointError(
            f"Longitudinal wavevector vanishes in layer {layer_index} ('{medium.label}'): "
            f"eps_l equals eps_1 sin^2(theta_1)"
        )

    return TmLayerParams(
        beta=stack.thickness_at(layer_index) * kz,
        q=kz / (eps * stack.wavenumber),
    )


def characteristic_matrix(stack: LayerStack, theta1_deg: ArrayLike) -> np.ndarray:
    """Ordered product of the film characteristic matrices.

    Each film contributes [[cos b, -(i/q) sin b], [-i q sin b, cos b]]; the
    product runs from the film touching the prism to the film touching the
    exit medium. With no films the identity is returned.

    Returns:
        Complex array of shape (..., 2, 2) matching the shape of theta1_deg.

    Raises:
        DegenerateAdmittanceError: If a film admittance is zero.
    """
    shape = np.shape(theta1_deg)
    matrix = np.broadcast_to(np.eye(2, dtype=complex), shape + (2, 2)).copy()

    for layer_index in range(1, len(stack.films) + 1):
        params = tm_layer_params(stack, layer_index, theta1_deg)
        if np.any(params.q == 0):
            raise DegenerateAdmittanceError(f"Film {layer_index} has zero TM admittance")

        cos_b = np.cos(params.beta)
        sin_b = np.sin(params.beta)
        film = np.empty(shape + (2, 2), dtype=complex)
        film[..., 0, 0] = cos_b
        film[..., 0, 1] = -1j * sin_b / params.q
        film[..., 1, 0] = -1j * params.q * sin_b
        film[..., 1, 1] = cos_b
        matrix = matrix @ film

    return matrix


def reflection_coefficient(stack: LayerStack, theta1_deg: ArrayLike) -> np.ndarray:
    """TM amplitude reflection coefficient r = R / A of the stack.

    Raises:
        ResonanceSingularityError: If the denominator vanishes at some angle.
    """
    m = characteristic_matrix(stack, theta1_deg)
    q1 = tm_layer_params(stack, 0, theta1_deg).q
    q3 = tm_layer_params(stack, len(stack.films) + 1, theta1_deg).q

    upper = (m[..., 0, 0] + m[..., 0, 1] * q3) * q1
    lower = m[..., 1, 0] + m[..., 1, 1] * q3
    denominator = upper + lower

    singular = denominator == 0
    if np.any(singular):
        angle = float(np.broadcast_to(np.asarray(theta1_deg, dtype=float), singular.shape)[singular][0])
        raise ResonanceSingularityError(
            f"Reflection coefficient denominator vanishes at {angle:.6f} deg",
            angle_deg=angle,
        )

    return (upper - lower) / denominator


def reflectivity(stack: LayerStack, theta1_deg: ArrayLike) -> np.ndarray:
    """|r|^2 of the stack."""
    return np.abs(reflection_coefficient(stack, theta1_deg)) ** 2


def exit_index_response(stack: LayerStack, theta1_deg: float, exit_indices: ArrayLike) -> np.ndarray:
    """|r|^2 at one internal angle for each transparent exit-medium index.

    Only the exit admittance depends on the exit index, so the film matrix
    is formed once and the indices are evaluated together.

    Raises:
        BranchPointError: If the exit wavevector vanishes for some index.
    """
    indices = np.asarray(exit_indices, dtype=float)
    if np.any(indices <= 0):
        raise DegenerateMediumError("Exit-medium indices must be positive")
    eps_exit = indices ** 2

    m = characteristic_matrix(stack, theta1_deg)
    q1 = tm_layer_params(stack, 0, theta1_deg).q
    kz3 = longitudinal_wavevector(eps_exit, stack.incidence_medium.permittivity, theta1_deg, stack.wavenumber)
    if np.any(kz3 == 0):
        raise BranchPointError("Exit-medium longitudinal wavevector vanishes at the locked angle")
    q3 = kz3 / (eps_exit * stack.wavenumber)

    upper = (m[0, 0] + m[0, 1] * q3) * q1
    lower = m[1, 0] + m[1, 1] * q3
    return np.abs((upper - lower) / (upper + lower)) ** 2
