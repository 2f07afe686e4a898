"""Enstrophy-normalized steepest-descent stirring velocity.

Given a mean-zero scalar theta, the designed field is

    u = -lap^{-1} P(theta * grad lap^{-1} theta) / || grad lap^{-1} P(...) ||_{L2}

with P the Leray-Hodge projection. The normalization makes ||grad u||_{L2} = 1
exactly (unit enstrophy), and u maximizes the instantaneous decay of
||theta||_{H^-1}^2 among unit-enstrophy divergence-free fields: writing
w = theta * grad lap^{-1} theta, the decay rate is

    d/dt ||theta||_{H^-1}^2 = -2 <u, w> = -2 ||grad lap^{-1} P(w)||_{L2} <= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVelocityError
from .spectral import (
    GridSpec,
    ScalarField,
    VectorField,
    require_mean_zero,
    values_of,
)

__all__ = ["VelocityDesignResult", "steepest_descent_velocity"]


@dataclass(frozen=True)
class VelocityDesignResult:
    """Designed velocity plus the raw (pre-normalization) descent magnitude.

    raw_norm is ||grad lap^{-1} P(theta grad lap^{-1} theta)||_{L2}; the
    instantaneous derivative of the squared mix-norm is -2*raw_norm.
    When degenerate, u is the zero field.
    """

    u: VectorField
    raw_norm: float
    degenerate: bool

    @property
    def mix_norm_sq_rate(self) -> float:
        return -2.0 * self.raw_norm


def _design_arrays(grid: GridSpec, theta_hat: np.ndarray):
    """Array-level velocity design; returns (u_hat list, raw_norm)."""
    arrays = grid
    ik = arrays.derivative_multipliers()
    inv_lap = arrays.inverse_laplacian_multiplier()
    k = arrays.wavevectors()
    k2 = arrays.k_squared()
    keep = arrays.dealias_mask()
    dim = grid.dim

    phi_hat = theta_hat * inv_lap
    theta = values_of(theta_hat)
    # w = theta * grad(lap^{-1} theta), formed pointwise then dealiased
    w_hat = []
    for j in range(dim):
        wj = theta * values_of(ik[j] * phi_hat)
        w_hat.append(np.fft.fftn(wj) / wj.size * keep)
    # Leray projection
    kdotw = sum(k[j] * w_hat[j] for j in range(dim))
    factor = np.where(k2 > 0, kdotw / np.where(k2 > 0, k2, 1.0), 0.0)
    q_hat = [w_hat[j] - k[j] * factor for j in range(dim)]
    # raw = || grad lap^{-1} q ||_{L2} = (sum_k |q_k|^2 / (4 pi^2 |k|^2))^{1/2}
    raw_sq = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_k2 = np.where(k2 > 0, 1.0 / np.where(k2 > 0, k2, 1.0), 0.0)
    for j in range(dim):
        raw_sq += np.sum(np.abs(q_hat[j]) ** 2 * inv_k2)
    raw = float(np.sqrt(raw_sq)) / (2.0 * np.pi)
    u_hat = [-(q_hat[j] * inv_lap) for j in range(dim)]
    return u_hat, raw


def steepest_descent_velocity(
    theta: ScalarField,
    degeneracy_floor: float = 1e-10,
    degenerate_ok: bool = False,
) -> VelocityDesignResult:
    """Design the unit-enstrophy steepest-descent velocity for theta.

    Raises DegenerateVelocityError when the descent direction vanishes
    (raw norm below degeneracy_floor * ||theta||_{L2}^2), unless
    degenerate_ok is set, in which case the zero field is returned with
    the degenerate flag raised. Raises NonZeroMeanError for non-mean-zero
    input.
    """
    theta_hat = require_mean_zero(theta, "steepest_descent_velocity")
    grid = theta.grid
    u_hat, raw = _design_arrays(grid, theta_hat)
    theta_l2_sq = float(np.sum(np.abs(theta_hat) ** 2))
    if raw < degeneracy_floor * theta_l2_sq or theta_l2_sq == 0.0:
        if not degenerate_ok:
            raise DegenerateVelocityError(
                f"descent direction vanished (raw norm {raw:.3e}, "
                f"||theta||_L2^2 {theta_l2_sq:.3e})",
                raw_norm=raw,
            )
        return VelocityDesignResult(
            u=VectorField.zeros(grid), raw_norm=raw, degenerate=True
        )
    comps = tuple(
        ScalarField(grid, u_hat[j] / raw, spectral=True) for j in range(grid.dim)
    )
    return VelocityDesignResult(
        u=VectorField(grid, comps), raw_norm=raw, degenerate=False
    )
