"""Fourier representation of periodic fields on the unit torus.

Conventions used throughout the package:

* The domain is the d-torus with side length 1, sampled on a uniform grid of
  n points per axis, x_i = i/n.
* Wavevectors are integers k in Z^d with |k_j| <= n/2; differential operators
  use the multiplier 2*pi*k, so d/dx sin(2*pi*x) = 2*pi*cos(2*pi*x).
* Spectral coefficients are normalized as true Fourier coefficients:
  f(x) = sum_k c[k] exp(2*pi*i k.x), i.e. c = fftn(values) / n**d.
  With this normalization Parseval reads mean(|f|^2) = sum(|c|^2).
* The Nyquist mode k_j = -n/2 has no well-defined odd derivative and is
  zeroed by the derivative multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DeltaOutOfRangeError, NonZeroMeanError

__all__ = [
    "GridSpec",
    "ScalarField",
    "VectorField",
    "to_spectral",
    "to_real",
    "gradient",
    "divergence",
    "laplacian",
    "inverse_laplacian",
    "leray_project",
    "dealias",
    "ball_mean_field",
    "ball_kernel",
    "l2_inner",
    "random_band_limited",
]

MEAN_ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform discretization of the unit d-torus: n points per axis."""

    n: int
    dim: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 4, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def npoints(self) -> int:
        return self.n**self.dim

    @property
    def dealias_kmax(self) -> int:
        # 2/3-rule cutoff: modes with max_j |k_j| > n/3 are discarded
        return self.n // 3

    def axis(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    def coordinates(self) -> list:
        """Meshgrid coordinate arrays (indexing='ij'), one per axis."""
        return list(np.meshgrid(*([self.axis()] * self.dim), indexing="ij"))

    # Cached spectral machinery -------------------------------------------

    def wavevectors(self) -> list:
        """Integer wavevector arrays, each broadcastable to the grid shape."""
        return _grid_arrays(self.n, self.dim).k

    def k_squared(self) -> np.ndarray:
        return _grid_arrays(self.n, self.dim).k2

    def derivative_multipliers(self) -> list:
        """2*pi*i*k_j per axis, Nyquist zeroed."""
        return _grid_arrays(self.n, self.dim).ik

    def inverse_laplacian_multiplier(self) -> np.ndarray:
        """1/(-4 pi^2 |k|^2), zero at k=0."""
        return _grid_arrays(self.n, self.dim).inv_lap

    def dealias_mask(self) -> np.ndarray:
        return _grid_arrays(self.n, self.dim).keep

    def periodic_distance(self, center) -> np.ndarray:
        """Distance from ``center`` to every grid point, minimal image."""
        center = np.asarray(center, dtype=float)
        if center.shape != (self.dim,):
            raise ValueError(f"center must have {self.dim} coordinates")
        d2 = np.zeros(self.shape)
        for j, x in enumerate(self.coordinates()):
            diff = np.abs(x - center[j]) % 1.0
            d2 += np.minimum(diff, 1.0 - diff) ** 2
        return np.sqrt(d2)


class _GridArrays:
    __slots__ = ("k", "k2", "ik", "inv_lap", "keep")

    def __init__(self, n, dim):
        kax = np.fft.fftfreq(n, d=1.0 / n)  # 0, 1, ..., n/2-1, -n/2, ..., -1
        kd = kax.copy()
        kd[n // 2] = 0.0  # Nyquist has no odd derivative
        self.k = []
        self.ik = []
        k2 = np.zeros((n,) * dim)
        keep = np.ones((n,) * dim, dtype=bool)
        kmax = n // 3
        for j in range(dim):
            shape = [1] * dim
            shape[j] = n
            kj = kax.reshape(shape)
            self.k.append(kj)
            self.ik.append((2j * np.pi) * kd.reshape(shape))
            k2 = k2 + kj**2
            keep = keep & (np.abs(kj) <= kmax)
        self.k2 = k2
        inv = np.zeros_like(k2)
        nz = k2 > 0
        inv[nz] = -1.0 / (4.0 * np.pi**2 * k2[nz])
        self.inv_lap = inv
        self.keep = keep
        for arr in (self.k2, self.inv_lap, self.keep, *self.k, *self.ik):
            arr.flags.writeable = False


@lru_cache(maxsize=32)
def _grid_arrays(n, dim):
    return _GridArrays(n, dim)


# ---------------------------------------------------------------------------
# Fields


@dataclass(frozen=True)
class ScalarField:
    """A scalar field on a GridSpec, stored in real or spectral form.

    Treat instances as immutable values: operations return new fields.
    """

    grid: GridSpec
    data: np.ndarray
    spectral: bool = False

    def __post_init__(self):
        if self.data.shape != self.grid.shape:
            raise ValueError(
                f"data shape {self.data.shape} does not match grid {self.grid.shape}"
            )

    @classmethod
    def from_values(cls, grid: GridSpec, values) -> "ScalarField":
        return cls(grid, np.array(values, dtype=float), spectral=False)

    @classmethod
    def from_coeffs(cls, grid: GridSpec, coeffs) -> "ScalarField":
        return cls(grid, np.array(coeffs, dtype=complex), spectral=True)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape), spectral=False)

    @property
    def values(self) -> np.ndarray:
        return self.data if not self.spectral else values_of(self.data)

    @property
    def coeffs(self) -> np.ndarray:
        return self.data if self.spectral else coeffs_of(self.data)

    @property
    def mean(self) -> float:
        if self.spectral:
            return float(self.data[(0,) * self.grid.dim].real)
        return float(self.data.mean())

    def without_mean(self) -> "ScalarField":
        c = self.coeffs.copy()
        c[(0,) * self.grid.dim] = 0.0
        return ScalarField(self.grid, c, spectral=True)


@dataclass(frozen=True)
class VectorField:
    """A d-component vector field; components share one GridSpec."""

    grid: GridSpec
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.grid.dim:
            raise ValueError("one component per dimension required")
        for c in self.components:
            if c.grid != self.grid:
                raise ValueError("components must share the grid")

    @classmethod
    def from_values(cls, grid: GridSpec, values) -> "VectorField":
        comps = tuple(ScalarField.from_values(grid, v) for v in values)
        return cls(grid, comps)

    @classmethod
    def from_coeffs(cls, grid: GridSpec, coeffs) -> "VectorField":
        comps = tuple(ScalarField.from_coeffs(grid, c) for c in coeffs)
        return cls(grid, comps)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "VectorField":
        return cls(grid, tuple(ScalarField.zeros(grid) for _ in range(grid.dim)))

    @property
    def values(self) -> list:
        return [c.values for c in self.components]

    @property
    def coeffs(self) -> list:
        return [c.coeffs for c in self.components]

    def max_magnitude(self) -> float:
        mag2 = sum(v**2 for v in self.values)
        return float(np.sqrt(mag2.max()))


# ---------------------------------------------------------------------------
# Array-level transforms (shared by the field API and the solver hot loop)


def coeffs_of(values: np.ndarray) -> np.ndarray:
    return np.fft.fftn(values) / values.size


def values_of(coeffs: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(coeffs).real * coeffs.size


def to_spectral(f: ScalarField) -> ScalarField:
    if f.spectral:
        return f
    return ScalarField(f.grid, coeffs_of(f.data), spectral=True)


def to_real(f: ScalarField) -> ScalarField:
    if not f.spectral:
        return f
    return ScalarField(f.grid, values_of(f.data), spectral=False)


def spectral_scale(coeffs: np.ndarray) -> float:
    """L2 magnitude of a coefficient array (equals the field's L2 norm)."""
    return float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))


def require_mean_zero(f: ScalarField, what: str) -> np.ndarray:
    c = f.coeffs
    scale = spectral_scale(c)
    if abs(c[(0,) * f.grid.dim]) > MEAN_ZERO_RTOL * scale:
        raise NonZeroMeanError(
            f"{what} requires a mean-zero field; "
            f"mean magnitude {abs(c[(0,) * f.grid.dim]):.3e} vs scale {scale:.3e}"
        )
    return c


# ---------------------------------------------------------------------------
# Differential operators


def gradient(f: ScalarField) -> VectorField:
    """Spectral gradient; exact for band-limited fields."""
    c = f.coeffs
    ik = f.grid.derivative_multipliers()
    comps = tuple(
        ScalarField(f.grid, ik[j] * c, spectral=True) for j in range(f.grid.dim)
    )
    return VectorField(f.grid, comps)


def divergence(v: VectorField) -> ScalarField:
    ik = v.grid.derivative_multipliers()
    c = sum(ik[j] * v.components[j].coeffs for j in range(v.grid.dim))
    return ScalarField(v.grid, c, spectral=True)


def laplacian(f: ScalarField) -> ScalarField:
    c = f.coeffs * (-4.0 * np.pi**2) * f.grid.k_squared()
    return ScalarField(f.grid, c, spectral=True)


def inverse_laplacian(f: ScalarField) -> ScalarField:
    """Solve Laplace(u) = f for the mean-zero solution u.

    Raises NonZeroMeanError when f has a non-negligible mean (the inversion
    is ill-posed there).
    """
    c = require_mean_zero(f, "inverse_laplacian")
    out = c * f.grid.inverse_laplacian_multiplier()
    return ScalarField(f.grid, out, spectral=True)


def leray_project(v: VectorField) -> VectorField:
    """Mode-wise projection onto divergence-free fields (k=0 untouched)."""
    grid = v.grid
    k = grid.wavevectors()
    k2 = grid.k_squared()
    c = [comp.coeffs for comp in v.components]
    kdotv = sum(k[j] * c[j] for j in range(grid.dim))
    with np.errstate(invalid="ignore", divide="ignore"):
        factor = np.where(k2 > 0, kdotv / np.where(k2 > 0, k2, 1.0), 0.0)
    comps = tuple(
        ScalarField(grid, c[j] - k[j] * factor, spectral=True)
        for j in range(grid.dim)
    )
    return VectorField(grid, comps)


def dealias(f: ScalarField) -> ScalarField:
    """Zero all modes with max_j |k_j| > n/3 (2/3 rule)."""
    return ScalarField(f.grid, f.coeffs * f.grid.dealias_mask(), spectral=True)


def dealias_vector(v: VectorField) -> VectorField:
    return VectorField(v.grid, tuple(dealias(c) for c in v.components))


def l2_inner(f: ScalarField, g: ScalarField) -> float:
    """Discrete L2 inner product, i.e. the grid mean of f*g."""
    return float(np.mean(f.values * g.values))


# ---------------------------------------------------------------------------
# Local ball averages


def _ball_offsets(grid: GridSpec, delta: float) -> np.ndarray:
    """Indicator kernel of the periodic ball B(0, delta), ties inward."""
    d2 = np.zeros(grid.shape)
    off = np.minimum(np.arange(grid.n), grid.n - np.arange(grid.n)) / grid.n
    for j in range(grid.dim):
        shape = [1] * grid.dim
        shape[j] = grid.n
        d2 = d2 + off.reshape(shape) ** 2
    return d2 <= delta * delta


@lru_cache(maxsize=64)
def _ball_kernel_cached(n, dim, delta):
    grid = GridSpec(n, dim)
    kernel = _ball_offsets(grid, delta)
    ksum = int(kernel.sum())
    khat = np.fft.fftn(kernel.astype(float))
    khat.flags.writeable = False
    return khat, ksum


def ball_kernel(grid: GridSpec, delta: float) -> np.ndarray:
    """The 0/1 ball indicator used for local averages (for inspection)."""
    _check_delta(grid, delta)
    return _ball_offsets(grid, delta)


def _check_delta(grid: GridSpec, delta: float):
    if not (grid.h <= delta <= 0.5):
        raise DeltaOutOfRangeError(
            f"delta={delta} outside [1/n, 1/2] = [{grid.h}, 0.5]"
        )


def ball_mean_field(mask: ScalarField, delta: float) -> ScalarField:
    """Fraction of the ball B(x, delta) covered by ``mask``, for every x.

    Computed by circular convolution with the discretized ball indicator,
    normalized by the kernel's own pixel count so a mask of ones maps to
    exactly 1. For 0/1 masks the convolution is rounded to exact integer
    counts, so results agree bit-for-bit with direct pixel counting.
    """
    grid = mask.grid
    _check_delta(grid, delta)
    v = mask.values
    if v.min() < -1e-12 or v.max() > 1.0 + 1e-12:
        raise ValueError("mask values must lie in [0, 1]")
    khat, ksum = _ball_kernel_cached(grid.n, grid.dim, float(delta))
    conv = np.fft.ifftn(np.fft.fftn(v) * khat).real
    binary = np.all((v == 0.0) | (v == 1.0))
    if binary:
        conv = np.rint(conv)
        out = conv / ksum
    else:
        out = np.clip(conv / ksum, 0.0, 1.0)
    return ScalarField(grid, out, spectral=False)


# ---------------------------------------------------------------------------
# Helpers for tests and demos


def random_band_limited(
    grid: GridSpec, kmax: int, rng: np.random.Generator, mean_zero: bool = True
) -> ScalarField:
    """Random real field with modes only in max_j |k_j| <= kmax.

    Coefficients outside the band are exactly zero (the Hermitian
    symmetrization is done in coefficient space, not via a transform
    round trip).
    """
    c = np.zeros(grid.shape, dtype=complex)
    k = grid.wavevectors()
    box = np.ones(grid.shape, dtype=bool)
    for kj in k:
        box &= np.abs(kj) <= kmax
    re = rng.standard_normal(grid.shape)
    im = rng.standard_normal(grid.shape)
    c[box] = (re + 1j * im)[box]
    rev = (-np.arange(grid.n)) % grid.n
    mesh = np.meshgrid(*([rev] * grid.dim), indexing="ij")
    c = 0.5 * (c + np.conj(c[tuple(mesh)]))
    if mean_zero:
        c[(0,) * grid.dim] = 0.0
    return ScalarField(grid, c, spectral=True)
