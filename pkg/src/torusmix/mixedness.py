"""Level sets, delta-mixedness verdicts, mixing-scale scans, and the
H^-1 duality certificate.

A set A is delta-semi-mixed (at accuracy kappa) when every ball of radius
delta contains at most the fraction 1-kappa of A; it is delta-mixed when the
complement passes the same test. The certificate pairs a field against an
explicit bump test function to produce a certified lower bound on its H^-1
norm from any ball where the field is unmixed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .errors import GeometryError, ZeroFieldError
from .norms import sobolev_norm
from .spectral import GridSpec, ScalarField, ball_mean_field

__all__ = [
    "LevelSetMask",
    "MixednessReport",
    "ScaleScanEntry",
    "ScaleScanResult",
    "super_level_set",
    "is_semi_mixed",
    "is_mixed",
    "mixing_scale_scan",
    "h_neg1_certificate",
    "bump_test_function",
]


@dataclass(frozen=True)
class LevelSetMask:
    """0/1 indicator of a super level set on a grid."""

    grid: GridSpec
    indicator: np.ndarray
    level: float
    measure: float

    def as_field(self) -> ScalarField:
        return ScalarField(self.grid, self.indicator, spectral=False)

    def complement(self) -> "LevelSetMask":
        return LevelSetMask(
            self.grid, 1.0 - self.indicator, self.level, 1.0 - self.measure
        )

    def translated(self, shift) -> "LevelSetMask":
        rolled = np.roll(self.indicator, shift, axis=tuple(range(self.grid.dim)))
        return LevelSetMask(self.grid, rolled, self.level, self.measure)


@dataclass(frozen=True)
class MixednessReport:
    """Verdict of a (delta, kappa) mixedness test.

    worst_center / worst_fraction describe the ball with the highest covered
    fraction of the mask itself; complement_* describe the complement's worst
    ball when the full mixedness test was run (None for semi-only tests).
    """

    delta: float
    kappa: float
    semi_mixed: bool
    mixed: bool | None
    worst_center: tuple
    worst_fraction: float
    complement_worst_center: tuple | None = None
    complement_worst_fraction: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _check_kappa(kappa: float):
    if not (0.0 < kappa < 0.5):
        raise ValueError(f"kappa must lie in (0, 1/2), got {kappa}")


def super_level_set(f: ScalarField, level: float) -> LevelSetMask:
    """Indicator of {f > level * max|f|} on the grid (strict inequality)."""
    if not (0.0 < level <= 1.0):
        raise ValueError(f"level must lie in (0, 1], got {level}")
    v = f.values
    linf = float(np.abs(v).max())
    if linf == 0.0:
        raise ZeroFieldError("super level set of the zero field is undefined")
    ind = (v > level * linf).astype(float)
    return LevelSetMask(f.grid, ind, level, float(ind.mean()))


def _worst_ball(mask: LevelSetMask, delta: float):
    frac = ball_mean_field(mask.as_field(), delta).values
    flat = int(np.argmax(frac))
    center_idx = np.unravel_index(flat, mask.grid.shape)
    center = tuple(i / mask.grid.n for i in center_idx)
    return center, float(frac[center_idx])


def is_semi_mixed(mask: LevelSetMask, delta: float, kappa: float) -> MixednessReport:
    """Does every delta-ball contain at most the fraction 1-kappa of the mask?"""
    _check_kappa(kappa)
    center, worst = _worst_ball(mask, delta)
    return MixednessReport(
        delta=float(delta),
        kappa=float(kappa),
        semi_mixed=bool(worst <= 1.0 - kappa),
        mixed=None,
        worst_center=center,
        worst_fraction=worst,
    )


def is_mixed(mask: LevelSetMask, delta: float, kappa: float) -> MixednessReport:
    """Semi-mixedness of the mask and of its complement, combined."""
    _check_kappa(kappa)
    center, worst = _worst_ball(mask, delta)
    c_center, c_worst = _worst_ball(mask.complement(), delta)
    semi = bool(worst <= 1.0 - kappa)
    c_semi = bool(c_worst <= 1.0 - kappa)
    return MixednessReport(
        delta=float(delta),
        kappa=float(kappa),
        semi_mixed=semi,
        mixed=semi and c_semi,
        worst_center=center,
        worst_fraction=worst,
        complement_worst_center=c_center,
        complement_worst_fraction=c_worst,
    )


@dataclass(frozen=True)
class ScaleScanEntry:
    delta: float
    semi_mixed: bool
    mixed: bool


@dataclass(frozen=True)
class ScaleScanResult:
    """Verdicts over a grid of scales.

    semi_mixing_scale is the smallest scanned delta at which the mask is
    semi-mixed (None if none passes). r0_proxy is the largest scanned delta
    at which the mask is NOT semi-mixed -- a stand-in for the unmixedness
    length scale, reported as such. monotone records whether the semi-mixed
    verdicts are monotone across the scan (they need not be).
    """

    kappa: float
    entries: tuple
    semi_mixing_scale: float | None
    r0_proxy: float | None
    monotone: bool

    def to_json(self) -> str:
        payload = {
            "kappa": self.kappa,
            "entries": [asdict(e) for e in self.entries],
            "semi_mixing_scale": self.semi_mixing_scale,
            "r0_proxy": self.r0_proxy,
            "monotone": self.monotone,
        }
        return json.dumps(payload, sort_keys=True)


def mixing_scale_scan(mask: LevelSetMask, kappa: float, deltas) -> ScaleScanResult:
    """Run is_mixed over a list of scales and summarize."""
    _check_kappa(kappa)
    deltas = sorted(float(d) for d in deltas)
    entries = []
    for d in deltas:
        rep = is_mixed(mask, d, kappa)
        entries.append(ScaleScanEntry(d, rep.semi_mixed, bool(rep.mixed)))
    semi_flags = [e.semi_mixed for e in entries]
    passing = [e.delta for e in entries if e.semi_mixed]
    failing = [e.delta for e in entries if not e.semi_mixed]
    # monotone means: once semi-mixed, semi-mixed at every larger scale
    monotone = all(
        semi_flags[i] <= semi_flags[i + 1] for i in range(len(semi_flags) - 1)
    )
    return ScaleScanResult(
        kappa=float(kappa),
        entries=tuple(entries),
        semi_mixing_scale=min(passing) if passing else None,
        r0_proxy=max(failing) if failing else None,
        monotone=monotone,
    )


# ---------------------------------------------------------------------------
# Duality certificate


def bump_test_function(
    grid: GridSpec, center, delta: float, eps: float
) -> ScalarField:
    """Radial test function: 1 on B(center, delta), 0 outside
    B(center, (1+eps)*delta), C^1 cubic ramp in radius between."""
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if delta * (1.0 + eps) > 0.5:
        raise GeometryError(
            f"outer radius {(1 + eps) * delta} exceeds 1/2: annulus wraps onto itself"
        )
    r = grid.periodic_distance(center)
    s = np.clip((r - delta) / (eps * delta), 0.0, 1.0)
    g = 1.0 - s * s * (3.0 - 2.0 * s)
    return ScalarField(grid, g, spectral=False)


def h_neg1_certificate(
    f: ScalarField, center, delta: float, eps: float = 0.5
) -> float:
    """Certified lower bound for ||f||_{H^-1} from the ball B(center, delta).

    Returns |<f, g>| / ||g||_{H^1} for the explicit bump g above; by duality
    this never exceeds the H^-1 norm. The pairing is taken against the
    mean-free part of f, consistent with the homogeneous norms.
    """
    g = bump_test_function(f.grid, center, delta, eps)
    ghat = g.coeffs
    fhat = f.coeffs.copy()
    fhat[(0,) * f.grid.dim] = 0.0
    # discrete Parseval: grid mean of f*g equals sum_k fhat_k * conj(ghat_k)
    pairing = float(np.real(np.sum(fhat * np.conj(ghat))))
    h1 = sobolev_norm(g, 1.0)
    if h1 == 0.0:
        raise GeometryError("test function is constant; certificate undefined")
    return abs(pairing) / h1
