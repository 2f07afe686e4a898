"""Sobolev/Lebesgue norms, the stirring-cost accumulator, and per-step records.

All Sobolev norms are homogeneous and use the (2*pi*|k|)^s multiplier on
integer wavevectors (unit torus). The k=0 mode is always excluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonMonotoneTimeError, NonZeroMeanError
from .spectral import GridSpec, ScalarField, VectorField, gradient, spectral_scale

__all__ = [
    "sobolev_norm",
    "lp_norm",
    "grad_lp_norm",
    "log_plus_gradient",
    "CostAccumulator",
    "accumulate_cost",
    "MixTimeSeries",
]


def sobolev_norm(f: ScalarField, s: float) -> float:
    """Homogeneous H^s norm: (sum_{k!=0} (2 pi |k|)^{2s} |c_k|^2)^{1/2}."""
    c = f.coeffs
    if s < 0:
        scale = spectral_scale(c)
        if abs(c[(0,) * f.grid.dim]) > 1e-12 * max(scale, 1e-300):
            raise NonZeroMeanError(
                f"H^{s} norm needs a mean-zero field "
                f"(k=0 magnitude {abs(c[(0,) * f.grid.dim]):.3e})"
            )
    k2 = f.grid.k_squared()
    nz = k2 > 0
    weight = (4.0 * np.pi**2 * k2[nz]) ** s
    return float(np.sqrt(np.sum(weight * np.abs(c[nz]) ** 2)))


def lp_norm(f: ScalarField, p: float) -> float:
    """Grid-quadrature L^p norm, (mean |f|^p)^{1/p}; p = inf gives the max."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    v = np.abs(f.values)
    if math.isinf(p):
        return float(v.max())
    return float(np.mean(v**p) ** (1.0 / p))


def _jacobian_magnitude(v: VectorField) -> np.ndarray:
    """Pointwise Frobenius magnitude of the Jacobian of v."""
    mag2 = np.zeros(v.grid.shape)
    for comp in v.components:
        for g in gradient(comp).components:
            mag2 += g.values**2
    return np.sqrt(mag2)


def grad_lp_norm(v: VectorField, p: float) -> float:
    """L^p norm of the pointwise Frobenius magnitude of grad(v)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    mag = _jacobian_magnitude(v)
    if math.isinf(p):
        return float(mag.max())
    return float(np.mean(mag**p) ** (1.0 / p))


def log_plus_gradient(f: ScalarField) -> float:
    """Grid mean of log_+ |grad f|, with log_+(z) = max(log z, 0)."""
    mag2 = np.zeros(f.grid.shape)
    for g in gradient(f).components:
        mag2 += g.values**2
    mag = np.sqrt(mag2)
    return float(np.mean(np.log(np.maximum(mag, 1.0))))


# ---------------------------------------------------------------------------


@dataclass
class CostAccumulator:
    """Running trapezoid integral of sampled t -> ||grad u(t)||_{L^p}."""

    p: float
    times: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    cumulative: list = field(default_factory=list)

    def add(self, t: float, value: float) -> None:
        if self.times and t <= self.times[-1]:
            raise NonMonotoneTimeError(
                f"sample time {t} not after previous {self.times[-1]}"
            )
        if self.times:
            total = self.cumulative[-1] + 0.5 * (value + self.norms[-1]) * (
                t - self.times[-1]
            )
        else:
            total = 0.0
        self.times.append(float(t))
        self.norms.append(float(value))
        self.cumulative.append(float(total))

    @property
    def total(self) -> float:
        return self.cumulative[-1] if self.cumulative else 0.0


def accumulate_cost(acc: CostAccumulator, t: float, v: VectorField) -> CostAccumulator:
    """Append ||grad v||_{L^p} at time t and update the integral."""
    acc.add(t, grad_lp_norm(v, acc.p))
    return acc


# ---------------------------------------------------------------------------


class MixTimeSeries:
    """Per-step diagnostics of a mixing run.

    One record per accepted step: time, mix-norm ||theta||_{H^-1}, L2 norm,
    ||grad u||_{L^p} and its cumulative cost for each configured p, and the
    log_+ gradient integral. Cost integrals use the trapezoid rule.
    """

    def __init__(self, p_list=(1.0, 2.0)):
        self.p_list = tuple(float(p) for p in p_list)
        self.time: list = []
        self.h_neg1: list = []
        self.l2: list = []
        self.grad_lp = {p: [] for p in self.p_list}
        self.cost = {p: CostAccumulator(p) for p in self.p_list}
        self.log_grad: list = []
        self.degenerate_times: list = []

    def __len__(self):
        return len(self.time)

    def append(
        self,
        t: float,
        h_neg1: float,
        l2: float,
        grad_norms: dict,
        log_grad: float,
        degenerate: bool = False,
    ) -> None:
        if self.time and t <= self.time[-1]:
            raise NonMonotoneTimeError(f"record time {t} not after {self.time[-1]}")
        self.time.append(float(t))
        self.h_neg1.append(float(h_neg1))
        self.l2.append(float(l2))
        for p in self.p_list:
            self.grad_lp[p].append(float(grad_norms[p]))
            self.cost[p].add(t, grad_norms[p])
        self.log_grad.append(float(log_grad))
        if degenerate:
            self.degenerate_times.append(float(t))

    def cost_at(self, p: float) -> list:
        return self.cost[float(p)].cumulative

    @staticmethod
    def _ptag(p: float) -> str:
        return f"{p:g}".replace(".", "p")

    def header(self) -> list:
        cols = ["time", "h_neg1", "l2"]
        cols += [f"grad_lp_{self._ptag(p)}" for p in self.p_list]
        cols += [f"cost_{self._ptag(p)}" for p in self.p_list]
        cols.append("log_grad")
        return cols

    def rows(self):
        for i in range(len(self.time)):
            row = [self.time[i], self.h_neg1[i], self.l2[i]]
            row += [self.grad_lp[p][i] for p in self.p_list]
            row += [self.cost[p].cumulative[i] for p in self.p_list]
            row.append(self.log_grad[i])
            yield row

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(self.header()) + "\n")
            for row in self.rows():
                fh.write(",".join(repr(x) for x in row) + "\n")

    @classmethod
    def read_csv(cls, path) -> "MixTimeSeries":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            data = [
                [float(tok) for tok in line.strip().split(",")]
                for line in fh
                if line.strip()
            ]
        p_list = [
            float(name[len("grad_lp_") :].replace("p", "."))
            for name in header
            if name.startswith("grad_lp_")
        ]
        series = cls(p_list=p_list)
        col = {name: j for j, name in enumerate(header)}
        for row in data:
            grad_norms = {
                p: row[col[f"grad_lp_{cls._ptag(p)}"]] for p in series.p_list
            }
            series.append(
                row[col["time"]],
                row[col["h_neg1"]],
                row[col["l2"]],
                grad_norms,
                row[col["log_grad"]],
            )
        return series
