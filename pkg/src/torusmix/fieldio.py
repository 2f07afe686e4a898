"""Snapshot file formats and image export.

Two on-disk field formats, chosen by extension:

* ``.tmf`` -- binary: one JSON header line (dim, n, representation, time)
  terminated by a newline, followed by the raw row-major float64 (real) or
  complex128 (spectral) array bytes, little-endian.
* ``.csv`` -- text: ``# key=value`` header lines with the same keys, then the
  row-major values, one grid row per line.

Heat maps use a symmetric color scale about zero so snapshots from one run
are directly comparable.
"""

from __future__ import annotations

import json

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .spectral import GridSpec, ScalarField

__all__ = ["save_field", "load_field", "save_heatmap", "save_mask_png"]

_MAGIC = b"torusmix-field-v1 "


def save_field(path, field: ScalarField, time: float = 0.0) -> None:
    path = str(path)
    header = {
        "dim": field.grid.dim,
        "n": field.grid.n,
        "representation": "spectral" if field.spectral else "real",
        "time": float(time),
    }
    if path.endswith(".csv"):
        if field.spectral:
            raise ValueError("CSV snapshots hold real-space values only")
        with open(path, "w", encoding="utf-8") as fh:
            for key, val in header.items():
                fh.write(f"# {key}={val}\n")
            data = field.values.reshape(field.grid.n, -1)
            for row in data:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        return
    with open(path, "wb") as fh:
        fh.write(_MAGIC + json.dumps(header, sort_keys=True).encode() + b"\n")
        arr = field.data.astype(complex if field.spectral else float)
        fh.write(np.ascontiguousarray(arr).tobytes())


def load_field(path) -> tuple:
    """Read a snapshot; returns (ScalarField, time)."""
    path = str(path)
    if path.endswith(".csv"):
        header = {}
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, val = line[1:].split("=", 1)
                    header[key.strip()] = val.strip()
                else:
                    rows.append([float(tok) for tok in line.split(",")])
        dim, n = int(header["dim"]), int(header["n"])
        values = np.array(rows).reshape((n,) * dim)
        return (
            ScalarField.from_values(GridSpec(n, dim), values),
            float(header.get("time", 0.0)),
        )
    with open(path, "rb") as fh:
        first = fh.readline()
        if not first.startswith(_MAGIC):
            raise ValueError(f"{path} is not a torusmix field file")
        header = json.loads(first[len(_MAGIC) :])
        dim, n = int(header["dim"]), int(header["n"])
        spectral = header["representation"] == "spectral"
        dtype = complex if spectral else float
        arr = np.frombuffer(fh.read(), dtype=dtype).reshape((n,) * dim).copy()
    return ScalarField(GridSpec(n, dim), arr, spectral=spectral), float(
        header["time"]
    )


def save_heatmap(path, field: ScalarField, vmax: float = None, title: str = None):
    """PNG heat map with a symmetric color scale (x horizontal, y vertical)."""
    v = field.values
    if field.grid.dim != 2:
        raise ValueError("heat maps are 2-D only")
    if vmax is None:
        vmax = float(np.abs(v).max()) or 1.0
    fig, ax = plt.subplots(figsize=(4, 4), dpi=120)
    ax.imshow(
        v.T, origin="lower", cmap="RdBu_r", vmin=-vmax, vmax=vmax,
        extent=(0, 1, 0, 1), interpolation="nearest",
    )
    if title:
        ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def save_mask_png(path, indicator: np.ndarray) -> None:
    """Black/white bitmap of a 0/1 mask."""
    plt.imsave(path, indicator.T, origin="lower", cmap="gray", vmin=0.0, vmax=1.0)
