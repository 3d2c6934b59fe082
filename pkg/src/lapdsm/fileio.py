"""File formats for CLI artifacts: CSV, ASCII PGM, checkpoints, metadata.

All numeric output uses repr-faithful decimal (%.17g) so reruns with the
same seed are byte-identical.
"""

from __future__ import annotations

import json

import numpy as np

from .dpn import NetworkParams
from .dsm import IndexField
from .errors import ValidationError
from .scene import ApertureSet, Box, FarFieldData, SamplingGrid


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_farfield_csv(path, data: FarFieldData) -> None:
    """Rows: incidence_index,theta_radians,re,im in receiver order."""
    angles = data.aperture.receiver_angles()
    with open(path, "w") as f:
        f.write("incidence_index,theta_radians,re,im\n")
        for j in range(data.n_incidences):
            for theta, u in zip(angles, data.samples[j]):
                f.write(f"{j},{_fmt(theta)},{_fmt(u.real)},{_fmt(u.imag)}\n")


def read_farfield_csv(path, aperture: ApertureSet, noise_level: float = 0.0, seed: int = 0) -> FarFieldData:
    rows: dict[int, list[complex]] = {}
    with open(path) as f:
        header = f.readline().strip()
        if header != "incidence_index,theta_radians,re,im":
            raise ValidationError(f"unexpected far-field CSV header: {header!r}")
        for line in f:
            idx, _, re, im = line.strip().split(",")
            rows.setdefault(int(idx), []).append(float(re) + 1j * float(im))
    if not rows:
        raise ValidationError("far-field CSV contains no samples")
    samples = np.array([rows[j] for j in sorted(rows)])
    return FarFieldData(samples, aperture, noise_level=noise_level, seed=seed)


def write_index_csv(path, field: IndexField) -> None:
    """Rows: x,y,value over the sampling grid (row-major)."""
    pts = field.grid.points
    with open(path, "w") as f:
        f.write("x,y,value\n")
        for (x, y), v in zip(pts, field.values):
            f.write(f"{_fmt(x)},{_fmt(y)},{_fmt(v)}\n")


def write_pgm(path, field: IndexField) -> None:
    """8-bit ASCII PGM (P2), row-major, pixel = round(255 * value / max)."""
    n = field.grid.resolution
    peak = field.values.max()
    if peak <= 0:
        raise ValidationError("cannot rasterize an all-zero field")
    pix = np.rint(255.0 * field.values / peak).astype(int).reshape(n, n)
    with open(path, "w") as f:
        f.write(f"P2\n{n} {n}\n255\n")
        for row in pix:
            f.write(" ".join(str(v) for v in row) + "\n")


def write_metadata(path, meta: dict) -> None:
    with open(path, "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")


def read_metadata(path) -> dict:
    with open(path) as f:
        return json.load(f)


def write_loss_trace(path, trace: np.ndarray) -> None:
    with open(path, "w") as f:
        f.write("iteration,loss\n")
        for j, v in enumerate(trace, start=1):
            f.write(f"{j},{_fmt(v)}\n")


# --------------------------------------------------------------------------
# Network checkpoints: versioned text format for portability
# --------------------------------------------------------------------------
def write_checkpoint(path, params: NetworkParams, k: float) -> None:
    dims = params.layer_dims
    with open(path, "w") as f:
        f.write(f"DPN v1 P={params.order} layers={','.join(str(d) for d in dims)} k={_fmt(k)}\n")
        for w, b in zip(params.weights, params.biases):
            f.write(f"layer {w.shape[0]} {w.shape[1]}\n")
            for row in w:
                f.write(" ".join(_fmt(v) for v in row) + "\n")
            f.write(" ".join(_fmt(v) for v in b) + "\n")


def read_checkpoint(path) -> tuple[NetworkParams, float]:
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 5 or header[0] != "DPN" or header[1] != "v1":
            raise ValidationError(f"unrecognized checkpoint header: {' '.join(header)!r}")
        order = int(header[2].removeprefix("P="))
        dims = tuple(int(d) for d in header[3].removeprefix("layers=").split(","))
        k = float(header[4].removeprefix("k="))
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            tag = f.readline().split()
            if tag[:1] != ["layer"] or (int(tag[1]), int(tag[2])) != (fan_in, fan_out):
                raise ValidationError("checkpoint layer block does not match the header dims")
            w = np.array([[float(v) for v in f.readline().split()] for _ in range(fan_in)])
            b = np.array([float(v) for v in f.readline().split()])
            if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
                raise ValidationError("checkpoint layer block has the wrong shape")
            weights.append(w)
            biases.append(b)
    return NetworkParams(weights=weights, biases=biases, order=order), k


def aperture_to_dict(aperture: ApertureSet) -> dict:
    return {"arcs": [{"alpha": a.alpha, "beta": a.beta, "receivers": a.receivers} for a in aperture.arcs]}


def box_to_dict(box: Box) -> dict:
    return {"xmin": box.xmin, "xmax": box.xmax, "ymin": box.ymin, "ymax": box.ymax}
