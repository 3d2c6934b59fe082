"""Classical direct sampling: index functions, translation kernel, diagnostics.

The index function pairs a probing function with measured far-field data
through the aperture inner product <f, g> = int f conj(g); its modulus is
large near the scatterers.  The probing function is either the far-field
Green function itself (classical choice) or any ProbingSet produced by the
finite-space framework or the trained network.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .forward import green_far_prefactor
from .numerics import bessel_j, gauss_arc_nodes
from .scene import ApertureSet, FarFieldData, SamplingGrid


@dataclass(frozen=True)
class IndexField:
    """Real-valued indicator values on the sampling grid."""

    grid: SamplingGrid
    values: np.ndarray  # (n_points,)
    normalized: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape[0] != self.grid.resolution**2:
            raise ValidationError("index values do not match the grid size")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValidationError("index values must be finite and nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ProbingSet:
    """Per-sampling-point probing samples at the aperture receivers."""

    samples: np.ndarray  # (n_grid_points, n_receivers) complex
    aperture: ApertureSet

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.shape[1] != self.aperture.total_receivers:
            raise ValidationError("probing sample count does not match receiver count")
        if not np.all(np.isfinite(s)):
            raise ValidationError("probing samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


def green_far_field(z, angle, k: float):
    """G_inf(z, xhat) = e^{i pi/4}/sqrt(8 k pi) * e^{-i k xhat . z} in 2-D."""
    z = np.asarray(z, dtype=float)
    angle = np.asarray(angle, dtype=float)
    xhat_dot_z = np.cos(angle) * z[..., 0] + np.sin(angle) * z[..., 1]
    out = green_far_prefactor(k) * np.exp(-1j * k * xhat_dot_z)
    return complex(out) if out.ndim == 0 else out


def green_probing_set(grid: SamplingGrid, aperture: ApertureSet, k: float) -> ProbingSet:
    """Classical probing set: G_inf sampled at every (z, receiver) pair."""
    angles = aperture.receiver_angles()
    pts = grid.points
    xhat = np.column_stack([np.cos(angles), np.sin(angles)])
    samples = green_far_prefactor(k) * np.exp(-1j * k * pts @ xhat.T)
    return ProbingSet(samples, aperture)


def index_classical(
    data: FarFieldData,
    probing: ProbingSet | None,
    aperture: ApertureSet,
    grid: SamplingGrid,
    k: float | None = None,
    incidence: int = 0,
) -> IndexField:
    """|<G_probe(z, .), u_inf>_Gamma| per sampling point, one incidence.

    With probing=None the classical G_inf probing set is built from the
    wavenumber k.  The receivers themselves serve as quadrature nodes.
    """
    if data.aperture.receiver_angles().shape != aperture.receiver_angles().shape or not np.allclose(
        data.aperture.receiver_angles(), aperture.receiver_angles()
    ):
        raise ValidationError("data and probing apertures disagree on receiver angles")
    if probing is None:
        if k is None:
            raise ValidationError("k is required when probing defaults to G_inf")
        probing = green_probing_set(grid, aperture, k)
    w = aperture.quadrature_weights()
    vals = np.abs(probing.samples @ (np.conj(data.samples[incidence]) * w))
    return IndexField(grid=grid, values=vals, normalized=False)


def kernel_gamma(z, y, aperture: ApertureSet, k: float, quadrature_points: int = 256) -> complex:
    """K_Gamma(z, y) = <G_inf(z, .), G_inf(y, .)>_Gamma by Gauss quadrature.

    Analysis-only; quadrature_points Gauss-Legendre nodes per arc, so the
    value is accurate far beyond the receiver sampling.
    """
    if quadrature_points < 64:
        raise ValidationError("kernel_gamma needs at least 64 quadrature points per arc")
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    angles, weights = gauss_arc_nodes(aperture, quadrature_points)
    xhat = np.column_stack([np.cos(angles), np.sin(angles)])
    integrand = np.exp(1j * k * xhat @ (y - z)) / (8.0 * k * np.pi)
    return complex(integrand @ weights)


def green_norm_on_aperture(aperture: ApertureSet, k: float) -> float:
    """||G_inf(z, .)||_{L2(Gamma)} = sqrt(|Gamma| / (8 k pi)), independent of z."""
    return float(np.sqrt(aperture.measure / (8.0 * k * np.pi)))


def relative_norm(probing: ProbingSet, aperture: ApertureSet, k: float, grid: SamplingGrid) -> IndexField:
    """RN(z) = ||G_Gamma(z, .)||_{L2(Gamma)} / ||G_inf(z, .)||_{L2(Gamma)}."""
    w = aperture.quadrature_weights()
    num = np.sqrt(np.real((np.abs(probing.samples) ** 2) @ w))
    den = green_norm_on_aperture(aperture, k)
    if den <= 0:
        raise ValidationError("degenerate aperture: zero Green-function norm")
    return IndexField(grid=grid, values=num / den, normalized=False)


def average_and_normalize(fields: list[IndexField]) -> IndexField:
    """Pointwise mean over incidences, then division by the global maximum."""
    if not fields:
        raise ValidationError("no index fields to average")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValidationError("index fields live on different grids")
    mean = np.mean([f.values for f in fields], axis=0)
    peak = mean.max()
    if peak == 0.0:
        raise ValidationError("all-zero index field cannot be normalized")
    return IndexField(grid=grid, values=mean / peak, normalized=True)


def dominant_peaks(
    field: IndexField,
    min_separation: float = 0.3,
    threshold: float = 0.5,
    max_peaks: int | None = None,
) -> list[tuple[float, float, float]]:
    """Separated local maxima of the (normalized) field, strongest first.

    A grid point qualifies if it is a local maximum over its 8-neighborhood,
    its value is at least threshold * max, and no stronger retained peak
    lies within min_separation (greedy non-maximum suppression).
    """
    n = field.grid.resolution
    v = field.values.reshape(n, n)
    pad = np.pad(v, 1, constant_values=-np.inf)
    is_max = np.ones((n, n), dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            is_max &= v >= pad[1 + dy : 1 + dy + n, 1 + dx : 1 + dx + n]
    cut = threshold * v.max()
    iy, ix = np.nonzero(is_max & (v >= cut))
    xs, ys = field.grid.xs, field.grid.ys
    cand = sorted(
        ((float(v[a, b]), float(xs[b]), float(ys[a])) for a, b in zip(iy, ix)),
        reverse=True,
    )
    kept: list[tuple[float, float, float]] = []
    for val, x, y in cand:
        if all(np.hypot(x - px, y - py) >= min_separation for px, py, _ in kept):
            kept.append((x, y, val))
            if max_peaks is not None and len(kept) >= max_peaks:
                break
    return kept


def bessel_j0_kernel(k: float, r) -> np.ndarray:
    """J_0(k r) / (4 k): the full-circle translation kernel K_{S^1}."""
    return bessel_j(0, k * np.abs(np.asarray(r, dtype=float))) / (4.0 * k)
