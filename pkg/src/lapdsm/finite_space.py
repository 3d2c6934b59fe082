"""Finite-space construction of probing functions (FFSM and FSSM).

Both schemes pick a trial space of Fourier modes e^{in theta}/sqrt(2 pi) on
the aperture and differ in the testing space: FFSM tests against the same
Fourier modes on the full circle, FSSM against far-field Green functions of
a source lattice.  The resulting linear system A F(z) ~ B(z) is solved with
Tikhonov regularization, factored once and back-substituted for every
sampling point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy import special as sp

from .dsm import IndexField, ProbingSet, average_and_normalize, index_classical
from .errors import NumericalError, ValidationError
from .scene import ApertureSet, Box, FarFieldData, SamplingGrid


@dataclass(frozen=True)
class FourierTrialSpace:
    """Fourier modes e^{in theta}/sqrt(2 pi), n = -order..order."""

    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValidationError("Fourier space order must be >= 1")

    @property
    def dimension(self) -> int:
        return 2 * self.order + 1


@dataclass(frozen=True)
class SourceTestingSpace:
    """Far-field Green functions of a lattice of source points."""

    points: np.ndarray  # (n_sources, 2)
    wavenumber: float

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "points", p)


def source_lattice(domain: Box, per_side: int, k: float) -> SourceTestingSpace:
    """Equispaced per_side x per_side cell-center lattice over the domain."""
    grid = SamplingGrid(domain, per_side)
    return SourceTestingSpace(points=grid.points, wavenumber=k)


@dataclass(frozen=True)
class FrameworkSystem:
    matrix: np.ndarray  # (n_test, 2P+1)
    sigma: float
    aperture: ApertureSet
    order: int

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValidationError("regularization parameter must be positive")
        if not np.all(np.isfinite(self.matrix)):
            raise ValidationError("framework matrix must be finite")


def _arc_mode_integral(aperture: ApertureSet, d: int) -> complex:
    """sum_l e^{i d beta_l} * (alpha_l if d == 0 else sin(alpha_l d)/d)."""
    total = 0.0 + 0.0j
    for arc in aperture.arcs:
        c = arc.alpha if d == 0 else np.sin(arc.alpha * d) / d
        total += np.exp(1j * d * arc.beta) * c
    return total


def ffsm_matrix(aperture: ApertureSet, order: int) -> np.ndarray:
    """Closed-form Gram matrix A_nm = (1/2pi) <e^{im t}, e^{in t}>_Gamma."""
    p = FourierTrialSpace(order).order
    ns = np.arange(-p, p + 1)
    a = np.empty((2 * p + 1, 2 * p + 1), dtype=np.complex128)
    for i, n in enumerate(ns):
        for j, m in enumerate(ns):
            a[i, j] = _arc_mode_integral(aperture, m - n) / np.pi
    return a


def ffsm_rhs(z, order: int, k: float) -> np.ndarray:
    """B_n(z) = i^{-n} e^{i pi/4}/(2 sqrt(k)) J_n(k|z|) e^{-i n theta_z}."""
    return ffsm_rhs_field(np.asarray(z, dtype=float)[None, :], order, k)[0]


def ffsm_rhs_field(points: np.ndarray, order: int, k: float) -> np.ndarray:
    """ffsm_rhs vectorized over sampling points, shape (n_points, 2P+1)."""
    p = order
    pts = np.asarray(points, dtype=float)
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    theta[r == 0.0] = 0.0
    ns = np.arange(-p, p + 1)
    jn = sp.jv(np.abs(ns)[None, :], (k * r)[:, None])
    sign = np.where((ns < 0) & (np.abs(ns) % 2 == 1), -1.0, 1.0)
    pre = (1j) ** (-ns) * np.exp(1j * np.pi / 4.0) / (2.0 * np.sqrt(k))
    return pre[None, :] * sign[None, :] * jn * np.exp(-1j * np.outer(theta, ns))


def default_fssm_truncation(k: float, sources: SourceTestingSpace) -> int:
    rmax = float(np.max(np.hypot(sources.points[:, 0], sources.points[:, 1])))
    return int(np.ceil(k * max(rmax, 1.0))) + 30


def fssm_matrix(
    aperture: ApertureSet,
    order: int,
    sources: SourceTestingSpace,
    truncation: int | None = None,
) -> np.ndarray:
    """Jacobi-Anger series for A_nm = (1/sqrt(2pi)) <e^{im t}, G_inf(y_n, .)>_Gamma."""
    p = FourierTrialSpace(order).order
    k = sources.wavenumber
    pts = sources.points
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    theta[r == 0.0] = 0.0
    if truncation is None:
        truncation = default_fssm_truncation(k, sources)
    tail = np.abs(sp.jv(truncation, k * r.max())) if r.max() > 0 else 0.0
    if tail >= 1e-14:
        raise ValidationError(
            f"series truncation {truncation} insufficient: tail term {tail:.2e} >= 1e-14"
        )
    ms = np.arange(-p, p + 1)
    a = np.zeros((pts.shape[0], 2 * p + 1), dtype=np.complex128)
    pre = np.exp(-1j * np.pi / 4.0) / (2.0 * np.pi * np.sqrt(k))
    for q in range(-truncation, truncation + 1):
        radial = (1j) ** q * sp.jv(q, k * r) * np.exp(1j * q * theta)  # (n_sources,)
        angular = np.array([_arc_mode_integral(aperture, m - q) for m in ms])
        a += np.outer(radial, angular)
    return pre * a


def fssm_rhs(z, sources: SourceTestingSpace) -> np.ndarray:
    """B_n(z) = J_0(k |z - y_n|) / (4k), the full-circle kernel against each source."""
    return fssm_rhs_field(np.asarray(z, dtype=float)[None, :], sources)[0]


def fssm_rhs_field(points: np.ndarray, sources: SourceTestingSpace) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    k = sources.wavenumber
    d = np.hypot(
        pts[:, None, 0] - sources.points[None, :, 0],
        pts[:, None, 1] - sources.points[None, :, 1],
    )
    return (sp.j0(k * d) / (4.0 * k)).astype(np.complex128)


@dataclass(frozen=True)
class CoefficientField:
    """Trial-space coefficients F(z) per sampling point, shape (n_points, 2P+1)."""

    coefficients: np.ndarray
    order: int

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if not np.all(np.isfinite(c)):
            raise ValidationError("coefficients must be finite")
        if c.shape[1] != 2 * self.order + 1:
            raise ValidationError("coefficient width does not match the Fourier order")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


def tikhonov_solve(system: FrameworkSystem, rhs_field: np.ndarray) -> CoefficientField:
    """F(z) = (sigma I + A* A)^{-1} A* B(z), factored once for all z."""
    a = system.matrix
    normal = system.sigma * np.eye(a.shape[1]) + a.conj().T @ a
    try:
        cho = linalg.cho_factor(normal)
    except linalg.LinAlgError as e:
        raise NumericalError(
            f"Tikhonov factorization failed at sigma={system.sigma:.3e} "
            f"(cond(A*A) ~ {np.linalg.cond(a.conj().T @ a):.2e})"
        ) from e
    rhs = a.conj().T @ np.asarray(rhs_field, dtype=np.complex128).T  # (2P+1, n_points)
    coeff = linalg.cho_solve(cho, rhs).T
    return CoefficientField(coefficients=coeff, order=system.order)


def probing_from_coefficients(
    coeffs: CoefficientField, aperture: ApertureSet
) -> ProbingSet:
    """G_Gamma(z, theta_q) = sum_n f_n(z) e^{i n theta_q} / sqrt(2 pi)."""
    p = coeffs.order
    ns = np.arange(-p, p + 1)
    angles = aperture.receiver_angles()
    basis = np.exp(1j * np.outer(ns, angles)) / np.sqrt(2.0 * np.pi)  # (2P+1, Q)
    return ProbingSet(coeffs.coefficients @ basis, aperture)


def build_system(
    method: str,
    aperture: ApertureSet,
    order: int,
    sigma: float,
    k: float,
    sources: SourceTestingSpace | None = None,
    truncation: int | None = None,
) -> tuple[FrameworkSystem, SourceTestingSpace | None]:
    method = method.lower()
    if method == "ffsm":
        mat = ffsm_matrix(aperture, order)
        return FrameworkSystem(mat, sigma, aperture, order), None
    if method == "fssm":
        if sources is None:
            raise ValidationError("FSSM needs a source testing space")
        mat = fssm_matrix(aperture, order, sources, truncation)
        return FrameworkSystem(mat, sigma, aperture, order), sources
    raise ValidationError(f"unknown finite-space method {method!r}")


def finite_space_probing(
    method: str,
    aperture: ApertureSet,
    grid: SamplingGrid,
    order: int,
    sigma: float,
    k: float,
    sources: SourceTestingSpace | None = None,
    truncation: int | None = None,
) -> ProbingSet:
    """Assemble, regularize, and evaluate the probing set on a grid."""
    system, src = build_system(method, aperture, order, sigma, k, sources, truncation)
    if method.lower() == "ffsm":
        rhs = ffsm_rhs_field(grid.points, order, k)
    else:
        rhs = fssm_rhs_field(grid.points, src)
    coeffs = tikhonov_solve(system, rhs)
    return probing_from_coefficients(coeffs, aperture)


def reconstruct_finite_space(
    data: FarFieldData,
    method: str,
    order: int,
    sigma: float,
    grid: SamplingGrid,
    k: float,
    sources: SourceTestingSpace | None = None,
    truncation: int | None = None,
) -> IndexField:
    """End-to-end Algorithm: probing construction, pairing, averaging, normalizing."""
    probing = finite_space_probing(method, data.aperture, grid, order, sigma, k, sources, truncation)
    fields = [
        index_classical(data, probing, data.aperture, grid, incidence=j)
        for j in range(data.n_incidences)
    ]
    return average_and_normalize(fields)
