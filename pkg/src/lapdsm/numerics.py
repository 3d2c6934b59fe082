"""Special functions and aperture quadrature used throughout the package.

Bessel/Hankel evaluations are delegated to scipy.special, which meets the
accuracy targets (absolute error well below 1e-12 for orders <= 200 and
arguments <= 1e4); the unit tests pin them against an independent
power-series oracle.  The receiver quadrature is a per-arc uniform-weight
Riemann sum, the same discrete rule the training loss uses, so that
reconstruction and learning agree on the meaning of an inner product on
the aperture.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sp

from .errors import ValidationError

MAX_BESSEL_ORDER = 200
MAX_BESSEL_ARG = 1.0e4


def bessel_j(order: int, x) -> float | np.ndarray:
    """Bessel function of the first kind J_order(x) for order >= 0, x >= 0."""
    if order < 0 or order > MAX_BESSEL_ORDER:
        raise ValidationError(f"bessel_j order must be in [0, {MAX_BESSEL_ORDER}], got {order}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValidationError("bessel_j argument must be nonnegative")
    out = sp.jv(order, x)
    return float(out) if out.ndim == 0 else out


def bessel_j_signed(order: int, x) -> float | np.ndarray:
    """J_n for any integer n, via J_{-n}(x) = (-1)^n J_n(x)."""
    n = abs(order)
    val = bessel_j(n, x)
    return -val if (order < 0 and n % 2 == 1) else val


def hankel1(order: int, x) -> complex | np.ndarray:
    """Hankel function of the first kind H^(1)_order(x), order in {0, 1}, x > 0."""
    if order not in (0, 1):
        raise ValidationError(f"hankel1 supports orders 0 and 1 only, got {order}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValidationError("hankel1 argument must be positive (log singularity at 0)")
    out = sp.hankel1(order, x)
    return complex(out) if out.ndim == 0 else out


def arc_quadrature(values, aperture) -> complex:
    """Riemann sum of receiver samples against the aperture's arc weights.

    Weight of each receiver is (arc length) / (receivers on that arc), so a
    constant 1 integrates to the measure of the aperture.
    """
    values = np.asarray(values)
    w = aperture.quadrature_weights()
    if values.shape[-1] != w.shape[0]:
        raise ValidationError(
            f"value count {values.shape[-1]} does not match receiver count {w.shape[0]}"
        )
    return values @ w


def arc_norm(values, aperture) -> float:
    """Discrete L2(Gamma) norm of receiver samples."""
    return float(np.sqrt(np.real(arc_quadrature(np.abs(values) ** 2, aperture))))


def gauss_arc_nodes(aperture, points_per_arc: int):
    """Gauss-Legendre nodes/weights over every arc, for analysis-grade integrals.

    Returns (angles, weights) concatenated over arcs.  Used by the kernel
    diagnostics and by test oracles; measurement-data pairings stick to the
    receiver Riemann rule above.
    """
    x, w = np.polynomial.legendre.leggauss(points_per_arc)
    angles, weights = [], []
    for arc in aperture.arcs:
        half = arc.alpha
        angles.append(arc.beta + half * x)
        weights.append(half * w)
    return np.concatenate(angles), np.concatenate(weights)
