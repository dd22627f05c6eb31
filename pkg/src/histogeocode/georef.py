"""Ground-control-point transform fitting for map georeferencing.

Three model families, matching how historical map sheets are usually
warped: a global affine, bivariate polynomials of total degree 1..3, and
thin-plate splines (the well-defined form of rubbersheeting; lambda = 0
interpolates the control points exactly).  GCP counts are small (tens to
hundreds per sheet), so every solve is dense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class GeorefError(ValueError):
    pass


class DegenerateGcpsError(GeorefError):
    pass


@dataclass(frozen=True)
class ControlPointPair:
    source: tuple[float, float]
    target: tuple[float, float]

    def __post_init__(self):
        for v in (*self.source, *self.target):
            if not math.isfinite(v):
                raise GeorefError(f"non-finite control point coordinate: {v}")


def _split(gcps):
    gcps = list(gcps)
    src = np.array([p.source for p in gcps], dtype=np.float64)
    dst = np.array([p.target for p in gcps], dtype=np.float64)
    return src, dst


@dataclass(frozen=True)
class AffineTransform:
    """x' = a*x + b*y + c ; y' = d*x + e*y + f."""

    coefficients: tuple[float, float, float, float, float, float]
    kind: str = "affine"

    def apply(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        a, b, c, d, e, f = self.coefficients
        x, y = pts[:, 0], pts[:, 1]
        return np.column_stack([a * x + b * y + c, d * x + e * y + f])


@dataclass(frozen=True)
class PolynomialTransform:
    """Per-axis bivariate polynomial of the given total degree."""

    order: int
    exponents: tuple[tuple[int, int], ...]
    coefficients_x: tuple[float, ...]
    coefficients_y: tuple[float, ...]
    kind: str = "polynomial"

    def apply(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        design = _monomials(pts, self.exponents)
        return np.column_stack(
            [design @ np.asarray(self.coefficients_x), design @ np.asarray(self.coefficients_y)]
        )


@dataclass(frozen=True)
class TpsTransform:
    """Thin-plate spline with kernel U(r) = r^2 ln r (U(0) = 0)."""

    centers: tuple[tuple[float, float], ...]
    weights_x: tuple[float, ...]  # n kernel weights + 3 affine terms (1, x, y)
    weights_y: tuple[float, ...]
    regularization: float = 0.0
    kind: str = "tps"

    def apply(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        centers = np.asarray(self.centers, dtype=np.float64)
        k = _tps_kernel(_pairwise_distances(pts, centers))
        design = np.hstack([k, np.ones((len(pts), 1)), pts])
        return np.column_stack(
            [design @ np.asarray(self.weights_x), design @ np.asarray(self.weights_y)]
        )


Transform = AffineTransform | PolynomialTransform | TpsTransform


def _poly_exponents(order: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for total in range(order + 1) for i in range(total, -1, -1) for j in [total - i])


def _monomials(pts, exponents):
    x, y = pts[:, 0], pts[:, 1]
    return np.column_stack([(x**i) * (y**j) for i, j in exponents])


def _pairwise_distances(a, b):
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def _tps_kernel(r):
    out = np.zeros_like(r)
    mask = r > 0.0
    rm = r[mask]
    out[mask] = rm * rm * np.log(rm)
    return out


def fit_affine(gcps) -> AffineTransform:
    """Least-squares affine transform; needs >= 3 non-collinear pairs."""
    src, dst = _split(gcps)
    if len(src) < 3:
        raise DegenerateGcpsError(f"affine fit needs >= 3 pairs, got {len(src)}")
    design = np.column_stack([src[:, 0], src[:, 1], np.ones(len(src))])
    if np.linalg.matrix_rank(design) < 3:
        raise DegenerateGcpsError("control points are collinear")
    px, *_ = np.linalg.lstsq(design, dst[:, 0], rcond=None)
    py, *_ = np.linalg.lstsq(design, dst[:, 1], rcond=None)
    return AffineTransform(tuple(float(v) for v in (*px, *py)))


def fit_polynomial(gcps, order: int) -> PolynomialTransform:
    """Per-axis least-squares polynomial of total degree ``order`` (1..3)."""
    if order not in (1, 2, 3):
        raise GeorefError(f"polynomial order must be 1, 2 or 3, got {order}")
    src, dst = _split(gcps)
    exponents = _poly_exponents(order)
    needed = len(exponents)
    if len(src) < needed:
        raise DegenerateGcpsError(
            f"order-{order} fit needs >= {needed} pairs, got {len(src)}"
        )
    design = _monomials(src, exponents)
    if np.linalg.matrix_rank(design) < needed:
        raise DegenerateGcpsError("control points are degenerate for this order")
    px, *_ = np.linalg.lstsq(design, dst[:, 0], rcond=None)
    py, *_ = np.linalg.lstsq(design, dst[:, 1], rcond=None)
    return PolynomialTransform(order, exponents, tuple(map(float, px)), tuple(map(float, py)))


def fit_tps(gcps, regularization: float = 0.0) -> TpsTransform:
    """Thin-plate spline; exact interpolation at regularization 0."""
    if regularization < 0:
        raise GeorefError("regularization must be >= 0")
    src, dst = _split(gcps)
    n = len(src)
    if n < 3:
        raise DegenerateGcpsError(f"TPS fit needs >= 3 pairs, got {n}")
    if np.linalg.matrix_rank(np.column_stack([src, np.ones(n)])) < 3:
        raise DegenerateGcpsError("control points are collinear")
    r = _pairwise_distances(src, src)
    if regularization == 0.0:
        off_diagonal = r + np.eye(n)
        if np.min(off_diagonal) <= 0.0:
            raise DegenerateGcpsError("duplicate source points with regularization 0")
    kernel = _tps_kernel(r) + regularization * np.eye(n)
    p = np.column_stack([np.ones(n), src])
    system = np.zeros((n + 3, n + 3))
    system[:n, :n] = kernel
    system[:n, n:] = p
    system[n:, :n] = p.T
    rhs = np.zeros((n + 3, 2))
    rhs[:n] = dst
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as e:
        raise DegenerateGcpsError(f"singular TPS system: {e}") from None
    wx = np.concatenate([solution[:n, 0], solution[n:, 0]])
    wy = np.concatenate([solution[:n, 1], solution[n:, 1]])
    return TpsTransform(
        tuple((float(x), float(y)) for x, y in src),
        tuple(map(float, wx)),
        tuple(map(float, wy)),
        regularization,
    )


def apply(transform: Transform, pts):
    """Forward-map a list of (x, y) points."""
    return [tuple(row) for row in transform.apply(pts)]


def residuals(transform: Transform, gcps) -> tuple[list[float], float]:
    """Per-pair |apply(source) - target| and the RMSE."""
    src, dst = _split(gcps)
    mapped = transform.apply(src)
    errors = np.sqrt(np.sum((mapped - dst) ** 2, axis=1))
    rmse = float(np.sqrt(np.mean(errors**2))) if len(errors) else 0.0
    return [float(e) for e in errors], rmse
