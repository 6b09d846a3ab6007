"""Minimal surfaces in R^m from Weierstrass data on a disk.

Given holomorphic forms ``f_1 dz, ..., f_m dz`` with ``sum f_i^2 = 0`` and no
common zero, the map ``x_i = 2 Re int_{z0}^z f_i dz`` is a conformal minimal
immersion with ``ds = lam |dz|``, ``lam^2 = 2 sum |f_i|^2``, and generalized
Gauss map ``[f_1 : ... : f_m]``. Its Gauss curvature is

    K = -kappa * sum_{j<k} |f_j f_k' - f_k f_j'|^2 / (sum |f_j|^2)^3.

With the ``lam^2 = 2 sum |f_i|^2`` normalization the intrinsic formula
``K = -Delta log lam / lam^2`` gives ``kappa = 1`` (checked numerically by
:func:`reconcile_kappa`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BoundaryError, ConfigError, ValidationError
from .grid import UNIT_DISK, DiskDomain, GridMetric, make_grid
from .holo import (MAX_DEGREE, ComplexRational, Polynomial, poly_gcd,
                   rat_add, rat_derivative, rat_is_zero, rat_mul, roots_in_disk)
from .projgeom import ProjPoint

KAPPA = 1.0
DEFAULT_QUAD_ORDER = 12
PANEL_LENGTH = 0.1


@dataclass(frozen=True)
class ValidationReport:
    isotropic: bool
    isotropy_residual: ComplexRational
    common_zeros: tuple[complex, ...]
    poles: dict = field(default_factory=dict)  # form index -> poles in the closed disk
    periods: str = "vacuous: disk domain is simply connected"

    @property
    def valid(self) -> bool:
        return self.isotropic and not self.common_zeros and not any(self.poles.values())

    def failures(self) -> list[str]:
        out = []
        if not self.isotropic:
            out.append("isotropy: sum f_i^2 is not identically zero")
        if self.common_zeros:
            out.append(f"common zeros inside domain: {list(self.common_zeros)}")
        for k, p in self.poles.items():
            if p:
                out.append(f"form {k} has poles inside domain: {list(p)}")
        return out

    def to_json(self) -> dict:
        pair = lambda w: [w.real, w.imag]  # noqa: E731
        return {
            "valid": self.valid,
            "isotropic": self.isotropic,
            "isotropy_residual": self.isotropy_residual.to_json(),
            "common_zeros": [pair(w) for w in self.common_zeros],
            "poles": {str(k): [pair(w) for w in v] for k, v in self.poles.items() if v},
            "periods": self.periods,
            "failures": self.failures(),
        }


@dataclass(frozen=True)
class WeierstrassData:
    """m rational forms ``f_i`` on a disk; the seed of a minimal surface."""

    forms: tuple[ComplexRational, ...]
    domain: DiskDomain = UNIT_DISK

    def __post_init__(self):
        forms = tuple(f if isinstance(f, ComplexRational) else ComplexRational(f) for f in self.forms)
        if len(forms) < 3:
            raise ConfigError(f"need m >= 3 forms, got {len(forms)}")
        for f in forms:
            if max(f.num.degree, f.den.degree) > MAX_DEGREE:
                raise ConfigError(f"form degree exceeds {MAX_DEGREE}")
        object.__setattr__(self, "forms", forms)

    @property
    def m(self) -> int:
        return len(self.forms)

    @cached_property
    def derivatives(self) -> tuple[ComplexRational, ...]:
        return tuple(rat_derivative(f) for f in self.forms)

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    def require_valid(self) -> None:
        if not self.report.valid:
            raise ValidationError("; ".join(self.report.failures()), self.report)

    def forms_at(self, z) -> np.ndarray:
        return np.array([f(z) for f in self.forms], dtype=complex)

    def forms_grid(self, z: np.ndarray) -> np.ndarray:
        """Forms at an array of points, shape ``z.shape + (m,)``."""
        z = np.asarray(z, dtype=complex)
        return np.stack([f.eval_array(z) for f in self.forms], axis=-1)

    def derivatives_grid(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.stack([f.eval_array(z) for f in self.derivatives], axis=-1)

    def to_json(self) -> dict:
        return {"m": self.m, "forms": [f.to_json() for f in self.forms],
                "domain": self.domain.to_json()}

    @classmethod
    def from_json(cls, obj) -> "WeierstrassData":
        if not isinstance(obj, dict) or "forms" not in obj:
            raise ConfigError('Weierstrass data must be {"m", "forms", "domain"}')
        forms = tuple(ComplexRational.from_json(f) for f in obj["forms"])
        if "m" in obj and int(obj["m"]) != len(forms):
            raise ConfigError(f"m={obj['m']} but {len(forms)} forms given")
        domain = DiskDomain.from_json(obj["domain"]) if "domain" in obj else UNIT_DISK
        return cls(forms, domain)


def validate(data: WeierstrassData) -> ValidationReport:
    """Check isotropy, common zeros and poles of the forms on the closed disk."""
    total = ComplexRational(Polynomial())
    for f in data.forms:
        total = rat_add(total, rat_mul(f, f))
    c, r = data.domain.center, data.domain.radius

    g = Polynomial()
    for f in data.forms:
        g = poly_gcd(g, f.num)
    if g.is_zero:
        # every form vanishes identically
        common = (c,)
    else:
        common = tuple(roots_in_disk(g, c, r))

    poles = {k: tuple(roots_in_disk(f.den, c, r)) for k, f in enumerate(data.forms)}
    return ValidationReport(rat_is_zero(total), total, common, poles)


def with_domain(data: WeierstrassData, domain: DiskDomain) -> WeierstrassData:
    return WeierstrassData(data.forms, domain)


def scale(data: WeierstrassData, mu: float) -> WeierstrassData:
    """Replace every form by mu * f_i (surface scaled by mu)."""
    mu = float(mu)
    if not mu > 0:
        raise ValueError("scale factor must be positive")
    if mu == 1.0:
        return data
    return WeierstrassData(tuple(f.scale(mu) for f in data.forms), data.domain)


# --- immersion -----------------------------------------------------------------

def _gauss_legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def immersion_points(data: WeierstrassData, zs, quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    """Positions ``x(z)`` for an array of points, shape ``(len(zs), m)``.

    Integrates along the straight segment from the domain center using
    ``ceil(|z - center| / 0.1)`` Gauss-Legendre panels of ``quad_order`` nodes.
    """
    data.require_valid()
    zs = np.atleast_1d(np.asarray(zs, dtype=complex)).ravel()
    c = data.domain.center
    for z in zs:
        data.domain.require(z)
    out = np.zeros((zs.size, data.m))
    dz = zs - c
    panels = np.ceil(np.abs(dz) / PANEL_LENGTH).astype(int)
    nodes, weights = _gauss_legendre(quad_order)
    for k in np.unique(panels):
        if k == 0:
            continue
        sel = np.nonzero(panels == k)[0]
        # parameter t in [0, 1]: panel p covers [p/k, (p+1)/k]
        t = ((np.arange(k)[:, None] + (nodes[None, :] + 1) / 2) / k).ravel()
        w = np.tile(weights / (2 * k), k)
        pts = c + dz[sel, None] * t[None, :]
        F = data.forms_grid(pts)  # (s, k*q, m)
        integral = np.einsum("spm,p->sm", F, w) * dz[sel, None]
        out[sel] = 2 * integral.real
    return out


def immersion_point(data: WeierstrassData, z, quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    return immersion_points(data, [z], quad_order)[0]


# --- metric, Gauss map, curvature ----------------------------------------------

def conformal_factor(data: WeierstrassData, z) -> float:
    data.require_valid()
    z = data.domain.require(z)
    f = data.forms_at(z)
    return math.sqrt(2 * float(np.sum(np.abs(f) ** 2)))


def conformal_factor_grid(data: WeierstrassData, z: np.ndarray) -> np.ndarray:
    f = data.forms_grid(z)
    return np.sqrt(2 * np.sum(np.abs(f) ** 2, axis=-1))


def gauss_map(data: WeierstrassData, z) -> ProjPoint:
    data.require_valid()
    z = data.domain.require(z)
    return ProjPoint(tuple(data.forms_at(z)))


def _curvature_from_values(g: np.ndarray, gp: np.ndarray, kappa: float) -> np.ndarray:
    m = g.shape[-1]
    wedge = np.zeros(g.shape[:-1])
    for j in range(m):
        for k in range(j + 1, m):
            wedge += np.abs(g[..., j] * gp[..., k] - g[..., k] * gp[..., j]) ** 2
    norm2 = np.sum(np.abs(g) ** 2, axis=-1)
    return -kappa * wedge / norm2 ** 3


def curvature(data: WeierstrassData, z, kappa: float = KAPPA) -> float:
    """Gauss curvature at ``z`` from the wedge formula (always <= 0)."""
    data.require_valid()
    z = data.domain.require(z)
    g = data.forms_at(z)
    gp = np.array([f(z) for f in data.derivatives], dtype=complex)
    return float(_curvature_from_values(g, gp, kappa))


def curvature_grid(data: WeierstrassData, z: np.ndarray, kappa: float = KAPPA) -> np.ndarray:
    """Vectorized curvature; caller guarantees the points are pole-free."""
    return _curvature_from_values(data.forms_grid(z), data.derivatives_grid(z), kappa)


def curvature_field(data: WeierstrassData, n: int, kappa: float = KAPPA) -> np.ndarray:
    """Curvature on the (n x n) grid of the data's domain; NaN off the mask."""
    data.require_valid()
    grid = make_grid(data.domain, n)
    out = np.full((n, n), np.nan)
    out[grid.mask] = curvature_grid(data, grid.z[grid.mask], kappa)
    return out


# --- independent oracle --------------------------------------------------------

def curvature_oracle_field(metric: GridMetric) -> np.ndarray:
    """K = -(discrete Laplacian of log lam) / lam^2 on nodes >= 2 cells inside the mask.

    Five-point Laplacian, O(h^2). NaN elsewhere.
    """
    grid = metric.grid
    h = grid.h
    L = np.log(metric.lam)
    lap = np.full_like(L, np.nan)
    lap[1:-1, 1:-1] = (L[2:, 1:-1] + L[:-2, 1:-1] + L[1:-1, 2:] + L[1:-1, :-2]
                       - 4 * L[1:-1, 1:-1]) / h ** 2
    K = -lap / metric.lam ** 2
    K[~grid.interior(2)] = np.nan
    return K


def curvature_oracle(metric: GridMetric, cell) -> float:
    """Finite-difference curvature of the sampled metric at one node."""
    i, j = cell
    n = metric.n
    if not (2 <= i < n - 2 and 2 <= j < n - 2):
        raise BoundaryError(f"stencil around {cell} leaves the grid")
    if not metric.mask[i - 2:i + 3, j - 2:j + 3].all():
        raise BoundaryError(f"node {cell} is within 2 cells of the mask boundary")
    h = metric.grid.h
    L = np.log(metric.lam[i - 1:i + 2, j - 1:j + 2])
    lap = (L[0, 1] + L[2, 1] + L[1, 0] + L[1, 2] - 4 * L[1, 1]) / h ** 2
    return float(-lap / metric.lam[i, j] ** 2)


def reconcile_kappa(n: int = 129) -> float:
    """Least-squares factor between the oracle and the wedge formula at kappa = 1,
    on the Enneper surface over the unit disk."""
    from .catalog import enneper
    from .metricgeo import sample_metric

    data = enneper().data
    metric = sample_metric(data, n)
    oracle = curvature_oracle_field(metric)
    formula = curvature_field(data, n, kappa=1.0)
    sel = np.isfinite(oracle)
    a, b = formula[sel], oracle[sel]
    return float(np.dot(a, b) / np.dot(a, a))


def oracle_deviation(data: WeierstrassData, n: int, kappa: float = KAPPA) -> float:
    """max |K_formula - K_oracle| / max |K_formula| over the oracle's interior nodes."""
    from .metricgeo import sample_metric

    oracle = curvature_oracle_field(sample_metric(data, n))
    formula = curvature_field(data, n, kappa)
    sel = np.isfinite(oracle)
    scale_ = np.max(np.abs(formula[sel]))
    if scale_ == 0:
        return float(np.max(np.abs(oracle[sel])))
    return float(np.max(np.abs(formula[sel] - oracle[sel])) / scale_)


def evaluate_sample(data: WeierstrassData, z, quad_order: int = DEFAULT_QUAD_ORDER) -> "SurfaceSample":
    data.require_valid()
    z = data.domain.require(z)
    return SurfaceSample(z, tuple(immersion_point(data, z, quad_order)),
                         conformal_factor(data, z), curvature(data, z), gauss_map(data, z))


@dataclass(frozen=True)
class SurfaceSample:
    z: complex
    position: tuple[float, ...]
    lam: float
    curvature: float
    gauss: ProjPoint


def sample_rows(data: WeierstrassData, n: int, quad_order: int = DEFAULT_QUAD_ORDER):
    """Rows ``(u, v, x_1..x_m, lambda, K)`` for every masked node, row-major."""
    data.require_valid()
    grid = make_grid(data.domain, n)
    zs = grid.z[grid.mask]
    x = immersion_points(data, zs, quad_order)
    lam = conformal_factor_grid(data, zs)
    K = curvature_grid(data, zs)
    for k, z in enumerate(zs):
        yield (z.real, z.imag, *x[k], lam[k], K[k])
