"""Curvature-distance products, the point-picking renormalization, and the
experiment harness that estimates an empirical constant for a hyperplane set.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from .catalog import builtin
from .errors import ConfigError, FlatSurfaceError, GeneralPositionError, UnknownEntry
from .grid import DiskDomain, make_grid
from .metricgeo import (DEFAULT_STENCIL, boundary_distance_field, geodesic_distances, ring_of,
                        sample_metric)
from .projgeom import HyperplaneSet, general_position, hypothesis_count, omission_margin
from .weierstrass import (DEFAULT_QUAD_ORDER, KAPPA, WeierstrassData, curvature,
                          curvature_field, scale, with_domain)

log = logging.getLogger(__name__)

FLAT_TOL = 1e-12
BOUND_RTOL = 1e-9


class ProductResult(NamedTuple):
    sup: float
    cell: tuple[int, int]
    z: complex


def product_field(data: WeierstrassData, grid_n: int, stencil: int = DEFAULT_STENCIL) -> np.ndarray:
    """|K(p)|^{1/2} d(p) at every masked node (NaN elsewhere)."""
    metric = sample_metric(data, grid_n)
    d = boundary_distance_field(metric, stencil).dist
    K = curvature_field(data, grid_n)
    out = np.full((grid_n, grid_n), np.nan)
    out[metric.mask] = np.sqrt(np.abs(K[metric.mask])) * d[metric.mask]
    return out


def curvature_distance_product(data: WeierstrassData, grid_n: int,
                               quad_order: int = DEFAULT_QUAD_ORDER,
                               stencil: int = DEFAULT_STENCIL) -> ProductResult:
    """sup over the grid of |K|^{1/2} d, with d the distance to the boundary ring.

    ``quad_order`` is accepted for interface symmetry; neither K nor the metric
    needs the immersion integrals.
    """
    data.require_valid()
    prod = product_field(data, grid_n, stencil)
    flat = np.where(np.isfinite(prod), prod, -np.inf).ravel()
    idx = int(np.argmax(flat))  # first maximum in row-major order
    cell = divmod(idx, grid_n)
    grid = make_grid(data.domain, grid_n)
    return ProductResult(float(flat[idx]), cell, grid.z_of(cell))


class RenormalizeResult(NamedTuple):
    data: WeierstrassData
    cell: tuple[int, int]
    report: dict

    @property
    def mu(self) -> float:
        return self.report["mu"]

    @property
    def z(self) -> complex:
        return complex(*self.report["p_prime"])


def renormalize(data: WeierstrassData, grid_n: int, stencil: int = DEFAULT_STENCIL) -> RenormalizeResult:
    """Pick the point maximizing |K| d'^2 on the half-distance disk and rescale to |K| = 1 there.

    M' is the set of nodes within geodesic distance d(center)/2 of the center, d'
    the distance to the boundary of M'. With mu = |K(p')|^{-1/2} the returned data
    is ``scale(data, 1/mu)``, and the report checks -4 <= K <= 0 on
    M'' = {p in M' : d(p, p') < d'(p')/2} for the rescaled surface.
    """
    data.require_valid()
    metric = sample_metric(data, grid_n)
    grid = metric.grid
    K = curvature_field(data, grid_n)
    kmax = float(np.nanmax(np.abs(K)))
    if kmax < FLAT_TOL:
        raise FlatSurfaceError(f"max |K| = {kmax:.3g} on the grid; renormalization undefined")

    center = grid.center_cell
    rho_c = geodesic_distances(metric, center, stencil).dist
    d_center = float(np.min(rho_c[ring_of(metric.mask)]))
    half = metric.mask & (rho_c <= d_center / 2)
    d_half = boundary_distance_field(metric, stencil, mask=half).dist

    score = np.where(half, np.abs(K) * np.where(half, d_half, 0) ** 2, -np.inf)
    idx = int(np.argmax(score.ravel()))
    cell = divmod(idx, grid_n)
    z = grid.z_of(cell)
    # mu is the curvature length scale at p'; lengths are divided by it, so the
    # forms get the factor 1/mu and K(p') becomes K(p') mu^2 = -1
    mu = abs(curvature(data, z)) ** -0.5
    scaled = scale(data, 1 / mu)

    # verify on the rescaled surface
    s_metric = sample_metric(scaled, grid_n).restricted(half)
    s_K = curvature_field(scaled, grid_n)
    s_dhalf = boundary_distance_field(s_metric, stencil).dist
    to_p = geodesic_distances(s_metric, cell, stencil).dist
    inner = half & (to_p < s_dhalf[cell] / 2)
    k_inner = s_K[inner]
    k_min, k_max = float(k_inner.min()), float(k_inner.max())
    k_at = curvature(scaled, z)
    report = {
        "mu": mu,
        "p_prime": [z.real, z.imag],
        "p_prime_cell": list(cell),
        "K_at_p_prime": k_at,
        "scale_factor": 1 / mu,
        "d_center": d_center / mu,
        "d_prime_at_p_prime": float(s_dhalf[cell]),
        "half_disk_cells": int(half.sum()),
        "inner_disk_cells": int(inner.sum()),
        "K_min_inner": k_min,
        "K_max_inner": k_max,
        "bound_ok": bool(k_min >= -4 * (1 + BOUND_RTOL) and k_max <= 0),
        "unit_ok": bool(abs(abs(k_at) - 1) <= 1e-9),
    }
    return RenormalizeResult(scaled, cell, report)


# --- experiment harness ------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceSpec:
    name: str
    data: WeierstrassData


@dataclass(frozen=True)
class ExperimentConfig:
    surfaces: tuple[SurfaceSpec, ...]
    hyperplanes: HyperplaneSet
    grid_n: int = 129
    quad_order: int = DEFAULT_QUAD_ORDER
    omission_threshold: float = 1e-3
    output: str | None = None
    refine: bool = True
    stencil: int = DEFAULT_STENCIL
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.grid_n < 64:
            raise ConfigError("grid_n must be >= 64")
        if not 0 < self.omission_threshold < 1:
            raise ConfigError("omission_threshold must be in (0, 1)")


def _surface_from_json(obj) -> SurfaceSpec:
    try:
        if isinstance(obj, str):
            entry = builtin(obj)
            return SurfaceSpec(entry.name, entry.data)
        if not isinstance(obj, dict):
            raise ConfigError(f"surface entry must be a name or an object, got {obj!r}")
        if "catalog" in obj:
            entry = builtin(obj["catalog"])
            data = entry.data
            if "radius" in obj or "center" in obj:
                c = obj.get("center", [data.domain.center.real, data.domain.center.imag])
                data = with_domain(data, DiskDomain(complex(c[0], c[1]),
                                                    obj.get("radius", data.domain.radius)))
            return SurfaceSpec(obj.get("name", entry.name), data)
        if "data" in obj:
            return SurfaceSpec(str(obj.get("name", "inline")), WeierstrassData.from_json(obj["data"]))
    except UnknownEntry as exc:
        raise ConfigError(f"unknown catalog entry: {exc}") from None
    except (TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad surface entry {obj!r}: {exc}") from None
    raise ConfigError(f"surface entry needs 'catalog' or 'data': {obj!r}")


def _hyperplanes_from_json(obj) -> HyperplaneSet:
    if isinstance(obj, dict) and "from_catalog" in obj:
        try:
            return builtin(obj["from_catalog"]).omitted
        except UnknownEntry as exc:
            raise ConfigError(f"unknown catalog entry: {exc}") from None
    return HyperplaneSet.from_json(obj)


def config_from_json(obj, base_dir: Path | None = None) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    for key in ("surfaces", "hyperplanes"):
        if key not in obj:
            raise ConfigError(f"config missing '{key}'")
    output = obj.get("output")
    if output is not None and base_dir is not None and not Path(output).is_absolute():
        output = str(base_dir / output)
    try:
        return ExperimentConfig(
            surfaces=tuple(_surface_from_json(s) for s in obj["surfaces"]),
            hyperplanes=_hyperplanes_from_json(obj["hyperplanes"]),
            grid_n=int(obj.get("grid_n", 129)),
            quad_order=int(obj.get("quad_order", DEFAULT_QUAD_ORDER)),
            omission_threshold=float(obj.get("omission_threshold", 1e-3)),
            output=output,
            refine=bool(obj.get("refine", True)),
            stencil=int(obj.get("stencil", DEFAULT_STENCIL)),
            raw=obj,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_json(obj, path.parent)


@dataclass(frozen=True)
class SurfaceRow:
    name: str
    q_omitted: int
    sup_product: float
    argmax_z: complex
    min_margin: float
    kappa_used: float
    flagged: bool
    margins: tuple[float, ...]
    sup_product_refined: float | None = None


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[SurfaceRow, ...]
    empirical_C: float
    resolutions: tuple[int, ...]
    stability: float | None
    kappa_used: float = KAPPA
    warnings: tuple[str, ...] = ()
    config: dict = field(default_factory=dict)


def refined(n: int) -> int:
    return 2 * (n - 1) + 1


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    hset = config.hyperplanes
    gp = general_position(hset)
    if not gp.ok:
        raise GeneralPositionError(gp.witness)
    warnings = []
    need = hypothesis_count(hset.m)
    if len(hset) <= need:
        msg = (f"q = {len(hset)} planes does not exceed m(m+1)/2 = {need}; "
               "the curvature estimate is not guaranteed for this arrangement")
        log.warning(msg)
        warnings.append(msg)

    resolutions = (config.grid_n, refined(config.grid_n)) if config.refine else (config.grid_n,)
    rows = []
    for spec in config.surfaces:
        data = spec.data
        if data.m != hset.m:
            raise ConfigError(f"surface {spec.name} has m={data.m}, hyperplanes have m={hset.m}")
        data.require_valid()
        margins = tuple(r.min_margin for r in omission_margin(data, hset, config.grid_n))
        q_omitted = sum(1 for m in margins if m > config.omission_threshold)
        prod = curvature_distance_product(data, config.grid_n, config.quad_order, config.stencil)
        fine = None
        if config.refine:
            fine = curvature_distance_product(data, resolutions[1], config.quad_order, config.stencil).sup
        flagged = q_omitted < len(hset)
        if flagged:
            msg = f"surface {spec.name}: only {q_omitted} of {len(hset)} planes clear the omission threshold"
            log.warning(msg)
            warnings.append(msg)
        rows.append(SurfaceRow(spec.name, q_omitted, prod.sup, prod.z,
                               min(margins) if margins else math.inf, KAPPA, flagged, margins, fine))

    c = max((r.sup_product for r in rows), default=0.0)
    stability = None
    if config.refine:
        c_fine = max((r.sup_product_refined for r in rows), default=0.0)
        stability = abs(c_fine - c) / c_fine if c_fine > 0 else 0.0
    return ExperimentReport(tuple(rows), c, resolutions, stability, KAPPA, tuple(warnings),
                            config.raw)


# --- report output -------------------------------------------------------------------

CSV_COLUMNS = ["name", "q_omitted", "sup_product", "argmax_u", "argmax_v", "min_margin",
               "kappa_used", "flagged", "sup_product_refined"]


def fmt(x) -> str:
    """Floats with 17 significant digits; everything else via str."""
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits, non-finite as null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.number)) or v is None for v in obj):
            return "[" + ", ".join(dumps_json(v) for v in obj) + "]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, complex):
        return dumps_json([obj.real, obj.imag], indent, _level)
    return json.dumps(str(obj))


def rows_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow([r.name, r.q_omitted, fmt(r.sup_product), fmt(r.argmax_z.real),
                    fmt(r.argmax_z.imag), fmt(r.min_margin), fmt(r.kappa_used), fmt(r.flagged),
                    fmt(r.sup_product_refined)])
    return buf.getvalue()


def summary(report: ExperimentReport) -> dict:
    return {
        "empirical_C": report.empirical_C,
        "empirical_C_note": "lower-bound witness: max of sampled sup |K|^(1/2) d over the family",
        "kappa_used": report.kappa_used,
        "resolutions": list(report.resolutions),
        "stability": report.stability,
        "warnings": list(report.warnings),
        "rows": [{"name": r.name, "sup_product": r.sup_product, "margins": list(r.margins),
                  "q_omitted": r.q_omitted, "flagged": r.flagged} for r in report.rows],
        "config": report.config,
        "tool": "minsurf",
        "version": __version__,
    }


def emit_report(report: ExperimentReport, path) -> tuple[Path, Path]:
    """Write ``rows.csv`` and ``summary.json`` into directory ``path``."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out / "rows.csv", out / "summary.json"
    csv_path.write_text(rows_csv(report))
    json_path.write_text(dumps_json(summary(report)) + "\n")
    return csv_path, json_path
