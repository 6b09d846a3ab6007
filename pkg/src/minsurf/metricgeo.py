"""Geodesic distances for sampled conformal metrics on disks, hyperbolic closed
forms, and numerical checks of the hyperbolic comparison lemma.

Distances are shortest paths on a grid graph whose edges join each node to
every node reachable by a primitive lattice offset ``(a, b)`` with
``max(|a|, |b|) <= stencil`` (``gcd(a, b) = 1``). The edge weight is the
Euclidean step length times the mean of ``lam`` at the endpoints. The worst
metrication error (ratio of graph to Euclidean length in flat space) is
``1/cos(gap/2) - 1`` where ``gap`` is the largest angle between neighboring
offsets: 2.75% for stencil 2 (16 neighbors), 1.31% for stencil 3 and 0.34% for
the default stencil 6.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import ConfigError, DomainError, HypothesisError, UnreachableError
from .grid import UNIT_DISK, DiskDomain, GridMetric, make_grid

log = logging.getLogger(__name__)

DEFAULT_STENCIL = 6
SLACK = 0.015
CURVATURE_TOL = 2e-2
COLLAR = 3


# --- metric constructors ---------------------------------------------------------

def sample_metric(data, n: int) -> GridMetric:
    """Conformal factor of the surface on the (n x n) grid of its domain."""
    from .weierstrass import conformal_factor_grid

    if n < 16:
        raise ValueError("sample_metric needs n >= 16")
    data.require_valid()
    grid = make_grid(data.domain, n)
    lam = np.full((n, n), np.nan)
    lam[grid.mask] = conformal_factor_grid(data, grid.z[grid.mask])
    return GridMetric(grid, lam)


def flat_metric(n: int, c: float = 1.0, domain: DiskDomain = UNIT_DISK) -> GridMetric:
    grid = make_grid(domain, n)
    return GridMetric(grid, np.full((n, n), float(c)))


def hyperbolic_metric(n: int, r: float = 1.0) -> GridMetric:
    """Pull-back of the hyperbolic metric of the disk |w| < r under w = r*z.

    ``lam(z) = 2 r / (1 - r^2 |z|^2)`` on the unit parameter disk. With ``r = 1``
    this is the Poincare metric ``2 / (1 - |z|^2)``; with ``r < 1`` it is the
    hyperbolic disk of radius ``R = log((1+r)/(1-r))`` spread over |z| < 1.
    """
    if not 0 < r <= 1:
        raise ValueError("r must be in (0, 1]")
    grid = make_grid(UNIT_DISK, n)
    a2 = np.abs(grid.z) ** 2
    lam = np.where(grid.mask, 2 * r / (1 - r * r * np.where(grid.mask, a2, 0)), np.nan)
    return GridMetric(grid, lam)


def hyperbolic_truncation(n: int, R: float) -> GridMetric:
    """Hyperbolic disk of radius R on the unit parameter disk."""
    return hyperbolic_metric(n, radius_from_R(R))


# --- closed forms -------------------------------------------------------------------

def hyperbolic_rho(z) -> float:
    """Hyperbolic distance from 0 to z in the unit disk: log((1+|z|)/(1-|z|))."""
    a = abs(complex(z))
    if a >= 1:
        raise DomainError(f"|z| = {a} is not inside the unit disk")
    return 2 * math.atanh(a)


def radius_from_R(R: float) -> float:
    """Euclidean radius of the hyperbolic disk of radius R: (e^R - 1)/(e^R + 1)."""
    if R < 0:
        raise ValueError("R must be nonnegative")
    # tanh(R/2) rounds to 1.0 for R >~ 38; keep the result inside the open disk
    return min(math.tanh(R / 2), math.nextafter(1.0, 0.0))


def poincare_distance(z, w) -> np.ndarray:
    """Hyperbolic distance between points of the unit disk (vectorized in z)."""
    z = np.asarray(z, dtype=complex)
    w = complex(w)
    t = np.abs(z - w) / np.abs(1 - np.conj(w) * z)
    return 2 * np.arctanh(np.minimum(t, 1.0))


# --- graph ---------------------------------------------------------------------------

def stencil_offsets(radius: int) -> list[tuple[int, int]]:
    """Primitive offsets (a, b) with max(|a|, |b|) <= radius, one per +/- pair."""
    out = []
    for a in range(0, radius + 1):
        for b in range(-radius, radius + 1):
            if (a, b) == (0, 0) or math.gcd(a, abs(b)) != 1:
                continue
            if a == 0 and b < 0:
                continue
            out.append((a, b))
    return out


def _graph(metric: GridMetric, stencil: int):
    key = ("graph", stencil)
    cached = metric._cache.get(key)
    if cached is not None:
        return cached
    n, h = metric.n, metric.grid.h
    mask, lam = metric.mask, metric.lam
    index = np.full((n, n), -1, dtype=np.int64)
    index[mask] = np.arange(int(mask.sum()))
    rows, cols, wts = [], [], []
    for a, b in stencil_offsets(stencil):
        # pairs (i, j) -> (i + a, j + b)
        i0, i1 = max(0, -a), n - max(0, a)
        j0, j1 = max(0, -b), n - max(0, b)
        src = (slice(i0, i1), slice(j0, j1))
        dst = (slice(i0 + a, i1 + a), slice(j0 + b, j1 + b))
        ok = mask[src] & mask[dst]
        step = h * math.hypot(a, b)
        rows.append(index[src][ok])
        cols.append(index[dst][ok])
        wts.append(step * 0.5 * (lam[src][ok] + lam[dst][ok]))
    N = int(mask.sum())
    graph = csr_matrix((np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))),
                       shape=(N, N))
    metric._cache[key] = (graph, index)
    return graph, index


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Distances from ``source`` (a cell, or None for the boundary ring) on a metric."""

    metric: GridMetric
    source: tuple[int, int] | None
    dist: np.ndarray  # inf where masked out or unreached

    @property
    def reached(self) -> np.ndarray:
        return np.isfinite(self.dist)

    def at(self, cell) -> float:
        i, j = cell
        if not self.metric.mask[i, j]:
            raise UnreachableError(f"cell {cell} is outside the domain mask")
        d = float(self.dist[i, j])
        if not math.isfinite(d):
            raise UnreachableError(f"cell {cell} is not reachable")
        return d


def _cell(metric: GridMetric, where) -> tuple[int, int]:
    if isinstance(where, (complex, float, int)) and not isinstance(where, bool):
        return metric.grid.cell_of(where)
    i, j = where
    return int(i), int(j)


def _run(metric: GridMetric, sources: np.ndarray, stencil: int) -> np.ndarray:
    graph, index = _graph(metric, stencil)
    d = dijkstra(graph, directed=False, indices=sources, min_only=True)
    out = np.full((metric.n, metric.n), np.inf)
    out[metric.mask] = d
    return out


def geodesic_distances(metric: GridMetric, source, stencil: int = DEFAULT_STENCIL) -> DistanceField:
    """Single-source shortest-path distances; ``source`` is a cell or a complex point."""
    cell = _cell(metric, source)
    i, j = cell
    if not (0 <= i < metric.n and 0 <= j < metric.n) or not metric.mask[i, j]:
        raise UnreachableError(f"source {cell} is outside the domain mask")
    _, index = _graph(metric, stencil)
    return DistanceField(metric, cell, _run(metric, np.array([index[i, j]]), stencil))


def boundary_distance_field(metric: GridMetric, stencil: int = DEFAULT_STENCIL,
                            mask: np.ndarray | None = None) -> DistanceField:
    """Distance of every node to the boundary ring, by one multi-source pass.

    With ``mask`` given, distances are taken inside the sub-region only (its own
    boundary ring, paths confined to it).
    """
    if mask is not None:
        metric = metric.restricted(mask)
    ring = ring_of(metric.mask)
    _, index = _graph(metric, stencil)
    return DistanceField(metric, None, _run(metric, index[ring], stencil))


def ring_of(mask: np.ndarray) -> np.ndarray:
    """Masked cells with at least one unmasked 8-neighbor (edges count as unmasked)."""
    padded = np.pad(mask, 1, constant_values=False)
    n0, n1 = mask.shape
    inner = np.ones_like(mask)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            inner &= padded[1 + di:1 + di + n0, 1 + dj:1 + dj + n1]
    return mask & ~inner


def dist_to_boundary(metric: GridMetric, p, stencil: int = DEFAULT_STENCIL) -> float:
    """Geodesic distance from ``p`` to the discrete boundary ring."""
    field = geodesic_distances(metric, p, stencil)
    ring = ring_of(metric.mask)
    d = float(np.min(field.dist[ring]))
    if not math.isfinite(d):
        raise UnreachableError("boundary ring not reachable from source")
    return d


# --- comparison lemma ------------------------------------------------------------------

class HypothesisReport(NamedTuple):
    k_min: float
    k_max: float
    boundary_distance: float
    boundary_margin: float  # boundary_distance - R
    boundary_tol: float
    status: str  # "PASS" or "WARN" (margin within the discretization band)


def lemma21_hypotheses(metric: GridMetric, R: float, *, slack: float = SLACK,
                       curvature_tol: float = CURVATURE_TOL,
                       stencil: int = DEFAULT_STENCIL) -> HypothesisReport:
    """Check -1 <= K <= 0 (oracle curvature) and d(center, boundary) >= R.

    The distance test allows ``slack * R`` plus the offset of the discrete
    boundary ring from the true circle (at most sqrt(2) h, weighted by the
    largest lam on the ring). Raises HypothesisError on failure.
    """
    from .weierstrass import curvature_oracle_field

    K = curvature_oracle_field(metric)
    K = K[np.isfinite(K)]
    if K.size == 0:
        raise HypothesisError("grid too coarse: no interior nodes for the curvature oracle")
    k_min, k_max = float(K.min()), float(K.max())
    if k_min < -1 - curvature_tol or k_max > curvature_tol:
        raise HypothesisError(f"curvature range [{k_min:.6g}, {k_max:.6g}] violates -1 <= K <= 0")
    center = metric.grid.center_cell
    d = dist_to_boundary(metric, center, stencil)
    ring = ring_of(metric.mask)
    tol = slack * R + math.sqrt(2) * metric.grid.h * float(np.max(metric.lam[ring]))
    margin = d - R
    if margin < -tol:
        raise HypothesisError(f"distance to boundary {d:.6g} < R = {R:.6g} beyond tolerance {tol:.3g}")
    status = "WARN" if abs(margin) < tol else "PASS"
    if status == "WARN":
        log.warning("boundary distance %.6g within %.3g of R=%.6g; cannot separate from discretization",
                    d, tol, R)
    return HypothesisReport(k_min, k_max, d, margin, tol, status)


class ComparisonResult(NamedTuple):
    min_slack: float  # min over cells of rho - rho_hat
    min_rel_slack: float  # min over cells (excluding the source) of (rho - rho_hat)/rho_hat
    argmin: tuple[int, int]
    hypotheses: HypothesisReport
    rho: DistanceField


def comparison_field(metric: GridMetric, R: float) -> np.ndarray:
    """rho_hat at every node: hyperbolic distance of r*zeta, zeta the unit-normalized point."""
    r = radius_from_R(R)
    zeta = metric.domain.normalized(metric.grid.z)
    out = np.full((metric.n, metric.n), np.nan)
    out[metric.mask] = 2 * np.arctanh(r * np.abs(zeta[metric.mask]))
    return out


def comparison_check(metric: GridMetric, R: float, *, slack: float = SLACK,
                     curvature_tol: float = CURVATURE_TOL,
                     stencil: int = DEFAULT_STENCIL) -> ComparisonResult:
    """Distances to the center versus the hyperbolic distances of the disk of radius R.

    The metric's domain is read as the parameter disk, rescaled onto |w| < r with
    r = radius_from_R(R). The comparison lemma predicts rho >= rho_hat.
    """
    hyp = lemma21_hypotheses(metric, R, slack=slack, curvature_tol=curvature_tol, stencil=stencil)
    rho = geodesic_distances(metric, metric.grid.center_cell, stencil)
    rho_hat = comparison_field(metric, R)
    diff = np.where(metric.mask, rho.dist - rho_hat, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(metric.mask & (rho_hat > 0), diff / rho_hat, np.inf)
    idx = int(np.argmin(diff))
    return ComparisonResult(float(diff.ravel()[idx]), float(rel.min()),
                            divmod(idx, metric.n), hyp, rho)


def f_transform(t: np.ndarray) -> np.ndarray:
    """f(t) = log((e^t - 1)/(e^t + 1)) = log tanh(t/2)."""
    with np.errstate(divide="ignore"):
        return np.log(np.tanh(np.asarray(t, dtype=float) / 2))


class SuperharmonicResult(NamedTuple):
    max_laplacian: float  # undivided five-point Laplacian, i.e. h^2 * Delta_h
    argmax: tuple[int, int]
    tested: int
    collar_cells: int


def superharmonicity_check(rho: DistanceField, metric: GridMetric | None = None,
                           collar: int = COLLAR) -> SuperharmonicResult:
    """Largest five-point second difference of f(rho) outside a collar around the source.

    The value is the undivided stencil sum ``u_E + u_W + u_N + u_S - 4 u`` (h^2
    times the discrete Laplacian), so the tolerance is dimensionless. Cells within
    Chebyshev distance ``collar`` of the source are excluded, as are cells whose
    four neighbors are not all reached.
    """
    metric = metric or rho.metric
    if rho.source is None:
        raise ValueError("superharmonicity check needs a single-source distance field")
    # f(inf) = 0 is finite, so unreached nodes are blanked explicitly
    u = np.where(rho.reached & metric.mask, f_transform(rho.dist), np.nan)
    n = metric.n
    lap = np.full((n, n), np.nan)
    lap[1:-1, 1:-1] = u[2:, 1:-1] + u[:-2, 1:-1] + u[1:-1, 2:] + u[1:-1, :-2] - 4 * u[1:-1, 1:-1]
    cheb = metric.grid.chebyshev_from(rho.source)
    near = metric.mask & (cheb <= collar)
    ok = np.isfinite(lap) & metric.mask & ~near
    if not ok.any():
        raise ValueError("no cells to test outside the collar")
    vals = np.where(ok, lap, -np.inf)
    idx = int(np.argmax(vals))
    return SuperharmonicResult(float(vals.ravel()[idx]), divmod(idx, n), int(ok.sum()), int(near.sum()))


def closed_form_field(metric: GridMetric, source, rho_fn) -> DistanceField:
    """Distance field filled from a closed form ``rho_fn(z)`` (vectorized over nodes)."""
    cell = _cell(metric, source)
    dist = np.full((metric.n, metric.n), np.inf)
    dist[metric.mask] = rho_fn(metric.grid.z[metric.mask])
    return DistanceField(metric, cell, dist)


class Lemma22Row(NamedTuple):
    R: float
    r: float
    passed: bool
    min_rel_margin: float  # min over cells of (rho - bound) / bound
    hypotheses: HypothesisReport


def lemma22_lower_bound(metrics: Sequence[GridMetric], radii: Sequence[float], cells,
                        *, slack: float = SLACK, curvature_tol: float = CURVATURE_TOL,
                        stencil: int = DEFAULT_STENCIL) -> list[Lemma22Row]:
    """For each metric on the unit disk with hyperbolic radius R_k, check
    rho_k(z) >= log((1 + r_k|z|)/(1 - r_k|z|)) - slack at the given cells."""
    if len(metrics) != len(radii):
        raise ValueError("one radius per metric")
    rows = []
    for metric, R in zip(metrics, radii):
        hyp = lemma21_hypotheses(metric, R, slack=slack, curvature_tol=curvature_tol, stencil=stencil)
        r = radius_from_R(R)
        rho = geodesic_distances(metric, metric.grid.center_cell, stencil)
        worst = math.inf
        passed = True
        for cell in cells:
            cell = _cell(metric, cell)
            z = metric.domain.normalized(metric.grid.z_of(cell))
            bound = 2 * math.atanh(r * abs(z))
            value = rho.at(cell)
            if value < bound * (1 - slack):
                passed = False
            if bound > 0:
                worst = min(worst, (value - bound) / bound)
        rows.append(Lemma22Row(R, r, passed, worst, hyp))
    return rows


# --- CSV interchange ---------------------------------------------------------------------

METRIC_COLUMNS = ("i", "j", "u", "v", "lambda")
DISTANCE_COLUMNS = ("u", "v", "rho", "rho_hyperbolic", "slack")


def _g(x: float) -> str:
    return format(float(x), ".17g")


def metric_csv(metric: GridMetric) -> str:
    """Masked nodes as ``i,j,u,v,lambda`` under a ``# {json}`` header line."""
    header = json.dumps({"domain": metric.domain.to_json(), "n": metric.n}, sort_keys=True)
    lines = ["# " + header, ",".join(METRIC_COLUMNS)]
    z = metric.grid.z
    for i, j in zip(*np.nonzero(metric.mask)):
        lines.append(f"{i},{j},{_g(z[i, j].real)},{_g(z[i, j].imag)},{_g(metric.lam[i, j])}")
    return "\n".join(lines) + "\n"


def read_metric_csv(path) -> GridMetric:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ConfigError(f"{path}: missing '# {{json}}' header line")
    try:
        head = json.loads(text[0][1:])
        n = int(head["n"])
        domain = DiskDomain.from_json(head["domain"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bad header: {exc}") from None
    grid = make_grid(domain, n)
    lam = np.full((n, n), np.nan)
    rows = csv.DictReader(text[1:])
    try:
        for row in rows:
            lam[int(row["i"]), int(row["j"])] = float(row["lambda"])
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"{path}: bad row: {exc}") from None
    missing = int(np.count_nonzero(grid.mask & ~np.isfinite(lam)))
    if missing:
        raise ConfigError(f"{path}: {missing} masked nodes have no lambda value")
    return GridMetric(grid, lam)


def distance_csv(field: DistanceField) -> str:
    """``u,v,rho,rho_hyperbolic,slack`` for reached nodes; rho_hyperbolic is the Poincare
    distance between the domain-normalized source and node."""
    metric = field.metric
    z = metric.grid.z
    src = metric.domain.normalized(metric.grid.z_of(field.source)) if field.source is not None else None
    zeta = metric.domain.normalized(z)
    lines = [",".join(DISTANCE_COLUMNS)]
    for i, j in zip(*np.nonzero(metric.mask & field.reached)):
        rho = field.dist[i, j]
        hyp = float(poincare_distance(zeta[i, j], src)) if src is not None else math.nan
        lines.append(",".join(_g(x) for x in (z[i, j].real, z[i, j].imag, rho, hyp, rho - hyp)))
    return "\n".join(lines) + "\n"
