import heapq
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minsurf.catalog import enneper
from minsurf.errors import DomainError, HypothesisError, UnreachableError
from minsurf.grid import DiskDomain, GridMetric, make_grid
from minsurf.metricgeo import (SLACK, boundary_distance_field, closed_form_field, comparison_check,
                               dist_to_boundary, distance_csv, flat_metric, geodesic_distances,
                               hyperbolic_metric, hyperbolic_rho, hyperbolic_truncation,
                               lemma21_hypotheses, lemma22_lower_bound, metric_csv, poincare_distance,
                               radius_from_R, read_metric_csv, ring_of, sample_metric,
                               stencil_offsets, superharmonicity_check)
from minsurf.weierstrass import scale


def heap_dijkstra(metric: GridMetric, source, stencil: int) -> np.ndarray:
    """Reference shortest paths with a plain binary heap over the same lattice graph."""
    n, h = metric.n, metric.grid.h
    offs = stencil_offsets(stencil)
    offs = offs + [(-a, -b) for a, b in offs]
    dist = np.full((n, n), np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, (i, j) = heapq.heappop(heap)
        if d > dist[i, j]:
            continue
        for a, b in offs:
            k, l = i + a, j + b
            if 0 <= k < n and 0 <= l < n and metric.mask[k, l]:
                w = h * math.hypot(a, b) * 0.5 * (metric.lam[i, j] + metric.lam[k, l])
                if d + w < dist[k, l]:
                    dist[k, l] = d + w
                    heapq.heappush(heap, (d + w, (k, l)))
    return dist


def test_stencil_sizes():
    assert len(stencil_offsets(1)) * 2 == 8
    assert len(stencil_offsets(2)) * 2 == 16
    assert len(stencil_offsets(3)) * 2 == 32


@pytest.mark.parametrize("stencil", [1, 2, 3])
def test_scipy_matches_heap_reference(stencil):
    metric = sample_metric(enneper().data, 21)
    src = (10, 7)
    ref = heap_dijkstra(metric, src, stencil)
    got = geodesic_distances(metric, src, stencil).dist
    fin = np.isfinite(ref)
    assert np.array_equal(fin, np.isfinite(got))
    assert np.allclose(got[fin], ref[fin], rtol=1e-13, atol=0)


def test_flat_distances_close_to_euclidean():
    metric = flat_metric(257)
    d = geodesic_distances(metric, 0j)
    z = metric.grid.z
    sel = metric.mask & (np.abs(z) > 0.1)
    rel = np.abs(d.dist[sel] - np.abs(z[sel])) / np.abs(z[sel])
    assert rel.max() < SLACK


def test_hyperbolic_log3():
    metric = hyperbolic_metric(257)
    d = geodesic_distances(metric, 0j).at(metric.grid.cell_of(0.5))
    assert d == pytest.approx(math.log(3), rel=SLACK)


def test_scaled_metric_doubles_distances():
    metric = sample_metric(enneper().data, 65)
    a = geodesic_distances(metric, 0.2j).dist
    b = geodesic_distances(metric.scaled(2), 0.2j).dist
    fin = np.isfinite(a)
    assert np.array_equal(b[fin], 2 * a[fin])


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 10))
def test_data_scaling_scales_distances(mu):
    data = enneper().data
    a = boundary_distance_field(sample_metric(data, 33)).dist
    b = boundary_distance_field(sample_metric(scale(data, mu), 33)).dist
    fin = np.isfinite(a)
    assert np.allclose(b[fin], mu * a[fin], rtol=1e-12)


def test_distance_symmetry():
    metric = sample_metric(enneper().data, 65)
    p, q = (20, 30), (45, 40)
    assert geodesic_distances(metric, p).at(q) == pytest.approx(geodesic_distances(metric, q).at(p),
                                                               rel=1e-13)


def test_unreachable_and_masked_source():
    metric = flat_metric(33)
    with pytest.raises(UnreachableError):
        geodesic_distances(metric, (0, 0))
    d = geodesic_distances(metric, (16, 16))
    with pytest.raises(UnreachableError):
        d.at((0, 0))
    # a gap wider than the stencil splits the region; the far half is unreached
    rows = np.arange(33)[:, None]
    region = metric.mask & ((rows < 13) | (rows > 19))
    part = geodesic_distances(metric.restricted(region), (5, 16))
    assert not part.reached[28, 16] and part.reached[5, 10]


def test_dist_to_boundary_flat_and_refinement():
    ns = (65, 129, 257)
    d = [dist_to_boundary(flat_metric(n), (n // 2, n // 2)) for n in ns]
    for n, v in zip(ns, d):
        # graph metrication plus the ring's offset from the circle (under sqrt(2) h)
        assert abs(v - 1) <= SLACK + math.sqrt(2) * 2 / (n - 1)
    # the ring approaches the circle from inside
    assert d[0] < d[1] < d[2] < 1.0


def test_hyperbolic_boundary_distance_diverges():
    d = [dist_to_boundary(hyperbolic_metric(n), (n // 2, n // 2)) for n in (129, 257, 513)]
    assert d[0] < d[1] < d[2]


def test_multisource_matches_single_source_min():
    metric = sample_metric(enneper().data, 33)
    field = boundary_distance_field(metric).dist
    for cell in [(16, 16), (10, 20), (25, 12)]:
        assert field[cell] == pytest.approx(dist_to_boundary(metric, cell), rel=1e-13)


def test_ring_of_matches_grid():
    g = make_grid(DiskDomain(0, 1), 41)
    assert np.array_equal(ring_of(g.mask), g.boundary_ring)


# --- closed forms --------------------------------------------------------------------

def test_radius_and_rho_inverse():
    for R in (0.1, 1.0, 2.5, 4.0, 10.0):
        assert hyperbolic_rho(radius_from_R(R)) == pytest.approx(R, abs=1e-12)
    for r in (0.0, 0.3, 0.75, 0.99):
        assert radius_from_R(hyperbolic_rho(r)) == pytest.approx(r, abs=1e-12)
    assert radius_from_R(100) < 1
    with pytest.raises(DomainError):
        hyperbolic_rho(1.0)


def test_poincare_distance():
    assert float(poincare_distance(0.5, 0)) == pytest.approx(math.log(3))
    z, w = 0.3 + 0.1j, -0.2 + 0.4j
    assert float(poincare_distance(z, w)) == pytest.approx(float(poincare_distance(w, z)))


# --- comparison lemma ----------------------------------------------------------------

def test_comparison_hyperbolic_equality_case():
    for R in (1.0, 3.0):
        res = comparison_check(hyperbolic_truncation(129, R), R)
        assert res.min_rel_slack >= -SLACK
        assert res.min_rel_slack < 0.01  # equality case: essentially tight


def test_comparison_flat_metric():
    R = 2.0
    metric = flat_metric(129, c=R)  # center-to-boundary distance R
    res = comparison_check(metric, R)
    assert res.min_slack >= 0 and res.min_rel_slack >= 0
    assert res.hypotheses.k_max == 0


def test_comparison_rejects_too_curved_metric():
    # hyperbolic metric halved has K = -4
    metric = hyperbolic_truncation(65, 2.0).scaled(0.5)
    with pytest.raises(HypothesisError):
        lemma21_hypotheses(metric, 1.0)


def test_comparison_rejects_short_disk():
    with pytest.raises(HypothesisError):
        lemma21_hypotheses(flat_metric(65, c=1.0), 2.0)


def test_superharmonic_closed_form_hyperbolic():
    metric = hyperbolic_metric(257)
    rho = closed_form_field(metric, 0j, lambda z: 2 * np.arctanh(np.abs(z)))
    res = superharmonicity_check(rho, metric)
    assert res.max_laplacian <= 1e-2 and res.collar_cells == 49


def test_superharmonic_graph_flat():
    metric = flat_metric(257)
    res = superharmonicity_check(geodesic_distances(metric, 0j), metric)
    assert res.max_laplacian <= 1e-2


def test_lemma22_rows():
    metrics = [hyperbolic_truncation(129, R) for R in (1, 2)]
    cells = [metrics[0].grid.cell_of(z) for z in (0.25, -0.5j, 0.5 + 0.25j)]
    rows = lemma22_lower_bound(metrics, [1, 2], cells)
    assert all(r.passed for r in rows)


# --- CSV -----------------------------------------------------------------------------

def test_metric_csv_roundtrip(tmp_path):
    metric = sample_metric(enneper().data, 17)
    p = tmp_path / "m.csv"
    p.write_text(metric_csv(metric))
    again = read_metric_csv(p)
    assert again.domain == metric.domain and again.n == metric.n
    assert np.array_equal(again.lam[metric.mask], metric.lam[metric.mask])


def test_distance_csv_columns():
    metric = hyperbolic_metric(17)
    text = distance_csv(geodesic_distances(metric, 0j))
    head, first = text.splitlines()[:2]
    assert head == "u,v,rho,rho_hyperbolic,slack"
    assert len(first.split(",")) == 5
