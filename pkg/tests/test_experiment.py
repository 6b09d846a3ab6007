import json

import numpy as np
import pytest

from minsurf.catalog import enneper, plane, voss
from minsurf.errors import ConfigError, FlatSurfaceError, GeneralPositionError
from minsurf.experiment import (ExperimentConfig, ExperimentReport, SurfaceSpec, config_from_json,
                                curvature_distance_product, dumps_json, emit_report, product_field,
                                renormalize, run_experiment)
from minsurf.grid import DiskDomain
from minsurf.projgeom import HyperplaneSet, as_hyperplane_set
from minsurf.weierstrass import curvature, scale, with_domain

ENNEPER = enneper().data
VOSS = voss(2, -2, 2j)


def test_plane_product_zero():
    res = curvature_distance_product(plane().data, 65)
    assert res.sup == 0


@pytest.mark.parametrize("mu", [0.5, 3.0])
def test_product_scale_invariant(mu):
    for data in (ENNEPER, VOSS.data):
        a = curvature_distance_product(data, 65)
        b = curvature_distance_product(scale(data, mu), 65)
        assert b.sup == pytest.approx(a.sup, rel=1e-10)
        assert b.cell == a.cell


def test_enneper_product_stable():
    a = curvature_distance_product(ENNEPER, 129).sup
    b = curvature_distance_product(ENNEPER, 257).sup
    assert 0 < a < np.inf
    assert abs(a - b) / b <= 0.05


def test_product_argmax_row_major():
    # enneper_k(2) is symmetric under z -> iz: the first maximal node wins
    from minsurf.catalog import enneper_k
    data = enneper_k(2).data
    res = curvature_distance_product(data, 65)
    prod = product_field(data, 65)
    flat = np.where(np.isfinite(prod), prod, -np.inf).ravel()
    assert res.cell == divmod(int(np.argmax(flat)), 65)


def test_domain_monotonicity():
    # shrinking the disk does not increase the product beyond grid slack
    sups = [curvature_distance_product(with_domain(VOSS.data, DiskDomain(0, r)), 129).sup
            for r in (0.9, 0.6, 0.3)]
    for big, small in zip(sups, sups[1:]):
        assert small <= big * 1.015


# --- renormalization -----------------------------------------------------------------

@pytest.mark.parametrize("data", [ENNEPER, VOSS.data], ids=["enneper", "voss"])
def test_renormalize_post_conditions(data):
    res = renormalize(data, 129)
    rep = res.report
    assert abs(abs(curvature(res.data, res.z)) - 1) <= 1e-9
    assert rep["unit_ok"] and rep["bound_ok"]
    assert -4 <= rep["K_min_inner"] <= rep["K_max_inner"] <= 0
    assert rep["inner_disk_cells"] > 0


def test_renormalize_plane_rejected():
    with pytest.raises(FlatSurfaceError):
        renormalize(plane().data, 65)


def test_renormalize_idempotent():
    first = renormalize(VOSS.data, 129)
    second = renormalize(first.data, 129)
    assert second.cell == first.cell
    assert abs(second.mu - 1) <= 1e-6


def test_renormalize_off_center_pick():
    from minsurf.catalog import enneper_k
    res = renormalize(enneper_k(2).data, 129)
    assert res.cell != (64, 64)  # K(0) = 0 there
    assert res.report["bound_ok"]


# --- harness -------------------------------------------------------------------------

def voss_family(radii=(0.3, 0.6, 0.9)):
    return tuple(SurfaceSpec(f"r{r}", with_domain(VOSS.data, DiskDomain(0, r))) for r in radii)


def test_run_experiment_family():
    cfg = ExperimentConfig(voss_family(), VOSS.omitted, grid_n=65)
    rep = run_experiment(cfg)
    assert rep.empirical_C == max(r.sup_product for r in rep.rows)
    assert rep.resolutions == (65, 129)
    assert rep.stability is not None and rep.stability < 0.05
    assert all(r.q_omitted == 4 and not r.flagged for r in rep.rows)
    assert any("m(m+1)/2" in w for w in rep.warnings)


def test_plane_row_contributes_zero():
    cfg = ExperimentConfig((SurfaceSpec("plane", plane().data),), HyperplaneSet((), 3), grid_n=65,
                           refine=False)
    rep = run_experiment(cfg)
    assert rep.rows[0].sup_product == 0 and rep.empirical_C == 0


def test_flagged_surface_still_measured():
    from minsurf.catalog import tangent_plane
    planes = HyperplaneSet((tangent_plane(0),), 3)  # Enneper passes through it at z = 0
    cfg = ExperimentConfig((SurfaceSpec("enneper", ENNEPER),), planes, grid_n=65, refine=False)
    rep = run_experiment(cfg)
    assert rep.rows[0].flagged and rep.rows[0].q_omitted == 0
    assert rep.rows[0].sup_product > 0


def test_general_position_error():
    hs = as_hyperplane_set([(1, 0, 0), (0, 1, 0), (1, 1, 0)])
    cfg = ExperimentConfig((SurfaceSpec("e", ENNEPER),), hs, grid_n=65)
    with pytest.raises(GeneralPositionError) as info:
        run_experiment(cfg)
    assert info.value.witness == (0, 1, 2)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig((), VOSS.omitted, grid_n=32)
    with pytest.raises(ConfigError):
        ExperimentConfig((), VOSS.omitted, omission_threshold=0)
    with pytest.raises(ConfigError):
        config_from_json({"surfaces": ["sphere"], "hyperplanes": {"from_catalog": "enneper"}})
    with pytest.raises(ConfigError):
        config_from_json({"surfaces": []})
    with pytest.raises(ConfigError):
        config_from_json([1, 2])


def test_config_surface_forms():
    cfg = config_from_json({
        "surfaces": ["enneper", {"catalog": "voss(2,-2,2i)", "radius": 0.5, "name": "v"},
                     {"name": "inline", "data": ENNEPER.to_json()}],
        "hyperplanes": {"from_catalog": "enneper"},
        "grid_n": 64,
    })
    assert [s.name for s in cfg.surfaces] == ["enneper", "v", "inline"]
    assert cfg.surfaces[1].data.domain.radius == 0.5
    assert cfg.surfaces[2].data == ENNEPER


def test_dimension_mismatch():
    cfg = ExperimentConfig((SurfaceSpec("e", ENNEPER),), as_hyperplane_set([(1, 0, 0, 0)]), grid_n=64)
    with pytest.raises(ConfigError):
        run_experiment(cfg)


# --- report --------------------------------------------------------------------------

def test_empty_family_report(tmp_path):
    rep = run_experiment(ExperimentConfig((), VOSS.omitted, grid_n=64))
    csv_path, json_path = emit_report(rep, tmp_path)
    assert csv_path.read_text().count("\n") == 1
    assert json.loads(json_path.read_text())["empirical_C"] == 0


def test_single_plane_report(tmp_path):
    rep = run_experiment(ExperimentConfig((SurfaceSpec("plane", plane().data),),
                                          HyperplaneSet((), 3), grid_n=64, refine=False))
    csv_path, json_path = emit_report(rep, tmp_path)
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 2 and lines[1].split(",")[2] == "0"
    summary = json.loads(json_path.read_text())
    assert summary["kappa_used"] == 1 and "version" in summary
    assert "lower-bound" in summary["empirical_C_note"]


def test_report_bytes_deterministic(tmp_path):
    cfg = ExperimentConfig(voss_family((0.4, 0.8)), VOSS.omitted, grid_n=64)
    a, b = tmp_path / "a", tmp_path / "b"
    emit_report(run_experiment(cfg), a)
    emit_report(run_experiment(cfg), b)
    for name in ("rows.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_dumps_json_floats():
    text = dumps_json({"b": 0.1, "a": [1, float("inf"), True, None], "c": {"x": 1 / 3}})
    assert '"a": [1, null, true, null]' in text
    assert "0.10000000000000001" in text
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text)["c"]["x"] == 1 / 3


def test_report_type_fields():
    rep = ExperimentReport((), 0.0, (64,), None)
    assert rep.kappa_used == 1.0 and rep.warnings == ()
