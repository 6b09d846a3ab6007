import numpy as np
import pytest

from minsurf.catalog import (INFINITY_PLANE, builtin, enneper_k, examples, quadric_point,
                             tangent_plane, voss)
from minsurf.errors import UnknownEntry
from minsurf.grid import DiskDomain
from minsurf.projgeom import general_position, omission_margin
from minsurf.weierstrass import curvature, validate


@pytest.mark.parametrize("entry", examples(), ids=lambda e: e.name)
def test_examples_valid(entry):
    assert validate(entry.data).valid
    assert entry.omitted.m == entry.data.m
    assert general_position(entry.omitted).ok


@pytest.mark.parametrize("entry", [e for e in examples() if len(e.omitted)], ids=lambda e: e.name)
def test_gauss_map_omits_listed_planes(entry):
    rows = omission_margin(entry.data, entry.omitted, 65)
    assert min(r.min_margin for r in rows) > 1e-3


def test_tangent_plane_pairing():
    for a in (0.3, 2j, -1 + 0.5j):
        h = tangent_plane(a).array()
        for z in (0.1, 0.7j, 2.0):
            assert np.dot(h, quadric_point(z)) == pytest.approx(-(z - a) ** 2 / 2)
        assert np.dot(INFINITY_PLANE.array(), quadric_point(a)) == pytest.approx(1)


def test_quadric_point_isotropic():
    for a in (0, 1j, 0.3 - 2j):
        v = np.array(quadric_point(a))
        assert abs(np.sum(v * v)) < 1e-14


def test_builtin_parsing():
    assert builtin("voss(2,-2,2i)").name == builtin("voss(2, -2, 2j)").name == "voss(2,-2,2i)"
    assert builtin("enneper_k(3)").data.forms[2].num.degree == 3
    assert builtin("iso4(0.7)").data.m == 4
    for bad in ("sphere", "voss()", "enneper_k(9)", "voss(0.5)", "voss(2,2)", "iso4(x)"):
        with pytest.raises(UnknownEntry):
            builtin(bad)


def test_voss_domain_guard():
    with pytest.raises(ValueError):
        voss(1.2, domain=DiskDomain(0, 1))
    assert voss(2, domain=DiskDomain(0, 0.5)).data.domain.radius == 0.5


def test_enneper_k_curvature_vanishes_at_branch_of_g():
    # g = z^2 has g' = 0 at the origin, so K(0) = 0
    assert curvature(enneper_k(2).data, 0) == 0
    assert curvature(enneper_k(2).data, 0.5) < 0
