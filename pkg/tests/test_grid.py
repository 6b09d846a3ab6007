import numpy as np
import pytest

from minsurf.errors import ConfigError, DomainError
from minsurf.grid import DiskDomain, GridMetric, UNIT_DISK, make_grid


def test_node_layout():
    g = make_grid(UNIT_DISK, 129)
    assert g.h == pytest.approx(1 / 64)
    assert g.center_cell == (64, 64)
    assert g.z_of((64, 64)) == 0
    # +-r/2 fall on nodes for n = 2^k + 1
    assert g.z_of(g.cell_of(0.5)) == 0.5
    assert g.z_of(g.cell_of(-0.5j)) == -0.5j


def test_mask_is_open_disk():
    g = make_grid(DiskDomain(1 + 1j, 2.0), 33)
    assert not g.mask[0, 16] and not g.mask[16, 0]  # the four circle points are excluded
    assert np.all(np.abs(g.z[g.mask] - (1 + 1j)) < 2.0)


def test_boundary_ring_and_interior():
    g = make_grid(UNIT_DISK, 33)
    ring = g.boundary_ring
    assert ring.any() and not ring[16, 16]
    # every ring node has an unmasked 8-neighbor; interior(1) nodes have none
    padded = np.pad(g.mask, 1, constant_values=False)
    for i, j in zip(*np.nonzero(ring)):
        assert not padded[i:i + 3, j:j + 3].all()
    assert not (g.interior(1) & ring).any()
    assert np.array_equal(g.interior(1) | ring, g.mask)


def test_cell_of_outside():
    g = make_grid(UNIT_DISK, 17)
    with pytest.raises(DomainError):
        g.cell_of(3)


def test_domain_json_and_validation():
    d = DiskDomain(0.5 - 1j, 0.25)
    assert DiskDomain.from_json(d.to_json()) == d
    with pytest.raises(ConfigError):
        DiskDomain.from_json({"center": [0, 0]})
    with pytest.raises(ValueError):
        DiskDomain(0, -1)
    with pytest.raises(DomainError):
        d.require(0)


def test_metric_validation_and_scaling():
    g = make_grid(UNIT_DISK, 17)
    lam = np.ones((17, 17))
    m = GridMetric(g, lam)
    assert np.isnan(m.lam[0, 0]) and m.lam[8, 8] == 1
    assert m.scaled(2).lam[8, 8] == 2
    bad = lam.copy()
    bad[8, 8] = -1
    with pytest.raises(ValueError):
        GridMetric(g, bad)
    with pytest.raises(ValueError):
        m.lam[8, 8] = 5  # read-only
