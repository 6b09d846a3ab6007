"""Cartesian discretization of a disk domain.

Nodes span the bounding square of the disk inclusive of its edges, so with
``n = 2**k + 1`` the center and the axis points ``center ± radius/2`` are grid
nodes. Node ``(i, j)`` sits at ``u = c.real - r + i*h``, ``v = c.imag - r + j*h``
with ``h = 2r/(n-1)``. The mask keeps nodes strictly inside the disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import ConfigError, DomainError

# relative shrink of the mask radius so nodes exactly on the circle are excluded
_MASK_EPS = 1e-12


@dataclass(frozen=True)
class DiskDomain:
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    def contains(self, z, slack: float = 1e-12) -> bool:
        return abs(complex(z) - self.center) <= self.radius * (1 + slack)

    def require(self, z) -> complex:
        z = complex(z)
        if not self.contains(z):
            raise DomainError(f"z={z} outside closed disk |z-{self.center}| <= {self.radius}")
        return z

    def normalized(self, z):
        """Map the disk onto the unit disk (affinely)."""
        return (z - self.center) / self.radius

    def to_json(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "radius": self.radius}

    @classmethod
    def from_json(cls, obj) -> "DiskDomain":
        try:
            c = obj.get("center", [0.0, 0.0])
            return cls(complex(float(c[0]), float(c[1])), float(obj["radius"]))
        except (KeyError, TypeError, IndexError, ValueError, AttributeError) as exc:
            raise ConfigError(f"bad domain: {exc}") from None


UNIT_DISK = DiskDomain(0j, 1.0)


@dataclass(frozen=True, eq=False)
class Grid:
    domain: DiskDomain
    n: int

    def __post_init__(self):
        if self.n < 5:
            raise ValueError("grid needs at least 5 nodes per axis")

    @property
    def h(self) -> float:
        return 2 * self.domain.radius / (self.n - 1)

    @cached_property
    def axis_u(self) -> np.ndarray:
        return self.domain.center.real - self.domain.radius + self.h * np.arange(self.n)

    @cached_property
    def axis_v(self) -> np.ndarray:
        return self.domain.center.imag - self.domain.radius + self.h * np.arange(self.n)

    @cached_property
    def z(self) -> np.ndarray:
        """Complex node coordinates, shape (n, n), indexed [i, j] = (u, v)."""
        out = self.axis_u[:, None] + 1j * self.axis_v[None, :]
        out.setflags(write=False)
        return out

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.abs(self.z - self.domain.center) < self.domain.radius * (1 - _MASK_EPS)
        m.setflags(write=False)
        return m

    @property
    def center_cell(self) -> tuple[int, int]:
        return self.cell_of(self.domain.center)

    def z_of(self, cell) -> complex:
        i, j = cell
        return complex(self.axis_u[i], self.axis_v[j])

    def cell_of(self, z) -> tuple[int, int]:
        """Nearest node to ``z``."""
        z = complex(z)
        i = int(round((z.real - self.axis_u[0]) / self.h))
        j = int(round((z.imag - self.axis_v[0]) / self.h))
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise DomainError(f"z={z} outside the grid")
        return i, j

    def interior(self, margin: int) -> np.ndarray:
        """Masked nodes whose (2*margin+1)^2 block lies inside the mask."""
        from scipy.ndimage import binary_erosion

        if margin == 0:
            return self.mask.copy()
        k = 2 * margin + 1
        return binary_erosion(self.mask, np.ones((k, k), bool), border_value=0)

    @cached_property
    def boundary_ring(self) -> np.ndarray:
        """Masked nodes with at least one unmasked 8-neighbor (array edge counts as unmasked)."""
        ring = self.mask & ~self.interior(1)
        ring.setflags(write=False)
        return ring

    def chebyshev_from(self, cell) -> np.ndarray:
        i, j = cell
        ii, jj = np.indices((self.n, self.n))
        return np.maximum(np.abs(ii - i), np.abs(jj - j))


@lru_cache(maxsize=32)
def make_grid(domain: DiskDomain, n: int) -> Grid:
    """Shared Grid instance per (domain, n) so cached coordinates are reused."""
    return Grid(domain, int(n))


@dataclass(frozen=True, eq=False)
class GridMetric:
    """Sampled conformal factor ``lam`` of ``ds = lam |dz|`` on a disk grid.

    ``lam`` is NaN outside the mask. Shortest-path graphs built from the
    metric are memoized in ``_cache``. ``region`` optionally restricts the
    metric to a sub-region of the disk mask.
    """

    grid: Grid
    lam: np.ndarray
    region: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        if lam.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"lambda shape {lam.shape} does not match grid n={self.grid.n}")
        if self.region is not None:
            region = np.asarray(self.region, dtype=bool) & self.grid.mask
            region.setflags(write=False)
            object.__setattr__(self, "region", region)
        lam[~self.mask] = np.nan
        inside = lam[self.mask]
        if not (np.all(np.isfinite(inside)) and np.all(inside > 0)):
            raise ValueError("conformal factor must be finite and positive on the mask")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def domain(self) -> DiskDomain:
        return self.grid.domain

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def mask(self) -> np.ndarray:
        return self.grid.mask if self.region is None else self.region

    def scaled(self, c: float) -> "GridMetric":
        return GridMetric(self.grid, self.lam * float(c), self.region)

    def restricted(self, region: np.ndarray) -> "GridMetric":
        return GridMetric(self.grid, self.lam, region)
