"""Points and hyperplanes of complex projective space, and the omission side
of the curvature estimate: general position, incidence margins, Fubini-Study
distance and coordinate functions of a Gauss map.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, DivisionByIncidence
from .grid import Grid, make_grid
from .holo import TAU_POLE, _as_complex

if TYPE_CHECKING:
    from .weierstrass import WeierstrassData

RANK_TOL = 1e-9


def _vector(values, what: str) -> tuple[complex, ...]:
    vec = tuple(_as_complex(v) for v in values)
    if not vec or all(v == 0 for v in vec):
        raise ValueError(f"{what} must have a nonzero coordinate")
    return vec


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """Point of P^{m-1}(C) given by homogeneous coordinates.

    Equality is proportionality of the coordinate vectors.
    """

    homog: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "homog", _vector(self.homog, "projective point"))

    @property
    def m(self) -> int:
        return len(self.homog)

    def array(self) -> np.ndarray:
        return np.array(self.homog, dtype=complex)

    def normalized(self) -> tuple[complex, ...]:
        """Representative whose largest-modulus coordinate (first on ties) is 1."""
        v = self.array()
        k = int(np.argmax(np.abs(v)))
        return tuple(complex(c) for c in v / v[k])

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if self.m != other.m:
            return False
        return fubini_study_dist(self, other) <= 1e-9

    __hash__ = None


@dataclass(frozen=True)
class Hyperplane:
    """Hyperplane ``{v : sum_i a_i v_i = 0}`` given by its covector ``a``."""

    covector: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "covector", _vector(self.covector, "covector"))

    @property
    def m(self) -> int:
        return len(self.covector)

    def array(self) -> np.ndarray:
        return np.array(self.covector, dtype=complex)

    def to_json(self) -> list:
        return [[c.real, c.imag] for c in self.covector]


def basis_plane(m: int, k: int) -> Hyperplane:
    """Coordinate hyperplane ``y_k = 0`` (0-based ``k``)."""
    return Hyperplane(tuple(1.0 if i == k else 0.0 for i in range(m)))


@dataclass(frozen=True)
class HyperplaneSet:
    planes: tuple[Hyperplane, ...]
    m: int

    def __post_init__(self):
        planes = tuple(p if isinstance(p, Hyperplane) else Hyperplane(p) for p in self.planes)
        for p in planes:
            if p.m != self.m:
                raise ValueError(f"covector of length {p.m} in a set with m={self.m}")
        object.__setattr__(self, "planes", planes)

    def __len__(self):
        return len(self.planes)

    def __iter__(self):
        return iter(self.planes)

    def matrix(self) -> np.ndarray:
        """Covectors as rows, shape (q, m)."""
        if not self.planes:
            return np.zeros((0, self.m), dtype=complex)
        return np.array([p.covector for p in self.planes], dtype=complex)

    def to_json(self) -> dict:
        return {"m": self.m, "planes": [p.to_json() for p in self.planes]}

    @classmethod
    def from_json(cls, obj) -> "HyperplaneSet":
        try:
            m = int(obj["m"])
            return cls(tuple(Hyperplane(tuple(c)) for c in obj["planes"]), m)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad hyperplane set: {exc}") from None


class GeneralPosition(NamedTuple):
    ok: bool
    witness: tuple[int, ...] | None


def general_position(hset: HyperplaneSet, tol: float = RANK_TOL) -> GeneralPosition:
    """Check that every min(q, m) covectors are linearly independent.

    Subsets are visited in lexicographic order; the first rank-deficient one
    (smallest singular value <= tol * largest) is returned as the witness.
    """
    a = hset.matrix()
    q, m = a.shape
    if q == 0:
        return GeneralPosition(True, None)
    k = min(q, m)
    for subset in itertools.combinations(range(q), k):
        s = np.linalg.svd(a[list(subset)], compute_uv=False)
        if not s[-1] > tol * s[0]:
            return GeneralPosition(False, subset)
    return GeneralPosition(True, None)


def incidence_margin(p: ProjPoint, h: Hyperplane) -> float:
    """Normalized linear pairing |<a, v>| / (|a| |v|); zero iff p lies on h."""
    if p.m != h.m:
        raise ValueError("dimension mismatch between point and hyperplane")
    v, a = p.array(), h.array()
    return float(abs(np.dot(a, v)) / (np.linalg.norm(a) * np.linalg.norm(v)))


def fubini_study_dist(p: ProjPoint, q: ProjPoint) -> float:
    """Fubini-Study angle arccos(|<v, w>| / (|v||w|)) in [0, pi/2].

    Evaluated as 2*asin(|v - e^{it} w| / 2) on unit representatives with the
    phase aligned, which stays accurate for nearby points.
    """
    v = p.array() / np.linalg.norm(p.array())
    w = q.array() / np.linalg.norm(q.array())
    ip = np.vdot(w, v)  # sum conj(w) v
    if abs(ip) > 0:
        w = w * (ip / abs(ip))
    chord = float(np.linalg.norm(v - w))
    return 2 * math.asin(min(1.0, chord / 2))


class OmissionRow(NamedTuple):
    plane_index: int
    min_margin: float
    argmin_u: float
    argmin_v: float


def margin_field(data: "WeierstrassData", hset: HyperplaneSet, grid: Grid) -> np.ndarray:
    """Incidence margins of the Gauss map at every masked node, shape (q, n, n)."""
    if hset.m != data.m:
        raise ValueError(f"hyperplane set has m={hset.m}, data has m={data.m}")
    out = np.full((len(hset), grid.n, grid.n), np.nan)
    if not len(hset):
        return out
    F = data.forms_grid(grid.z[grid.mask])  # (N, m)
    fn = np.linalg.norm(F, axis=1)
    a = hset.matrix()
    pair = np.abs(F @ a.T) / (fn[:, None] * np.linalg.norm(a, axis=1)[None, :])
    for k in range(len(hset)):
        out[k][grid.mask] = pair[:, k]
    return out


def omission_margin(data: "WeierstrassData", hset: HyperplaneSet, grid_n: int) -> list[OmissionRow]:
    """Per-plane minimum incidence margin of the Gauss map over the grid mask.

    A positive minimum means the sampled Gauss map avoids the plane; it is not
    a proof of omission between nodes.
    """
    data.require_valid()
    grid = make_grid(data.domain, grid_n)
    field = margin_field(data, hset, grid)
    rows = []
    for k in range(len(hset)):
        flat = np.where(grid.mask, field[k], np.inf).ravel()
        idx = int(np.argmin(flat))  # first occurrence: row-major tie-break
        i, j = divmod(idx, grid.n)
        rows.append(OmissionRow(k, float(flat[idx]), float(grid.axis_u[i]), float(grid.axis_v[j])))
    return rows


def coordinate_function(data: "WeierstrassData", a: Hyperplane, b: Hyperplane, z) -> complex:
    """The meromorphic ratio alpha(g(z)) / beta(g(z)) of two covectors along the Gauss map."""
    g = data.forms_at(z)
    num = complex(np.dot(a.array(), g))
    den = complex(np.dot(b.array(), g))
    if abs(den) < TAU_POLE * np.linalg.norm(b.array()) * np.linalg.norm(g):
        raise DivisionByIncidence(f"Gauss map lies on the denominator hyperplane at z={z}")
    return num / den


def hypothesis_count(m: int) -> int:
    """Number of planes the theorem requires to exceed: m(m+1)/2."""
    return m * (m + 1) // 2


def as_hyperplane_set(planes: Sequence[Sequence[complex]], m: int | None = None) -> HyperplaneSet:
    planes = [Hyperplane(tuple(p)) for p in planes]
    if m is None:
        if not planes:
            raise ValueError("cannot infer m from an empty plane list")
        m = planes[0].m
    return HyperplaneSet(tuple(planes), m)
