"""Built-in Weierstrass data with known closed forms.

Names accepted by :func:`builtin`::

    plane, enneper, enneper_k(k), voss(a1, ..., aj), iso4(theta)

Pole lists use Python complex syntax (``2i`` and ``2j`` are both accepted).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import UnknownEntry
from .grid import UNIT_DISK, DiskDomain
from .holo import ComplexRational, Polynomial
from .projgeom import Hyperplane, HyperplaneSet
from .weierstrass import WeierstrassData

VOSS_MIN_POLE_DISTANCE = 1.5
VOSS_MAX_POLES = 4
ENNEPER_MAX_K = 5


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    data: WeierstrassData
    omitted: HyperplaneSet
    notes: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "data": self.data.to_json(),
                "omitted": self.omitted.to_json(), "notes": self.notes}


def _p(*coeffs) -> Polynomial:
    return Polynomial(coeffs)


def quadric_point(a: complex) -> tuple[complex, complex, complex]:
    """Point ((1 - a^2)/2, i(1 + a^2)/2, a) of the quadric over the sphere value a."""
    a = complex(a)
    return ((1 - a * a) / 2, 1j * (1 + a * a) / 2, a)


# covector whose plane meets the quadric only at the image of a; pairing with
# quadric_point(z) is -(z - a)^2 / 2
def tangent_plane(a: complex) -> Hyperplane:
    return Hyperplane(quadric_point(a))


# tangent plane at the image of infinity; pairs to f with the forms f*quadric_point(z)
INFINITY_PLANE = Hyperplane((1, -1j, 0))


def _classical(f: ComplexRational, g_power: int = 1) -> tuple[ComplexRational, ...]:
    """Forms (f(1-g^2)/2, i f(1+g^2)/2, f g) for g = z**g_power."""
    g2 = Polynomial.monomial(2 * g_power)
    g = Polynomial.monomial(g_power)
    return (f * ComplexRational((1 - g2).scale(0.5)),
            f * ComplexRational((1 + g2).scale(0.5j)),
            f * ComplexRational(g))


def plane() -> CatalogEntry:
    data = WeierstrassData((ComplexRational.const(1), ComplexRational.const(1j),
                            ComplexRational(Polynomial())), UNIT_DISK)
    return CatalogEntry("plane", data, HyperplaneSet((), 3),
                        "flat plane x3 = 0; constant Gauss map [1 : i : 0]; K = 0")


def enneper_k(k: int) -> CatalogEntry:
    k = int(k)
    if not 1 <= k <= ENNEPER_MAX_K:
        raise ValueError(f"enneper_k needs 1 <= k <= {ENNEPER_MAX_K}")
    forms = _classical(ComplexRational.const(1), k)
    name = "enneper" if k == 1 else f"enneper_k({k})"
    return CatalogEntry(name, WeierstrassData(forms, UNIT_DISK),
                        HyperplaneSet((INFINITY_PLANE,), 3),
                        f"Enneper-type surface with g = z^{k}; lam = 1 + |z|^{2 * k}")


def enneper() -> CatalogEntry:
    return enneper_k(1)


def voss(*poles: complex, domain: DiskDomain = UNIT_DISK) -> CatalogEntry:
    """Voss-type surface f = 1/prod(z - a_l), g = z.

    The Gauss map takes the sphere value z, so it omits every a_l and infinity
    on any pole-free disk; each omitted value a corresponds to the tangent plane
    of the quadric at its image.
    """
    poles = tuple(complex(a) for a in poles)
    if not 1 <= len(poles) <= VOSS_MAX_POLES:
        raise ValueError(f"voss takes 1..{VOSS_MAX_POLES} poles")
    if len(set(poles)) != len(poles):
        raise ValueError("voss poles must be distinct")
    for a in poles:
        if abs(a - domain.center) < VOSS_MIN_POLE_DISTANCE * domain.radius:
            raise ValueError(f"voss pole {a} closer than {VOSS_MIN_POLE_DISTANCE} radii to the center")
    f = ComplexRational(Polynomial((1,)), Polynomial.from_roots(poles))
    planes = tuple(tangent_plane(a) for a in poles) + (INFINITY_PLANE,)
    name = "voss(" + ",".join(_fmt_complex(a) for a in poles) + ")"
    return CatalogEntry(name, WeierstrassData(_classical(f), domain), HyperplaneSet(planes, 3),
                        "Gauss map z omits the poles and infinity; lam = |f| (1 + |z|^2)")


def iso4(theta: float) -> CatalogEntry:
    theta = float(theta)
    c, s = math.cos(theta), math.sin(theta)
    forms = (ComplexRational(_p(0.5, 0, -0.5)), ComplexRational(_p(0.5j, 0, 0.5j)),
             ComplexRational(_p(0, c)), ComplexRational(_p(0, s)))
    return CatalogEntry(f"iso4({theta:g})", WeierstrassData(forms, UNIT_DISK),
                        HyperplaneSet((Hyperplane((1, -1j, 0, 0)),), 4),
                        "Enneper surface rotated into R^4; isotropic since cos^2 + sin^2 = 1")


def _fmt_complex(a: complex) -> str:
    if a.imag == 0:
        return f"{a.real:g}"
    if a.real == 0:
        return f"{a.imag:g}i"
    return f"{a.real:g}{a.imag:+g}i"


def _parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    if t in ("j", "+j", "-j"):
        t = t.replace("j", "1j")
    try:
        return complex(t)
    except ValueError:
        raise UnknownEntry(f"bad complex number {text!r}") from None


_CALL = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\((.*)\))?\s*$")

NAMES = ("plane", "enneper", "enneper_k(k)", "voss(a1,...,aj)", "iso4(theta)")


def builtin(name: str) -> CatalogEntry:
    """Look up an entry by name, e.g. ``builtin("voss(2,-2,2i)")``."""
    m = _CALL.match(name)
    if not m:
        raise UnknownEntry(name)
    head, args = m.group(1), m.group(2)
    argv = [a for a in (args.split(",") if args else []) if a.strip()]
    try:
        if head == "plane" and not argv:
            return plane()
        if head == "enneper" and not argv:
            return enneper()
        if head == "enneper_k" and len(argv) == 1:
            return enneper_k(int(argv[0]))
        if head == "voss" and argv:
            return voss(*(_parse_complex(a) for a in argv))
        if head == "iso4" and len(argv) == 1:
            return iso4(float(argv[0]))
    except ValueError as exc:
        raise UnknownEntry(f"{name}: {exc}") from None
    raise UnknownEntry(name)


def examples() -> list[CatalogEntry]:
    """A fixed representative of every family."""
    return [plane(), enneper(), enneper_k(2), voss(2, -2, 2j), iso4(0.7)]
