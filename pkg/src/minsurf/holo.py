"""Polynomials and rational functions of one complex variable.

Coefficients are stored lowest degree first as Python ``complex``. Arithmetic
is structural: sums and products are formed coefficient by coefficient, and a
coefficient is dropped only when it is the roundoff residue of a cancellation
(its magnitude is a few ulps of the terms that produced it). A genuinely tiny
coefficient such as ``1e-30`` therefore survives, while ``cos(t)**2 + sin(t)**2 - 1``
collapses to an exact zero.

Rationals are kept reduced (approximate gcd by the monic Euclidean algorithm)
with a monic denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, PoleError

MAX_DEGREE = 32
TAU_POLE = 1e-12
GCD_TOL = 1e-10
ROOT_MATCH_TOL = 1e-9

# roundoff guard for cancellation: a result smaller than this many ulps of the
# contributing magnitudes is treated as an exact zero
_CANCEL = 16 * np.finfo(float).eps
_TINY = np.finfo(float).tiny


def _as_complex(c) -> complex:
    if isinstance(c, (list, tuple)) and len(c) == 2:
        c = complex(float(c[0]), float(c[1]))
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"non-finite coefficient {c!r}")
    # subnormal parts carry no usable precision and overflow reciprocals
    re = c.real if abs(c.real) >= _TINY else 0.0
    im = c.imag if abs(c.imag) >= _TINY else 0.0
    return complex(re, im)


def _strip(coeffs: Sequence[complex]) -> tuple[complex, ...]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _cancel(values, magnitudes) -> tuple[complex, ...]:
    out = []
    for v, mag in zip(values, magnitudes):
        v = complex(v)
        out.append(0j if abs(v) <= _CANCEL * mag else v)
    return _strip(out)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with complex coefficients, lowest degree first."""

    coeffs: tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(_as_complex(c) for c in self.coeffs))

    # construction -----------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "Polynomial":
        return cls((0,) * k + (c,))

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead=1.0) -> "Polynomial":
        p = cls.const(lead)
        for r in roots:
            p = p * cls((-complex(r), 1))
        return p

    # basic properties -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> complex:
        return self.coeffs[-1] if self.coeffs else 0j

    def scale_norm(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    # evaluation -------------------------------------------------------------
    def __call__(self, z) -> complex:
        acc = 0j
        z = complex(z)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros_like(z)
        return np.polyval(np.array(self.coeffs[::-1], dtype=complex), z)

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs))[1:])

    # arithmetic -------------------------------------------------------------
    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def _addsub(self, other: "Polynomial", sign: int) -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0j,) * (n - len(self.coeffs))
        b = other.coeffs + (0j,) * (n - len(other.coeffs))
        return Polynomial(_cancel((x + sign * y for x, y in zip(a, b)),
                                  (abs(x) + abs(y) for x, y in zip(a, b))))

    def __add__(self, other):
        return self._addsub(_poly(other), +1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._addsub(_poly(other), -1)

    def __rsub__(self, other):
        return _poly(other)._addsub(self, -1)

    def __mul__(self, other):
        other = _poly(other)
        if self.is_zero or other.is_zero:
            return Polynomial()
        a = np.array(self.coeffs, dtype=complex)
        b = np.array(other.coeffs, dtype=complex)
        return Polynomial(_cancel(np.convolve(a, b), np.convolve(np.abs(a), np.abs(b))))

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = complex(c)
        return Polynomial(tuple(c * x for x in self.coeffs))

    def monic(self) -> "Polynomial":
        if self.is_zero:
            return self
        lead = self.lead
        return Polynomial(tuple(x / lead for x in self.coeffs))

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Long division ``self = q*other + r`` with ``deg r < deg other``."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs) + 1
        if dq <= 0:
            return Polynomial(), self
        quot = [0j] * dq
        lead = other.lead
        for k in range(dq - 1, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quot[k] = c
            for j, b in enumerate(other.coeffs):
                rem[k + j] -= c * b
        return Polynomial(quot), Polynomial(rem[: len(other.coeffs) - 1])

    def chop(self, tol: float) -> "Polynomial":
        """Drop leading coefficients with magnitude <= tol."""
        coeffs = list(self.coeffs)
        while coeffs and abs(coeffs[-1]) <= tol:
            coeffs.pop()
        return Polynomial(coeffs)

    def roots(self) -> np.ndarray:
        """Roots via companion-matrix eigenvalues.

        Leading coefficients below 1e-14 of the largest are dropped first; they
        only carry roots beyond ~1e14, which would overflow the companion matrix.
        """
        p = self.chop(1e-14 * self.scale_norm())
        if p.degree < 1:
            return np.zeros(0, dtype=complex)
        c = np.array(p.coeffs[::-1], dtype=complex)
        return np.roots(c / np.max(np.abs(c)))

    # serialization ----------------------------------------------------------
    def to_json(self) -> list:
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        if not isinstance(obj, list):
            raise ConfigError("polynomial must be a JSON array of [re, im] pairs")
        try:
            coeffs = [_as_complex(c) for c in obj]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad polynomial coefficient: {exc}") from None
        p = cls(coeffs)
        if p.degree > MAX_DEGREE:
            raise ConfigError(f"polynomial degree {p.degree} exceeds {MAX_DEGREE}")
        return p


def _poly(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    return Polynomial.const(x)


def poly_gcd(a: Polynomial, b: Polynomial, tol: float = GCD_TOL) -> Polynomial:
    """Monic approximate gcd by the Euclidean algorithm.

    Every dividend and divisor is scaled to unit largest coefficient, and a
    remainder coefficient below ``tol`` counts as zero. Scaling by the largest
    coefficient (not the leading one) keeps the zero test meaningful when a
    leading coefficient is small.
    """
    def unit(p: Polynomial) -> Polynomial:
        norm = p.scale_norm()
        return Polynomial(tuple(c / norm for c in p.coeffs)).chop(tol)

    if a.is_zero:
        return b.monic()
    if b.is_zero:
        return a.monic()
    a, b = unit(a), unit(b)
    if a.degree < b.degree:
        a, b = b, a
    while b.degree > 0:
        _, r = a.divmod(b)
        r = r.chop(tol)
        if r.is_zero:
            return b.monic()
        a, b = b, unit(r)
    # b is a nonzero constant: coprime
    return Polynomial((1,))


def _multiplicity(roots: np.ndarray, r: complex) -> int:
    return int(np.sum(np.abs(roots - r) < 1e-3 * (1 + abs(r))))


def _newton(p: Polynomial, r: complex) -> complex:
    dp = p.derivative()
    for _ in range(30):
        d = dp(r)
        if d == 0:
            break
        step = p(r) / d
        r -= step
        if abs(step) <= 4 * np.finfo(float).eps * (1 + abs(r)):
            break
    return r


def _polish_on(p: Polynomial, roots: np.ndarray, r0: complex) -> tuple[complex, int]:
    """Newton-refine ``r0`` as a root of ``p``; a k-fold root is refined on the
    (k-1)-th derivative, where it is simple."""
    k = max(1, _multiplicity(roots, r0))
    q = p
    for _ in range(k - 1):
        q = q.derivative()
    return _newton(q, r0), k


def _common_factor(g: Polynomial, num: Polynomial, den: Polynomial) -> Polynomial:
    """Sharpen the Euclid gcd ``g`` into the product of the truly shared roots.

    Euclid leaves errors around GCD_TOL in ``g`` and can report spurious factors
    when coefficient scales differ widely. Each root of ``g`` is refined
    separately on ``num`` and on ``den``; it is cancelled only if both refined
    roots agree within ROOT_MATCH_TOL.
    """
    num_roots, den_roots = num.roots(), den.roots()
    shared = []
    for r0 in g.roots():
        r0 = complex(r0)
        rn, kn = _polish_on(num, num_roots, r0)
        rd, kd = _polish_on(den, den_roots, r0)
        if abs(rn - rd) <= ROOT_MATCH_TOL * (1 + abs(r0)):
            shared.append(rn if kn < kd else rd)
    return Polynomial.from_roots(shared)


def _shared(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic product of the roots ``p`` and ``q`` share (1 when coprime)."""
    if p.degree < 1 or q.degree < 1:
        return Polynomial((1,))
    g = poly_gcd(p, q)
    if g.degree < 1:
        return g
    return _common_factor(g, p, q)


def poly_eval(p: Polynomial, z) -> complex:
    """Horner evaluation of ``p`` at ``z``."""
    return p(z)


def poly_derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


@dataclass(frozen=True)
class ComplexRational:
    """Reduced quotient ``num/den`` with ``den`` monic."""

    num: Polynomial
    den: Polynomial = Polynomial((1,))

    def __post_init__(self):
        num, den = _poly(self.num), _poly(self.den)
        if den.is_zero:
            raise ZeroDivisionError("rational with zero denominator")
        if num.is_zero:
            num, den = Polynomial(), Polynomial((1,))
        elif den.degree > 0:
            g = _shared(num, den)
            if g.degree > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        lead = den.lead
        if lead != 1:
            num = Polynomial(tuple(c / lead for c in num.coeffs))
            den = Polynomial(tuple(c / lead for c in den.coeffs))
            # force an exactly monic leading coefficient
            den = Polynomial(den.coeffs[:-1] + (1 + 0j,))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def const(cls, c) -> "ComplexRational":
        return cls(Polynomial.const(c))

    @classmethod
    def z(cls) -> "ComplexRational":
        return cls(Polynomial((0, 1)))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __call__(self, z) -> complex:
        return rat_eval(self, z)

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; no pole check."""
        return self.num.eval_array(z) / self.den.eval_array(z)

    def derivative(self) -> "ComplexRational":
        return rat_derivative(self)

    def poles(self) -> np.ndarray:
        return self.den.roots()

    def zeros(self) -> np.ndarray:
        return self.num.roots()

    def scale(self, c) -> "ComplexRational":
        return ComplexRational(self.num.scale(c), self.den)

    def __add__(self, other):
        return rat_add(self, _rat(other))

    __radd__ = __add__

    def __sub__(self, other):
        return rat_sub(self, _rat(other))

    def __rsub__(self, other):
        return rat_sub(_rat(other), self)

    def __mul__(self, other):
        return rat_mul(self, _rat(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ComplexRational(-self.num, self.den)

    def __truediv__(self, other):
        other = _rat(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational")
        return self * ComplexRational(other.den, other.num)

    def __pow__(self, k: int):
        if k < 0:
            return ComplexRational.const(1) / self ** (-k)
        out = ComplexRational.const(1)
        for _ in range(k):
            out = out * self
        return out

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj) -> "ComplexRational":
        if isinstance(obj, list):
            return cls(Polynomial.from_json(obj))
        if not isinstance(obj, dict) or "num" not in obj:
            raise ConfigError('rational must be {"num": [...], "den": [...]}')
        den = Polynomial.from_json(obj.get("den", [[1.0, 0.0]]))
        if den.is_zero:
            raise ConfigError("rational with zero denominator")
        return cls(Polynomial.from_json(obj["num"]), den)


def _rat(x) -> ComplexRational:
    if isinstance(x, ComplexRational):
        return x
    return ComplexRational(_poly(x))


def rat_eval(r: ComplexRational, z) -> complex:
    z = complex(z)
    n, d = r.num(z), r.den(z)
    if abs(d) < TAU_POLE * (1 + abs(n)):
        raise PoleError(f"evaluation at or near a pole: z={z}")
    return n / d


def rat_derivative(r: ComplexRational) -> ComplexRational:
    num = r.num.derivative() * r.den - r.num * r.den.derivative()
    return ComplexRational(num, r.den * r.den)


def rat_add(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    if a.den == b.den:
        return ComplexRational(a.num + b.num, a.den)
    # over the lcm of the denominators, which keeps root multiplicities low
    g = _shared(a.den, b.den)
    da, db = a.den.divmod(g)[0], b.den.divmod(g)[0]
    return ComplexRational(a.num * db + b.num * da, a.den * db)


def rat_sub(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    return rat_add(a, -b)


def rat_mul(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    # cross-cancel before multiplying
    g1, g2 = _shared(a.num, b.den), _shared(b.num, a.den)
    num = a.num.divmod(g1)[0] * b.num.divmod(g2)[0]
    den = a.den.divmod(g2)[0] * b.den.divmod(g1)[0]
    return ComplexRational(num, den)


def rat_is_zero(r: ComplexRational) -> bool:
    return r.is_zero


def roots_in_disk(p: Polynomial, center: complex, radius: float,
                  slack: float = ROOT_MATCH_TOL) -> list[complex]:
    """Roots of ``p`` in the closed disk, sorted by (re, im)."""
    out = [complex(r) for r in p.roots() if abs(r - center) <= radius + slack]
    return sorted(out, key=lambda w: (round(w.real, 12), round(w.imag, 12)))
