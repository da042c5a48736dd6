"""Witt vectors over a frame: ghost map, ghost inversion and the ring operations.

Every operation works the same way.  Coordinates are lifted to Z (or to
integer polynomials), pushed through the ghost map, combined there
componentwise, and pulled back by solving the triangular ghost system in
size order with checked exact division.  Modular results are then reduced.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .errors import FrameMismatch, ModulusMismatch, NonIntegral, NotAUnit, NotDownClosed, TorsionRing
from .exactmath import MPoly, Var, poly_exact_div_int, poly_lift
from .frame import Frame


@dataclass(frozen=True)
class CoeffRing:
    """Z, Z/m, Z[vars] or (Z/m)[vars].  Elements are ints or MPoly values."""

    modulus: int | None = None
    poly: bool = False

    def __post_init__(self):
        if self.modulus is not None and self.modulus < 2:
            raise ValueError("modulus must be at least 2")

    @property
    def tag(self) -> str:
        base = "Z" if self.modulus is None else f"Z/{self.modulus}"
        return base + "[x]" if self.poly else base

    @classmethod
    def from_tag(cls, tag: str) -> "CoeffRing":
        text = tag.strip()
        poly = text.endswith("[x]")
        if poly:
            text = text[:-3]
        if text == "Z":
            return cls(None, poly)
        if text.startswith("F") and text[1:].isdigit():
            return cls(int(text[1:]), poly)
        if text.startswith("Z/") and text[2:].isdigit():
            return cls(int(text[2:]), poly)
        raise ValueError(f"unknown ring tag {tag!r}")

    @property
    def characteristic(self) -> int:
        return self.modulus or 0

    def zero(self):
        return MPoly.const(0, self.modulus) if self.poly else 0

    def one(self):
        return MPoly.const(1, self.modulus) if self.poly else 1

    def coerce(self, x):
        if self.poly:
            if isinstance(x, MPoly):
                if x.modulus != self.modulus:
                    raise ModulusMismatch(f"polynomial mod {x.modulus} in ring {self.tag}")
                return x
            return MPoly.const(int(x), self.modulus)
        if isinstance(x, MPoly):
            if not x.is_constant():
                raise TypeError("non-constant polynomial in a scalar ring")
            x = x.constant_value()
        x = int(x)
        return x % self.modulus if self.modulus else x

    def lift(self, x):
        """Canonical preimage over Z (or Z[vars])."""
        if self.poly:
            return poly_lift(x) if self.modulus else x
        return x

    def reduce(self, x):
        """Image of an integer (or integer polynomial) in this ring."""
        if self.poly:
            if not isinstance(x, MPoly):
                return MPoly.const(x, self.modulus)
            return MPoly(dict(x.terms), self.modulus) if self.modulus else x
        return x % self.modulus if self.modulus else x

    @property
    def integral(self) -> "CoeffRing":
        return CoeffRing(None, self.poly)


ZZ = CoeffRing()


def IntegersMod(m: int) -> CoeffRing:
    return CoeffRing(m)


def PolyZ() -> CoeffRing:
    return CoeffRing(None, True)


def PolyMod(m: int) -> CoeffRing:
    return CoeffRing(m, True)


def _nonzero(x) -> bool:
    return bool(x.terms) if isinstance(x, MPoly) else bool(x)


# -- the two triangular passes


class _Powers:
    """Memoized a_u^e where e runs over divisors of frame sizes."""

    def __init__(self, values, p):
        self.values = values
        self.p = p
        self.cache: dict = {}

    def get(self, u, e):
        if e == 1:
            return self.values[u]
        key = (u, e)
        hit = self.cache.get(key)
        if hit is None:
            p = self.p
            if p and e % p == 0:
                hit = self.get(u, e // p) ** p
            else:
                hit = self.values[u] ** e
            self.cache[key] = hit
        return hit


def witt_components(frame: Frame, coords: Sequence) -> list:
    """W_T(a) = sum over U <= T of phi_T(U) a_U^(#T/#U), over Z."""
    pw = _Powers(coords, frame.prime)
    out = []
    for t in range(len(frame)):
        acc = frame.self_phi[t] * coords[t]
        for u, ph, e in frame.below[t]:
            if _nonzero(coords[u]):
                acc = acc + ph * pw.get(u, e)
        out.append(acc)
    return out


def _exact_div(x, c):
    if isinstance(x, MPoly):
        return poly_exact_div_int(x, c)
    q, r = divmod(x, c)
    if r:
        raise NonIntegral(c, None, x)
    return q


def solve_ghost(frame: Frame, ghosts: Sequence, divide=_exact_div) -> list:
    """Invert the ghost map in size order: a_T = (b_T - lower terms) / phi_T(T)."""
    n = len(frame)
    coords: list = [None] * n
    pw = _Powers(coords, frame.prime)
    for t in range(n):
        acc = ghosts[t]
        for u, ph, e in frame.below[t]:
            if _nonzero(coords[u]):
                acc = acc - ph * pw.get(u, e)
        coords[t] = divide(acc, frame.self_phi[t])
    return coords


# -- vectors


class WittVector:
    """Element of the truncated Witt-Burnside ring: one coordinate per frame node."""

    __slots__ = ("frame", "ring", "coords", "_hash")

    def __init__(self, frame: Frame, ring: CoeffRing, coords: Iterable):
        coords = tuple(ring.coerce(c) for c in coords)
        if len(coords) != len(frame):
            raise ValueError(f"expected {len(frame)} coordinates, got {len(coords)}")
        set_ = object.__setattr__
        set_(self, "frame", frame)
        set_(self, "ring", ring)
        set_(self, "coords", coords)
        set_(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("WittVector is immutable")

    @classmethod
    def zero(cls, frame, ring=ZZ):
        return cls(frame, ring, [ring.zero()] * len(frame))

    @classmethod
    def one(cls, frame, ring=ZZ):
        return teichmuller(frame, ring, frame.bottom, ring.one())

    def __getitem__(self, t):
        return self.coords[t]

    def __len__(self):
        return len(self.coords)

    @property
    def support(self) -> list[int]:
        return [t for t, c in enumerate(self.coords) if _nonzero(c)]

    def is_zero(self) -> bool:
        return not self.support

    def _check(self, other):
        if not isinstance(other, WittVector):
            raise TypeError("expected a WittVector")
        if other.frame != self.frame:
            raise FrameMismatch("vectors live on different frames")
        if other.ring != self.ring:
            raise ModulusMismatch(f"rings {self.ring.tag} and {other.ring.tag} differ")

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        if isinstance(other, int):
            return int_scalar(other, self)
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return int_scalar(other, self)
        return NotImplemented

    def __pow__(self, e: int):
        result = WittVector.one(self.frame, self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.frame == other.frame and self.ring == other.ring and self.coords == other.coords

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.ring, self.coords)))
        return self._hash

    def __repr__(self):
        return f"WittVector[{self.ring.tag}]({', '.join(map(str, self.coords))})"

    def lifted(self) -> list:
        return [self.ring.lift(c) for c in self.coords]


@dataclass(frozen=True)
class GhostVector:
    frame: Frame
    ring: CoeffRing
    components: tuple

    def __add__(self, other):
        return GhostVector(self.frame, self.ring,
                           tuple(self.ring.reduce(a + b) for a, b in zip(self.components, other.components)))

    def __mul__(self, other):
        return GhostVector(self.frame, self.ring,
                           tuple(self.ring.reduce(a * b) for a, b in zip(self.components, other.components)))


def _from_integral(frame, ring, coords) -> WittVector:
    v = WittVector.__new__(WittVector)
    set_ = object.__setattr__
    set_(v, "frame", frame)
    set_(v, "ring", ring)
    set_(v, "coords", tuple(ring.reduce(c) for c in coords))
    set_(v, "_hash", None)
    return v


def _combine(a: WittVector, b: WittVector, op) -> WittVector:
    a._check(b)
    ga = witt_components(a.frame, a.lifted())
    gb = witt_components(b.frame, b.lifted())
    target = [op(x, y) for x, y in zip(ga, gb)]
    return _from_integral(a.frame, a.ring, solve_ghost(a.frame, target))


def add(a: WittVector, b: WittVector) -> WittVector:
    return _combine(a, b, lambda x, y: x + y)


def sub(a: WittVector, b: WittVector) -> WittVector:
    return _combine(a, b, lambda x, y: x - y)


def mul(a: WittVector, b: WittVector) -> WittVector:
    return _combine(a, b, lambda x, y: x * y)


def neg(a: WittVector) -> WittVector:
    ga = witt_components(a.frame, a.lifted())
    return _from_integral(a.frame, a.ring, solve_ghost(a.frame, [-x for x in ga]))


def int_scalar(n: int, a: WittVector) -> WittVector:
    """n * a, computed from n times the ghost components."""
    ga = witt_components(a.frame, a.lifted())
    return _from_integral(a.frame, a.ring, solve_ghost(a.frame, [n * x for x in ga]))


def teichmuller(frame: Frame, ring: CoeffRing, t: int, c) -> WittVector:
    coords = [ring.zero()] * len(frame)
    coords[t] = ring.coerce(c)
    return WittVector(frame, ring, coords)


def ghost(a: WittVector) -> GhostVector:
    comps = witt_components(a.frame, a.lifted())
    return GhostVector(a.frame, a.ring, tuple(a.ring.reduce(x) for x in comps))


def ghost_inverse(b: GhostVector) -> WittVector:
    """The unique a with ghost(a) = b.

    Over Z and Z[vars] this raises NonIntegral when b has no preimage.  Over
    Z/m it works only when m is prime to every phi_T(T).
    """
    frame, ring = b.frame, b.ring
    if ring.modulus is None:
        return _from_integral(frame, ring, solve_ghost(frame, list(b.components)))
    m = ring.modulus
    if any(gcd(m, ph) != 1 for ph in frame.self_phi):
        raise TorsionRing(f"Z/{m} has torsion for some phi_T(T) of this frame")

    def divide(x, c):
        return ring.reduce(ring.lift(ring.reduce(x)) * pow(c, -1, m))

    lifted = [ring.lift(x) for x in b.components]
    return _from_integral(frame, ring, solve_ghost(frame, lifted, divide))


def project(a: WittVector, target) -> WittVector:
    """Restrict to a down-closed subframe (a Frame made by ``subframe``) or node set."""
    if isinstance(target, Frame):
        if target.parent != a.frame or target.embedding is None:
            raise NotDownClosed("target is not a subframe of the vector's frame")
        sub_frame = target
    else:
        sub_frame = a.frame.subframe(target)
    return WittVector(sub_frame, a.ring, [a.coords[j] for j in sub_frame.embedding])


# -- ideals


@dataclass(frozen=True)
class In:
    """I_n: vectors vanishing at every node of size < n."""

    n: int


@dataclass(frozen=True)
class KN:
    """K_N: vectors vanishing at every node below G/N; ``node`` is the id of G/N."""

    node: int


def ideal_nodes(frame: Frame, ideal) -> list[int]:
    """Nodes whose coordinates must vanish for membership."""
    if isinstance(ideal, In):
        return [t for t in range(len(frame)) if frame.sizes[t] < ideal.n]
    if isinstance(ideal, KN):
        return list(frame.downset(ideal.node))
    raise TypeError(f"unknown ideal {ideal!r}")


def ideal_membership(a: WittVector, ideal) -> bool:
    return all(not _nonzero(a.coords[t]) for t in ideal_nodes(a.frame, ideal))


def congruent(a: WittVector, b: WittVector, ideal) -> bool:
    return ideal_membership(a - b, ideal)


def invert_unit(a: WittVector) -> WittVector:
    """Inverse of a unit over F_p, as w * sum_k (1 - w a)^k with w = omega_0(a_0^-1)."""
    frame, ring = a.frame, a.ring
    p = frame.prime
    if ring.modulus is None or ring.modulus != p:
        raise TorsionRing("unit inversion needs coefficients in F_p for the frame's prime p")
    a0 = a.coords[frame.bottom]
    if isinstance(a0, MPoly):
        if not a0.is_constant():
            raise NotAUnit("bottom coordinate is not a constant")
        a0 = a0.constant_value()
    if a0 % p == 0:
        raise NotAUnit("bottom coordinate is not invertible")
    w = teichmuller(frame, ring, frame.bottom, pow(a0, -1, p))
    one = WittVector.one(frame, ring)
    u = one - w * a
    total = one
    power = u
    while not power.is_zero():
        total = total + power
        power = power * u
    return w * total


# -- convenient constructors


def random_vector(frame: Frame, ring: CoeffRing, rng: random.Random, *, zero_nodes=(), support=None,
                  bound: int = 5, density: float = 1.0) -> WittVector:
    """Random coordinates: uniform in Z/m, or in [-bound, bound] over Z."""
    zero = set(zero_nodes)
    allowed = set(range(len(frame))) if support is None else set(support)
    coords = []
    for t in range(len(frame)):
        if t in zero or t not in allowed or rng.random() >= density:
            coords.append(0)
        elif ring.modulus:
            coords.append(rng.randrange(ring.modulus))
        else:
            coords.append(rng.randint(-bound, bound))
    return WittVector(frame, ring, coords)


def generic_vector(frame: Frame, role: str = "X", family: int = 0, zero_nodes=(), modulus=None) -> WittVector:
    """The vector (X_U) of independent variables, with chosen coordinates set to 0."""
    zero = set(zero_nodes)
    ring = CoeffRing(modulus, True)
    coords = [MPoly.const(0, modulus) if t in zero else MPoly.var(Var(role, t, family), modulus)
              for t in range(len(frame))]
    return WittVector(frame, ring, coords)
