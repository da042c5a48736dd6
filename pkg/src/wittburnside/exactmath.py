"""Sparse multivariate polynomials over Z and Z/m with exact integer division.

Monomials are packed into a single Python int: every variable gets a fixed
32-bit field, assigned the first time the variable is seen in the process.
Multiplying monomials is then integer addition, which keeps the hot loop of
the Witt recursions cheap.  The packing is an internal detail; everything
public (rendering, JSON, iteration) is keyed by ``Var`` and sorted
deterministically.
"""

from __future__ import annotations

import re
import threading
from typing import Iterable, Mapping, NamedTuple

from .errors import ModulusMismatch, NonIntegral, UnboundVariable

FIELD_BITS = 32
FIELD_MASK = (1 << FIELD_BITS) - 1
EXPONENT_LIMIT = 1 << (FIELD_BITS - 1)


class Var(NamedTuple):
    """Variable id: a role letter, the frame node it belongs to, and a family index.

    ``Var("X", 3)`` renders as ``X_3``; ``Var("X", 3, 2)`` as ``X2_3``.
    """

    role: str
    node: int
    family: int = 0

    def __str__(self):
        fam = str(self.family) if self.family else ""
        return f"{self.role}{fam}_{self.node}"

    @classmethod
    def parse(cls, text: str) -> "Var":
        m = _VAR_RE.fullmatch(text.strip())
        if not m:
            raise ValueError(f"not a variable id: {text!r}")
        role, fam, node = m.groups()
        return cls(role, int(node), int(fam) if fam else 0)


_VAR_RE = re.compile(r"([A-Za-z]+?)(\d*)_(\d+)")


class _Registry:
    def __init__(self):
        self.index: dict[Var, int] = {}
        self.vars: list[Var] = []
        self.lock = threading.Lock()

    def shift(self, v: Var) -> int:
        i = self.index.get(v)
        if i is None:
            with self.lock:
                i = self.index.get(v)
                if i is None:
                    i = len(self.vars)
                    self.vars.append(v)
                    self.index[v] = i
        return i * FIELD_BITS


_REG = _Registry()


def pack(exps: Mapping[Var, int]) -> int:
    key = 0
    for v, e in exps.items():
        if e < 0:
            raise ValueError("negative exponent")
        if e >= EXPONENT_LIMIT:
            raise OverflowError("exponent too large")
        if e:
            key += e << _REG.shift(v)
    return key


def unpack(key: int) -> dict[Var, int]:
    out = {}
    i = 0
    while key:
        e = key & FIELD_MASK
        if e:
            out[_REG.vars[i]] = e
        key >>= FIELD_BITS
        i += 1
    return out


def _clean(terms: dict, modulus):
    if modulus is None:
        return {k: c for k, c in terms.items() if c}
    out = {}
    for k, c in terms.items():
        c %= modulus
        if c:
            out[k] = c
    return out


class MPoly:
    """Immutable sparse polynomial with integer coefficients, optionally mod m.

    Build them with ``MPoly.const``, ``MPoly.var`` or ``MPoly.from_dict``;
    the arithmetic operators accept plain ints on either side.
    """

    __slots__ = ("terms", "modulus", "_hash")

    def __init__(self, terms: dict | None = None, modulus: int | None = None, _clean_done=False):
        if modulus is not None and modulus < 1:
            raise ValueError("modulus must be positive")
        terms = terms or {}
        self.terms = terms if _clean_done else _clean(terms, modulus)
        self.modulus = modulus
        self._hash = None

    @classmethod
    def const(cls, c: int, modulus=None) -> "MPoly":
        return cls({0: c} if c else {}, modulus)

    @classmethod
    def var(cls, v: Var, modulus=None) -> "MPoly":
        return cls({pack({v: 1}): 1}, modulus)

    @classmethod
    def from_dict(cls, mapping: Mapping, modulus=None) -> "MPoly":
        """From {monomial: coef} where a monomial is a {Var: exp} mapping or a tuple of pairs."""
        terms: dict[int, int] = {}
        for mono, c in mapping.items():
            k = pack(dict(mono))
            terms[k] = terms.get(k, 0) + c
        return cls(terms, modulus)

    # -- basic queries

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(0, 0)

    def __len__(self):
        return len(self.terms)

    def variables(self) -> list[Var]:
        seen: set[Var] = set()
        for k in self.terms:
            seen.update(unpack(k))
        return sorted(seen)

    def coefficient(self, mono: Mapping[Var, int]) -> int:
        return self.terms.get(pack(dict(mono)), 0)

    def items(self) -> list[tuple[dict[Var, int], int]]:
        """(monomial, coefficient) pairs in graded-lex order."""
        pairs = [(unpack(k), c) for k, c in self.terms.items()]
        order = sorted({v for m, _ in pairs for v in m})
        pairs.sort(key=lambda mc: _grlex_key(mc[0], order))
        return pairs

    def weighted_degrees(self, weights: Mapping[Var, int]) -> set[int]:
        out = set()
        for k in self.terms:
            out.add(sum(weights[v] * e for v, e in unpack(k).items()))
        return out

    # -- arithmetic

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"moduli {self.modulus} and {other.modulus} differ")
            return other
        if isinstance(other, int):
            return MPoly.const(other, self.modulus)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return MPoly({k: -c for k, c in self.terms.items()}, self.modulus)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, -other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(other, -self)

    def __mul__(self, other):
        if isinstance(other, int):
            return scale(self, other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return poly_pow(self, e)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_constant() and self.constant_value() == (
                other if self.modulus is None else other % self.modulus)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.modulus == other.modulus and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.modulus, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        suffix = "" if self.modulus is None else f" mod {self.modulus}"
        return f"MPoly({self.to_text()}{suffix})"

    def __str__(self):
        return self.to_text()

    # -- rendering

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for mono, c in self.items():
            body = "*".join(str(v) if e == 1 else f"{v}^{e}" for v, e in sorted(mono.items()))
            mag = abs(c)
            if not body:
                text = str(mag)
            elif mag == 1:
                text = body
            else:
                text = f"{mag}*{body}"
            if not pieces:
                pieces.append(text if c > 0 else "-" + text)
            else:
                pieces.append(("+ " if c > 0 else "- ") + text)
        return " ".join(pieces)

    def to_json(self) -> dict:
        pairs = self.items()
        order = sorted({v for m, _ in pairs for v in m})
        return {
            "modulus": None if self.modulus is None else str(self.modulus),
            "vars": [str(v) for v in order],
            "terms": [{"exps": [m.get(v, 0) for v in order], "coef": str(c)} for m, c in pairs],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MPoly":
        order = [Var.parse(s) for s in data["vars"]]
        modulus = data.get("modulus")
        mapping = {}
        for t in data["terms"]:
            mono = tuple((v, e) for v, e in zip(order, t["exps"]) if e)
            mapping[mono] = mapping.get(mono, 0) + int(t["coef"])
        return cls.from_dict(mapping, None if modulus is None else int(modulus))


def _grlex_key(mono: Mapping[Var, int], order: list[Var]):
    exps = [mono.get(v, 0) for v in order]
    return (-sum(exps), [-e for e in exps])


def _check_same(f: MPoly, g: MPoly):
    if f.modulus != g.modulus:
        raise ModulusMismatch(f"moduli {f.modulus} and {g.modulus} differ")


def poly_add(f: MPoly, g: MPoly) -> MPoly:
    _check_same(f, g)
    if len(f.terms) < len(g.terms):
        f, g = g, f
    out = dict(f.terms)
    get = out.get
    for k, c in g.terms.items():
        out[k] = get(k, 0) + c
    return MPoly(out, f.modulus)


def poly_sub(f: MPoly, g: MPoly) -> MPoly:
    return poly_add(f, -g)


def scale(f: MPoly, c: int) -> MPoly:
    if not c:
        return MPoly({}, f.modulus)
    return MPoly({k: v * c for k, v in f.terms.items()}, f.modulus)


def poly_mul(f: MPoly, g: MPoly) -> MPoly:
    _check_same(f, g)
    if f is g:
        return _square(f)
    a, b = f.terms, g.terms
    if len(a) < len(b):
        a, b = b, a
    out: dict[int, int] = {}
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return MPoly(out, f.modulus)


def _square(f: MPoly) -> MPoly:
    items = list(f.terms.items())
    out: dict[int, int] = {}
    get = out.get
    for i, (ki, ci) in enumerate(items):
        k = ki + ki
        out[k] = get(k, 0) + ci * ci
        twice = 2 * ci
        for kj, cj in items[i + 1:]:
            k = ki + kj
            out[k] = get(k, 0) + twice * cj
    return MPoly(out, f.modulus)


def _max_exponent(f: MPoly) -> int:
    best = 0
    for k in f.terms:
        while k:
            e = k & FIELD_MASK
            if e > best:
                best = e
            k >>= FIELD_BITS
    return best


def poly_pow(f: MPoly, e: int) -> MPoly:
    if e < 0:
        raise ValueError("negative exponent")
    if e == 0:
        return MPoly.const(1, f.modulus)
    if len(f.terms) == 1:
        (k, c), = f.terms.items()
        if _max_exponent(f) * e >= EXPONENT_LIMIT:
            raise OverflowError("exponent too large")
        c = pow(c, e, f.modulus) if f.modulus else c ** e
        return MPoly({k * e: c}, f.modulus)
    if _max_exponent(f) * e >= EXPONENT_LIMIT:
        raise OverflowError("exponent too large")
    result = None
    base = f
    while True:
        if e & 1:
            result = base if result is None else poly_mul(result, base)
        e >>= 1
        if not e:
            return result
        base = _square(base)


def poly_exact_div_int(f: MPoly, c: int) -> MPoly:
    """Return q with c*q == f, raising NonIntegral when some coefficient is not divisible."""
    if f.modulus is not None:
        raise ModulusMismatch("exact division needs a polynomial over Z")
    if c == 0:
        raise ZeroDivisionError("division by zero")
    if c == 1:
        return f
    out = {}
    for k, v in f.terms.items():
        q, r = divmod(v, c)
        if r:
            raise NonIntegral(c, unpack(k), v)
        out[k] = q
    return MPoly(out, None, _clean_done=True)


def poly_reduce_mod(f: MPoly, m: int) -> MPoly:
    if m < 2:
        raise ValueError("modulus must be at least 2")
    if f.modulus is not None and f.modulus % m:
        raise ModulusMismatch(f"cannot reduce mod {f.modulus} to mod {m}")
    return MPoly(dict(f.terms), m)


def poly_lift(f: MPoly) -> MPoly:
    """Same coefficients, viewed over Z (canonical representatives when modular)."""
    return MPoly(dict(f.terms), None, _clean_done=True)


def poly_substitute(f: MPoly, assignment: Mapping, modulus="inherit") -> MPoly | int:
    """Substitute polynomials or ints for variables.

    When every image is an int the result is an int (reduced mod the
    polynomial's modulus if it has one); otherwise an MPoly whose modulus is
    that of the images.
    """
    images = {}
    all_int = True
    for v, val in assignment.items():
        images[v] = val
        if isinstance(val, MPoly):
            all_int = False
    mod = f.modulus if modulus == "inherit" else modulus
    if all_int:
        total = 0
        cache: dict = {}
        for k, c in f.terms.items():
            term = c
            for v, e in unpack(k).items():
                if v not in images:
                    raise UnboundVariable(v)
                key = (v, e)
                val = cache.get(key)
                if val is None:
                    val = pow(images[v], e, mod) if mod else images[v] ** e
                    cache[key] = val
                term *= val
            total += term
        return total % mod if mod else total
    poly_mod = None
    for val in images.values():
        if isinstance(val, MPoly):
            poly_mod = val.modulus
            break
    total = MPoly({}, poly_mod)
    cache = {}
    for k, c in f.terms.items():
        term = MPoly.const(c, poly_mod)
        for v, e in unpack(k).items():
            if v not in images:
                raise UnboundVariable(v)
            key = (v, e)
            val = cache.get(key)
            if val is None:
                base = images[v]
                if not isinstance(base, MPoly):
                    base = MPoly.const(base, poly_mod)
                val = poly_pow(base, e)
                cache[key] = val
            term = poly_mul(term, val)
        total = poly_add(total, term)
    return total


def partial_substitute(f: MPoly, assignment: Mapping[Var, int]) -> MPoly:
    """Substitute integer constants for some variables, leaving the rest symbolic."""
    out: dict[int, int] = {}
    mod = f.modulus
    for k, c in f.terms.items():
        mono = unpack(k)
        keep = {}
        for v, e in mono.items():
            if v in assignment:
                c *= pow(assignment[v], e, mod) if mod else assignment[v] ** e
            else:
                keep[v] = e
        if c:
            nk = pack(keep)
            out[nk] = out.get(nk, 0) + c
    return MPoly(out, mod)


def variables_of(polys: Iterable[MPoly]) -> list[Var]:
    seen: set[Var] = set()
    for f in polys:
        seen.update(f.variables())
    return sorted(seen)
