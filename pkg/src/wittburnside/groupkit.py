"""Finite p-groups, their subgroups in canonical form, conjugacy and quotient invariants.

Three kinds of group are supported:

* ``AbelianP(p, exponents)`` is Z/p^e1 x ... x Z/p^ed.  A subgroup H is the
  image of a lattice L with diag(p^ei) Z^d <= L <= Z^d, stored as the column
  Hermite normal form of L: upper triangular, positive p-power diagonal,
  entries right of the diagonal reduced into [0, h_ii).
* ``Dihedral2(n)`` is the dihedral group of order 2^n with closed-form
  subgroups <r^d> and <r^d, r^i s>.
* ``CayleyTable`` is any finite group given by its table; subgroups are
  found by closure and stored as element sets.

Elements are encoded as integers: mixed radix coordinates for abelian groups,
a + N*b for r^a s^b in the dihedral group of rotation order N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import prod

import numpy as np

from .errors import InvalidGroup, NonAbelian, OrderCapExceeded

ABELIAN_ORDER_CAP = 2 ** 12
CAYLEY_ORDER_CAP = 2 ** 10
ASSOCIATIVITY_CHECK_LIMIT = 512


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_power_base(n: int):
    """Return p if n is a power of the prime p (n > 1), else None."""
    if n < 2:
        return None
    p = 2
    while n % p:
        p += 1
    while n % p == 0:
        n //= p
    return p if n == 1 else None


def p_exponent(n: int, p: int) -> int:
    k = 0
    while n % p == 0 and n > 1:
        n //= p
        k += 1
    if n != 1:
        raise ValueError(f"{n} is not a power of {p}")
    return k


# -- group specifications


@dataclass(frozen=True)
class AbelianP:
    p: int
    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if not is_prime(self.p):
            raise InvalidGroup(f"{self.p} is not prime")
        if not self.exponents or any(e < 1 for e in self.exponents):
            raise InvalidGroup("exponents must be a nonempty list of positive integers")

    @property
    def order(self) -> int:
        return self.p ** sum(self.exponents)

    @property
    def prime(self):
        return self.p

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def moduli(self) -> tuple:
        return tuple(self.p ** e for e in self.exponents)

    @property
    def truncation(self):
        """n when the group is (Z/p^n)^d, else None."""
        return self.exponents[0] if len(set(self.exponents)) == 1 else None

    def to_json(self):
        return {"type": "abelian", "p": self.p, "exponents": list(self.exponents)}


@dataclass(frozen=True)
class Dihedral2:
    """Dihedral group of order 2^n, generated by a rotation r of order 2^(n-1) and a flip s."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidGroup("dihedral 2-groups need n >= 2")

    @property
    def order(self) -> int:
        return 2 ** self.n

    @property
    def prime(self):
        return 2

    @property
    def rotations(self) -> int:
        return 2 ** (self.n - 1)

    truncation = None

    def to_json(self):
        return {"type": "dihedral", "n": self.n}


@dataclass(frozen=True)
class CayleyTable:
    table: tuple
    identity: int = 0
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(tuple(int(x) for x in row) for row in self.table))
        if self.check:
            _validate_table(self.table, self.identity)

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def prime(self):
        return prime_power_base(self.order)

    truncation = None

    def to_json(self):
        return {"type": "cayley", "order": self.order, "identity": self.identity,
                "table": [list(r) for r in self.table]}


def _validate_table(table, identity):
    n = len(table)
    if n == 0 or any(len(r) != n for r in table):
        raise InvalidGroup("table must be square and nonempty")
    if n > CAYLEY_ORDER_CAP:
        raise OrderCapExceeded(f"Cayley tables are capped at order {CAYLEY_ORDER_CAP}")
    t = np.array(table, dtype=np.int64)
    if t.min() < 0 or t.max() >= n:
        raise InvalidGroup("table entries out of range")
    if not 0 <= identity < n:
        raise InvalidGroup("identity index out of range")
    ar = np.arange(n)
    if not (np.array_equal(t[identity], ar) and np.array_equal(t[:, identity], ar)):
        raise InvalidGroup("identity row/column mismatch")
    # a latin square with an identity has two-sided inverses once associative
    if any(len(set(r)) != n for r in table) or any(len(set(t[:, j])) != n for j in range(n)):
        raise InvalidGroup("table is not a latin square, so inverses fail")
    if n <= ASSOCIATIVITY_CHECK_LIMIT:
        for a in range(n):
            # (a*b)*c versus a*(b*c) for all b, c at once
            if not np.array_equal(t[t[a]], t[a][t]):
                raise InvalidGroup(f"associativity fails for left factor {a}")


def spec_from_json(data) -> AbelianP | Dihedral2 | CayleyTable:
    kind = data.get("type")
    if kind == "abelian":
        return AbelianP(int(data["p"]), tuple(data["exponents"]))
    if kind == "dihedral":
        return Dihedral2(int(data["n"]))
    if kind == "cayley":
        return CayleyTable(tuple(tuple(r) for r in data["table"]), int(data.get("identity", 0)))
    raise ValueError(f"unknown group type {kind!r}")


# -- subgroup representations


@dataclass(frozen=True)
class HNF:
    matrix: tuple  # row-major, upper triangular

    def key(self):
        return tuple(x for row in self.matrix for x in row)

    @property
    def diagonal(self):
        return tuple(self.matrix[i][i] for i in range(len(self.matrix)))

    def column(self, j):
        return tuple(row[j] for row in self.matrix)

    def to_json(self):
        return {"hnf": [list(r) for r in self.matrix]}


@dataclass(frozen=True)
class DihedralSub:
    kind: str  # "rotation" or "mixed"
    d: int
    i: int = 0

    def key(self):
        return (0 if self.kind == "rotation" else 1, self.d, self.i)

    def to_json(self):
        out = {"kind": self.kind, "d": self.d}
        if self.kind == "mixed":
            out["i"] = self.i
        return out


@dataclass(frozen=True)
class ElementSet:
    elements: tuple

    def key(self):
        return (len(self.elements), self.elements)

    def to_json(self):
        return {"elements": list(self.elements)}


def subgroup_from_json(data):
    if "hnf" in data:
        return HNF(tuple(tuple(int(x) for x in r) for r in data["hnf"]))
    if "kind" in data:
        return DihedralSub(data["kind"], int(data["d"]), int(data.get("i", 0)))
    return ElementSet(tuple(sorted(int(x) for x in data["elements"])))


# -- element arithmetic


def _abelian_encode(spec: AbelianP, coords) -> int:
    idx, scale = 0, 1
    for x, m in zip(coords, spec.moduli):
        idx += (x % m) * scale
        scale *= m
    return idx


def _abelian_decode(spec: AbelianP, idx: int):
    out = []
    for m in spec.moduli:
        idx, x = divmod(idx, m)
        out.append(x)
    return tuple(out)


@lru_cache(maxsize=64)
def _ops(spec):
    """(multiply, inverse, identity) as plain functions on encoded elements."""
    if isinstance(spec, AbelianP):

        def mul(a, b):
            return _abelian_encode(spec, [x + y for x, y in zip(_abelian_decode(spec, a), _abelian_decode(spec, b))])

        def inv(a):
            return _abelian_encode(spec, [-x for x in _abelian_decode(spec, a)])

        return mul, inv, 0
    if isinstance(spec, Dihedral2):
        N = spec.rotations

        def mul(x, y):
            a1, b1 = x % N, x // N
            a2, b2 = y % N, y // N
            a = (a1 + (-a2 if b1 else a2)) % N
            return a + N * (b1 ^ b2)

        def inv(x):
            a, b = x % N, x // N
            return x if b else (-a) % N

        return mul, inv, 0
    table = spec.table
    ident = spec.identity
    inverse = [row.index(ident) for row in table]

    def mul(a, b):
        return table[a][b]

    def inv(a):
        return inverse[a]

    return mul, inv, ident


def multiply(spec, a: int, b: int) -> int:
    return _ops(spec)[0](a, b)


def inverse(spec, a: int) -> int:
    return _ops(spec)[1](a)


def cayley_table(spec) -> CayleyTable:
    """The Cayley table of any supported spec, used as a brute-force oracle."""
    if isinstance(spec, CayleyTable):
        return spec
    mul = _ops(spec)[0]
    n = spec.order
    return CayleyTable(tuple(tuple(mul(a, b) for b in range(n)) for a in range(n)), 0, check=False)


def _generate(spec, gens) -> frozenset:
    mul, _, ident = _ops(spec)
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(elems)


# -- lattice helpers for the abelian case


def _in_lattice(M, v) -> bool:
    """Is the integer vector v in the column span of the upper-triangular matrix M?"""
    v = list(v)
    d = len(M)
    for i in range(d - 1, -1, -1):
        h = M[i][i]
        if v[i] % h:
            return False
        c = v[i] // h
        if c:
            for r in range(i + 1):
                v[r] -= c * M[r][i]
    return True


def hnf_from_generators(spec: AbelianP, gens) -> HNF:
    """Canonical HNF of the subgroup generated by integer vectors (taken mod the group)."""
    d = spec.rank
    cols = [list(g) for g in gens]
    cols += [[m if r == j else 0 for r in range(d)] for j, m in enumerate(spec.moduli)]
    pivots: dict[int, list] = {}
    for r in range(d - 1, -1, -1):
        live = [c for c in cols if c[r] != 0]
        rest = [c for c in cols if c[r] == 0]
        while len(live) > 1:
            live.sort(key=lambda c: abs(c[r]))
            piv = live[0]
            nxt = [piv]
            for c in live[1:]:
                q = c[r] // piv[r]
                c = [x - q * y for x, y in zip(c, piv)]
                if c[r]:
                    nxt.append(c)
                else:
                    rest.append(c)
            live = nxt
        piv = live[0]
        if piv[r] < 0:
            piv = [-x for x in piv]
        pivots[r] = piv
        cols = rest
    M = [[pivots[j][i] for j in range(d)] for i in range(d)]
    for i in range(d - 1, -1, -1):
        h = M[i][i]
        for j in range(i + 1, d):
            q = M[i][j] // h
            if q:
                for r in range(i + 1):
                    M[r][j] -= q * M[r][i]
    return HNF(tuple(tuple(row) for row in M))


def _abelian_hnfs(spec: AbelianP, max_index=None):
    p, E, d = spec.p, spec.exponents, spec.rank
    moduli = spec.moduli
    positions = [(i, j) for j in range(d) for i in range(j)]
    out = []
    for ks in product(*(range(e + 1) for e in E)):
        if max_index is not None and p ** sum(ks) > max_index:
            continue
        h = [p ** k for k in ks]
        for offs in product(*(range(h[i]) for i, _ in positions)):
            M = [[0] * d for _ in range(d)]
            for i in range(d):
                M[i][i] = h[i]
            for (i, j), x in zip(positions, offs):
                M[i][j] = x
            if all(_in_lattice(M, [moduli[j] if r == j else 0 for r in range(d)]) for j in range(d)):
                out.append(HNF(tuple(tuple(r) for r in M)))
    return out


def _dihedral_subs(spec: Dihedral2):
    out = []
    for k in range(spec.n):
        d = 2 ** k
        out.append(DihedralSub("rotation", d))
        out.extend(DihedralSub("mixed", d, i) for i in range(d))
    return out


def _cayley_subs(spec, max_index=None):
    """Closure-based search: joins of cyclic subgroups until nothing new appears."""
    n = spec.order
    gens_of: dict[frozenset, tuple] = {}
    cyclic = {}
    for g in range(n):
        C = _generate(spec, [g])
        cyclic.setdefault(C, g)
    for C, g in cyclic.items():
        gens_of.setdefault(C, (g,))
    frontier = list(gens_of)
    while frontier:
        nxt = []
        for H in frontier:
            for C, g in cyclic.items():
                if C <= H:
                    continue
                J = _generate(spec, gens_of[H] + (g,))
                if J not in gens_of:
                    gens_of[J] = gens_of[H] + (g,)
                    nxt.append(J)
        frontier = nxt
    subs = [ElementSet(tuple(sorted(S))) for S in gens_of]
    if max_index is not None:
        subs = [S for S in subs if n // len(S.elements) <= max_index]
    return subs


def enumerate_subgroups(spec, max_index=None, order_cap=None):
    """All subgroups (of index at most max_index, if given), sorted by canonical key.

    The order cap guards the exhaustive search; with max_index set it bounds
    the index instead, since only that part of the lattice is visited.
    """
    bound = spec.order if max_index is None else max_index
    if isinstance(spec, AbelianP):
        cap = ABELIAN_ORDER_CAP if order_cap is None else order_cap
        if bound > cap:
            raise OrderCapExceeded(f"order/index {bound} exceeds cap {cap}")
        subs = _abelian_hnfs(spec, max_index)
    elif isinstance(spec, Dihedral2):
        cap = CAYLEY_ORDER_CAP if order_cap is None else order_cap
        if spec.order > cap:
            raise OrderCapExceeded(f"order {spec.order} exceeds cap {cap}")
        subs = _dihedral_subs(spec)
        if max_index is not None:
            subs = [H for H in subs if spec.order // subgroup_order(spec, H) <= max_index]
    else:
        cap = CAYLEY_ORDER_CAP if order_cap is None else order_cap
        if spec.order > cap:
            raise OrderCapExceeded(f"order {spec.order} exceeds cap {cap}")
        subs = _cayley_subs(spec, max_index)
    return sorted(subs, key=lambda H: H.key())


# -- subgroup queries


def subgroup_order(spec, H) -> int:
    if isinstance(H, HNF):
        return spec.order // prod(H.diagonal)
    if isinstance(H, DihedralSub):
        rot = spec.rotations // H.d
        return rot if H.kind == "rotation" else 2 * rot
    return len(H.elements)


def index(spec, H) -> int:
    return spec.order // subgroup_order(spec, H)


def generators(spec, H) -> tuple:
    """A small generating set of encoded elements."""
    if isinstance(H, HNF):
        gens = [_abelian_encode(spec, H.column(j)) for j in range(spec.rank)]
        return tuple(g for g in gens if g)
    if isinstance(H, DihedralSub):
        N = spec.rotations
        gens = [H.d % N] if H.d % N else []
        if H.kind == "mixed":
            gens.append(H.i + N)
        return tuple(gens)
    return _greedy_generators(spec, H.elements)


@lru_cache(maxsize=4096)
def _greedy_generators(spec, elements) -> tuple:
    target = frozenset(elements)
    gens: list[int] = []
    cur = _generate(spec, [])
    for x in elements:
        if x not in cur:
            gens.append(x)
            cur = _generate(spec, gens)
            if cur == target:
                break
    return tuple(gens)


@lru_cache(maxsize=8192)
def elements(spec, H) -> frozenset:
    if isinstance(H, HNF):
        return _generate(spec, generators(spec, H))
    if isinstance(H, DihedralSub):
        N = spec.rotations
        rot = {a for a in range(0, N, H.d)}
        out = set(rot)
        if H.kind == "mixed":
            out |= {a + N for a in range(N) if a % H.d == H.i}
        return frozenset(out)
    return frozenset(H.elements)


def contains(spec, H, K) -> bool:
    """True iff H is a subgroup of K."""
    if isinstance(H, HNF):
        return all(_in_lattice(K.matrix, H.column(j)) for j in range(spec.rank))
    if isinstance(H, DihedralSub):
        if K.kind == "rotation" and H.kind == "mixed":
            return False
        if H.d % K.d:
            return False
        return H.kind == "rotation" or H.i % K.d == K.i
    return set(H.elements) <= set(K.elements)


def conjugate(spec, g: int, S: frozenset) -> frozenset:
    mul, inv, _ = _ops(spec)
    gi = inv(g)
    return frozenset(mul(mul(g, x), gi) for x in S)


def _group_generators(spec):
    if isinstance(spec, AbelianP):
        return generators(spec, HNF(tuple(tuple(int(i == j) for j in range(spec.rank)) for i in range(spec.rank))))
    if isinstance(spec, Dihedral2):
        return (1 % spec.rotations, spec.rotations)
    return _greedy_generators(spec, tuple(range(spec.order)))


def conjugacy_classes(spec, subgroups=None):
    """[(representative, class size)] sorted by representative key.

    The representative is the member with the smallest canonical key.
    """
    subs = enumerate_subgroups(spec) if subgroups is None else list(subgroups)
    if isinstance(spec, AbelianP):
        return [(H, 1) for H in sorted(subs, key=lambda H: H.key())]
    by_set = {elements(spec, H): H for H in subs}
    gens = _group_generators(spec)
    seen: set = set()
    out = []
    for H in sorted(subs, key=lambda H: H.key()):
        S = elements(spec, H)
        if S in seen:
            continue
        orbit = {S}
        frontier = [S]
        while frontier:
            nxt = []
            for X in frontier:
                for g in gens:
                    Y = conjugate(spec, g, X)
                    if Y not in orbit:
                        orbit.add(Y)
                        nxt.append(Y)
            frontier = nxt
        seen |= orbit
        members = [by_set[X] for X in orbit if X in by_set]
        rep = min(members, key=lambda K: K.key())
        out.append((rep, len(orbit)))
    out.sort(key=lambda rc: rc[0].key())
    return out


def is_normal(spec, H) -> bool:
    if isinstance(spec, AbelianP):
        return True
    S = elements(spec, H)
    return all(conjugate(spec, g, S) == S for g in _group_generators(spec))


def count_conjugates_into(spec, H, K) -> int:
    """#{gK : g^-1 H g <= K}, the number of G-maps G/H -> G/K."""
    if isinstance(spec, AbelianP):
        return index(spec, K) if contains(spec, H, K) else 0
    mul, inv, _ = _ops(spec)
    Kset = elements(spec, K)
    hgens = generators(spec, H)
    covered: set = set()
    count = 0
    for g in range(spec.order):
        if g in covered:
            continue
        covered.update(mul(g, k) for k in Kset)
        gi = inv(g)
        if all(mul(mul(gi, h), g) in Kset for h in hgens):
            count += 1
    return count


# -- Smith normal form and quotient invariants


def smith_decomposition(matrix):
    """(diagonal, U, V) with diag = U * matrix * V, U and V unimodular (sympy)."""
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_decomp

    M = Matrix(matrix)
    S, U, V = smith_normal_decomp(M, domain=ZZ)
    diag = [abs(int(S[i, i])) for i in range(min(S.shape))]
    return diag, U, V


def smith_diagonal(matrix) -> list[int]:
    return sorted(smith_decomposition(matrix)[0])


def quotient_invariants(spec, H) -> tuple:
    """Sorted p-exponents a_1 <= ... <= a_d with G/H = prod Z/p^a_i."""
    if not isinstance(spec, AbelianP):
        raise NonAbelian("quotient invariants are only defined here for abelian specs")
    return tuple(sorted(p_exponent(x, spec.p) for x in smith_diagonal(H.matrix)))


def adapted_basis(spec: AbelianP, H: HNF):
    """Integer basis b_1..b_d of Z^d and exponents a_i with H = span(p^a_i b_i).

    Exponents ascend.  Returns (list of basis column tuples, exponent list).
    """
    diag, U, _ = smith_decomposition(H.matrix)
    B = U.inv()
    pairs = sorted(
        ((p_exponent(x, spec.p), tuple(int(B[r, i]) for r in range(spec.rank))) for i, x in enumerate(diag)),
        key=lambda t: t[0],
    )
    return [b for _, b in pairs], [a for a, _ in pairs]
