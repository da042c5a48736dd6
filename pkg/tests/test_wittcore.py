import random
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wittburnside import groupkit as gk
from wittburnside.errors import FrameMismatch, ModulusMismatch, NonIntegral, NotAUnit, NotDownClosed, TorsionRing
from wittburnside.exactmath import MPoly, Var
from wittburnside.frame import build_frame
from wittburnside.wittcore import (
    ZZ,
    CoeffRing,
    GhostVector,
    In,
    IntegersMod,
    KN,
    PolyZ,
    WittVector,
    congruent,
    generic_vector,
    ghost,
    ghost_inverse,
    ideal_membership,
    int_scalar,
    invert_unit,
    project,
    random_vector,
    teichmuller,
)

SPECS = {
    "Z4^2": gk.AbelianP(2, (2, 2)),
    "Z9^2": gk.AbelianP(3, (2, 2)),
    "D8": gk.Dihedral2(3),
    "Z8": gk.AbelianP(2, (3,)),
}


@lru_cache(maxsize=None)
def frame(name):
    return build_frame(SPECS[name])


def vectors(name, ring, zero_nodes=()):
    f = frame(name)

    def build(seed):
        return random_vector(f, ring, random.Random(seed), zero_nodes=zero_nodes)

    return st.integers(0, 2 ** 32).map(build)


def brute_ghost(a: WittVector):
    f = a.frame
    return [sum(f.phi(t, u) * a.lifted()[u] ** (f.sizes[t] // f.sizes[u]) for u in f.downset(t)) for t in range(len(f))]


FRAMES_RINGS = [(name, ring) for name in ("Z4^2", "Z9^2", "D8") for ring in ("Z", "p")]


def ring_for(name, kind):
    return ZZ if kind == "Z" else IntegersMod(frame(name).prime)


# -- ghost map


def test_ghost_examples():
    f = build_frame(gk.AbelianP(2, (2,)))
    assert list(ghost(WittVector(f, ZZ, [1, 1, 1])).components) == [1, 3, 7]
    assert list(ghost(WittVector.one(f)).components) == [1, 1, 1]
    assert list(ghost(WittVector.zero(f)).components) == [0, 0, 0]


def test_ghost_inverse_examples():
    f = build_frame(gk.AbelianP(2, (1,)))
    assert ghost_inverse(GhostVector(f, ZZ, (1, 1))).coords == (1, 0)
    with pytest.raises(NonIntegral):
        ghost_inverse(GhostVector(f, ZZ, (0, 1)))
    with pytest.raises(TorsionRing):
        ghost_inverse(GhostVector(f, IntegersMod(6), (0, 1)))
    g = build_frame(gk.AbelianP(3, (1,)))
    a = WittVector(g, IntegersMod(5), [2, 3])
    assert ghost_inverse(ghost(a)) == a


@pytest.mark.parametrize("name", ["Z4^2", "Z9^2", "D8"])
def test_ghost_matches_direct_evaluation(name):
    rng = random.Random(1)
    for _ in range(10):
        a = random_vector(frame(name), ZZ, rng)
        assert list(ghost(a).components) == brute_ghost(a)
        assert ghost_inverse(ghost(a)) == a


@pytest.mark.parametrize("name", ["Z4^2", "Z9^2"])
def test_char_p_ghost_only_sees_bottom(name):
    f = frame(name)
    p = f.prime
    a = random_vector(f, IntegersMod(p), random.Random(2))
    assert list(ghost(a).components) == [pow(a[0], f.sizes[t], p) for t in range(len(f))]


@pytest.mark.parametrize("name,kind", FRAMES_RINGS)
def test_ghost_is_a_ring_homomorphism(name, kind):
    ring = ring_for(name, kind)
    rng = random.Random(f"{name}/{kind}")
    f = frame(name)
    for _ in range(100):
        a, b = random_vector(f, ring, rng), random_vector(f, ring, rng)
        assert ghost(a + b) == ghost(a) + ghost(b)
        assert ghost(a * b) == ghost(a) * ghost(b)


# -- ring axioms


@pytest.mark.parametrize("name,kind", FRAMES_RINGS)
def test_ring_axioms(name, kind):
    ring = ring_for(name, kind)
    rng = random.Random(7)
    f = frame(name)
    zero, one = WittVector.zero(f, ring), WittVector.one(f, ring)
    for _ in range(100):
        a, b, c = (random_vector(f, ring, rng, bound=3) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a + zero == a and a * one == a and (a * zero).is_zero()
        assert (a + (-a)).is_zero()
        assert a - b == a + (-b)


@settings(max_examples=40, deadline=None)
@given(vectors("Z4^2", IntegersMod(2)), st.integers(-6, 6))
def test_int_scalar_is_repeated_addition(a, n):
    total = WittVector.zero(a.frame, a.ring)
    for _ in range(abs(n)):
        total = total + a
    if n < 0:
        total = -total
    assert int_scalar(n, a) == total == n * a
    assert int_scalar(1, a) == a and int_scalar(0, a).is_zero()


def test_witt_arithmetic_examples():
    f3 = build_frame(gk.AbelianP(2, (2,)))
    one = WittVector.one(f3, IntegersMod(2))
    assert (one + one).coords == (0, 1, 0)
    f4 = build_frame(gk.AbelianP(2, (3,)))
    one4 = WittVector.one(f4, IntegersMod(2))
    assert (one4 + one4).coords == (0, 1, 0, 0)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_classical_additive_order(p, r):
    f = build_frame(gk.AbelianP(p, (r,)))
    one = WittVector.one(f, IntegersMod(p))
    order, x = 1, one
    while not x.is_zero():
        x, order = x + one, order + 1
    assert order == p ** (r + 1)


@pytest.mark.parametrize("name", ["Z4^2", "Z9^2"])
def test_p_times_one_has_unit_coordinates_at_size_p(name):
    f = frame(name)
    p = f.prime
    v = p * WittVector.one(f, IntegersMod(p))
    assert all(v[t] == 1 for t in f.nodes_of_size(p))
    assert v[0] == 0


def test_char0_square_of_teichmuller():
    for p in (2, 3, 5):
        f = build_frame(gk.AbelianP(p, (2,)))
        x = teichmuller(f, ZZ, 1, 1)
        assert x * x == p * x
        assert (x * x).coords == (0, p, 1 - p ** (p - 1))


# -- support and ideals


@pytest.mark.parametrize("name,kind", FRAMES_RINGS)
def test_disjoint_support_adds_coordinatewise(name, kind):
    ring = ring_for(name, kind)
    rng = random.Random(11)
    f = frame(name)
    for _ in range(100):
        left = {t for t in range(len(f)) if rng.random() < 0.5}
        a = random_vector(f, ring, rng, support=left)
        b = random_vector(f, ring, rng, zero_nodes=left)
        s = a + b
        assert all(s[t] == ring.coerce(a[t] + b[t]) for t in range(len(f)))


@pytest.mark.parametrize("name,kind", FRAMES_RINGS)
def test_sum_is_coordinatewise_at_the_first_nonzero_size(name, kind):
    ring = ring_for(name, kind)
    rng = random.Random(13)
    f = frame(name)
    sizes = sorted(set(f.sizes))
    for k in range(100):
        n = sizes[k % len(sizes)]
        low = [t for t in range(len(f)) if f.sizes[t] < n]
        a = random_vector(f, ring, rng, zero_nodes=low)
        b = random_vector(f, ring, rng, zero_nodes=low)
        s = a + b
        assert all(s[t] == ring.coerce(a[t] + b[t]) for t in f.nodes_of_size(n))
        assert ideal_membership(s, In(n))


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_ideal_products_abelian(m, n):
    f = build_frame(gk.AbelianP(2, (3, 3)))
    p, ring = 2, IntegersMod(2)
    rng = random.Random(m * 10 + n)
    for _ in range(32):
        a = random_vector(f, ring, rng, zero_nodes=[t for t in range(len(f)) if f.sizes[t] < p ** m])
        b = random_vector(f, ring, rng, zero_nodes=[t for t in range(len(f)) if f.sizes[t] < p ** n])
        assert ideal_membership(a * b, In(p ** (m + n)))


@pytest.mark.parametrize("k", [3, 4])
def test_ideal_product_first_step_dihedral(k):
    f = build_frame(gk.Dihedral2(k))
    ring = IntegersMod(2)
    rng = random.Random(k)
    for n in (1, 2):
        for _ in range(20):
            a = random_vector(f, ring, rng, zero_nodes=[t for t in range(len(f)) if f.sizes[t] < 2])
            b = random_vector(f, ring, rng, zero_nodes=[t for t in range(len(f)) if f.sizes[t] < 2 ** n])
            assert ideal_membership(a * b, In(2 ** (n + 1)))


def test_ideal_membership_basics():
    f = frame("Z9^2")
    assert ideal_membership(WittVector.zero(f), In(81))
    for t in range(len(f)):
        w = teichmuller(f, ZZ, t, 1)
        assert ideal_membership(w, In(f.sizes[t]))
        assert not ideal_membership(w, In(f.sizes[t] * 3))


def test_kernel_congruence_is_agreement_on_downset():
    f = frame("Z4^2")
    ring = IntegersMod(2)
    rng = random.Random(3)
    for _ in range(50):
        node = rng.randrange(len(f))
        a = random_vector(f, ring, rng)
        b = WittVector(f, ring, [a[t] if f.is_leq(t, node) or rng.random() < 0.5 else rng.randrange(2)
                                 for t in range(len(f))])
        assert congruent(a, b, KN(node)) == all(a[t] == b[t] for t in f.downset(node))


# -- functoriality and lifts


@pytest.mark.parametrize("name", ["Z4^2", "Z9^2", "D8"])
def test_reduction_commutes_with_operations(name):
    f = frame(name)
    m = f.prime ** 2
    rng = random.Random(5)
    for _ in range(30):
        a, b = random_vector(f, ZZ, rng), random_vector(f, ZZ, rng)
        red = lambda v: WittVector(f, IntegersMod(m), v.coords)
        assert red(a + b) == red(a) + red(b)
        assert red(a * b) == red(a) * red(b)
        assert red(-a) == -red(a)


@pytest.mark.parametrize("name", ["Z4^2", "Z9^2"])
def test_result_is_independent_of_the_lift(name):
    f = frame(name)
    p = f.prime
    rng = random.Random(9)
    for _ in range(30):
        a, b = random_vector(f, ZZ, rng), random_vector(f, ZZ, rng)
        shift = lambda v: WittVector(f, ZZ, [x + p * rng.randint(-3, 3) for x in v.coords])
        red = lambda v: WittVector(f, IntegersMod(p), v.coords)
        assert red(shift(a) * shift(b)) == red(a * b)
        assert red(shift(a) + shift(b)) == red(a + b)


# -- Teichmuller, units, projection


@pytest.mark.parametrize("name,kind", FRAMES_RINGS)
def test_teichmuller_at_bottom(name, kind):
    ring = ring_for(name, kind)
    f = frame(name)
    rng = random.Random(17)
    assert teichmuller(f, ring, 0, 1) == WittVector.one(f, ring)
    for _ in range(20):
        c, d = rng.randint(-4, 4), rng.randint(-4, 4)
        b = random_vector(f, ring, rng)
        wb = teichmuller(f, ring, 0, c) * b
        assert all(wb[t] == ring.coerce(c ** f.sizes[t] * b[t]) for t in range(len(f)))
        assert teichmuller(f, ring, 0, c) * teichmuller(f, ring, 0, d) == teichmuller(f, ring, 0, c * d)


def test_unit_inversion_examples():
    f = build_frame(gk.AbelianP(2, (1,)))
    ring = IntegersMod(2)
    assert invert_unit(WittVector(f, ring, [1, 1])).coords == (1, 1)
    assert invert_unit(WittVector.one(f, ring)) == WittVector.one(f, ring)
    with pytest.raises(NotAUnit):
        invert_unit(WittVector(f, ring, [0, 1]))
    with pytest.raises(TorsionRing):
        invert_unit(WittVector(f, ZZ, [1, 1]))


@pytest.mark.parametrize("name", ["Z4^2", "Z9^2", "D8"])
def test_units_are_exactly_vectors_with_invertible_bottom(name):
    f = frame(name)
    p = f.prime
    ring = IntegersMod(p)
    rng = random.Random(19)
    one = WittVector.one(f, ring)
    for _ in range(20):
        a = random_vector(f, ring, rng)
        if a[0] % p:
            assert a * invert_unit(a) == one
        else:
            # a is in the maximal ideal: a power of it vanishes in the truncation
            power = a
            for _ in range(f.max_size.bit_length() + 2):
                power = power * a
            assert power.is_zero() or ideal_membership(power, In(p))


def test_projection_is_a_homomorphism():
    f = frame("Z9^2")
    ring = IntegersMod(3)
    rng = random.Random(23)
    sub = f.subframe([t for t in range(len(f)) if f.sizes[t] <= 9])
    for _ in range(20):
        a, b = random_vector(f, ring, rng), random_vector(f, ring, rng)
        assert project(a + b, sub) == project(a, sub) + project(b, sub)
        assert project(a * b, sub) == project(a, sub) * project(b, sub)
    a = random_vector(f, ring, rng)
    assert project(a, [0]).coords == (a[0],)
    with pytest.raises(NotDownClosed):
        project(a, [1])


def test_classical_projection_is_truncation():
    f = build_frame(gk.AbelianP(3, (3,)))
    ring = IntegersMod(3)
    rng = random.Random(29)
    for _ in range(20):
        a, b = random_vector(f, ring, rng), random_vector(f, ring, rng)
        assert project(a * b, [0, 1]).coords == (a * b).coords[:2]
        small = build_frame(gk.AbelianP(3, (1,)))
        prod_small = WittVector(small, ring, a.coords[:2]) * WittVector(small, ring, b.coords[:2])
        assert prod_small.coords == (a * b).coords[:2]


# -- polynomial coefficients and errors


def test_polynomial_coefficient_ring_agrees_with_integer_evaluation():
    f = build_frame(gk.AbelianP(2, (1, 1)))
    x = generic_vector(f, "X")
    y = generic_vector(f, "Y")
    s = x * y
    rng = random.Random(31)
    from wittburnside.exactmath import poly_substitute

    for _ in range(10):
        vals = {Var(r, t): rng.randint(-3, 3) for r in "XY" for t in range(len(f))}
        a = WittVector(f, ZZ, [vals[Var("X", t)] for t in range(len(f))])
        b = WittVector(f, ZZ, [vals[Var("Y", t)] for t in range(len(f))])
        assert [poly_substitute(c, vals) if isinstance(c, MPoly) else c for c in s.coords] == list((a * b).coords)


def test_ring_tags():
    assert CoeffRing.from_tag("F3") == IntegersMod(3)
    assert CoeffRing.from_tag("Z/9").tag == "Z/9"
    assert CoeffRing.from_tag("Z[x]") == PolyZ()
    with pytest.raises(ValueError):
        CoeffRing.from_tag("Q")


def test_mismatched_operands_raise():
    f = frame("Z4^2")
    a = WittVector.one(f, IntegersMod(2))
    with pytest.raises(ModulusMismatch):
        a + WittVector.one(f, IntegersMod(4))
    with pytest.raises(FrameMismatch):
        a + WittVector.one(frame("D8"), IntegersMod(2))


def test_vectors_are_immutable_values():
    f = frame("Z4^2")
    a = WittVector.one(f, IntegersMod(2))
    assert hash(a) == hash(WittVector.one(f, IntegersMod(2)))
    with pytest.raises(AttributeError):
        a.coords = ()
