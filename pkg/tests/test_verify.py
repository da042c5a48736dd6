import pytest

from wittburnside import groupkit as gk
from wittburnside import verify as V
from wittburnside.errors import EvenPrime, TruncationTooSmall
from wittburnside.frame import build_frame, linked_pairs
from wittburnside.wittcore import ZZ, IntegersMod, WittVector, teichmuller


@pytest.mark.parametrize("spec", [gk.AbelianP(2, (2, 2)), gk.AbelianP(3, (2, 2)), gk.AbelianP(2, (1, 3)),
                                  gk.AbelianP(2, (2, 2, 2))])
def test_ratio_property_abelian(spec):
    assert V.check_ratio_property(build_frame(spec)).passed


def test_ratio_is_size_ratio_in_abelian_frames():
    f = build_frame(gk.AbelianP(3, (2, 2)))
    for t in range(len(f)):
        for a in f.downset(t):
            for b in f.downset(t):
                if f.sizes[a] * f.sizes[b] > f.sizes[t]:
                    assert f.phi(t, a) * f.phi(t, b) // f.self_phi[t] == f.sizes[a] * f.sizes[b] // f.sizes[t]


@pytest.mark.parametrize("k", range(2, 8))
def test_ratio_property_dihedral(k):
    assert V.check_ratio_property(build_frame(gk.Dihedral2(k))).passed


def test_injected_violation_is_reported():
    f = build_frame(gk.AbelianP(2, (2, 2)))
    fake, triple = V.injected_ratio_violation(f)
    report = V.check_ratio_property(f, fake)
    assert not report.passed
    assert triple in report.cases[0].witness["first"]


@pytest.mark.parametrize("p,d,n", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (3, 2, 3), (2, 3, 2), (3, 3, 2)])
def test_linked_constraints(p, d, n):
    report = V.check_linked_constraints(V.homogeneous_frame(p, d, n), seed=1, trials=8)
    assert report.passed, report.failures


def test_linked_constraint_is_not_vacuous():
    """A vector outside m^2 (omega_T(1) itself) breaks the equality at its pair."""
    f = V.homogeneous_frame(2, 2, 2)
    a, b = linked_pairs(f)[0]
    w = teichmuller(f, IntegersMod(2), a, 1)
    assert w[a] != w[b]


@pytest.mark.parametrize("p,d", [(2, 2), (3, 2), (2, 3)])
def test_nondomain(p, d):
    assert V.check_nondomain(p, d, 2).passed


def test_nondomain_cyclic_comparison():
    report = V.check_nondomain(2, 1, 3)
    assert report.passed


@pytest.mark.parametrize("m", [2, 3, 4])
def test_nilpotent_witness(m):
    x, report = V.nilpotent_witness(3, m)
    assert report.passed, report.failures
    assert not x.is_zero() and (x * x).is_zero()


def test_nilpotent_witness_p5():
    x, report = V.nilpotent_witness(5, 2)
    assert report.passed


def test_nilpotent_square_at_the_t_nodes():
    """Over Z the square at T_2 is -2 p^(2p-1); at T_3 the T_2 term of the Witt polynomial also enters."""
    p = 3
    frame, u2, ts = V.nilpotent_frame(p, 3)
    coords = [0] * len(frame)
    coords[u2[1]], coords[u2[2]] = 1, -1
    sq = WittVector(frame, ZZ, coords) ** 2
    assert sq[ts[2]] == -2 * p ** (2 * p - 1)
    # ghost at T_3 vanishes; T_3 sits above T_2, T_1, U_{2,1}, U_{2,2} (all sizes 9) and the bottom
    m_t2 = sq[ts[2]]
    by_hand = -(2 * 9 * 9 ** 9 + 27 * m_t2 ** 3) // 81
    assert sq[ts[3]] == by_hand == -47829690
    assert sq[ts[3]] % p == 0


def test_nilpotent_needs_odd_prime():
    with pytest.raises(EvenPrime):
        V.nilpotent_witness(2, 2)


def test_annihilator():
    report = V.check_annihilator(3, 3, seed=0, trials=3, relation_trials=8)
    assert report.passed, report.failures
    with pytest.raises(EvenPrime):
        V.check_annihilator(2, 3)


def test_reduced_coordinate():
    assert V.check_reduced_coordinate(3, 2, trials=8).passed
    assert V.check_reduced_coordinate(2, 3, trials=8).passed
    with pytest.raises(TruncationTooSmall):
        V.check_reduced_coordinate(2, 1)


def test_reduced_coordinate_teichmuller_case():
    f = V.homogeneous_frame(3, 2, 3)
    ring = IntegersMod(3)
    for t0 in range(1, len(f)):
        targets = V._admissible_targets(f, t0)
        if not targets:
            continue
        v = teichmuller(f, ring, t0, 2)
        sq = v * v
        assert all(sq[t] == pow(2, 2 * f.sizes[t0], 3) for t in targets)


@pytest.mark.parametrize("m,n", [(0, 1), (1, 1), (1, 2), (2, 1)])
def test_ideal_products(m, n):
    report = V.check_ideal_products(V.homogeneous_frame(2, 2, 3), m, n, trials=8)
    assert report.passed, report.failures


def test_char0_counterexample():
    for p in (2, 3):
        assert V.char0_counterexample(p).passed


def test_prime_ideal_paths():
    assert V.prime_ideal_paths(2, 3, trials=8).passed
    assert V.prime_ideal_paths(3, 2, trials=8).passed


def test_reports_are_deterministic():
    a = V.check_linked_constraints(V.homogeneous_frame(3, 2, 2), seed=4, trials=5).to_json()
    b = V.check_linked_constraints(V.homogeneous_frame(3, 2, 2), seed=4, trials=5).to_json()
    assert a == b
    assert a["params"]["seed"] == "4"


def test_report_summary():
    report = V.check_nondomain(2, 2, 2)
    assert report.summary().startswith("PASS nondomain")
    assert report.to_json()["status"] == "pass"
