"""Executable checks of structural facts about Witt-Burnside rings at finite truncations.

Each suite returns a VerifyReport; given the same parameters and seed the
report is identical.
"""

from __future__ import annotations

import random

import numpy as np

from . import groupkit as gk
from .errors import EvenPrime, TruncationTooSmall
from .frame import Frame, build_frame, linked_pairs, tj_nodes, w_stabilizer
from .report import VerifyReport
from .wittcore import (
    ZZ,
    In,
    IntegersMod,
    WittVector,
    ghost,
    ideal_membership,
    project,
    random_vector,
    teichmuller,
)

DEFAULT_TRIALS = 32


def homogeneous_frame(p: int, d: int, n: int, max_size=None) -> Frame:
    return build_frame(gk.AbelianP(p, (n,) * d), max_size=max_size)


# -- ratio property


def ratio_violations(frame: Frame, phi=None) -> tuple[list, int]:
    """Triples (T, T1, T2) breaking the ratio property, and the number of triples examined."""
    table = frame.phi_table if phi is None else np.asarray(phi, dtype=object)
    p = frame.prime
    sizes = np.array(frame.sizes, dtype=object)
    bad = []
    checked = 0
    for t in range(len(frame)):
        down = np.array(frame.downset(t))
        ph = np.array([int(table[t][u]) for u in down], dtype=object)
        sz = sizes[down]
        own = int(table[t][t])
        prod_sizes = np.outer(sz, sz)
        mask = np.triu(prod_sizes > frame.sizes[t])
        idx = np.argwhere(mask)
        checked += len(idx)
        if not len(idx):
            continue
        nums = np.outer(ph, ph)[mask]
        for (i, j), num in zip(idx, nums):
            num = int(num)
            if own == 0 or num % own or (num // own) % p:
                bad.append((t, int(down[i]), int(down[j])))
    return bad, checked


def check_ratio_property(frame: Frame, phi=None) -> VerifyReport:
    report = VerifyReport("ratio", {"frame": frame.spec.to_json(), "nodes": len(frame)})
    bad, checked = ratio_violations(frame, phi)
    report.add("every triple has ratio divisible by p", not bad,
               {"triples_checked": checked, "violations": len(bad), "first": bad[:10]})
    return report


def injected_ratio_violation(frame: Frame):
    """A copy of the phi table with one triple forced to ratio 1, and that triple."""
    for t in range(len(frame)):
        down = frame.strict_downset(t)
        for a in down:
            for b in down:
                if a <= b and frame.sizes[a] * frame.sizes[b] > frame.sizes[t]:
                    fake = [[int(x) for x in row] for row in frame.phi_table]
                    fake[t][t] = fake[t][a] * fake[t][b]
                    return fake, (t, a, b)
    raise ValueError("frame has no triple to corrupt")


# -- linked coordinates


def random_maximal(frame: Frame, ring, rng) -> WittVector:
    return random_vector(frame, ring, rng, zero_nodes=[frame.bottom])


def check_linked_constraints(frame: Frame, seed: int = 0, trials: int = DEFAULT_TRIALS,
                             max_products: int = 4) -> VerifyReport:
    """Sums of products of elements of m agree at linked pairs; omega_T(1) does not."""
    p = frame.prime
    ring = IntegersMod(p)
    rng = random.Random(seed)
    pairs = linked_pairs(frame)
    report = VerifyReport("linked", {"frame": frame.spec.to_json(), "nodes": len(frame), "seed": seed,
                                     "trials": trials, "linked_pairs": len(pairs)})
    report.add("frame has linked pairs", bool(pairs), {"count": len(pairs)})
    for k in range(trials):
        r = rng.randint(1, max_products)
        total = WittVector.zero(frame, ring)
        for _ in range(r):
            total = total + random_maximal(frame, ring, rng) * random_maximal(frame, ring, rng)
        bad = [(a, b) for a, b in pairs if total[a] != total[b]]
        report.add(f"trial {k}: sum of {r} products agrees on all linked pairs", not bad, {"mismatches": bad[:5]})
    violated = 0
    for a, b in pairs:
        w = teichmuller(frame, ring, a, 1)
        if w[a] != w[b]:
            violated += 1
    report.add("omega_T(1) separates every linked pair", violated == len(pairs),
               {"violated": violated, "pairs": len(pairs)})
    return report


# -- zero divisors


def check_nondomain(p: int, d: int, n: int) -> VerifyReport:
    frame = homogeneous_frame(p, d, n)
    ring = IntegersMod(p)
    report = VerifyReport("nondomain", {"p": p, "d": d, "trunc": n, "nodes": len(frame)})
    one = WittVector.one(frame, ring)
    p_one = p * one
    size_p = frame.nodes_of_size(p)
    report.add("p*1 has coordinate 1 at every size-p node",
               all(p_one[t] == 1 for t in size_p), {"size_p_nodes": size_p})
    if d == 1:
        order, x = 1, one
        while not x.is_zero():
            x = x + one
            order += 1
        report.add(f"additive order of 1 is p^{n + 1}", order == p ** (n + 1), {"order": order})
        collapsed = all((teichmuller(frame, ring, t, 1) - frame.sizes[t] * one).is_zero()
                        for t in range(len(frame)))
        report.add("each omega_{G/N}(1) equals [G:N]*1, so no zero-divisor pair here", collapsed, {})
        return report
    pairs_found = 0
    for t in range(len(frame)):
        if t == frame.bottom or not gk.is_normal(frame.spec, frame.nodes[t].stabilizer):
            continue
        idx = frame.sizes[t]
        w = teichmuller(frame, ring, t, 1)
        other = w - idx * one
        wz = teichmuller(frame, ZZ, t, 1)
        over_z = wz * wz == idx * wz
        report.add(f"node {t} (index {idx}): omega(1)*(omega(1) - index) = 0", (w * other).is_zero(), {})
        if idx == frame.spec.order:
            # G/N is the whole truncated group: the nodes separating omega(1) from index*1 are cut off
            report.add(f"node {t}: top of the truncation, omega(1) = index*1 here", other.is_zero(), {})
        else:
            ok = not w.is_zero() and not other.is_zero()
            pairs_found += ok
            report.add(f"node {t}: both factors nonzero", ok, {"second_factor_support": other.support})
        report.add(f"node {t}: omega(1)^2 = index*omega(1) already over Z", over_z, {})
    report.add("nonzero zero-divisor pairs exist", pairs_found > 0, {"count": pairs_found})
    return report


# -- a nilpotent element


def nilpotent_frame(p: int, m: int):
    """Frame of Z/p x Z/p^m with the named nodes U_{2,j} and T_i.

    U_{i,j} has stabilizer <e_1 + j p^(i-1) e_2, p^i e_2> and T_i has <p e_1, p^i e_2>.
    """
    spec = gk.AbelianP(p, (1, m))
    frame = build_frame(spec)
    u2 = [frame.node_of(gk.hnf_from_generators(spec, [(1, j * p), (0, p * p)])) for j in range(p)]
    ts = {i: frame.node_of(gk.hnf_from_generators(spec, [(p, 0), (0, p ** i)])) for i in range(1, m + 1)}
    return frame, u2, ts


def nilpotent_witness(p: int, m: int):
    """x = omega_{U21}(1) + omega_{U22}(-1) is a nonzero square-zero element over F_p."""
    if p == 2:
        raise EvenPrime("the construction needs an odd prime")
    if m < 2:
        raise TruncationTooSmall("need m >= 2")
    frame, u2, ts = nilpotent_frame(p, m)
    report = VerifyReport("nilpotent", {"p": p, "m": m, "nodes": len(frame)})
    coords = [0] * len(frame)
    coords[u2[1]], coords[u2[2]] = 1, -1
    xz = WittVector(frame, ZZ, coords)
    g = ghost(xz).components
    report.add("ghost at U_{2,1} is p^2", g[u2[1]] == p * p, {"value": g[u2[1]]})
    report.add("ghost at U_{2,2} is -p^2", g[u2[2]] == -p * p, {"value": g[u2[2]]})
    report.add("ghost at every T_i (i >= 2) is 0", all(g[ts[i]] == 0 for i in range(2, m + 1)),
               {"values": [g[ts[i]] for i in range(2, m + 1)]})
    others = [t for t in range(len(frame)) if t not in (u2[1], u2[2]) and g[t]]
    report.add("all other ghost components vanish", not others, {"nonzero": others})
    sq = xz * xz
    report.add("square over Z is p^2 at both U_{2,j}", sq[u2[1]] == p * p and sq[u2[2]] == p * p, {})
    t_vals = {i: sq[ts[i]] for i in range(2, m + 1)}
    report.add("square over Z is divisible by p at every T_i", all(v % p == 0 for v in t_vals.values()),
               {"values": t_vals})
    report.add("square over Z at T_2 is -2 p^(2p-1)", sq[ts[2]] == -2 * p ** (2 * p - 1), {"value": sq[ts[2]]})
    report.add("square over Z is supported on U_{2,j} and T_i",
               set(sq.support) <= {u2[1], u2[2], *ts.values()}, {"support": sq.support})
    x = WittVector(frame, IntegersMod(p), coords)
    report.add("x is nonzero over F_p", not x.is_zero(), {"support": x.support})
    report.add("x^2 = 0 over F_p", (x * x).is_zero(), {})
    return x, report


# -- annihilator of omega_V(1)


def check_annihilator(p: int, n: int, seed: int = 0, trials: int = 10, relation_trials: int = DEFAULT_TRIALS,
                      max_products: int = 3) -> VerifyReport:
    if p == 2:
        raise EvenPrime("the annihilator family needs an odd prime")
    if n < 2:
        raise TruncationTooSmall("need n >= 2")
    frame = homogeneous_frame(p, 2, n)
    ring = IntegersMod(p)
    rng = random.Random(seed)
    w = frame.node_of(w_stabilizer(p, n))
    v = next(t for t in frame.nodes_of_size(p) if t != w)
    omega_v = teichmuller(frame, ring, v, 1)
    fam = {j: tj_nodes(frame, j) for j in range(2, n + 1)}
    report = VerifyReport("annihilator", {"p": p, "trunc": n, "seed": seed, "trials": trials,
                                          "relation_trials": relation_trials, "V": v, "W": w})
    report.add("zero vector annihilates", (WittVector.zero(frame, ring) * omega_v).is_zero(), {})
    for k in range(trials):
        coords = [0] * len(frame)
        for j, (a, b) in fam.items():
            c = rng.randrange(p)
            coords[a], coords[b] = c, -c
        x = WittVector(frame, ring, coords)
        prod_ = x * omega_v
        report.add(f"N_V element {k} annihilates omega_V(1)", prod_.is_zero(),
                   {"x_support": x.support, "product_support": prod_.support})
    pairs = [(a, b) for a, b in linked_pairs(frame) if frame.nodes[a].cyclic and frame.nodes[b].cyclic]
    for k in range(relation_trials):
        r = rng.randint(1, max_products)
        bs = [random_vector(frame, ring, rng, zero_nodes=[frame.bottom]) for _ in range(r)]
        cs = [random_vector(frame, ring, rng) for _ in range(r)]
        total = WittVector.zero(frame, ring)
        for b, c in zip(bs, cs):
            total = total + b * c
        bad = []
        for a, b in pairs:
            size = frame.sizes[a]
            rhs = sum((bi[a] - bi[b]) * pow(ci[frame.bottom], size, p) for bi, ci in zip(bs, cs)) % p
            if (total[a] - total[b]) % p != rhs:
                bad.append((a, b))
        report.add(f"relation trial {k} (r={r}) at all {len(pairs)} linked cyclic pairs", not bad, {"mismatches": bad[:5]})
    return report


# -- squares of elements of m


def _admissible_targets(frame: Frame, t0: int) -> list[int]:
    lv, size = frame.nodes[t0].level, frame.sizes[t0]
    return [t for t in frame.upset(t0) if frame.sizes[t] == size * size and frame.nodes[t].level == lv]


def select_t0(frame: Frame, v: WittVector):
    """Among nonzero coordinates, minimal level first, then minimal size (then id)."""
    support = v.support
    if not support:
        return None
    return min(support, key=lambda t: (frame.nodes[t].level, frame.sizes[t], t))


def check_reduced_coordinate(p: int, n: int, seed: int = 0, trials: int = DEFAULT_TRIALS,
                             density: float = 0.5) -> VerifyReport:
    frame = homogeneous_frame(p, 2, n)
    ring = IntegersMod(p)
    rng = random.Random(seed)
    report = VerifyReport("reduced", {"p": p, "trunc": n, "seed": seed, "trials": trials})
    candidates = [t for t in range(len(frame)) if t != frame.bottom and _admissible_targets(frame, t)]
    if not candidates:
        raise TruncationTooSmall("no node has an admissible square-size target")
    # a unit squares to a unit
    unit = random_vector(frame, ring, rng)
    unit = WittVector(frame, ring, (1 + rng.randrange(p - 1),) + unit.coords[1:])
    report.add("v with v_0 != 0 has nonzero square", not (unit * unit).is_zero(), {})
    done = 0
    attempts = 0
    while done < trials:
        attempts += 1
        if attempts > 50 * trials:
            raise TruncationTooSmall("could not sample admissible vectors")
        t0 = rng.choice(candidates)
        key0 = (frame.nodes[t0].level, frame.sizes[t0])
        coords = []
        for t in range(len(frame)):
            key = (frame.nodes[t].level, frame.sizes[t])
            if t == t0:
                coords.append(1 + rng.randrange(p - 1))
            elif t == frame.bottom or key < key0 or rng.random() >= density:
                coords.append(0)
            else:
                coords.append(rng.randrange(p))
        v = WittVector(frame, ring, coords)
        sel = select_t0(frame, v)
        targets = _admissible_targets(frame, sel)
        if not targets:
            continue
        sq = v * v
        expected = pow(v[sel], 2 * frame.sizes[sel], p)
        bad = [t for t in targets if sq[t] != expected]
        report.add(f"trial {done}: T0 = {sel} (level {frame.nodes[sel].level}, size {frame.sizes[sel]})",
                   not bad and expected != 0, {"targets": targets, "expected": expected, "mismatches": bad})
        done += 1
    return report


# -- ideal products


def char0_counterexample(p: int) -> VerifyReport:
    """In W_{Z/p^2}(Z), x = omega_{Z/p}(1) has x^2 = p x outside I_{p^2}."""
    frame = build_frame(gk.AbelianP(p, (2,)))
    t = frame.nodes_of_size(p)[0]
    x = teichmuller(frame, ZZ, t, 1)
    sq = x * x
    report = VerifyReport("char0-counterexample", {"p": p})
    report.add("x^2 = p x", sq == p * x, {"square": list(sq.coords)})
    report.add("x^2 has coordinate p at the size-p node", sq[t] == p and sq[frame.bottom] == 0, {})
    report.add("x^2 is not in I_{p^2}", not ideal_membership(sq, In(p * p)), {})
    return report


def check_ideal_products(frame: Frame, m: int, n: int, seed: int = 0, trials: int = DEFAULT_TRIALS) -> VerifyReport:
    p = frame.prime
    ring = IntegersMod(p)
    rng = random.Random(seed)
    report = VerifyReport("ideals", {"frame": frame.spec.to_json(), "m": m, "n": n, "seed": seed, "trials": trials})
    report.extend(check_ratio_property(frame), "precondition: ")
    small_a = [t for t in range(len(frame)) if frame.sizes[t] < p ** m]
    small_b = [t for t in range(len(frame)) if frame.sizes[t] < p ** n]
    target = In(p ** (m + n))
    for k in range(trials):
        a = random_vector(frame, ring, rng, zero_nodes=small_a)
        b = random_vector(frame, ring, rng, zero_nodes=small_b)
        c = a * b
        report.add(f"trial {k}: product lands in I_(p^{m + n})", ideal_membership(c, target),
                   {"low_support": [t for t in c.support if frame.sizes[t] < p ** (m + n)]})
    report.extend(char0_counterexample(p), "char 0: ")
    return report


# -- prime ideals from cyclic chains


def prime_ideal_paths(p: int, n: int, seed: int = 0, trials: int = DEFAULT_TRIALS) -> VerifyReport:
    frame = homogeneous_frame(p, 2, n)
    spec = frame.spec
    ring = IntegersMod(p)
    rng = random.Random(seed)
    report = VerifyReport("primes", {"p": p, "trunc": n, "seed": seed, "trials": trials})
    chain = [frame.node_of(gk.hnf_from_generators(spec, [(1, 0), (0, p ** r)])) for r in range(n + 1)]
    top = chain[-1]
    report.add("chain is the downset of its top node", sorted(chain) == list(frame.downset(top)), {"chain": chain})
    report.add("chain nodes are cyclic of level 0",
               all(frame.nodes[t].cyclic and frame.nodes[t].level == 0 for t in chain), {})
    sub = frame.subframe(chain)
    classical = build_frame(gk.AbelianP(p, (n,)))
    report.add("subframe sizes match the classical chain", sub.sizes == classical.sizes, {})

    def to_classical(v):
        return WittVector(classical, ring, project(v, sub).coords)

    for k in range(trials):
        a = random_vector(frame, ring, rng)
        b = random_vector(frame, ring, rng)
        ok_mul = to_classical(a * b) == to_classical(a) * to_classical(b)
        ok_add = to_classical(a + b) == to_classical(a) + to_classical(b)
        report.add(f"trial {k}: projection respects sum and product", ok_mul and ok_add, {})
    one = WittVector.one(classical, ring)
    order, x = 1, one
    while not x.is_zero():
        x = x + one
        order += 1
    report.add("classical truncation has 1 of additive order p^(n+1)", order == p ** (n + 1), {"order": order})
    level1 = [t for t in range(len(frame)) if frame.nodes[t].level == 1]
    coords = [0] * len(frame)
    for t in level1:
        coords[t] = rng.randrange(p)
    coords[level1[0]] = 1
    v = WittVector(frame, ring, coords)
    cyclic_tops = [t for t in range(len(frame)) if frame.nodes[t].cyclic and frame.sizes[t] == p ** n]
    in_all = all(all(v[u] == 0 for u in frame.downset(t)) for t in cyclic_tops)
    report.add("a nonzero vector on level-1 nodes lies in every chain kernel", in_all and not v.is_zero(),
               {"chains": len(cyclic_tops), "support": v.support})
    prod_ = v * random_vector(frame, ring, rng)
    report.add("kernel is closed under multiplication by the ring",
               all(all(prod_[u] == 0 for u in frame.downset(t)) for t in cyclic_tops), {})
    return report


SUITES = ("ratio", "linked", "nondomain", "nilpotent", "annihilator", "reduced", "ideals", "primes",
          "homogeneity", "congruence")
