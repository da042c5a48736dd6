"""Universal addition and multiplication polynomials, and polynomial identity checks.

S_T and M_T are produced by running the ghost recursion on the generic
vectors (X_U) and (Y_U) over Z[X, Y]; every division by phi_T(T) is checked,
so a successful run is also an integrality certificate.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import NonAbelian, SizeCapExceeded
from .exactmath import MPoly, Var, poly_exact_div_int, poly_reduce_mod, poly_substitute
from .frame import Frame, linked_pairs
from .report import VerifyReport
from .wittcore import _Powers, _nonzero, generic_vector


def X(t, family=0):
    return Var("X", t, family)


def Y(t, family=0):
    return Var("Y", t, family)


def resolve_size_cap(frame: Frame, size_cap=None) -> int:
    """Cap on #T: explicit argument, else WB_SIZE_CAP, else p^2; never above p^3 unless overridden by env."""
    p = frame.prime or 2
    env = os.environ.get("WB_SIZE_CAP")
    if size_cap is None:
        size_cap = int(env) if env else p ** 2
    hard = int(env) if env else p ** 3
    if size_cap > max(hard, p ** 3):
        raise SizeCapExceeded(f"size cap {size_cap} exceeds the hard cap {max(hard, p ** 3)}")
    return size_cap


@dataclass
class UniversalPolySet:
    frame: Frame
    kind: str
    polys: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "kind": self.kind,
            "frame": self.frame.spec.to_json(),
            "polys": {str(t): f.to_json() for t, f in sorted(self.polys.items())},
        }


def gen_polys(frame: Frame, kind: str, size_cap=None, order=None) -> UniversalPolySet:
    """S_T (kind 'sum') or M_T (kind 'product') for every node with #T <= size_cap.

    ``order`` may give a different recursion order, as long as it lists
    smaller nodes first; the result must not depend on it.
    """
    if kind not in ("sum", "product"):
        raise ValueError("kind must be 'sum' or 'product'")
    cap = resolve_size_cap(frame, size_cap)
    keep = [t for t in range(len(frame)) if frame.sizes[t] <= cap]
    if order is None:
        order = keep
    else:
        order = [t for t in order if frame.sizes[t] <= cap]
        if sorted(order) != keep:
            raise ValueError("order must list every node within the cap")
    xs = [MPoly.var(X(t)) for t in range(len(frame))]
    ys = [MPoly.var(Y(t)) for t in range(len(frame))]
    out: dict[int, MPoly] = {}
    pos = {t: i for i, t in enumerate(order)}
    pw_x, pw_y = _Powers(xs, frame.prime), _Powers(ys, frame.prime)
    solved = _Powers(out, frame.prime)
    for t in order:
        for u, _, _ in frame.below[t]:
            if pos[u] > pos[t]:
                raise ValueError("order must put lower nodes first")
        wx = frame.self_phi[t] * xs[t]
        wy = frame.self_phi[t] * ys[t]
        for u, ph, e in frame.below[t]:
            wx = wx + ph * pw_x.get(u, e)
            wy = wy + ph * pw_y.get(u, e)
        acc = wx + wy if kind == "sum" else wx * wy
        for u, ph, e in frame.below[t]:
            if _nonzero(out[u]):
                acc = acc - ph * solved.get(u, e)
        out[t] = poly_exact_div_int(acc, frame.self_phi[t])
    return UniversalPolySet(frame, kind, {t: out[t] for t in keep})


def check_homogeneity(polyset: UniversalPolySet) -> VerifyReport:
    """Weighted degree #T (sum) or 2#T (product) with deg X_U = #U; plus the value at Y = 0."""
    frame = polyset.frame
    report = VerifyReport("homogeneity", {"frame": frame.spec.to_json(), "kind": polyset.kind})
    weights = {}
    for t in range(len(frame)):
        weights[X(t)] = frame.sizes[t]
        weights[Y(t)] = frame.sizes[t]
    factor = 1 if polyset.kind == "sum" else 2
    for t, f in sorted(polyset.polys.items()):
        degs = f.weighted_degrees(weights)
        report.add(f"node {t} weighted degree", degs == {factor * frame.sizes[t]}, {"degrees": sorted(degs)})
        zero_y = {v: (0 if v.role == "Y" else MPoly.var(v)) for v in f.variables()}
        zero_x = {v: (0 if v.role == "X" else MPoly.var(v)) for v in f.variables()}
        at_y0 = _subst(f, zero_y)
        at_x0 = _subst(f, zero_x)
        if polyset.kind == "sum":
            ok = at_y0 == MPoly.var(X(t)) and at_x0 == MPoly.var(Y(t))
        else:
            ok = at_y0.is_zero() and at_x0.is_zero()
        report.add(f"node {t} value with one argument zero", ok, {"at_y0": at_y0.to_text(), "at_x0": at_x0.to_text()})
    return report


def _subst(f: MPoly, assignment) -> MPoly:
    if not assignment:
        return f
    res = poly_substitute(f, assignment)
    return res if isinstance(res, MPoly) else MPoly.const(res, f.modulus)


# -- universal congruences


def _reduced(f: MPoly, p: int) -> MPoly:
    return poly_reduce_mod(f, p)


def _check_abelian(frame: Frame):
    if not frame.is_abelian:
        raise NonAbelian("universal congruences are stated for abelian frames")


def _capped(frame: Frame, size_cap) -> Frame:
    cap = resolve_size_cap(frame, size_cap)
    if frame.max_size <= cap:
        return frame
    return frame.subframe([t for t in range(len(frame)) if frame.sizes[t] <= cap])


def universal_congruence(frame: Frame, which: str, params: dict | None = None) -> VerifyReport:
    """Check one of the generic congruences as an exact polynomial identity mod p.

    which:
      gen1          z = x y with x_0 = 0: at cyclic T, z_T = X_T Y_0^#T + (terms below T) mod p,
                    and #T z_T = #T X_T Y_0^#T + Psi_T mod p#T for the explicit Psi_T.
      gen2          z = sum_i x_i y_i with x_i0 = 0: z_T = sum_i X_iT Y_i0^#T + (terms below T) mod p.
      gen3          as gen2, at linked cyclic pairs: z_T - z_T' = sum_i (X_iT - X_iT') Y_i0^#T mod p.
      nicyclicsum   generic x, y agreeing at a linked pair: s_T = s_T' over Z.
      nicyclicprod  z = x y generic: z_T - z_T' = (x_T - x_T') y_0^#T + (y_T - y_T') x_0^#T mod p.
      pmult         p x generic: coordinate (1 - p^(p-1)) X_0^p + p X_T at size-p nodes,
                    which is X_0^p mod p.
    params: size_cap, r (number of products for gen2/gen3).
    """
    params = dict(params or {})
    _check_abelian(frame)
    sub = _capped(frame, params.get("size_cap"))
    p = frame.prime
    report = VerifyReport(f"congruence-{which}", {"frame": frame.spec.to_json(), "max_size": sub.max_size, **params})
    handler = {
        "gen1": _gen1,
        "gen2": _gen2,
        "gen3": _gen3,
        "nicyclicsum": _nicyclicsum,
        "nicyclicprod": _nicyclicprod,
        "pmult": _pmult,
    }.get(which)
    if handler is None:
        raise ValueError(f"unknown congruence {which!r}")
    handler(sub, p, params, report)
    return report


def _vars_below_only(f: MPoly, allowed_nodes: set) -> bool:
    return all(v.node in allowed_nodes for v in f.variables())


def _gen1(frame, p, params, report):
    x = generic_vector(frame, "X", zero_nodes=[frame.bottom])
    y = generic_vector(frame, "Y")
    z = (x * y).coords
    y0 = MPoly.var(Y(frame.bottom))
    for t in range(len(frame)):
        nd = frame.nodes[t]
        if not nd.cyclic or t == frame.bottom:
            continue
        size = nd.size
        lead = MPoly.var(X(t)) * y0 ** size
        psi = _reduced(z[t] - lead, p)
        below = set(frame.strict_downset(t))
        report.add(f"node {t}: remainder uses only lower variables", _vars_below_only(psi, below),
                   {"remainder_vars": [str(v) for v in psi.variables()]})
        chain = [u for u in frame.strict_downset(t) if u != frame.bottom]
        sx = sum((frame.sizes[u] * MPoly.var(X(u)) ** (size // frame.sizes[u]) for u in chain), MPoly.const(0))
        sy = sum((frame.sizes[u] * MPoly.var(Y(u)) ** (size // frame.sizes[u]) for u in chain), MPoly.const(0))
        sz = sum((frame.sizes[u] * z[u] ** (size // frame.sizes[u]) for u in chain), MPoly.const(0))
        big_psi = y0 ** size * sx + sx * sy - sz
        diff = size * z[t] - size * lead - big_psi
        ok = poly_reduce_mod(diff, p * size).is_zero()
        report.add(f"node {t}: explicit Psi congruence mod {p * size}", ok, {"terms_left": len(poly_reduce_mod(diff, p * size))})


def _sum_of_products(frame, r, zero_x=True):
    total = None
    for i in range(1, r + 1):
        xi = generic_vector(frame, "X", i, zero_nodes=[frame.bottom] if zero_x else [])
        yi = generic_vector(frame, "Y", i)
        term = xi * yi
        total = term if total is None else total + term
    return total.coords


def _gen2(frame, p, params, report):
    r = int(params.get("r", 2))
    z = _sum_of_products(frame, r)
    for t in range(len(frame)):
        if t == frame.bottom:
            continue
        size = frame.sizes[t]
        lead = sum((MPoly.var(X(t, i)) * MPoly.var(Y(frame.bottom, i)) ** size for i in range(1, r + 1)),
                   MPoly.const(0))
        rest = _reduced(z[t] - lead, p)
        below = set(frame.strict_downset(t))
        report.add(f"node {t}: remainder uses only lower variables", _vars_below_only(rest, below),
                   {"remainder_vars": [str(v) for v in rest.variables()]})


def _cyclic_linked_pairs(frame):
    return [(a, b) for a, b in linked_pairs(frame) if frame.nodes[a].cyclic and frame.nodes[b].cyclic]


def _gen3(frame, p, params, report):
    r = int(params.get("r", 1))
    z = _sum_of_products(frame, r)
    pairs = _cyclic_linked_pairs(frame)
    if "pairs" in params:
        pairs = [tuple(pr) for pr in params["pairs"]]
    for a, b in pairs:
        size = frame.sizes[a]
        rhs = sum(((MPoly.var(X(a, i)) - MPoly.var(X(b, i))) * MPoly.var(Y(frame.bottom, i)) ** size
                   for i in range(1, r + 1)), MPoly.const(0))
        ok = _reduced(z[a] - z[b] - rhs, p).is_zero()
        report.add(f"linked cyclic pair ({a}, {b})", ok, {"size": size})
    if not pairs:
        report.add("frame has linked cyclic pairs", False, {})


def _nicyclicsum(frame, p, params, report):
    pairs = linked_pairs(frame)
    for a, b in pairs:
        x = generic_vector(frame, "X")
        y = generic_vector(frame, "Y")
        # make the pair agree: coordinate b is a copy of coordinate a
        xs = list(x.coords)
        ys = list(y.coords)
        xs[b], ys[b] = xs[a], ys[a]
        x2 = type(x)(frame, x.ring, xs)
        y2 = type(y)(frame, y.ring, ys)
        s = (x2 + y2).coords
        report.add(f"linked pair ({a}, {b}) sum agrees", s[a] == s[b], {"size": frame.sizes[a]})


def _nicyclicprod(frame, p, params, report):
    x = generic_vector(frame, "X")
    y = generic_vector(frame, "Y")
    z = (x * y).coords
    pairs = linked_pairs(frame)
    if "pairs" in params:
        pairs = [tuple(pr) for pr in params["pairs"]]
    x0, y0 = MPoly.var(X(frame.bottom)), MPoly.var(Y(frame.bottom))
    for a, b in pairs:
        size = frame.sizes[a]
        rhs = (MPoly.var(X(a)) - MPoly.var(X(b))) * y0 ** size + (MPoly.var(Y(a)) - MPoly.var(Y(b))) * x0 ** size
        ok = _reduced(z[a] - z[b] - rhs, p).is_zero()
        report.add(f"linked pair ({a}, {b}) product congruence", ok, {"size": size})


def _pmult(frame, p, params, report):
    x = generic_vector(frame, "X")
    px = (p * x).coords
    x0 = MPoly.var(X(frame.bottom))
    report.add("bottom coordinate is p X_0", px[frame.bottom] == p * x0, {})
    for t in frame.nodes_of_size(p):
        exact = (1 - p ** (p - 1)) * x0 ** p + p * MPoly.var(X(t))
        report.add(f"node {t}: exact formula over Z", px[t] == exact, {"value": px[t].to_text()})
        report.add(f"node {t}: reduces to X_0^p mod p", _reduced(px[t], p) == _reduced(x0 ** p, p), {})
