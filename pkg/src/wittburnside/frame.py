"""The frame of a finite p-group: transitive G-sets up to isomorphism, as a poset.

A node is a conjugacy class of subgroups H, standing for the G-set T = G/H.
U <= T when stab(T) is conjugate into stab(U), and phi[T][U] counts the
G-maps T -> U.  Nodes are sorted by (size, canonical stabilizer key) so that
everything below a node comes before it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import groupkit as gk
from .errors import LevelUndefined, NonAbelian, NotDownClosed, TruncationTooSmall


@dataclass(frozen=True)
class FrameNode:
    id: int
    stabilizer: object
    size: int
    level: int | None
    cyclic: bool
    class_size: int = 1
    invariants: tuple | None = None

    def to_json(self):
        return {
            "id": self.id,
            "stab": self.stabilizer.to_json(),
            "size": str(self.size),
            "level": self.level,
            "cyclic": self.cyclic,
        }


class Frame:
    """Immutable finite frame with dense leq and phi tables.

    ``below[t]`` lists (u, phi_T(U), #T/#U) for u strictly below t, which is
    exactly what the Witt polynomial of t needs.
    """

    def __init__(self, spec, nodes, leq: np.ndarray, phi: np.ndarray, parent=None, embedding=None):
        self.spec = spec
        self.nodes = tuple(nodes)
        self.leq = leq
        self.leq.setflags(write=False)
        self.phi_table = phi
        self.phi_table.setflags(write=False)
        self.parent = parent
        self.embedding = embedding
        self.sizes = tuple(nd.size for nd in self.nodes)
        n = len(self.nodes)
        self._down = tuple(tuple(int(u) for u in np.nonzero(leq[:, t])[0]) for t in range(n))
        self._up = tuple(tuple(int(t) for t in np.nonzero(leq[u, :])[0]) for u in range(n))
        self.below = tuple(
            tuple((u, int(phi[t, u]), self.sizes[t] // self.sizes[u]) for u in self._down[t] if u != t)
            for t in range(n)
        )
        self.self_phi = tuple(int(phi[t, t]) for t in range(n))
        strict = leq & ~np.eye(n, dtype=bool)
        s = strict.astype(np.float32)
        two_step = (s @ s) > 0
        cov = strict & ~two_step
        self._covers = tuple(tuple(int(t) for t in np.nonzero(cov[u, :])[0]) for u in range(n))
        self._lower_covers = tuple(tuple(int(u) for u in np.nonzero(cov[:, t])[0]) for t in range(n))
        self._index = {nd.stabilizer: nd.id for nd in self.nodes}
        self._signature = (spec, tuple(nd.stabilizer for nd in self.nodes))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Frame):
            return NotImplemented
        return self._signature == other._signature

    def __hash__(self):
        return hash(self._signature)

    # -- basic queries

    def __len__(self):
        return len(self.nodes)

    def __repr__(self):
        return f"Frame({self.spec}, {len(self.nodes)} nodes)"

    @property
    def prime(self):
        return self.spec.prime

    @property
    def bottom(self) -> int:
        return 0

    @property
    def max_size(self) -> int:
        return max(self.sizes)

    @property
    def truncation(self):
        return self.spec.truncation

    @property
    def is_abelian(self) -> bool:
        return isinstance(self.spec, gk.AbelianP)

    def size(self, t) -> int:
        return self.sizes[t]

    def phi(self, t, u) -> int:
        return int(self.phi_table[t, u])

    def is_leq(self, u, t) -> bool:
        return bool(self.leq[u, t])

    def downset(self, t) -> tuple:
        return self._down[t]

    def strict_downset(self, t) -> tuple:
        return tuple(u for u in self._down[t] if u != t)

    def upset(self, u) -> tuple:
        return self._up[u]

    def covers(self, u) -> tuple:
        """Nodes covering u (immediately above it)."""
        return self._covers[u]

    def lower_covers(self, t) -> tuple:
        return self._lower_covers[t]

    def find(self, stabilizer):
        """Node id whose stabilizer representative is the given subgroup, or None."""
        return self._index.get(stabilizer)

    def node_of(self, stabilizer) -> int:
        t = self.find(stabilizer)
        if t is None:
            raise TruncationTooSmall(f"{stabilizer} is not a node of this frame")
        return t

    def nodes_of_size(self, size) -> list[int]:
        return [nd.id for nd in self.nodes if nd.size == size]

    def is_down_closed(self, ids: Iterable[int]) -> bool:
        ids = set(ids)
        return all(set(self._down[t]) <= ids for t in ids)

    def subframe(self, ids: Iterable[int]) -> "Frame":
        """The full subframe on a down-closed set of nodes; ``embedding`` maps new ids to old."""
        ids = sorted(set(ids))
        if not self.is_down_closed(ids):
            raise NotDownClosed("node set is not closed downwards")
        idx = np.array(ids, dtype=np.int64)
        nodes = [
            FrameNode(i, nd.stabilizer, nd.size, nd.level, nd.cyclic, nd.class_size, nd.invariants)
            for i, nd in enumerate(self.nodes[j] for j in ids)
        ]
        leq = self.leq[np.ix_(idx, idx)].copy()
        phi = self.phi_table[np.ix_(idx, idx)].copy()
        return Frame(self.spec, nodes, leq, phi, parent=self, embedding=tuple(ids))

    def down_closure(self, ids: Iterable[int]) -> list[int]:
        out: set[int] = set()
        for t in ids:
            out.update(self._down[t])
        return sorted(out)

    # -- serialization

    def to_json(self) -> dict:
        n = len(self.nodes)
        return {
            "spec": self.spec.to_json(),
            "nodes": [nd.to_json() for nd in self.nodes],
            "leq": [list(self._down[t]) for t in range(n)],
            "covers": [list(self._covers[u]) for u in range(n)],
            "phi": [[str(int(x)) for x in self.phi_table[t]] for t in range(n)],
        }

    def to_dot(self) -> str:
        lines = ["digraph frame {", "  rankdir=BT;", "  node [shape=circle, fontsize=10];"]
        for nd in self.nodes:
            shape = ', style=filled, fillcolor="#dddddd"' if nd.cyclic else ""
            lines.append(f'  n{nd.id} [label="{nd.id}\\n#{nd.size}"{shape}];')
        for size in sorted(set(self.sizes)):
            same = " ".join(f"n{t};" for t in self.nodes_of_size(size))
            lines.append(f"  {{ rank=same; {same} }}")
        for u in range(len(self.nodes)):
            for t in self._covers[u]:
                lines.append(f"  n{u} -> n{t};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# -- construction


def _is_cyclic_quotient(spec, H) -> bool:
    if isinstance(spec, gk.AbelianP):
        return sum(1 for a in gk.quotient_invariants(spec, H) if a) <= 1
    if not gk.is_normal(spec, H):
        return False
    k = gk.index(spec, H)
    S = gk.elements(spec, H)
    for g in range(spec.order):
        x, j = g, 1
        while x not in S:
            x = gk.multiply(spec, x, g)
            j += 1
        if j == k:
            return True
    return False


def _abelian_leq(spec, stabs, sizes) -> np.ndarray:
    """leq[u, t] = stab(t) <= stab(u), via adj(M_U) v = 0 mod det(M_U)."""
    n = len(stabs)
    d = spec.rank
    mats = np.array([s.matrix for s in stabs], dtype=np.int64)
    dets = np.array([int(np.prod(np.diag(m))) for m in mats], dtype=np.int64)
    adj = np.empty_like(mats)
    for i, m in enumerate(stabs):
        # adjugate of an integer upper-triangular matrix, exactly
        inv = _int_adjugate(m.matrix)
        adj[i] = inv
    sizes = np.array(sizes, dtype=np.int64)
    leq = np.zeros((n, n), dtype=bool)
    chunk = max(1, 2_000_000 // max(1, n * d * d))
    for start in range(0, n, chunk):
        cols = mats[start:start + chunk]  # (c, d, d) columns of the T stabilizers
        prod_ = np.einsum("uij,tjk->utik", adj, cols)  # (n, c, d, d)
        ok = np.all(prod_ % dets[:, None, None, None] == 0, axis=(2, 3))
        leq[:, start:start + chunk] = ok
    # sizes must divide as a sanity net; containment already implies it
    assert np.all(~leq | ((sizes[None, :] % sizes[:, None]) == 0))
    return leq


def _int_adjugate(M):
    from sympy import Matrix

    A = Matrix(M).adjugate()
    return [[int(A[i, j]) for j in range(A.shape[1])] for i in range(A.shape[0])]


def build_frame(spec, max_size=None, order_cap=None) -> Frame:
    """Build the frame of ``spec``; with max_size, only G-sets of size <= max_size.

    A size-capped frame is down-closed, so it is a legitimate truncation.
    """
    subs = gk.enumerate_subgroups(spec, max_index=max_size, order_cap=order_cap)
    classes = gk.conjugacy_classes(spec, subs)
    records = []
    homogeneous = isinstance(spec, gk.AbelianP) and spec.truncation is not None
    for H, csize in classes:
        size = gk.index(spec, H)
        inv = gk.quotient_invariants(spec, H) if isinstance(spec, gk.AbelianP) else None
        level = min(inv) if homogeneous else None
        records.append((size, H.key(), H, csize, inv, level))
    records.sort(key=lambda r: (r[0], r[1]))
    nodes = [
        FrameNode(i, H, size, level, _is_cyclic_quotient(spec, H), csize, inv)
        for i, (size, _, H, csize, inv, level) in enumerate(records)
    ]
    n = len(nodes)
    stabs = [nd.stabilizer for nd in nodes]
    sizes = [nd.size for nd in nodes]
    if isinstance(spec, gk.AbelianP):
        leq = _abelian_leq(spec, stabs, sizes)
        phi = np.where(leq, np.array(sizes, dtype=np.int64)[:, None], 0).T.copy()
    else:
        phi = np.zeros((n, n), dtype=np.int64)
        for t in range(n):
            for u in range(t + 1):
                if sizes[t] % sizes[u] == 0:
                    phi[t, u] = gk.count_conjugates_into(spec, stabs[t], stabs[u])
        leq = (phi > 0).T.copy()
    return Frame(spec, nodes, leq, phi)


def count_gmaps(frame: Frame, t: int, u: int) -> int:
    """Number of G-maps T -> U, computed from the stabilizers (not the stored table)."""
    spec = frame.spec
    H, K = frame.nodes[t].stabilizer, frame.nodes[u].stabilizer
    if isinstance(spec, gk.AbelianP):
        return frame.sizes[u] if gk.contains(spec, H, K) else 0
    return gk.count_conjugates_into(spec, H, K)


def downset(frame: Frame, t: int) -> tuple:
    return frame.downset(t)


def strict_downset(frame: Frame, t: int) -> tuple:
    return frame.strict_downset(t)


def linked_pairs(frame: Frame) -> list[tuple[int, int]]:
    """Unordered pairs of distinct nodes with identical strict downsets."""
    groups: dict[tuple, list[int]] = {}
    for t in range(len(frame)):
        groups.setdefault(frame.strict_downset(t), []).append(t)
    out = []
    for members in groups.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                out.append((a, b))
    return sorted(out)


# -- explicit constructions for (Z/p^n)^d


def _require_homogeneous(frame: Frame):
    spec = frame.spec
    if not isinstance(spec, gk.AbelianP):
        raise NonAbelian("construction needs an abelian frame")
    if spec.truncation is None:
        raise LevelUndefined("construction needs a (Z/p^n)^d frame")
    return spec


def linked_cyclic_cover(frame: Frame, t: int) -> tuple[int, int]:
    """Two cyclic nodes covering the cyclic node t with the same strict downset.

    In a basis e_1..e_d adapted to H = stab(t) = <e_1..e_{d-1}, p^k e_d> the
    covers are <e_1..e_{d-1}, p^(k+1) e_d> and
    <e_1..e_{d-2}, p e_{d-1}, e_{d-1} + p^k e_d>.
    """
    spec = _require_homogeneous(frame)
    d, p, n = spec.rank, spec.p, spec.truncation
    if d < 2:
        raise ValueError("linked cyclic covers need rank at least 2")
    node = frame.nodes[t]
    if not node.cyclic:
        raise ValueError(f"node {t} is not cyclic")
    basis, exps = gk.adapted_basis(spec, node.stabilizer)
    k = exps[-1]
    if k + 1 > n or p * node.size > frame.max_size:
        raise TruncationTooSmall(f"covers of node {t} do not fit in the frame")
    e = basis
    last = e[d - 1]
    gens1 = list(e[: d - 1]) + [tuple(p ** (k + 1) * x for x in last)]
    gens2 = list(e[: d - 2]) + [
        tuple(p * x for x in e[d - 2]),
        tuple(a + p ** k * b for a, b in zip(e[d - 2], last)),
    ]
    t1 = frame.node_of(gk.hnf_from_generators(spec, gens1))
    t2 = frame.node_of(gk.hnf_from_generators(spec, gens2))
    return t1, t2


def tj_family(p: int, j: int, n: int) -> tuple:
    """Stabilizers of T_j = G/H_j and T_j' in (Z/p^n)^2.

    H_j has matrix diag(1, p^j) and H_j' has matrix [[p, 1], [0, p^(j-1)]].
    """
    if j < 2:
        raise ValueError("the family starts at j = 2")
    if j > n:
        raise TruncationTooSmall(f"T_{j} needs truncation at least {j}, got {n}")
    spec = gk.AbelianP(p, (n, n))
    hj = gk.hnf_from_generators(spec, [(1, 0), (0, p ** j)])
    hj2 = gk.hnf_from_generators(spec, [(p, 0), (1, p ** (j - 1))])
    return hj, hj2


def w_stabilizer(p: int, n: int):
    """Stabilizer of the fixed size-p node W, generated by e_1 and p e_2."""
    return gk.hnf_from_generators(gk.AbelianP(p, (n, n)), [(1, 0), (0, p)])


def tj_nodes(frame: Frame, j: int) -> tuple[int, int]:
    spec = _require_homogeneous(frame)
    if spec.rank != 2:
        raise ValueError("the T_j family lives in rank 2")
    a, b = tj_family(spec.p, j, spec.truncation)
    return frame.node_of(a), frame.node_of(b)


def level(frame: Frame, t: int) -> int:
    lv = frame.nodes[t].level
    if lv is None:
        raise LevelUndefined("levels are defined for (Z/p^n)^d frames only")
    return lv


def scaled_hat(frame: Frame, t: int) -> int:
    """The node whose stabilizer is stab(t) divided by p^level(t); it has level 0."""
    spec = _require_homogeneous(frame)
    lv = level(frame, t)
    H = frame.nodes[t].stabilizer
    q = spec.p ** lv
    cols = [tuple(x // q for x in H.column(j)) for j in range(spec.rank)]
    return frame.node_of(gk.hnf_from_generators(spec, cols))


def same_level_same_size_below(frame: Frame, t: int, lv: int, size: int) -> list[int]:
    _require_homogeneous(frame)
    return [u for u in frame.downset(t) if frame.nodes[u].level == lv and frame.sizes[u] == size]


def same_level_covers(frame: Frame, t: int) -> list[int]:
    lv = level(frame, t)
    return [u for u in frame.covers(t) if frame.nodes[u].level == lv]
