"""The partial order on multisegments and the poset S(a).

Membership is decided by rank invariants alone; generation is a
breadth-first closure under elementary operations, returning a snapshot
with cover edges (transitive reduction) and chain-length levels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import (
    Multisegment,
    elementary_op,
    linked,
    rank_invariant,
    support_range,
    weight_of,
)

DEFAULT_SIZE_LIMIT = 200_000


class SizeLimit(RuntimeError):
    """Raised when poset generation exceeds the configured element cap."""


def leq(b: Multisegment, a: Multisegment) -> bool:
    """b <= a: equal weights and r_ij(a) <= r_ij(b) for all i <= j."""
    if b == a:
        return True
    wa = weight_of(a)
    if weight_of(b) != wa:
        return False
    lo, hi = support_range(a)
    for i in range(lo, hi + 1):
        for j in range(i, hi + 1):
            if rank_invariant(a, i, j) > rank_invariant(b, i, j):
                return False
    return True


def _op_children(a: Multisegment) -> list[Multisegment]:
    """All single elementary operation results, deduplicated."""
    segs = a.segs
    seen = set()
    out = []
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if segs[i] != segs[j] and linked(segs[i], segs[j]):
                child = elementary_op(a, segs[i], segs[j])
                if child not in seen:
                    seen.add(child)
                    out.append(child)
    return out


@dataclass(frozen=True)
class PosetSnapshot:
    root: Multisegment
    elements: tuple[Multisegment, ...]
    cover_edges: tuple[tuple[int, int], ...]
    levels: Mapping[Multisegment, int]

    def index(self, b: Multisegment) -> int:
        return self.elements.index(b)


def generate_poset(a: Multisegment, size_limit: int = DEFAULT_SIZE_LIMIT) -> PosetSnapshot:
    """Breadth-first closure of {a} under elementary operations.

    Output ordering is deterministic: elements sorted by canonical form.
    Levels are the maximal chain lengths ell(b, a); cover edges are the
    transitive reduction of the generated order.
    """
    edges: set[tuple[Multisegment, Multisegment]] = set()
    seen = {a}
    frontier = [a]
    while frontier:
        nxt = []
        for u in frontier:
            for v in _op_children(u):
                edges.add((u, v))
                if v not in seen:
                    seen.add(v)
                    if len(seen) > size_limit:
                        raise SizeLimit(f"poset of {a!r} exceeds {size_limit} elements")
                    nxt.append(v)
        frontier = nxt

    elements = tuple(sorted(seen))
    idx = {m: i for i, m in enumerate(elements)}
    succ: dict[int, set[int]] = {i: set() for i in range(len(elements))}
    pred: dict[int, set[int]] = {i: set() for i in range(len(elements))}
    for u, v in edges:
        succ[idx[u]].add(idx[v])
        pred[idx[v]].add(idx[u])

    # topological order by in-degree (every edge strictly decreases the order)
    indeg = {i: len(pred[i]) for i in range(len(elements))}
    order = [i for i in range(len(elements)) if indeg[i] == 0]
    k = 0
    while k < len(order):
        u = order[k]
        k += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                order.append(v)

    # levels: longest path from the root
    level = {i: 0 for i in range(len(elements))}
    for u in order:
        for v in succ[u]:
            level[v] = max(level[v], level[u] + 1)

    # transitive reduction via descendant bitsets in reverse topological order
    desc = {i: 0 for i in range(len(elements))}
    for u in reversed(order):
        d = 0
        for v in succ[u]:
            d |= (1 << v) | desc[v]
        desc[u] = d
    covers = []
    for u in range(len(elements)):
        for v in succ[u]:
            if not any((desc[w] >> v) & 1 for w in succ[u] if w != v):
                covers.append((u, v))

    levels = {elements[i]: level[i] for i in range(len(elements))}
    return PosetSnapshot(a, elements, tuple(sorted(covers)), levels)


def minimal_element(a: Multisegment) -> Multisegment:
    """Greedy extraction of the unique minimal element of S(a).

    Repeatedly pull out the segment [b, e] where e is the largest point of
    the residual weight and b is smallest with the weight positive on all
    of [b, e]; the result has no linked pair.
    """
    if not a:
        return a
    phi = weight_of(a)
    out = []
    while any(phi.values()):
        e = max(k for k, c in phi.items() if c > 0)
        b = e
        while phi.get(b - 1, 0) > 0:
            b -= 1
        out.append((b, e))
        for k in range(b, e + 1):
            phi[k] -= 1
    return Multisegment(out)


def is_minimal(a: Multisegment) -> bool:
    segs = a.segs
    return not any(
        segs[i] != segs[j] and linked(segs[i], segs[j])
        for i in range(len(segs))
        for j in range(i + 1, len(segs))
    )


def chain_length(b: Multisegment, a: Multisegment) -> int:
    """ell(b, a): maximal number of elementary operations from a down to b."""
    snap = generate_poset(a)
    if b not in snap.levels:
        raise ValueError(f"{b!r} is not below {a!r}")
    return snap.levels[b]
