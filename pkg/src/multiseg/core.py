"""Segments, multisegments, weights, and rank invariants.

The vocabulary layer shared by every other module: integer segments
``[b, e]``, finite multisets of segments kept in one canonical sorted
form, weight functions, pairwise segment relations, and the rank matrix
that characterizes the dominance order on multisegments.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator

Segment = tuple[int, int]
Weight = dict[int, int]


class BadRange(ValueError):
    """Raised for an empty segment [b, e] with b > e, or i > j in a rank query."""


class NotLinked(ValueError):
    """Raised when an elementary operation is requested on a non-linked pair."""


class NotMember(ValueError):
    """Raised when a requested segment copy is absent from a multisegment."""


def seg(begin: int, end: int | None = None) -> Segment:
    """Build a segment, validating begin <= end. ``seg(k)`` is the point [k, k]."""
    if end is None:
        end = begin
    begin, end = int(begin), int(end)
    if begin > end:
        raise BadRange(f"empty segment [{begin},{end}]")
    return (begin, end)


def _canonical_key(s: Segment) -> tuple[int, int]:
    # end-major, begin-descending within an equal end
    return (s[1], -s[0])


class Multisegment:
    """A finite multiset of segments in canonical sorted form.

    Equality and hashing are by the canonical form; instances are
    immutable and safe to share.
    """

    __slots__ = ("segs",)

    def __init__(self, segments: Iterable[Segment | Iterable[int]] = ()):
        ss = []
        for s in segments:
            b, e = s
            ss.append(seg(b, e))
        ss.sort(key=_canonical_key)
        self.segs: tuple[Segment, ...] = tuple(ss)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segs)

    def __len__(self) -> int:
        return len(self.segs)

    def __bool__(self) -> bool:
        return bool(self.segs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Multisegment) and self.segs == other.segs

    def __hash__(self) -> int:
        return hash(self.segs)

    def __lt__(self, other: "Multisegment") -> bool:
        # arbitrary total order for deterministic sorting, not the poset order
        return self.segs < other.segs

    def __le__(self, other: "Multisegment") -> bool:
        return self.segs <= other.segs

    def __repr__(self) -> str:
        inner = "+".join(f"[{b},{e}]" for b, e in self.segs)
        return f"Multisegment({inner or '0'})"

    @property
    def entries(self) -> tuple[tuple[Segment, int], ...]:
        """Canonical (segment, multiplicity) pairs."""
        out: list[tuple[Segment, int]] = []
        for s in self.segs:
            if out and out[-1][0] == s:
                out[-1] = (s, out[-1][1] + 1)
            else:
                out.append((s, 1))
        return tuple(out)

    def count(self, s: Segment) -> int:
        return self.segs.count(tuple(s))

    def __add__(self, other: "Multisegment") -> "Multisegment":
        return Multisegment(self.segs + other.segs)

    def without(self, *remove: Segment) -> "Multisegment":
        """Remove one copy of each listed segment; NotMember if a copy is absent."""
        pool = list(self.segs)
        for s in remove:
            s = tuple(s)
            try:
                pool.remove(s)
            except ValueError:
                raise NotMember(f"{s} not in {self!r}") from None
        return Multisegment(pool)

    def shift(self, t: int) -> "Multisegment":
        return Multisegment((b + t, e + t) for b, e in self.segs)

    def begins(self) -> list[int]:
        """Begin values, sorted ascending, with multiplicity."""
        return sorted(b for b, _ in self.segs)

    def ends(self) -> list[int]:
        """End values, sorted ascending, with multiplicity."""
        return sorted(e for _, e in self.segs)


def mseg(*segments: Segment | Iterable[int] | int) -> Multisegment:
    """Convenience constructor: ``mseg((1,2),(2,3))`` or ``mseg(1, 2, 2, 3)`` for points."""
    out: list[Segment] = []
    for s in segments:
        if isinstance(s, int):
            out.append(seg(s))
        else:
            b, e = s
            out.append(seg(b, e))
    return Multisegment(out)


class RelationKind(enum.Enum):
    EQUAL = "equal"
    COVERS = "covers"
    COVERED_BY = "covered_by"
    LINKED_NOT_JUXTAPOSED = "linked_not_juxtaposed"
    JUXTAPOSED = "juxtaposed"
    UNRELATED = "unrelated"


@dataclass(frozen=True)
class SegmentRelation:
    kind: RelationKind
    precedes: bool

    @property
    def linked(self) -> bool:
        return self.kind in (RelationKind.LINKED_NOT_JUXTAPOSED, RelationKind.JUXTAPOSED)


def segment_relation(d1: Segment, d2: Segment) -> SegmentRelation:
    """Classify an ordered pair of segments.

    The pair is linked when neither contains the other and the union is a
    segment; juxtaposed when additionally disjoint. ``precedes`` is set
    when the pair is linked and d1 starts first.
    """
    b1, e1 = d1
    b2, e2 = d2
    if d1 == tuple(d2):
        kind = RelationKind.EQUAL
    elif b1 <= b2 and e2 <= e1:
        kind = RelationKind.COVERS
    elif b2 <= b1 and e1 <= e2:
        kind = RelationKind.COVERED_BY
    elif max(b1, b2) <= min(e1, e2) + 1:
        if max(b1, b2) == min(e1, e2) + 1:
            kind = RelationKind.JUXTAPOSED
        else:
            kind = RelationKind.LINKED_NOT_JUXTAPOSED
    else:
        kind = RelationKind.UNRELATED
    precedes = kind in (RelationKind.LINKED_NOT_JUXTAPOSED, RelationKind.JUXTAPOSED) and b1 < b2
    return SegmentRelation(kind, precedes)


def linked(d1: Segment, d2: Segment) -> bool:
    return segment_relation(d1, d2).linked


def elementary_op(a: Multisegment, d1: Segment, d2: Segment) -> Multisegment:
    """Replace a linked pair {d1, d2} of a by {d1 ∪ d2, d1 ∩ d2}.

    An empty intersection inserts nothing; degree is preserved either way.
    """
    d1, d2 = tuple(d1), tuple(d2)
    if not linked(d1, d2):
        raise NotLinked(f"{d1} and {d2} are not linked")
    rest = a.without(d1, d2)
    b1, e1 = d1
    b2, e2 = d2
    new = [(min(b1, b2), max(e1, e2))]
    if max(b1, b2) <= min(e1, e2):
        new.append((max(b1, b2), min(e1, e2)))
    return rest + Multisegment(new)


def weight_of(a: Multisegment) -> Weight:
    """phi_a(k) = number of segments of a containing k, with multiplicity."""
    w: Weight = {}
    for b, e in a:
        for k in range(b, e + 1):
            w[k] = w.get(k, 0) + 1
    return w


def degree_of(a: Multisegment) -> int:
    return sum(e - b + 1 for b, e in a)


def rank_invariant(a: Multisegment, i: int, j: int) -> int:
    """Number of segments [l, m] of a with l <= i and j <= m."""
    if i > j:
        raise BadRange(f"rank_invariant needs i <= j, got ({i},{j})")
    return sum(1 for l, m in a if l <= i and j <= m)


def support_range(a: Multisegment) -> tuple[int, int]:
    """(min, max) of the support of phi_a; invalid on the empty multisegment."""
    if not a:
        raise BadRange("empty multisegment has no support")
    return min(b for b, _ in a), max(e for _, e in a)


def f_end(a: Multisegment, k: int) -> int:
    """Number of segments of a ending exactly at k."""
    return sum(1 for _, e in a if e == k)


def f_begin(a: Multisegment, k: int) -> int:
    return sum(1 for b, _ in a if b == k)


def enders(a: Multisegment, k: int) -> list[Segment]:
    """Segments ending at k, sorted by begin ascending (longest first)."""
    return sorted((s for s in a if s[1] == k))


def beginners(a: Multisegment, k: int) -> list[Segment]:
    """Segments beginning at k, sorted by end descending (longest first)."""
    return sorted((s for s in a if s[0] == k), key=lambda s: -s[1])
