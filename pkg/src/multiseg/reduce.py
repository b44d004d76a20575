"""Truncation functors, lifting inverses, symmetrization, and poset classification.

``truncate`` removes the last point of every segment ending (right) or
beginning (left) at a given value.  The hypothesis H_k carves out the
sub-poset S(a)_k on which truncation is an order isomorphism, and
``psi_k_inv`` reconstructs the unique preimage.  Chaining such lifts reduces
any multisegment to an ordinary, then symmetric, then parabolic-type model
without changing multiplicities; ``SymmetrizationCertificate`` records a
replayable chain of the scripts used.  ``relation_type_equal`` and
``xi_transport`` implement the rewriting bijection between multisegments
whose segments interact the same way pairwise, and ``classify_poset``
identifies S(a) with an upper interval inside a parabolic quotient poset.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import (
    BadRange,
    Multisegment,
    RelationKind,
    Segment,
    beginners,
    degree_of,
    enders,
    f_begin,
    f_end,
    linked,
    segment_relation,
)
from .coxeter import Permutation, in_double_quotient, phi, phi_inv
from .kl import NotComparable
from .poset import generate_poset, leq, minimal_element

SIDES = ("left", "right")


class NotInDomain(ValueError):
    """Raised when an argument is outside the domain of a truncation bijection."""


class NoBijection(ValueError):
    """Raised when no relation-preserving bijection between two multisegments exists."""


@dataclass(frozen=True)
class TruncationStep:
    side: str
    k: int

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}, got {self.side!r}")


def _cut(a: Multisegment, k: int, side: str) -> Multisegment:
    out: list[Segment] = []
    for b, e in a:
        if side == "right" and e == k:
            if b <= k - 1:
                out.append((b, k - 1))
        elif side == "left" and b == k:
            if k + 1 <= e:
                out.append((k + 1, e))
        else:
            out.append((b, e))
    return Multisegment(out)


def truncate(a: Multisegment, step: TruncationStep) -> Multisegment:
    """Replace every segment ending (right) or beginning (left) at step.k by its
    shortening, dropping segments that become empty."""
    return _cut(a, step.k, step.side)


def truncate_seq(a: Multisegment, steps: Sequence[TruncationStep]) -> Multisegment:
    for step in steps:
        a = truncate(a, step)
    return a


def _hypothesis(b: Multisegment, a: Multisegment, k: int, side: str) -> bool:
    if degree_of(_cut(b, k, side)) != degree_of(_cut(a, k, side)):
        return False
    if side == "right":
        lo = [s for s, _ in b.entries if s[1] == k - 1]
        hi = [s for s, _ in b.entries if s[1] == k]
    else:
        lo = [s for s, _ in b.entries if s[0] == k + 1]
        hi = [s for s, _ in b.entries if s[0] == k]
    return not any(linked(s, t) for s in lo for t in hi)


def hypothesis_Hk(b: Multisegment, a: Multisegment, k: int, side: str = "right") -> bool:
    """Whether b keeps the full complement of k-enders of a, with no linked pair
    of segments ending at k-1 and k (mirrored for the left side)."""
    if not leq(b, a):
        raise NotComparable(f"{b!r} is not below {a!r}")
    return _hypothesis(b, a, k, side)


def in_S_a_k(b: Multisegment, a: Multisegment, k: int, side: str = "right") -> bool:
    """Membership test for the sub-poset on which truncation at k is bijective.

    Total: returns False rather than raising when b is not below a.
    """
    return leq(b, a) and _hypothesis(b, a, k, side)


def psi_k(b: Multisegment, a: Multisegment, k: int, side: str = "right") -> Multisegment:
    if not in_S_a_k(b, a, k, side):
        raise NotInDomain(f"{b!r} is not in the truncation domain of {a!r} at {k}")
    return _cut(b, k, side)


def psi_k_inv(d: Multisegment, a: Multisegment, k: int, side: str = "right") -> Multisegment:
    """The unique c with hypothesis H_k below a such that cutting c at k gives d.

    The closed rule: extend the longest segments of d stopping one short of k,
    one for each segment of a stopping at k, padding with one-point segments
    [k,k] when d has too few.  Any other lift creates a linked pair straddling
    k and leaves the domain, so the choice is forced; a filtered enumeration
    of the poset below a backs up the rule in case the direct check fails.
    """
    ak = _cut(a, k, side)
    if not leq(d, ak):
        raise NotInDomain(f"{d!r} is not below the truncation of {a!r} at {k}")
    lk = f_end(a, k) if side == "right" else f_begin(a, k)
    if lk == 0:
        return d
    if side == "right":
        cands = enders(d, k - 1)  # begin ascending: longest first
        ext = cands[:lk]
        lifted = [(b, k) for b, _ in ext]
    else:
        cands = beginners(d, k + 1)  # end descending: longest first
        ext = cands[:lk]
        lifted = [(k, e) for _, e in ext]
    pads = [(k, k)] * (lk - len(ext))
    c = d.without(*ext) + Multisegment(lifted + pads)
    if _cut(c, k, side) == d and in_S_a_k(c, a, k, side):
        return c
    for cand in generate_poset(a).elements:
        if _hypothesis(cand, a, k, side) and _cut(cand, k, side) == d:
            return cand
    raise NotInDomain(f"{d!r} has no lift at {k} below {a!r}")


def _first_duplicate(values: list[int], last: bool = False) -> int | None:
    dup = [x for i, x in enumerate(values[1:]) if values[i] == x]
    if not dup:
        return None
    return dup[-1] if last else dup[0]


def _right_round(cur: Multisegment) -> tuple[Multisegment, Segment, list[TruncationStep]]:
    # one copy of the lowest duplicated end moves up, pushing the occupied
    # run of end values above it into the first free slot
    e0 = _first_duplicate(cur.ends())
    assert e0 is not None
    endset = set(cur.ends())
    top = e0 + 1
    while top in endset:
        top += 1
    moving = enders(cur, e0)[0]
    out: list[Segment] = []
    seen = False
    for b, e in cur:
        if (b, e) == moving and not seen:
            seen = True
            out.append((b, e + 1))
        elif e0 < e <= top:
            out.append((b, e + 1))
        else:
            out.append((b, e))
    steps = [TruncationStep("right", v) for v in range(e0 + 1, top + 1)]
    return Multisegment(out), (e0 + 1, top), steps


def _left_round(cur: Multisegment) -> tuple[Multisegment, Segment, list[TruncationStep]]:
    b0 = _first_duplicate(cur.begins(), last=True)
    assert b0 is not None
    beginset = set(cur.begins())
    low = b0 - 1
    while low in beginset:
        low -= 1
    moving = beginners(cur, b0)[0]
    out: list[Segment] = []
    seen = False
    for b, e in cur:
        if (b, e) == moving and not seen:
            seen = True
            out.append((b - 1, e))
        elif low <= b < b0:
            out.append((b - 1, e))
        else:
            out.append((b, e))
    steps = [TruncationStep("left", v) for v in range(b0 - 1, low - 1, -1)]
    return Multisegment(out), (low, b0 - 1), steps


def _reduce_with_steps(
    a: Multisegment,
) -> tuple[Multisegment, Multisegment, Multisegment, list[TruncationStep]]:
    cur = a
    right_rounds: list[list[TruncationStep]] = []
    c1: list[Segment] = []
    while _first_duplicate(cur.ends()) is not None:
        cur, script, steps = _right_round(cur)
        c1.append(script)
        right_rounds.append(steps)
    left_rounds: list[list[TruncationStep]] = []
    c2: list[Segment] = []
    while _first_duplicate(cur.begins()) is not None:
        cur, script, steps = _left_round(cur)
        c2.append(script)
        left_rounds.append(steps)
    # replay runs the undo scripts round-by-round, most recent round first;
    # right cuts touch only ends and left cuts only begins, so the right
    # scripts replay before the left ones
    undo = [s for steps in reversed(right_rounds) for s in steps]
    undo += [s for steps in reversed(left_rounds) for s in steps]
    assert truncate_seq(cur, undo) == a
    return cur, Multisegment(c1), Multisegment(c2), undo


def reduce_to_ordinary(a: Multisegment) -> tuple[Multisegment, Multisegment, Multisegment]:
    """Lift a to an ordinary multisegment b with the same poset and multiplicities.

    Returns (b, c1, c2) where c1 collects the right scripts and c2 the left
    scripts; replaying c1 then c2 on b recovers a.
    """
    b, c1, c2, _ = _reduce_with_steps(a)
    return b, c1, c2


def _is_symmetric(a: Multisegment) -> bool:
    return not a or max(a.begins()) <= min(a.ends())


def _mseg_to_json(a: Multisegment) -> list[list[int]]:
    return [[b, e] for b, e in a]


@dataclass(frozen=True)
class SymmetrizationCertificate:
    """A replayable reduction of `source` to the symmetric multisegment `sym`.

    c1 and c2 are the right/left scripts making the ends and begins distinct,
    c3 the scripts separating begins from ends; `steps` spells the same data
    out as the exact undo sequence.  sym is the image of w on the identity
    model a_id.
    """

    source: Multisegment
    sym: Multisegment
    c1: Multisegment
    c2: Multisegment
    c3: Multisegment
    a_id: Multisegment
    w: Permutation
    steps: tuple[TruncationStep, ...] = field(default=())

    def __post_init__(self) -> None:
        if truncate_seq(self.sym, self.steps) != self.source:
            raise ValueError("certificate scripts do not replay to the source")
        if not _is_symmetric(self.sym) or phi(self.a_id, self.w) != self.sym:
            raise ValueError("certificate model does not match its symmetric form")

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "mseg-cert/1",
                "source": _mseg_to_json(self.source),
                "sym": _mseg_to_json(self.sym),
                "c1": _mseg_to_json(self.c1),
                "c2": _mseg_to_json(self.c2),
                "c3": _mseg_to_json(self.c3),
                "a_id": _mseg_to_json(self.a_id),
                "w": list(self.w),
                "steps": [[s.side, s.k] for s in self.steps],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SymmetrizationCertificate":
        data = json.loads(text)
        if data.get("format") != "mseg-cert/1":
            raise ValueError(f"unsupported certificate format {data.get('format')!r}")
        return cls(
            source=Multisegment(data["source"]),
            sym=Multisegment(data["sym"]),
            c1=Multisegment(data["c1"]),
            c2=Multisegment(data["c2"]),
            c3=Multisegment(data["c3"]),
            a_id=Multisegment(data["a_id"]),
            w=tuple(data["w"]),
            steps=tuple(TruncationStep(side, k) for side, k in data["steps"]),
        )


def symmetrize(a: Multisegment) -> SymmetrizationCertificate:
    """Reduce a to a symmetric multisegment, recording every script used."""
    cur, c1, c2, undo12 = _reduce_with_steps(a)
    c3: list[Segment] = []
    undo3: list[TruncationStep] = []
    while not _is_symmetric(cur):
        lo, hi = min(cur.ends()), max(cur.ends())
        cur = Multisegment((b, e + 1) for b, e in cur)
        c3.append((lo + 1, hi + 1))
        undo3 = [TruncationStep("right", v) for v in range(lo + 1, hi + 2)] + undo3
    steps = tuple(undo3 + undo12)
    a_id = Multisegment(zip(cur.begins(), cur.ends()))
    w = phi_inv(a_id, cur)
    return SymmetrizationCertificate(
        source=a, sym=cur, c1=c1, c2=c2, c3=Multisegment(c3), a_id=a_id, w=w, steps=steps
    )


def transport(b: Multisegment, cert: SymmetrizationCertificate) -> Multisegment:
    """The element of S(cert.sym) carrying the same multiplicity as b below the source.

    Walks the certificate's undo chain backwards, lifting through psi_k_inv at
    every step against the intermediate model.
    """
    if not leq(b, cert.source):
        raise NotComparable(f"{b!r} is not below {cert.source!r}")
    chain = [cert.sym]
    for step in cert.steps:
        chain.append(truncate(chain[-1], step))
    cur = b
    for i in range(len(cert.steps) - 1, -1, -1):
        cur = psi_k_inv(cur, chain[i], cert.steps[i].k, side=cert.steps[i].side)
    return cur


def _pair_kind(s: Segment, t: Segment) -> RelationKind:
    kind = segment_relation(s, t).kind
    if kind in (RelationKind.EQUAL, RelationKind.COVERED_BY):
        return RelationKind.COVERS
    return kind


def _value_maps(a: Multisegment, a2: Multisegment) -> tuple[dict[int, int], dict[int, int]] | None:
    """Positionwise order isomorphisms begin->begin and end->end, or None if the
    sorted multisets do not match up value-consistently in both directions."""
    if len(a) != len(a2):
        return None
    out: list[dict[int, int]] = []
    for xs, ys in ((a.begins(), a2.begins()), (a.ends(), a2.ends())):
        fwd: dict[int, int] = {}
        bwd: dict[int, int] = {}
        for x, y in zip(xs, ys):
            if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
                return None
        out.append(fwd)
    return out[0], out[1]


def relation_type_equal(a: Multisegment, a2: Multisegment) -> bool:
    """Whether some segment bijection preserves order, pairwise relation kinds,
    and induces monotone bijections of the begin and end multisets."""
    maps = _value_maps(a, a2)
    if maps is None:
        return False
    bmap, emap = maps
    segs = a.segs
    try:
        images = [(bmap[b], emap[e]) for b, e in segs]
    except KeyError:
        return False
    if any(b > e for b, e in images) or Multisegment(images) != a2:
        return False
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if _pair_kind(segs[i], segs[j]) != _pair_kind(images[i], images[j]):
                return False
    return True


def xi_transport(b: Multisegment, a: Multisegment, a2: Multisegment) -> Multisegment:
    """Rewrite b below a into the corresponding element below a2."""
    if not leq(b, a):
        raise NotComparable(f"{b!r} is not below {a!r}")
    if not relation_type_equal(a, a2):
        raise NoBijection(f"{a!r} and {a2!r} are not of the same relation type")
    bmap, emap = _value_maps(a, a2)
    try:
        return Multisegment((bmap[bb], emap[ee]) for bb, ee in b)
    except (KeyError, BadRange) as exc:
        raise NoBijection(f"bijection does not transport {b!r}: {exc}") from None


def _parabolic_chain(a: Multisegment) -> tuple[Multisegment, list[TruncationStep]]:
    # push the occupied run of end values at the bottom upward until every
    # begin sits at or below every end; begins and end repeats never change
    cur = a
    undo: list[TruncationStep] = []
    while cur and max(cur.begins()) > min(cur.ends()):
        m0 = min(cur.ends())
        endset = set(cur.ends())
        top = m0 + 1
        while top in endset:
            top += 1
        cur = Multisegment((b, e + 1) if e < top else (b, e) for b, e in cur)
        undo = [TruncationStep("right", v) for v in range(m0 + 1, top + 1)] + undo
    return cur, undo


def parabolic_model(a: Multisegment) -> Multisegment:
    """The parabolic-type multisegment whose poset contains S(a) as an upper interval."""
    return _parabolic_chain(a)[0]


def classify_poset(
    a: Multisegment,
) -> tuple[int, frozenset[int], frozenset[int], Permutation, Multisegment]:
    """Identify S(a) inside a parabolic quotient.

    Returns (n, J1, J2, w, floor): n counts segments with multiplicity, J1
    marks repeated ends and J2 repeated begins, w is the minimal double-coset
    representative pairing the begins of the parabolic model with its ends,
    and floor is the lift of the minimal element — S(a) is isomorphic to the
    elements of the model poset lying above floor.
    """
    n = len(a)
    bs = a.begins()
    es = a.ends()
    J1 = frozenset(i for i in range(1, n) if es[i - 1] == es[i])
    J2 = frozenset(i for i in range(1, n) if bs[i - 1] == bs[i])
    model, undo = _parabolic_chain(a)
    lm = model.ends()
    used = [False] * n
    w: list[int] = []
    for _, ee in sorted(model.segs):
        j = next(j for j in range(n) if not used[j] and lm[j] == ee)
        used[j] = True
        w.append(j + 1)
    wt = tuple(w)
    assert in_double_quotient(wt, J1, J2)
    chain = [model]
    for step in undo:
        chain.append(truncate(chain[-1], step))
    assert chain[-1] == a
    floor = minimal_element(a)
    for i in range(len(undo) - 1, -1, -1):
        floor = psi_k_inv(floor, chain[i], undo[i].k, side=undo[i].side)
    return n, J1, J2, wt, floor
