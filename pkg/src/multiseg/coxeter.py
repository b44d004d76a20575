"""Symmetric groups, Bruhat order, parabolic quotients, and the
permutation/multisegment dictionaries.

Permutations are 1-indexed one-line tuples. ``compose(u, v)`` is the
function u after v. Generator sets are frozensets of indices i meaning
the adjacent transposition at positions (i, i+1).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .core import Multisegment, rank_invariant, seg

Permutation = tuple[int, ...]
GeneratorSet = frozenset[int]


class SizeMismatch(ValueError):
    pass


class NotSymmetric(ValueError):
    """The reference multisegment is not of symmetric/parabolic shape."""


class NotInQuotient(ValueError):
    """A permutation fails the minimal coset representative conditions."""


class NotInImage(ValueError):
    """A multisegment is not in the image of the requested dictionary."""


class ShapeMismatch(ValueError):
    pass


def identity(n: int) -> Permutation:
    return tuple(range(1, n + 1))


def compose(u: Permutation, v: Permutation) -> Permutation:
    """(u ∘ v)(i) = u(v(i))."""
    if len(u) != len(v):
        raise SizeMismatch(f"composing S_{len(u)} with S_{len(v)}")
    return tuple(u[x - 1] for x in v)


def inverse(w: Permutation) -> Permutation:
    out = [0] * len(w)
    for i, x in enumerate(w, 1):
        out[x - 1] = i
    return tuple(out)


def length(w: Permutation) -> int:
    """Inversion count."""
    return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])


def transposition(n: int, i: int) -> Permutation:
    w = list(range(1, n + 1))
    w[i - 1], w[i] = w[i], w[i - 1]
    return tuple(w)


def right_descents(w: Permutation) -> set[int]:
    return {i for i in range(1, len(w)) if w[i - 1] > w[i]}


def left_descents(w: Permutation) -> set[int]:
    return right_descents(inverse(w))


def bruhat_leq(u: Permutation, w: Permutation) -> bool:
    """u <= w via dominance of the rank matrices r_ij = #{k <= i : w(k) >= j}."""
    n = len(u)
    if n != len(w):
        raise SizeMismatch(f"comparing S_{n} with S_{len(w)}")
    cu = [0] * (n + 2)
    cw = [0] * (n + 2)
    for i in range(n - 1):
        cu[u[i]] += 1
        cw[w[i]] += 1
        ru = rw = 0
        for j in range(n, 0, -1):
            ru += cu[j]
            rw += cw[j]
            if ru > rw:
                return False
    return True


def w_J(n: int, J: Iterable[int]) -> Permutation:
    """Longest element of the parabolic subgroup S_J: reverse each run of J."""
    J = set(J)
    w = list(range(1, n + 1))
    i = 1
    while i <= n - 1:
        if i in J:
            j = i
            while j + 1 <= n - 1 and j + 1 in J:
                j += 1
            w[i - 1 : j + 1] = reversed(w[i - 1 : j + 1])
            i = j + 1
        else:
            i += 1
    return tuple(w)


def in_right_quotient(w: Permutation, J: Iterable[int]) -> bool:
    """No right descent in J: w(i) < w(i+1) for every generator i of J."""
    return all(w[i - 1] < w[i] for i in J)


def in_left_quotient(w: Permutation, J: Iterable[int]) -> bool:
    wi = inverse(w)
    return all(wi[i - 1] < wi[i] for i in J)


def in_double_quotient(w: Permutation, J1: Iterable[int], J2: Iterable[int]) -> bool:
    return in_left_quotient(w, J1) and in_right_quotient(w, J2)


def quotient_reps(n: int, J1: Iterable[int] = (), J2: Iterable[int] = ()) -> list[Permutation]:
    """All minimal double coset representatives in S_n, lexicographically sorted."""
    J1, J2 = set(J1), set(J2)
    return [
        w
        for w in itertools.permutations(range(1, n + 1))
        if in_double_quotient(w, J1, J2)
    ]


def max_double_coset(v: Permutation, J1: Iterable[int], J2: Iterable[int]) -> Permutation:
    """Unique maximal-length element of the double coset S_{J1} v S_{J2}.

    Requires v minimal in its coset. The overlap K accounts for generators
    of J2 that v conjugates into J1.
    """
    n = len(v)
    J1, J2 = frozenset(J1), frozenset(J2)
    if not in_double_quotient(v, J1, J2):
        raise NotInQuotient(f"{v} is not minimal for ({sorted(J1)}, {sorted(J2)})")
    K = frozenset(v[j - 1] for j in J2 if j < n and v[j] == v[j - 1] + 1) & J1
    return compose(w_J(n, J1), compose(w_J(n, K), compose(v, w_J(n, J2))))


def _identity_pairing(a_id: Multisegment) -> tuple[list[int], list[int]]:
    """Begins and ends of a_id sorted ascending; checks the model pairs them in order."""
    begins = a_id.begins()
    ends = a_id.ends()
    if begins and max(begins) > min(ends):
        raise NotSymmetric(f"{a_id!r} has a begin above an end")
    model = Multisegment(zip(begins, ends))
    if model != a_id:
        raise NotSymmetric(f"{a_id!r} does not pair sorted begins with sorted ends")
    return begins, ends


def model_quotient(a_id: Multisegment) -> tuple[GeneratorSet, GeneratorSet]:
    """(J1, J2) of an identity model: end repeats and begin repeats."""
    begins, ends = _identity_pairing(a_id)
    J1 = frozenset(i for i in range(1, len(ends)) if ends[i - 1] == ends[i])
    J2 = frozenset(i for i in range(1, len(begins)) if begins[i - 1] == begins[i])
    return J1, J2


def phi(a_id: Multisegment, w: Permutation) -> Multisegment:
    """Phi(w) = sum of [b(Delta_i), e(Delta_{w(i)})] on the identity model a_id.

    Order-reversing dictionary between the quotient S^{J1,J2} and the
    poset S(a_id); J1 comes from repeated ends, J2 from repeated begins.
    """
    begins, ends = _identity_pairing(a_id)
    if len(w) != len(a_id):
        raise SizeMismatch(f"permutation size {len(w)} vs {len(a_id)} segments")
    J1, J2 = model_quotient(a_id)
    if not in_double_quotient(w, J1, J2):
        raise NotInQuotient(f"{w} not minimal for ({sorted(J1)}, {sorted(J2)})")
    return Multisegment((begins[i], ends[w[i] - 1]) for i in range(len(w)))


def phi_inv(a_id: Multisegment, b: Multisegment) -> Permutation:
    """Two-sided inverse of phi on its image: the minimal coset representative w
    with phi(a_id, w) = b."""
    begins, ends = _identity_pairing(a_id)
    if b.begins() != begins or b.ends() != ends:
        raise NotInImage(f"{b!r} has wrong begin/end multisets for the model")
    targets = sorted(b.segs)  # begin ascending, then end ascending
    used = [False] * len(ends)
    w = []
    for i, (bb, ee) in enumerate(targets):
        if bb != begins[i]:
            raise NotInImage(f"{b!r} mismatches the model begins")
        for j, e in enumerate(ends):
            if not used[j] and e == ee:
                used[j] = True
                w.append(j + 1)
                break
        else:
            raise NotInImage(f"no end slot for {ee} in the model")
    w = tuple(w)
    if phi(a_id, w) != b:
        raise NotInImage(f"{b!r} is not in the image of the model dictionary")
    return w


def _blocks(sizes: list[int]) -> list[list[int]]:
    out = []
    p = 1
    for s in sizes:
        out.append(list(range(p, p + s)))
        p += s
    return out


def _crossing_matrix(b: Multisegment) -> tuple[list[list[int]], list[int], int]:
    """The block-intersection matrix of a multisegment with support 1..r.

    Row i lists targets: x[i][j] copies of [i, j] for j >= i, and the
    count of segments containing both i-1 and i at column i-1.
    """
    r = max(e for _, e in b)
    phi_counts = [0] * (r + 1)
    for bb, ee in b:
        for k in range(bb, ee + 1):
            phi_counts[k] += 1
    x = [[0] * (r + 1) for _ in range(r + 1)]
    for bb, ee in b:
        x[bb][ee] += 1
    for i in range(2, r + 1):
        x[i][i - 1] = rank_invariant(b, i - 1, i)
    return x, phi_counts[1:], r


def zelevinsky_permutation(b: Multisegment) -> Permutation:
    """The maximal-length element of S^b in S_deg(b).

    Row i sends the ascending source slots of block i to target blocks in
    descending order; within each column the arrows attach in descending
    source position, so every block pairing is fully reversed.
    """
    if not b:
        return ()
    lo = min(bb for bb, _ in b)
    bs = b.shift(1 - lo)
    x, sizes, r = _crossing_matrix(bs)
    blocks = _blocks(sizes)
    n = sum(sizes)

    slot_target: dict[int, int] = {}
    for i in range(1, r + 1):
        targets: list[int] = []
        for j in range(r, i - 2, -1):
            if j >= 1:
                targets.extend([j] * x[i][j])
        if len(targets) != sizes[i - 1]:
            raise ShapeMismatch(f"row {i} of the crossing matrix is unbalanced")
        for slot, j in zip(blocks[i - 1], targets):
            slot_target[slot] = j

    w = [0] * n
    for j in range(1, r + 1):
        incoming = sorted((p for p in range(1, n + 1) if slot_target[p] == j), reverse=True)
        if len(incoming) != sizes[j - 1]:
            raise ShapeMismatch(f"column {j} of the crossing matrix is unbalanced")
        for p, slot in zip(incoming, blocks[j - 1]):
            w[p - 1] = slot
    return tuple(w)


def s_b_members(b: Multisegment) -> list[Permutation]:
    """Brute-force enumeration of S^b; exponential, for small-degree checks only."""
    if not b:
        return [()]
    lo = min(bb for bb, _ in b)
    bs = b.shift(1 - lo)
    x, sizes, r = _crossing_matrix(bs)
    blocks = _blocks(sizes)
    n = sum(sizes)
    block_of = {}
    for i, blk in enumerate(blocks, 1):
        for p in blk:
            block_of[p] = i
    out = []
    for w in itertools.permutations(range(1, n + 1)):
        ok = True
        counts = [[0] * (r + 1) for _ in range(r + 1)]
        for p in range(1, n + 1):
            counts[block_of[p]][block_of[w[p - 1]]] += 1
        for i in range(1, r + 1):
            for j in range(1, r + 1):
                expected = x[i][j] if (j >= i or j == i - 1) else 0
                if counts[i][j] != expected:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(w)
    return out


@dataclass(frozen=True)
class Partition:
    """Weakly increasing parts (l_1 <= ... <= l_r), each bounded by a cap l.

    Interconverts with the alternating encoding (a_1..a_m; b_0..b_{m-1}):
    the part value b_0+...+b_{i-1} occurs with multiplicity a_i.
    """

    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p < 0 for p in self.parts) or list(self.parts) != sorted(self.parts):
            raise ShapeMismatch(f"parts must be weakly increasing and nonnegative: {self.parts}")

    @classmethod
    def from_alternate(cls, a: Iterable[int], b: Iterable[int]) -> "Partition":
        a, b = list(a), list(b)
        if len(a) != len(b):
            raise ShapeMismatch("alternating encoding needs equal lengths (a_1..a_m; b_0..b_{m-1})")
        parts: list[int] = []
        acc = 0
        for ai, bi in zip(a, b):
            acc += bi
            parts.extend([acc] * ai)
        return cls(tuple(sorted(parts)))

    def to_alternate(self, l: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        values: list[tuple[int, int]] = []
        for p in self.parts:
            if values and values[-1][0] == p:
                values[-1] = (p, values[-1][1] + 1)
            else:
                values.append((p, 1))
        if self.parts and self.parts[-1] > l:
            raise ShapeMismatch(f"part {self.parts[-1]} exceeds the cap {l}")
        a: list[int] = []
        b: list[int] = []
        prev = 0
        for value, mult in values:
            b.append(value - prev)
            a.append(mult)
            prev = value
        if prev < l or not values:
            b.append(l - prev)
            a.append(0)
        return tuple(a), tuple(b)


def sigma2(lam: Partition) -> tuple[int, ...]:
    """The poset isomorphism onto increasing index tuples: (l_1+1, ..., l_r+r)."""
    return tuple(p + i for i, p in enumerate(lam.parts, 1))


def partition_maps(
    lam: Partition, r: int, l: int, a_ref: Multisegment
) -> tuple[tuple[int, ...], Multisegment]:
    """(x_lambda, a_lambda) on a two-end-value reference model.

    a_ref must pair its ascending begins with r copies of end k-1 followed
    by l copies of end k. a_lambda keeps the begins and re-ends them in
    alternating blocks b_0 at k, a_1 at k-1, b_1 at k, ...
    """
    begins, ends = _identity_pairing(a_ref)
    n = len(a_ref)
    if n != r + l or r < 0 or l < 0:
        raise ShapeMismatch(f"(r, l)=({r},{l}) does not match {n} segments")
    k = ends[-1] if ends else 0
    if ends != [k - 1] * r + [k] * l:
        raise ShapeMismatch(f"{a_ref!r} is not of the (r at k-1, l at k) shape")
    r1 = len(lam.parts)
    if r1 < r or (lam.parts and lam.parts[-1] > n - r1):
        raise ShapeMismatch(f"partition {lam.parts} does not fit above (r, l)=({r},{l})")
    a_enc, b_enc = lam.to_alternate(n - r1)
    end_pattern: list[int] = []
    for ai, bi in zip(a_enc, b_enc):
        end_pattern.extend([k] * bi)
        end_pattern.extend([k - 1] * ai)
    a_lam = Multisegment((begins[i], end_pattern[i]) for i in range(n))
    return sigma2(lam), a_lam
