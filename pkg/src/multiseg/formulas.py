"""Fine order, theta tables, closed derivative terms, and segment products.

The routines here obtain multiplicity data from parabolic models and small
triangular solves instead of expanding standard modules, so they stay exact
while avoiding the full poset search that the checking oracles perform.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .core import (
    BadRange,
    Multisegment,
    Segment,
    beginners,
    degree_of,
    enders,
    f_begin,
    f_end,
    linked,
    seg,
    weight_of,
)
from .coxeter import (
    GeneratorSet,
    Permutation,
    ShapeMismatch,
    bruhat_leq,
    compose,
    identity,
    left_descents,
    length,
    quotient_reps,
    transposition,
)
from .kl import QPoly, double_parabolic_kl
from .poset import generate_poset, leq
from .reduce import NotInDomain, TruncationStep, in_S_a_k, psi_k_inv, truncate

_EMPTY: GeneratorSet = frozenset()
_MAX_DEPTH = 200


class UnreducedCase(Exception):
    """A product instance escaped every reduction whose side conditions hold.

    Raised instead of returning a value that the reductions cannot justify.
    """


class SingularSystem(Exception):
    """A theta system lost its unit diagonal; indicates corrupted input."""


def _mirror(a: Multisegment) -> Multisegment:
    return Multisegment((-e, -b) for b, e in a.segs)


# ---------------------------------------------------------------------------
# fine order


def _gamma_cut(a: Multisegment, k: int, i: int, side: str = "right") -> Multisegment:
    """Cut the i longest k-enders (k-beginners on the left) by one unit."""
    if side == "right":
        chosen = enders(a, k)[:i]
        moved = [(b, k - 1) for b, _ in chosen if b <= k - 1]
    else:
        chosen = beginners(a, k)[:i]
        moved = [(k + 1, e) for _, e in chosen if k + 1 <= e]
    return a.without(*chosen) + Multisegment(moved)


def preceq_k(b: Multisegment, a: Multisegment, k: int, side: str = "right") -> bool:
    """Whether b lies under a in the fine order at height k."""
    count = f_end(a, k) if side == "right" else f_begin(a, k)
    i = degree_of(a) - degree_of(b)
    if i < 0 or i > count:
        return False
    return leq(b, _gamma_cut(a, k, i, side))


def gamma_set(
    a: Multisegment, k: int, i: int | None = None, side: str = "right"
) -> list[Multisegment]:
    """Every b under a in the fine order at k, optionally at fixed drop i."""
    count = f_end(a, k) if side == "right" else f_begin(a, k)
    if i is not None:
        if not 0 <= i <= count:
            raise BadRange(f"drop must lie in [0, {count}], got {i}")
        return list(generate_poset(_gamma_cut(a, k, i, side)).elements)
    out: list[Multisegment] = []
    for j in range(count + 1):
        out.extend(generate_poset(_gamma_cut(a, k, j, side)).elements)
    return out


def _band_lift(c: Multisegment, src: int, i: int) -> Multisegment:
    """Extend i of the longest src-enders to src + 1, padding with points."""
    if i <= 0:
        return c
    chosen = enders(c, src)[:i]
    pads = i - len(chosen)
    return c.without(*chosen) + Multisegment(
        [(b, src + 1) for b, _ in chosen] + [(src + 1, src + 1)] * pads
    )


# ---------------------------------------------------------------------------
# identity models


def _sorted_model(a: Multisegment) -> Multisegment:
    """Pair sorted begins with sorted ends slotwise."""
    return Multisegment(zip(a.begins(), a.ends()))


def _end_repeats(a: Multisegment) -> GeneratorSet:
    ends = a.ends()
    return frozenset(i for i in range(1, len(ends)) if ends[i - 1] == ends[i])


def _model_image(model: Multisegment, w: Permutation) -> Multisegment:
    """Pair the model's begins with w-permuted ends, dropping empty pairs."""
    begins, ends = model.begins(), model.ends()
    return Multisegment(
        (begins[i], ends[w[i] - 1])
        for i in range(len(w))
        if begins[i] <= ends[w[i] - 1]
    )


def _model_preimage(model: Multisegment, target: Multisegment) -> Permutation | None:
    """Minimal permutation sending the model onto target, or None.

    Model slots whose begin is absent from target are paired with the
    leftover ends; such a pair must be empty, matching a dropped slot.
    """
    begins, ends = model.begins(), model.ends()
    n = len(begins)
    if len(set(begins)) != n:
        return None
    end_for: dict[int, int] = {}
    for bb, ee in target.segs:
        if bb in end_for:
            return None
        end_for[bb] = ee
    if any(bb not in begins for bb in end_for):
        return None
    pool = list(ends)
    for ee in target.ends():
        if ee in pool:
            pool.remove(ee)
        else:
            return None
    dead = sorted(bb for bb in begins if bb not in end_for)
    pool.sort()
    pairs = list(target.segs)
    for bb, ee in zip(dead, pool):
        if ee >= bb:
            return None
        pairs.append((bb, ee))
    pairs.sort()
    used = [False] * n
    word: list[int] = []
    for _, ee in pairs:
        for j in range(n):
            if not used[j] and ends[j] == ee:
                used[j] = True
                word.append(j + 1)
                break
        else:
            return None
    w = tuple(word)
    if _model_image(model, w) == target:
        return w
    return None


@lru_cache(maxsize=None)
def _subgroup(n: int, gens: GeneratorSet) -> tuple[Permutation, ...]:
    """All elements of the parabolic subgroup generated by gens."""
    ts = [transposition(n, i) for i in sorted(gens)]
    seen = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        new = []
        for w in frontier:
            for t in ts:
                x = compose(w, t)
                if x not in seen:
                    seen.add(x)
                    new.append(x)
        frontier = new
    return tuple(sorted(seen))


@lru_cache(maxsize=8192)
def _down_interval(w: Permutation, t: Permutation) -> tuple[Permutation, ...]:
    """Bruhat interval [w, t], walked downward through covers from t."""
    if not bruhat_leq(w, t):
        return ()
    n = len(t)
    seen = {t}
    frontier = [t]
    while frontier:
        new = []
        for y in frontier:
            ly = length(y)
            for i in range(n - 1):
                for j in range(i + 1, n):
                    if y[i] < y[j]:
                        continue
                    z = list(y)
                    z[i], z[j] = z[j], z[i]
                    zt = tuple(z)
                    if zt not in seen and length(zt) == ly - 1 and bruhat_leq(w, zt):
                        seen.add(zt)
                        new.append(zt)
        frontier = new
    return tuple(seen)


# ---------------------------------------------------------------------------
# theta tables


class ThetaTable:
    """Exact theta data for one identity model, one height, one depth.

    The base must pair sorted begins with sorted ends, have distinct
    begins, at least one segment ending at k, and none ending at k + 1.
    Depth r0 says how many of the longest k-enders the lower model cuts;
    the remaining k-enders grow to k + 1 in the upper model.
    """

    def __init__(self, base: Multisegment, k: int, r0: int):
        if _sorted_model(base) != base:
            raise ShapeMismatch("base must pair sorted begins with sorted ends")
        begins = base.begins()
        if len(set(begins)) != len(begins):
            raise ShapeMismatch("base must have distinct begins")
        lk = f_end(base, k)
        if lk == 0 or f_end(base, k + 1) != 0:
            raise ShapeMismatch("base must reach k and stop before k + 1")
        if not 0 <= r0 <= lk:
            raise ShapeMismatch(f"depth must lie in [0, {lk}], got {r0}")
        self.base = base
        self.k = k
        self.r0 = r0
        self._lk = lk
        self.n = len(base)
        self.J = _end_repeats(base)
        ks = enders(base, k)
        grown = ks[r0:]
        self.upper = base.without(*grown) + Multisegment(
            (b, k + 1) for b, _ in grown
        )
        self.J1 = _end_repeats(self.upper)
        cut = ks[:r0]
        self.lower = base.without(*cut) + Multisegment(
            (b, k - 1) for b, _ in cut if b <= k - 1
        )
        self.J2 = _end_repeats(self.lower)
        self.n2 = len(self.lower)
        self._w_lower = weight_of(self.lower)
        self.entries: dict[tuple[Permutation, Permutation], QPoly] = {}
        self._tv: dict[Permutation, Permutation | None] = {}
        self._solved: dict[tuple[Permutation, Permutation], dict[Permutation, QPoly]] = {}
        self._rho = tuple(
            r for r in _subgroup(self.n, self.J) if not (left_descents(r) & self.J1)
        )

    def target(self, v: Permutation) -> Permutation | None:
        """Upper tracking permutation for the lower representative v."""
        if v not in self._tv:
            self._tv[v] = self._compute_target(v)
        return self._tv[v]

    def _compute_target(self, v: Permutation) -> Permutation | None:
        k = self.k
        lends = self.lower.ends()
        pairs = [[b, lends[v[i] - 1], 0] for i, b in enumerate(self.lower.begins())]
        pairs += [[k, k - 1, 0]] * (self.n - self.n2)
        wt: dict[int, int] = {}
        for b, e, _ in pairs:
            for u in range(b, e + 1):
                wt[u] = wt.get(u, 0) + 1
        if wt != self._w_lower:
            return None
        flat = [p for p in pairs if p[1] == k - 1]
        flat.sort(key=lambda p: (p[0] > p[1], p[0]))
        if len(flat) < self.r0:
            return None
        for p in flat[: self.r0]:
            p[1], p[2] = k, 1
        ks = [p for p in pairs if p[1] == k]
        ks.sort(key=lambda p: (p[2], p[0] > p[1], p[0]))
        need = self._lk - self.r0
        if len(ks) < need:
            return None
        for p in ks[:need]:
            p[1] = k + 1
        assigned = {b: e for b, e, _ in pairs}
        uends = self.upper.ends()
        used = [False] * self.n
        word: list[int] = []
        for b in self.upper.begins():
            e = assigned.get(b)
            if e is None:
                return None
            for j in range(self.n):
                if not used[j] and uends[j] == e:
                    used[j] = True
                    word.append(j + 1)
                    break
            else:
                return None
        t = tuple(word)
        goal = Multisegment((b, e) for b, e, _ in pairs if b <= e)
        if _model_image(self.upper, t) != goal:
            return None
        return t

    def theta(self, w: Permutation, v: Permutation) -> QPoly:
        """Theta value for upper element w against lower representative v."""
        t = self.target(v)
        zero = QPoly.zero()
        if t is None:
            return zero
        key = (w, v)
        if key in self.entries:
            return self.entries[key]
        if self.J1 == self.J:
            val = QPoly.one() if w == t else zero
        elif not bruhat_leq(w, t):
            val = zero
        else:
            val = self._solve(w, t).get(w, zero)
        self.entries[key] = val
        return val

    def _solve(self, w: Permutation, t: Permutation) -> dict[Permutation, QPoly]:
        key = (w, t)
        got = self._solved.get(key)
        if got is not None:
            return got
        us = [u for u in _down_interval(w, t) if not (left_descents(u) & self.J)]
        us.sort(key=length, reverse=True)
        out: dict[Permutation, QPoly] = {}
        for u in us:
            if double_parabolic_kl(u, u, self.J, _EMPTY) != QPoly.one():
                raise SingularSystem("lost the unit diagonal")
            acc = QPoly.zero()
            for rho in self._rho:
                ru = compose(rho, u)
                if bruhat_leq(ru, t):
                    acc = acc + QPoly.q(length(rho)) * double_parabolic_kl(
                        ru, t, self.J1, _EMPTY
                    )
            for u2, val in out.items():
                if val and bruhat_leq(u, u2):
                    acc = acc - val * double_parabolic_kl(u, u2, self.J, _EMPTY)
            out[u] = acc
        self._solved[key] = out
        return out

    def row(self, v: Permutation) -> dict[Permutation, QPoly]:
        """Theta against every upper element under the target of v."""
        t = self.target(v)
        if t is None:
            return {}
        if self.J1 == self.J:
            return {t: QPoly.one()}
        full = self._solve(identity(self.n), t)
        return {u: p for u, p in full.items() if p}

    def to_json(self) -> dict:
        """Serializable dump of every row of the table."""

        def mtxt(m: Multisegment) -> list[list[int]]:
            return [list(s) for s in m.segs]

        def ptxt(p: QPoly) -> dict[str, int]:
            return {str(d): c for d, c in sorted(p.q_coeffs().items())}

        rows = []
        for v in quotient_reps(self.n2, self.J2, _EMPTY):
            t = self.target(v)
            rows.append(
                {
                    "v": list(v),
                    "image": mtxt(_model_image(self.lower, v)),
                    "target": list(t) if t is not None else None,
                    "theta": {
                        ",".join(map(str, u)): ptxt(p)
                        for u, p in sorted(self.row(v).items())
                    },
                }
            )
        return {
            "schema": "mseg/1",
            "base": mtxt(self.base),
            "k": self.k,
            "depth": self.r0,
            "generators": sorted(self.J),
            "upper_generators": sorted(self.J1),
            "lower_generators": sorted(self.J2),
            "rows": rows,
        }


def theta_table(base: Multisegment, k: int, r0: int) -> ThetaTable:
    """Build the theta table of an identity model at height k and depth r0."""
    return ThetaTable(base, k, r0)


# ---------------------------------------------------------------------------
# derivatives


def _separate(a: Multisegment, k: int) -> tuple[Multisegment, list[TruncationStep]]:
    """Shift a into distinct begins with nothing ending at k + 1.

    Returns the shifted multisegment and the truncation steps that carry
    its derivative terms back down, in application order.
    """
    rounds: list[list[TruncationStep]] = []
    cur = a
    while True:
        begins = cur.begins()
        dup = [x for x in set(begins) if begins.count(x) > 1]
        if not dup:
            break
        i0 = min(dup)
        topseg = beginners(cur, i0)[0]
        movers = [s for s in cur.segs if s[0] < i0] + [topseg]
        cur = cur.without(*movers) + Multisegment((x - 1, e) for x, e in movers)
        vals = [i0 - 1] + [j - 1 for j in sorted({x for x in begins if x < i0}, reverse=True)]
        rounds.append([TruncationStep("left", v) for v in vals])
    steps: list[TruncationStep] = []
    highs = sorted({e for _, e in cur.segs if e > k})
    if f_end(cur, k + 1) > 0:
        movers = [s for s in cur.segs if s[1] > k]
        cur = cur.without(*movers) + Multisegment((x, e + 1) for x, e in movers)
        steps.extend(TruncationStep("right", e + 1) for e in highs)
    for rnd in reversed(rounds):
        steps.extend(rnd)
    return cur, steps


def _walk_down(
    entries: dict[Multisegment, int],
    ref: Multisegment,
    k: int,
    steps: Iterable[TruncationStep],
) -> dict[Multisegment, int]:
    """Carry derivative terms of ref down a truncation chain, dropping
    whatever leaves the truncated family at each step."""
    for st in steps:
        ref2 = truncate(ref, st)
        nxt: dict[Multisegment, int] = {}
        for d, m in entries.items():
            if not in_S_a_k(d, d, st.k, st.side):
                continue
            d2 = truncate(d, st)
            if not preceq_k(d2, ref2, k):
                continue
            nxt[d2] = nxt.get(d2, 0) + m
        entries, ref = nxt, ref2
    return entries


def _derivative_normal(nf: Multisegment, k: int) -> dict[Multisegment, int]:
    """Derivative terms for a multisegment with distinct begins and no
    segment ending at k + 1."""
    base = _sorted_model(nf)
    w = _model_preimage(base, nf)
    if w is None:
        raise ShapeMismatch("input does not sit inside its own model")
    lk = f_end(nf, k)
    out: dict[Multisegment, int] = {}
    for r0 in range(lk + 1):
        tab = ThetaTable(base, k, r0)
        for v in quotient_reps(tab.n2, tab.J2, _EMPTY):
            val = tab.theta(w, v).eval_at_one()
            if val:
                bv = _model_image(tab.lower, v)
                out[bv] = out.get(bv, 0) + val
    return out


_DERIV_CACHE: dict[tuple[Multisegment, int, str], dict[Multisegment, int]] = {}


def derivative_closed_form(
    a: Multisegment, k: int, side: str = "right"
) -> dict[Multisegment, int]:
    """All terms of the k-th derivative of L(a), with multiplicities."""
    key = (a, k, side)
    hit = _DERIV_CACHE.get(key)
    if hit is not None:
        return dict(hit)
    if side == "left":
        out = {
            _mirror(d): m
            for d, m in derivative_closed_form(_mirror(a), -k, "right").items()
        }
    elif f_end(a, k) == 0:
        out = {a: 1}
    else:
        nf, steps = _separate(a, k)
        out = _walk_down(_derivative_normal(nf, k), nf, k, steps)
    _DERIV_CACHE[key] = out
    return dict(out)


# ---------------------------------------------------------------------------
# products with a segment


_PROD_CACHE: dict[tuple[Multisegment, Segment], dict[Multisegment, int]] = {}


def clear_cache() -> None:
    """Drop every memoized derivative, product, and group table."""
    _DERIV_CACHE.clear()
    _PROD_CACHE.clear()
    _subgroup.cache_clear()
    _down_interval.cache_clear()


def induce_point(a: Multisegment, k: int) -> dict[Multisegment, int]:
    """Terms of the product of L(a) with the point module at k + 1."""
    return dict(_product(a, seg(k + 1), ()))


def induce_segment(a: Multisegment, b: Segment) -> dict[Multisegment, int]:
    """Terms of the product of L(a) with the segment module of b.

    Reflecting the line is a ring automorphism carrying simple modules to
    simple modules, so when no reduction chain closes on the input itself
    the reflected product is solved and mapped back.
    """
    try:
        return dict(_product(a, seg(b[0], b[1]), ()))
    except UnreducedCase:
        out = _product(_mirror(a), (-b[1], -b[0]), ())
        return {_mirror(c): m for c, m in out.items()}


def _product(
    a: Multisegment, b: Segment, stack: tuple
) -> dict[Multisegment, int]:
    key = (a, b)
    hit = _PROD_CACHE.get(key)
    if hit is not None:
        return hit
    if key in stack or len(stack) >= _MAX_DEPTH:
        raise UnreducedCase(f"no reduction closes on {a} times {b}")
    out = {c: m for c, m in _product_raw(a, b, stack + (key,)).items() if m}
    if any(m < 0 for m in out.values()):
        raise UnreducedCase(f"negative multiplicity for {a} times {b}")
    _PROD_CACHE[key] = out
    return out


def _product_raw(
    a: Multisegment, b: Segment, stack: tuple
) -> dict[Multisegment, int]:
    beta, top = b
    k = top - 1
    if not a:
        return {Multisegment([b]): 1}
    if all(not linked(s, b) for s in a.segs):
        return {a + Multisegment([b]): 1}
    off = beta + 1 if beta == top else beta
    high = [x for x in a.begins() if x >= off]
    if high:
        return _strip(a, b, min(high), stack)
    if f_end(a, top) != 0:
        return _clear_high_ends(a, b, stack)
    low_bound = beta - 2 if beta == top else beta - 1
    if (
        f_end(a, low_bound) > 0
        and f_end(a, low_bound - 1) == 0
        and low_bound + 1 != beta
        and f_begin(a, low_bound + 1) == 0
    ):
        return _clear_low_ends(a, b, [low_bound], stack)
    if beta < top:
        holes = [t for t in range(beta, k + 1) if f_end(a, t) == 0]
        if holes:
            return _fill_hole(a, b, max(holes), stack)
    begins = a.begins()
    if max(begins) > min(a.ends()) or len(set(begins)) != len(begins):
        return _via_shifts(a, b, stack)
    if beta == top:
        return _point_base(a, k, stack)
    if f_end(a, beta) == 1 and beta < k and f_end(a, beta - 1) == 0:
        return _segment_base(a, b, stack)
    try:
        out = _product(_mirror(a), (-top, -beta), stack)
        return {_mirror(c): m for c, m in out.items()}
    except UnreducedCase:
        return _slice_solve(a, b, stack)


def _strip(
    a: Multisegment, b: Segment, u0: int, stack: tuple
) -> dict[Multisegment, int]:
    """Lower one high begin into a free slot and pull the product back."""
    beta = b[0]
    u = u0
    while f_begin(a, u - 1) != 0:
        u -= 1
    mover = beginners(a, u)[0]
    lifted = a.without(mover) + Multisegment([(u - 1, mover[1])])
    if u - 1 == beta:
        return _cross_strip(a, b, lifted, stack)
    inner = _product(lifted, b, stack)
    ref = lifted + Multisegment([b])
    step = TruncationStep("left", u - 1)
    out: dict[Multisegment, int] = {}
    for c, m in inner.items():
        if not in_S_a_k(c, ref, u - 1, "left"):
            continue
        c2 = truncate(c, step)
        out[c2] = out.get(c2, 0) + m
    return out


def _cross_strip(
    a: Multisegment, b: Segment, lifted: Multisegment, stack: tuple
) -> dict[Multisegment, int]:
    """Account for a strip whose freed slot collides with the begin of b."""
    beta, top = b
    inner = _product(lifted, b, stack)
    dtab = derivative_closed_form(lifted, beta, "left")
    lead = dtab.get(a, 0)
    if lead == 0:
        raise UnreducedCase(f"no leading term lowering {a} across {beta}")
    acc: dict[Multisegment, int] = {}
    for c, m in inner.items():
        for d, t in derivative_closed_form(c, beta, "left").items():
            acc[d] = acc.get(d, 0) + m * t
    if beta == top:
        shorter: dict[Multisegment, int] = {lifted: 1}
    else:
        shorter = _product(lifted, (beta + 1, top), stack)
    for d, m in shorter.items():
        acc[d] = acc.get(d, 0) - m
    wa = weight_of(a)
    for x, t in dtab.items():
        if x == lifted or x == a or weight_of(x) != wa:
            continue
        for d, m in _product(x, b, stack).items():
            acc[d] = acc.get(d, 0) - t * m
    goal = weight_of(a + Multisegment([b]))
    out: dict[Multisegment, int] = {}
    for d, m in acc.items():
        if m and weight_of(d) == goal:
            if m % lead:
                raise UnreducedCase(f"fractional multiplicity crossing {beta}")
            out[d] = m // lead
    return out


def _clear_high_ends(
    a: Multisegment, b: Segment, stack: tuple
) -> dict[Multisegment, int]:
    """Raise every end band from the end of b upward, recurse, cut back."""
    top = b[1]
    bands = sorted({e for _, e in a.segs if e >= top}, reverse=True)
    lifted = a
    for t in bands:
        movers = enders(lifted, t)
        lifted = lifted.without(*movers) + Multisegment((x, t + 1) for x, _ in movers)
    inner = _product(lifted, b, stack)
    ref = lifted + Multisegment([b])
    for t in sorted(bands):
        step = TruncationStep("right", t + 1)
        nxt: dict[Multisegment, int] = {}
        for c, m in inner.items():
            if not in_S_a_k(c, ref, t + 1, "right"):
                continue
            c2 = truncate(c, step)
            nxt[c2] = nxt.get(c2, 0) + m
        inner = nxt
        ref = truncate(ref, step)
    return inner


def _clear_low_ends(
    a: Multisegment, b: Segment, bands: list[int], stack: tuple
) -> dict[Multisegment, int]:
    """Cut the given free low end bands, recurse, lift back up."""
    refs: list[Multisegment] = []
    cur = a
    ref = a + Multisegment([b])
    for t in bands:
        refs.append(ref)
        step = TruncationStep("right", t)
        ref = truncate(ref, step)
        cur = truncate(cur, step)
    inner = _product(cur, b, stack)
    for t, r in zip(reversed(bands), reversed(refs)):
        nxt: dict[Multisegment, int] = {}
        for c, m in inner.items():
            try:
                c2 = psi_k_inv(c, r, t, "right")
            except NotInDomain:
                raise UnreducedCase(f"no lift of {c} at {t}") from None
            nxt[c2] = nxt.get(c2, 0) + m
        inner = nxt
    return inner


def _fill_hole(
    a: Multisegment, b: Segment, v0: int, stack: tuple
) -> dict[Multisegment, int]:
    """Slide the bands over an empty height down one unit, shorten b,
    recurse, then lift everything back."""
    beta, top = b
    refs: list[Multisegment] = []
    ref = a + Multisegment([b])
    cur = a
    for t in range(v0 + 1, top + 1):
        refs.append(ref)
        step = TruncationStep("right", t)
        ref = truncate(ref, step)
        if t < top:
            cur = truncate(cur, step)
    inner = _product(cur, (beta, top - 1), stack)
    for t, r in zip(range(top, v0, -1), reversed(refs)):
        nxt: dict[Multisegment, int] = {}
        for c, m in inner.items():
            try:
                c2 = psi_k_inv(c, r, t, "right")
            except NotInDomain:
                raise UnreducedCase(f"no lift of {c} at {t}") from None
            nxt[c2] = nxt.get(c2, 0) + m
        inner = nxt
    return inner


def _via_shifts(
    a: Multisegment, b: Segment, stack: tuple
) -> dict[Multisegment, int]:
    """Shift begins left until the segments share a point with distinct
    begins, recurse, then walk the terms back down."""
    rounds: list[list[TruncationStep]] = []
    cur = a
    while max(cur.begins()) > min(cur.ends()):
        m0 = max(cur.begins())
        low = m0 - 1
        while f_begin(cur, low) != 0:
            low -= 1
        movers = [s for s in cur.segs if s[0] > low]
        cur = cur.without(*movers) + Multisegment((x - 1, e) for x, e in movers)
        rounds.append(
            [TruncationStep("left", t) for t in range(m0 - 1, low - 1, -1)]
        )
    while True:
        begins = cur.begins()
        dup = [x for x in set(begins) if begins.count(x) > 1]
        if not dup:
            break
        i0 = min(dup)
        topseg = beginners(cur, i0)[0]
        movers = [s for s in cur.segs if s[0] < i0] + [topseg]
        cur = cur.without(*movers) + Multisegment((x - 1, e) for x, e in movers)
        vals = [i0 - 1] + [j - 1 for j in sorted({x for x in begins if x < i0}, reverse=True)]
        rounds.append([TruncationStep("left", v) for v in vals])
    inner = _product(cur, b, stack)
    ref = cur + Multisegment([b])
    for rnd in reversed(rounds):
        for st in rnd:
            nxt: dict[Multisegment, int] = {}
            for c, m in inner.items():
                if not in_S_a_k(c, ref, st.k, "left"):
                    continue
                c2 = truncate(c, st)
                nxt[c2] = nxt.get(c2, 0) + m
            inner = nxt
            ref = truncate(ref, st)
    return inner


def _point_base(a: Multisegment, k: int, stack: tuple) -> dict[Multisegment, int]:
    """Product with the point at k + 1 once a shares a point, has distinct
    begins, and its ends avoid k - 1 and k + 1."""
    if f_end(a, k - 1) != 0 or f_end(a, k + 1) != 0:
        raise UnreducedCase(f"ends of {a} crowd the band at {k}")
    lk = f_end(a, k)
    ab = a + Multisegment([seg(k + 1)])
    out: dict[Multisegment, int] = {ab: 1}
    da = derivative_closed_form(a, k)
    dab = derivative_closed_form(ab, k)
    for c in generate_poset(_gamma_cut(a, k, lk - 1)).elements:
        m = da.get(c, 0) - dab.get(_band_lift(c, k, 1), 0)
        if m:
            lbl = _band_lift(_band_lift(c, k, 1), k - 1, lk - 1)
            out[lbl] = out.get(lbl, 0) + m
    return out


def _segment_base(
    a: Multisegment, b: Segment, stack: tuple
) -> dict[Multisegment, int]:
    """Product with a longer segment once a shares a point, has distinct
    begins under the begin of b, and its ends fill the reach of b."""
    beta, top = b
    lb = f_end(a, beta)
    lb1 = f_end(a, beta + 1)
    ab = a + Multisegment([b])
    first = _product(a, (beta + 1, top), stack)
    out: dict[Multisegment, int] = {}
    lifts: dict[Multisegment, Multisegment] = {}
    for e, m in first.items():
        try:
            le = psi_k_inv(e, ab, beta, "left")
        except NotInDomain:
            raise UnreducedCase(f"no lift of {e} at begin {beta}") from None
        lifts[e] = le
        out[le] = out.get(le, 0) + m
    da = derivative_closed_form(a, beta)
    a_dn = truncate(a, TruncationStep("right", beta + 1))
    pmaps: dict[Multisegment, dict[Multisegment, int]] = {}
    for d in generate_poset(_gamma_cut(a, beta, lb - 1)).elements:
        if da.get(d, 0) == 0:
            continue
        if not in_S_a_k(d, d, beta + 1, "right"):
            continue
        d_dn = truncate(d, TruncationStep("right", beta + 1))
        if not preceq_k(d_dn, a_dn, beta):
            continue
        pmaps[d] = _product(d_dn, b, stack)
    cands: set[Multisegment] = set()
    for p in pmaps.values():
        cands.update(p)
    for c in cands:
        if f_begin(c, beta) != 0:
            continue
        cl = _band_lift(c, beta, lb1)
        m = sum(da[d] * p.get(c, 0) for d, p in pmaps.items())
        m -= sum(
            first[e] * derivative_closed_form(lifts[e], beta).get(cl, 0)
            for e in first
        )
        if m:
            lbl = _band_lift(cl, beta - 1, lb - 1)
            out[lbl] = out.get(lbl, 0) + m
    return out


def _slice_solve(
    a: Multisegment, b: Segment, stack: tuple
) -> dict[Multisegment, int]:
    """Pin multiplicities by matching full derivative tables of every
    candidate against the one-step-shorter products on both sides."""
    beta, top = b
    ab = a + Multisegment([b])
    cands = list(generate_poset(ab).elements)
    index = {c: i for i, c in enumerate(cands)}
    deg_full = degree_of(ab)
    eqs: list[tuple[dict[int, int], int]] = [({index[ab]: 1}, 1)]

    def rows_at(side: str, h: int, short: Segment | None) -> None:
        rhs: dict[Multisegment, int] = {}
        for a2, nn in derivative_closed_form(a, h, side).items():
            if short is not None:
                for y, m2 in _product(a2, short, stack).items():
                    rhs[y] = rhs.get(y, 0) + nn * m2
            if a2 != a:
                for y, m2 in _product(a2, b, stack).items():
                    rhs[y] = rhs.get(y, 0) + nn * m2
        coeffs: dict[Multisegment, dict[int, int]] = {}
        for c in cands:
            for y, t in derivative_closed_form(c, h, side).items():
                if degree_of(y) < deg_full:
                    coeffs.setdefault(y, {})[index[c]] = t
        for y in set(coeffs) | set(rhs):
            if degree_of(y) < deg_full:
                eqs.append((coeffs.get(y, {}), rhs.get(y, 0)))

    rows_at("right", top, (beta, top - 1))
    rows_at("left", beta, (beta + 1, top))
    sol = _solve_int(len(cands), eqs)
    if sol is None and len(stack) <= 24:
        spare = [
            ("right", h)
            for h in sorted({e for c in cands for _, e in c.segs})
            if h != top
        ]
        spare += [
            ("left", h)
            for h in sorted({x for c in cands for x, _ in c.segs})
            if h != beta
        ]
        for side, h in spare:
            try:
                rows_at(side, h, None)
            except UnreducedCase:
                continue
            sol = _solve_int(len(cands), eqs)
            if sol is not None:
                break
    if sol is None:
        raise UnreducedCase(f"underdetermined product {a} times {b}")
    return {c: sol[i] for c, i in index.items() if sol[i]}


def _solve_int(n: int, eqs: list[tuple[dict[int, int], int]]) -> list[int] | None:
    """Unique integer solution of a linear system, or None."""
    rows = [
        [Fraction(r.get(j, 0)) for j in range(n)] + [Fraction(rhs)] for r, rhs in eqs
    ]
    pivots: list[int] = []
    rank = 0
    for col in range(n):
        src = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if src is None:
            continue
        rows[rank], rows[src] = rows[src], rows[rank]
        rows[rank] = [x / rows[rank][col] for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        pivots.append(col)
        rank += 1
    for i in range(rank, len(rows)):
        if rows[i][n]:
            return None
    if rank < n:
        return None
    sol = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        sol[col] = rows[i][n]
    if any(x.denominator != 1 for x in sol):
        return None
    return [int(x) for x in sol]
