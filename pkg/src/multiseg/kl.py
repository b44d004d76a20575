"""Kazhdan-Lusztig polynomials: ordinary, parabolic, and for multisegment pairs.

Polynomials live in Z[v] with v^2 = q so that half-integer powers of q have
an exact home. The engine computes whole lower intervals at once: one table
per (canonicalized) upper bound y, memoized globally.
"""
from __future__ import annotations

import threading
from typing import Iterable

from .core import Multisegment
from .coxeter import (
    Permutation,
    SizeMismatch,
    NotInQuotient,
    bruhat_leq,
    identity,
    inverse,
    left_descents,
    length,
    max_double_coset,
    w_J,
    in_right_quotient,
    compose,
    zelevinsky_permutation,
)
from .poset import leq


class NotComparable(ValueError):
    pass


class QPoly:
    """Integer Laurent-free polynomial in v with v^2 = q.

    Keys of the coefficient map are powers of v; KL polynomials only use
    even keys, mu-expansions may use odd ones.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: dict[int, int] | None = None):
        c = {k: int(x) for k, x in (coeffs or {}).items() if x != 0}
        if any(k < 0 for k in c):
            raise ValueError(f"negative v-powers not supported: {c}")
        object.__setattr__(self, "c", c)

    def __setattr__(self, *a):
        raise AttributeError("QPoly is immutable")

    @classmethod
    def zero(cls) -> "QPoly":
        return cls({})

    @classmethod
    def one(cls) -> "QPoly":
        return cls({0: 1})

    @classmethod
    def q(cls, power: int = 1) -> "QPoly":
        return cls({2 * power: 1})

    @classmethod
    def from_q(cls, coeffs: dict[int, int]) -> "QPoly":
        return cls({2 * k: x for k, x in coeffs.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = QPoly({0: other})
        return isinstance(other, QPoly) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __bool__(self) -> bool:
        return bool(self.c)

    def __add__(self, other: "QPoly") -> "QPoly":
        out = dict(self.c)
        for k, x in other.c.items():
            out[k] = out.get(k, 0) + x
        return QPoly(out)

    def __sub__(self, other: "QPoly") -> "QPoly":
        out = dict(self.c)
        for k, x in other.c.items():
            out[k] = out.get(k, 0) - x
        return QPoly(out)

    def __neg__(self) -> "QPoly":
        return QPoly({k: -x for k, x in self.c.items()})

    def __mul__(self, other) -> "QPoly":
        if isinstance(other, int):
            return QPoly({k: x * other for k, x in self.c.items()})
        out: dict[int, int] = {}
        for k1, x1 in self.c.items():
            for k2, x2 in other.c.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + x1 * x2
        return QPoly(out)

    __rmul__ = __mul__

    def shift_q(self, power: int) -> "QPoly":
        return QPoly({k + 2 * power: x for k, x in self.c.items()})

    def coeff_q(self, power: int) -> int:
        return self.c.get(2 * power, 0)

    def coeff_v(self, power: int) -> int:
        return self.c.get(power, 0)

    def v_degree(self) -> int:
        """-1 for the zero polynomial."""
        return max(self.c, default=-1)

    def is_q_polynomial(self) -> bool:
        return all(k % 2 == 0 for k in self.c)

    def eval_at_one(self) -> int:
        return sum(self.c.values())

    def q_coeffs(self) -> dict[int, int]:
        if not self.is_q_polynomial():
            raise ValueError(f"{self} has half powers of q")
        return {k // 2: x for k, x in self.c.items()}

    def __str__(self) -> str:
        if not self.c:
            return "0"
        out = []
        for k in sorted(self.c):
            x = self.c[k]
            if k == 0:
                term = str(abs(x))
            else:
                base = "q" if k == 2 else f"q^{k // 2}" if k % 2 == 0 else f"q^({k}/2)"
                term = base if abs(x) == 1 else f"{abs(x)}*{base}"
            if not out:
                out.append(term if x > 0 else f"-{term}")
            else:
                out.append(f"+ {term}" if x > 0 else f"- {term}")
        return " ".join(out)

    def __repr__(self) -> str:
        return f"QPoly({self})"


# Tables of KL polynomials in S_n, dense tuples of q-coefficients.
_Poly = tuple[int, ...]
_ZERO: _Poly = ()
_ONE: _Poly = (1,)

TABLE: dict[Permutation, dict[Permutation, _Poly]] = {}
_LOCK = threading.Lock()


def clear_cache() -> None:
    with _LOCK:
        TABLE.clear()


def _padd(p: _Poly, r: _Poly) -> _Poly:
    if len(p) < len(r):
        p, r = r, p
    out = list(p)
    for i, x in enumerate(r):
        out[i] += x
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _psub_shifted(p: _Poly, r: _Poly, shift: int, scale: int) -> _Poly:
    """p - scale * q^shift * r."""
    out = list(p) + [0] * max(0, shift + len(r) - len(p))
    for i, x in enumerate(r):
        out[shift + i] -= scale * x
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _conj_w0(w: Permutation) -> Permutation:
    n = len(w)
    return tuple(n + 1 - w[n - i] for i in range(1, n + 1))


def _apply_transform(t: int, w: Permutation) -> Permutation:
    if t == 1:
        return inverse(w)
    if t == 2:
        return _conj_w0(w)
    if t == 3:
        return _conj_w0(inverse(w))
    return w


def _canonicalize(y: Permutation) -> tuple[Permutation, int]:
    """Lex-min among y, its inverse, and their conjugates by the longest element.

    All four share KL tables; each transform is an involution.
    """
    best, t = y, 0
    for tt in (1, 2, 3):
        cand = _apply_transform(tt, y)
        if cand < best:
            best, t = cand, tt
    return best, t


def _swap_values(s: int, w: Permutation) -> Permutation:
    """Left multiplication by the transposition (s, s+1)."""
    return tuple(s + 1 if x == s else s if x == s + 1 else x for x in w)


def _table(y: Permutation) -> dict[Permutation, _Poly]:
    key, t = _canonicalize(y)
    tab = TABLE.get(key)
    if tab is None:
        tab = _compute_table(key)
        with _LOCK:
            tab = TABLE.setdefault(key, tab)
    if t == 0:
        return tab
    return {_apply_transform(t, x): p for x, p in tab.items()}


def _compute_table(y: Permutation) -> dict[Permutation, _Poly]:
    n = len(y)
    e = identity(n)
    if y == e:
        return {e: _ONE}
    if y == tuple(range(n, 0, -1)):
        import itertools as _it

        return {x: _ONE for x in _it.permutations(range(1, n + 1))}
    s = min(left_descents(y))
    v = _swap_values(s, y)
    tv = _table(v)
    lv = length(v)
    lens = {z: length(z) for z in tv}

    mus: list[tuple[Permutation, int, int]] = []
    for z, p in tv.items():
        lz = lens[z]
        if lz >= lv or not _swap_values(s, z) < z:
            continue
        d = lv - lz - 1
        if d % 2 == 0 and d // 2 < len(p) and p[d // 2] != 0:
            mus.append((z, p[d // 2], (lv + 1 - lz) // 2))

    support: dict[Permutation, int] = dict(lens)
    for z, lz in lens.items():
        sz = _swap_values(s, z)
        if sz > z and sz not in support:
            support[sz] = lz + 1

    # accumulators for the x with sx < x; corrections applied table-by-table
    acc: dict[Permutation, list[int]] = {}
    ly = lv + 1
    for x, lx in support.items():
        sx = _swap_values(s, x)
        if sx > x:
            continue
        buf = [0] * (1 + (ly - lx) // 2)
        for i, c in enumerate(tv.get(sx, _ZERO)):
            buf[i] += c
        for i, c in enumerate(tv.get(x, _ZERO)):
            buf[i + 1] += c
        acc[x] = buf
    for z, m, shift in mus:
        for x, pz in _table(z).items():
            buf = acc.get(x)
            if buf is None:
                continue
            for i, c in enumerate(pz):
                buf[shift + i] -= m * c

    out: dict[Permutation, _Poly] = {}
    for x in sorted(support, key=lambda u: -support[u]):
        buf = acc.get(x)
        if buf is not None:
            while buf and buf[-1] == 0:
                buf.pop()
            out[x] = tuple(buf)
        else:
            out[x] = out[_swap_values(s, x)]
    return out


def _poly(x: Permutation, z: Permutation) -> _Poly:
    if x == z:
        return _ONE
    if not bruhat_leq(x, z):
        return _ZERO
    n = len(z)
    if length(z) - length(x) <= 2 or z == tuple(range(n, 0, -1)):
        return _ONE
    return _table(z).get(x, _ZERO)


def kl_poly(x: Permutation, y: Permutation) -> QPoly:
    """P_{x,y}; zero unless x <= y in Bruhat order."""
    if len(x) != len(y):
        raise SizeMismatch(f"S_{len(x)} vs S_{len(y)}")
    p = _poly(tuple(x), tuple(y))
    return QPoly.from_q(dict(enumerate(p)))


def mu(x: Permutation, y: Permutation) -> int:
    """Coefficient of q^((l(y)-l(x)-1)/2) in P_{x,y}; 0 on even length gaps."""
    if len(x) != len(y):
        raise SizeMismatch(f"S_{len(x)} vs S_{len(y)}")
    d = length(y) - length(x) - 1
    if d < 0 or d % 2 != 0:
        return 0
    p = _poly(tuple(x), tuple(y))
    return p[d // 2] if d // 2 < len(p) else 0


def parabolic_kl(v1: Permutation, v2: Permutation, J: Iterable[int]) -> QPoly:
    """P^J_{v1,v2} = P_{v1 w_J, v2 w_J} for minimal right coset representatives."""
    J = frozenset(J)
    n = len(v1)
    for v in (v1, v2):
        if not in_right_quotient(v, J):
            raise NotInQuotient(f"{v} has a right descent in {sorted(J)}")
    wj = w_J(n, J)
    return kl_poly(compose(v1, wj), compose(v2, wj))


def double_parabolic_kl(
    v1: Permutation, v2: Permutation, J1: Iterable[int], J2: Iterable[int]
) -> QPoly:
    """P^{J1,J2}_{v1,v2} via the maximal elements of the double cosets."""
    return kl_poly(max_double_coset(v1, J1, J2), max_double_coset(v2, J1, J2))


def kl_multisegment(b: Multisegment, a: Multisegment) -> QPoly:
    """P_{a,b} for b <= a, computed in S_deg via the Zelevinsky permutations.

    The value at q = 1 is the multiplicity of L_b in the standard module of a.
    """
    if not leq(b, a):
        raise NotComparable(f"{b!r} is not below {a!r}")
    return kl_poly(zelevinsky_permutation(a), zelevinsky_permutation(b))
