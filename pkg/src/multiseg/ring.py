"""Grothendieck-ring model on the standard (pi) and simple (L) bases.

Everything downstream is tested against two functions defined here:
decompose_product and derivative_simple. Both go through the unitriangular
basis change driven by m_matrix, which itself has two independent routes.
"""
from __future__ import annotations

import math
import threading
from itertools import product as iter_product
from typing import Iterable, Literal

from .core import Multisegment, Segment, degree_of
from .kl import kl_multisegment, kl_poly
from .poset import generate_poset
from .coxeter import phi_inv

STANDARD = "pi"
SIMPLE = "L"

Basis = Literal["pi", "L"]
Route = Literal["deg", "sym"]


class RingElement:
    """Finite integer combination of basis vectors indexed by multisegments."""

    __slots__ = ("basis", "terms")

    def __init__(self, basis: Basis, terms: dict[Multisegment, int] | None = None):
        if basis not in (STANDARD, SIMPLE):
            raise ValueError(f"unknown basis {basis!r}")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(
            self, "terms", {a: int(c) for a, c in (terms or {}).items() if c != 0}
        )

    def __setattr__(self, *a):
        raise AttributeError("RingElement is immutable")

    def coeff(self, a: Multisegment) -> int:
        return self.terms.get(a, 0)

    def support(self) -> list[Multisegment]:
        return sorted(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingElement)
            and self.basis == other.basis
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.basis, frozenset(self.terms.items())))

    def _check_basis(self, other: "RingElement"):
        if self.basis != other.basis:
            raise ValueError(f"mixing bases {self.basis!r} and {other.basis!r}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check_basis(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return RingElement(self.basis, out)

    def __sub__(self, other: "RingElement") -> "RingElement":
        self._check_basis(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) - c
        return RingElement(self.basis, out)

    def __neg__(self) -> "RingElement":
        return RingElement(self.basis, {a: -c for a, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return RingElement(self.basis, {a: c * other for a, c in self.terms.items()})
        return ring_mult(self, other)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        label = "pi" if self.basis == STANDARD else "L"
        bits = []
        for a in self.support():
            c = self.terms[a]
            s = f"{label}{a!r}" if abs(c) == 1 else f"{c:+d}*{label}{a!r}".lstrip("+")
            bits.append(("- " if c < 0 else "+ " if bits else "") + s.lstrip("-"))
        return " ".join(bits)


def pi(a: Multisegment) -> RingElement:
    return RingElement(STANDARD, {a: 1})


def L(a: Multisegment) -> RingElement:
    return RingElement(SIMPLE, {a: 1})


_M_CACHE: dict[tuple[Multisegment, str], dict[Multisegment, int]] = {}
_STD_CACHE: dict[tuple[Multisegment, str], dict[Multisegment, int]] = {}
_LOCK = threading.Lock()


def clear_cache() -> None:
    with _LOCK:
        _M_CACHE.clear()
        _STD_CACHE.clear()


def _m_sym(b: Multisegment, cert) -> int:
    """m(b,a) through the symmetric model of a's certificate."""
    from . import reduce as _reduce

    b_sym = _reduce.transport(b, cert)
    vb = phi_inv(cert.a_id, b_sym)
    return kl_poly(cert.w, vb).eval_at_one()


def m_matrix(a: Multisegment, route: Route = "deg") -> dict[Multisegment, int]:
    """Multiplicities m(b,a) of every simple L_b in the standard module of a.

    route="deg" evaluates KL polynomials in S_deg(a) at the Zelevinsky
    permutations; route="sym" first symmetrizes and works in the smaller
    symmetric group of the model. The two must agree everywhere.
    """
    key = (a, route)
    got = _M_CACHE.get(key)
    if got is not None:
        return dict(got)
    snap = generate_poset(a)
    if route == "deg":
        out = {b: kl_multisegment(b, a).eval_at_one() for b in snap.elements}
    elif route == "sym":
        from . import reduce as _reduce

        cert = _reduce.symmetrize(a)
        out = {b: _m_sym(b, cert) for b in snap.elements}
    else:
        raise ValueError(f"unknown route {route!r}")
    with _LOCK:
        _M_CACHE.setdefault(key, out)
    return dict(out)


def _to_standard_row(a: Multisegment, route: Route) -> dict[Multisegment, int]:
    """Coefficients of L_a on the pi basis, by unitriangular inversion."""
    key = (a, route)
    got = _STD_CACHE.get(key)
    if got is not None:
        return got
    row: dict[Multisegment, int] = {a: 1}
    for b, m in m_matrix(a, route).items():
        if b == a:
            continue
        for c, x in _to_standard_row(b, route).items():
            row[c] = row.get(c, 0) - m * x
    row = {c: x for c, x in row.items() if x != 0}
    with _LOCK:
        _STD_CACHE.setdefault(key, row)
    return _STD_CACHE[key]


def convert(x: RingElement, target_basis: Basis, route: Route = "deg") -> RingElement:
    """Basis change; simple→standard inverts the unitriangular m-matrix."""
    if target_basis not in (STANDARD, SIMPLE):
        raise ValueError(f"unknown basis {target_basis!r}")
    if x.basis == target_basis:
        return x
    out: dict[Multisegment, int] = {}
    if target_basis == SIMPLE:
        for a, c in x.terms.items():
            for b, m in m_matrix(a, route).items():
                out[b] = out.get(b, 0) + c * m
    else:
        for a, c in x.terms.items():
            for b, m in _to_standard_row(a, route).items():
                out[b] = out.get(b, 0) + c * m
    return RingElement(target_basis, out)


def ring_mult(x: RingElement, y: RingElement) -> RingElement:
    """Product on the standard basis: pi(a) * pi(b) = pi(a + b)."""
    if x.basis != STANDARD or y.basis != STANDARD:
        raise ValueError("ring_mult takes standard-basis elements")
    out: dict[Multisegment, int] = {}
    for a, c in x.terms.items():
        for b, d in y.terms.items():
            ab = a + b
            out[ab] = out.get(ab, 0) + c * d
    return RingElement(STANDARD, out)


def decompose_product(
    a: Multisegment, b: Multisegment, route: Route = "deg"
) -> dict[Multisegment, int]:
    """Coefficients m(c,b,a) in L_a x L_b = sum of m(c,b,a) L_c."""
    xa = convert(L(a), STANDARD, route)
    xb = convert(L(b), STANDARD, route)
    return dict(convert(ring_mult(xa, xb), SIMPLE, route).terms)


def _derive_one(a: Multisegment, k: int, side: str) -> dict[Multisegment, int]:
    """D^k(pi(a)): shorten any sub-multiset of the k-enders (or k-beginners)."""
    if side == "right":
        chosen = [(s, m) for (s, m) in a.entries if s[1] == k]
        cut = lambda s: (s[0], k - 1)
        keep = lambda s: s[0] < k
    elif side == "left":
        chosen = [(s, m) for (s, m) in a.entries if s[0] == k]
        cut = lambda s: (k + 1, s[1])
        keep = lambda s: s[1] > k
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    kinds = {s for s, _ in chosen}
    rest = [s for s in a if s not in kinds]
    out: dict[Multisegment, int] = {}
    for counts in iter_product(*(range(m + 1) for _, m in chosen)):
        coef = 1
        segs = list(rest)
        for (s, m), j in zip(chosen, counts):
            coef *= math.comb(m, j)
            segs.extend([s] * (m - j))
            if keep(s):
                segs.extend([cut(s)] * j)
        d = Multisegment(segs)
        out[d] = out.get(d, 0) + coef
    return out


def derivative_standard(x: RingElement, k: int, side: str = "right") -> RingElement:
    """The partial derivative as an algebra morphism on the standard basis."""
    if x.basis != STANDARD:
        raise ValueError("derivative_standard takes a standard-basis element")
    out: dict[Multisegment, int] = {}
    for a, c in x.terms.items():
        for d, m in _derive_one(a, k, side).items():
            out[d] = out.get(d, 0) + c * m
    return RingElement(STANDARD, out)


def derivative_simple(
    a: Multisegment, k: int, side: str = "right", route: Route = "deg"
) -> dict[Multisegment, int]:
    """Coefficients n(b,a) in D^k(L_a) = sum of n(b,a) L_b."""
    x = convert(L(a), STANDARD, route)
    return dict(convert(derivative_standard(x, k, side), SIMPLE, route).terms)


def composite_derivative(
    x: RingElement, i1: int, i2: int, side: str = "right"
) -> RingElement:
    """Alias for the composite of partial derivatives over the interval [i1, i2].

    Applied from the far end inward so successive cuts can telescope.
    """
    if i1 > i2:
        raise ValueError(f"empty interval [{i1},{i2}]")
    ks = range(i2, i1 - 1, -1) if side == "right" else range(i1, i2 + 1)
    for k in ks:
        x = derivative_standard(x, k, side)
    return x
