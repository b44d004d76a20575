"""Command-line front end.

Text grammar for multisegments: a sum of terms ``[b,e]`` or ``[i]`` (the
point), each optionally prefixed by a repetition count as in ``2*[2]``;
whitespace is free.  Permutations print in one-line form ``3,4,1,2`` and
are additionally accepted as products of cycles on input, ``(1 3)(2 4)``.

Exit codes: 0 on success, 1 when a cross-check disagrees or a product
reduction fails, 2 on malformed input or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Sequence

from .core import BadRange, Multisegment, Segment, degree_of, seg, support_range
from .coxeter import (
    NotInQuotient,
    SizeMismatch,
    zelevinsky_permutation,
)
from .formulas import (
    ShapeMismatch,
    UnreducedCase,
    derivative_closed_form,
    induce_segment,
    theta_table,
)
from .kl import QPoly, kl_poly, parabolic_kl
from .poset import (
    DEFAULT_SIZE_LIMIT,
    SizeLimit,
    generate_poset,
    leq,
    minimal_element,
)
from .reduce import TruncationStep, classify_poset, symmetrize, transport, truncate
from .ring import decompose_product, derivative_simple, m_matrix

SCHEMA = "mseg/1"

# oracle cross-checks run by default up to this total degree
ORACLE_GUARD = 9


class ParseError(ValueError):
    """Malformed command-line text; `pos` is the zero-based offset."""

    def __init__(self, text: str, pos: int, why: str):
        self.text = text
        self.pos = pos
        super().__init__(f"{why} at position {pos} in {text!r}")


# ---------------------------------------------------------------------------
# text forms


def parse_multisegment(text: str) -> Multisegment:
    """Parse the sum grammar; ``0`` alone denotes the empty multisegment."""
    s = text
    n = len(s)
    i = 0

    def skip() -> None:
        nonlocal i
        while i < n and s[i].isspace():
            i += 1

    def fail(why: str) -> None:
        raise ParseError(s, i, why)

    def integer() -> int:
        nonlocal i
        skip()
        j = i
        if i < n and s[i] == "-":
            i += 1
        while i < n and s[i].isdigit():
            i += 1
        if i == j or not s[j:i].lstrip("-"):
            i = j
            fail("expected an integer")
        return int(s[j:i])

    skip()
    if i < n and s[i] == "0" and not s[i + 1 :].strip():
        return Multisegment()

    out: list[Segment] = []
    while True:
        skip()
        count = 1
        if i < n and s[i].isdigit():
            j = i
            while i < n and s[i].isdigit():
                i += 1
            count = int(s[j:i])
            skip()
            if i >= n or s[i] != "*":
                fail("expected '*' after a count")
            i += 1
            skip()
        start = i
        if i >= n or s[i] != "[":
            fail("expected '['")
        i += 1
        b = integer()
        skip()
        if i < n and s[i] == ",":
            i += 1
            e = integer()
            skip()
        else:
            e = b
        if i >= n or s[i] != "]":
            fail("expected ']'")
        i += 1
        if b > e:
            i = start
            fail(f"empty segment [{b},{e}]")
        out.extend([(b, e)] * count)
        skip()
        if i >= n:
            break
        if s[i] != "+":
            fail("expected '+' or end of input")
        i += 1
    return Multisegment(out)


def format_multisegment(a: Multisegment) -> str:
    if not a:
        return "0"
    parts = []
    for (b, e), m in a.entries:
        body = f"[{b}]" if b == e else f"[{b},{e}]"
        parts.append(body if m == 1 else f"{m}*{body}")
    return "+".join(parts)


def parse_permutation(text: str) -> tuple[tuple[int, ...], bool]:
    """One-line or cycle input; returns (permutation, came_from_cycles).

    Cycle input fixes every point not mentioned, so its size can be grown
    by the caller to match a partner permutation.
    """
    t = text.strip()
    if t.startswith("("):
        cycles: list[list[int]] = []
        i = 0
        while i < len(t):
            if t[i].isspace():
                i += 1
                continue
            if t[i] != "(":
                raise ParseError(text, i, "expected '('")
            j = t.find(")", i)
            if j < 0:
                raise ParseError(text, i, "unclosed cycle")
            body = t[i + 1 : j].replace(",", " ").split()
            try:
                cyc = [int(x) for x in body]
            except ValueError:
                raise ParseError(text, i, "expected integers in cycle") from None
            if any(x < 1 for x in cyc) or len(set(cyc)) != len(cyc):
                raise ParseError(text, i, "cycle entries must be distinct positives")
            cycles.append(cyc)
            i = j + 1
        m = max((x for c in cycles for x in c), default=1)
        img = list(range(1, m + 1))
        for cyc in cycles:
            for k, x in enumerate(cyc):
                img[x - 1] = cyc[(k + 1) % len(cyc)]
        return tuple(img), True
    body = t.replace(",", " ").split()
    try:
        w = tuple(int(x) for x in body)
    except ValueError:
        raise ParseError(text, 0, "expected a comma-separated permutation") from None
    if not w or sorted(w) != list(range(1, len(w) + 1)):
        raise ParseError(text, 0, f"not a permutation of 1..{len(w)}")
    return w, False


def _pad(w: tuple[int, ...], m: int) -> tuple[int, ...]:
    return w + tuple(range(len(w) + 1, m + 1))


def format_permutation(w: Sequence[int]) -> str:
    return ",".join(str(x) for x in w)


# ---------------------------------------------------------------------------
# output helpers


def _mjson(a: Multisegment) -> list[list[int]]:
    return [list(s) for s in a.segs]


def _emit(payload: dict) -> None:
    print(json.dumps({"schema": SCHEMA, **payload}))


def _term_lines(terms: dict[Multisegment, int]) -> list[str]:
    out = []
    for c in sorted(terms):
        m = terms[c]
        body = f"L({format_multisegment(c)})"
        out.append(body if m == 1 else f"{m}*{body}")
    return out


def _terms_json(terms: dict[Multisegment, int]) -> list[dict]:
    return [
        {"coeff": terms[c], "mseg": _mjson(c), "text": format_multisegment(c)}
        for c in sorted(terms)
    ]


def _print_terms(terms: dict[Multisegment, int], as_json: bool, **extra) -> None:
    if as_json:
        _emit({"terms": _terms_json(terms), **extra})
    else:
        for line in _term_lines(terms):
            print(line)


def _counterexample(
    what: str, lhs: dict[Multisegment, int], rhs: dict[Multisegment, int]
) -> str:
    bad = min(c for c in set(lhs) | set(rhs) if lhs.get(c, 0) != rhs.get(c, 0))
    return (
        f"disagreement in {what} at L({format_multisegment(bad)}): "
        f"{lhs.get(bad, 0)} vs {rhs.get(bad, 0)}"
    )


def _poly_json(p: QPoly) -> dict[str, int]:
    return {str(d): c for d, c in sorted(p.q_coeffs().items())}


def _size_limit() -> int:
    return int(os.environ.get("MSEG_SIZE_LIMIT", DEFAULT_SIZE_LIMIT))


# ---------------------------------------------------------------------------
# commands


def _cmd_poset(args) -> int:
    a = parse_multisegment(args.A)
    snap = generate_poset(a, _size_limit())
    if args.dot:
        print("digraph poset {")
        print("  rankdir=TB;")
        for i, m in enumerate(snap.elements):
            print(f'  n{i} [label="{format_multisegment(m)}"];')
        for u, v in snap.cover_edges:
            print(f"  n{u} -> n{v};")
        print("}")
        return 0
    if args.json:
        _emit(
            {
                "root": _mjson(snap.root),
                "elements": [_mjson(m) for m in snap.elements],
                "covers": [list(e) for e in snap.cover_edges],
                "levels": [snap.levels[m] for m in snap.elements],
            }
        )
        return 0
    print(f"# {len(snap.elements)} elements, {len(snap.cover_edges)} covers")
    for m in sorted(snap.elements, key=lambda x: (snap.levels[x], x)):
        print(f"{snap.levels[m]}: {format_multisegment(m)}")
    return 0


def _cmd_min(args) -> int:
    a = parse_multisegment(args.A)
    m = minimal_element(a)
    if args.json:
        _emit({"min": _mjson(m), "text": format_multisegment(m)})
    else:
        print(format_multisegment(m))
    return 0


def _cmd_leq(args) -> int:
    b = parse_multisegment(args.B)
    a = parse_multisegment(args.A)
    r = leq(b, a)
    if args.json:
        _emit({"leq": r})
    else:
        print("true" if r else "false")
    return 0


def _cmd_mult(args) -> int:
    b = parse_multisegment(args.B)
    a = parse_multisegment(args.A)
    if args.route == "both":
        got = {r: m_matrix(a, route=r).get(b, 0) for r in ("deg", "sym")}
        if got["deg"] != got["sym"]:
            print(
                f"disagreement in m({format_multisegment(b)}, "
                f"{format_multisegment(a)}): deg {got['deg']}, sym {got['sym']}",
                file=sys.stderr,
            )
            return 1
        m = got["deg"]
        if args.json:
            _emit({"m": m, "routes": got})
        else:
            print(m)
        return 0
    m = m_matrix(a, route=args.route).get(b, 0)
    if args.json:
        _emit({"m": m, "routes": {args.route: m}})
    else:
        print(m)
    return 0


def _mode(args, total_degree: int) -> str:
    if args.formula:
        return "formula"
    if args.oracle:
        return "oracle"
    if args.both:
        return "both"
    return "both" if total_degree <= ORACLE_GUARD else "formula-unchecked"


def _cmd_product(args) -> int:
    a = parse_multisegment(args.A)
    b = parse_multisegment(args.B)
    mode = _mode(args, degree_of(a) + degree_of(b))
    if mode == "oracle":
        _print_terms(decompose_product(a, b), args.json)
        return 0
    if len(b) != 1:
        print("error: the product formula needs b a single segment", file=sys.stderr)
        return 2
    got = induce_segment(a, b.segs[0])
    if mode == "both":
        want = decompose_product(a, b)
        if got != want:
            print(_counterexample("product", got, want), file=sys.stderr)
            return 1
        _print_terms(got, args.json, checked=True)
        return 0
    if mode == "formula-unchecked":
        print("# warning: oracle skipped above the degree guardrail", file=sys.stderr)
        _print_terms(got, args.json, checked=False)
        return 0
    _print_terms(got, args.json)
    return 0


def _cmd_derive(args) -> int:
    a = parse_multisegment(args.A)
    side = "left" if args.left else "right"
    mode = _mode(args, degree_of(a))
    if mode == "oracle":
        _print_terms(derivative_simple(a, args.K, side), args.json)
        return 0
    got = derivative_closed_form(a, args.K, side)
    if mode == "both":
        want = derivative_simple(a, args.K, side)
        if got != want:
            print(_counterexample("derivative", got, want), file=sys.stderr)
            return 1
        _print_terms(got, args.json, checked=True)
        return 0
    if mode == "formula-unchecked":
        print("# warning: oracle skipped above the degree guardrail", file=sys.stderr)
        _print_terms(got, args.json, checked=False)
        return 0
    _print_terms(got, args.json)
    return 0


def _cmd_truncate(args) -> int:
    a = parse_multisegment(args.A)
    side = "left" if args.left else "right"
    r = truncate(a, TruncationStep(side, args.K))
    if args.json:
        _emit({"truncated": _mjson(r), "text": format_multisegment(r)})
    else:
        print(format_multisegment(r))
    return 0


def _cmd_sym(args) -> int:
    a = parse_multisegment(args.A)
    cert = symmetrize(a)
    payload = {"certificate": json.loads(cert.to_json())}
    payload["sym_text"] = format_multisegment(cert.sym)
    if args.B is not None:
        b = parse_multisegment(args.B)
        tb = transport(b, cert)
        payload["transport"] = _mjson(tb)
        payload["transport_text"] = format_multisegment(tb)
    _emit(payload)
    return 0


def _cmd_classify(args) -> int:
    a = parse_multisegment(args.A)
    n, j1, j2, w, floor = classify_poset(a)
    if args.json:
        _emit(
            {
                "n": n,
                "J1": sorted(j1),
                "J2": sorted(j2),
                "w": list(w),
                "floor": _mjson(floor),
                "floor_text": format_multisegment(floor),
            }
        )
        return 0
    print(f"n = {n}")
    print(f"J1 = {','.join(map(str, sorted(j1))) or '-'}")
    print(f"J2 = {','.join(map(str, sorted(j2))) or '-'}")
    print(f"w = {format_permutation(w)}")
    print(f"floor = {format_multisegment(floor)}")
    return 0


def _cmd_kl(args) -> int:
    u, cu = parse_permutation(args.U)
    w, cw = parse_permutation(args.W)
    if len(u) != len(w):
        m = max(len(u), len(w))
        if cu and len(u) < m:
            u = _pad(u, m)
        if cw and len(w) < m:
            w = _pad(w, m)
    if len(u) != len(w):
        print("error: permutations act on different sets", file=sys.stderr)
        return 2
    if args.J:
        J = sorted({int(x) for x in args.J.replace(",", " ").split()})
        p = parabolic_kl(u, w, J)
    else:
        p = kl_poly(u, w)
    if args.json:
        _emit({"kl": _poly_json(p), "text": str(p)})
    else:
        print(p)
    return 0


def _cmd_wperm(args) -> int:
    a = parse_multisegment(args.A)
    w = zelevinsky_permutation(a)
    if args.json:
        _emit({"w": list(w), "text": format_permutation(w)})
    else:
        print(format_permutation(w))
    return 0


def _cmd_theta(args) -> int:
    a = parse_multisegment(args.A)
    print(json.dumps(theta_table(a, args.K, args.R0).to_json()))
    return 0


# ---------------------------------------------------------------------------
# selftest


def _random_multisegment(rng: random.Random, max_deg: int) -> Multisegment:
    target = rng.randint(1, max_deg)
    segs: list[Segment] = []
    d = 0
    while d < target:
        b = rng.randint(-2, 4)
        e = b + rng.randint(0, min(3, target - d - 1))
        segs.append((b, e))
        d += e - b + 1
    return Multisegment(segs)


def _cmd_selftest(args) -> int:
    rng = random.Random(args.seed)
    counts = {"derivative": 0, "product": 0, "routes": 0}
    for _ in range(args.trials):
        a = _random_multisegment(rng, args.max_deg)
        lo, hi = support_range(a)
        k = rng.randint(lo - 1, hi + 1)
        side = rng.choice(["right", "left"])
        if derivative_closed_form(a, k, side) != derivative_simple(a, k, side):
            print(
                f"FAIL derivative k={k} side={side} at {format_multisegment(a)}",
                file=sys.stderr,
            )
            return 1
        counts["derivative"] += 1

        bb = rng.randint(lo - 1, hi + 1)
        b = seg(bb, bb + rng.randint(0, 2))
        try:
            got = induce_segment(a, b)
        except UnreducedCase as exc:
            print(
                f"FAIL product unreduced {format_multisegment(a)} x "
                f"{format_multisegment(Multisegment([b]))}: {exc}",
                file=sys.stderr,
            )
            return 1
        want = decompose_product(a, Multisegment([b]), route="sym")
        if got != want:
            print(
                f"FAIL product at {format_multisegment(a)} x "
                f"{format_multisegment(Multisegment([b]))}: "
                + _counterexample("product", got, want),
                file=sys.stderr,
            )
            return 1
        counts["product"] += 1

        if m_matrix(a, route="deg") != m_matrix(a, route="sym"):
            print(f"FAIL routes at {format_multisegment(a)}", file=sys.stderr)
            return 1
        counts["routes"] += 1
    if args.json:
        _emit(
            {
                "seed": args.seed,
                "trials": args.trials,
                "max_deg": args.max_deg,
                "counts": counts,
                "pass": True,
            }
        )
        return 0
    print(f"selftest seed={args.seed} trials={args.trials} max-deg={args.max_deg}")
    for name in ("derivative", "product", "routes"):
        print(f"{name} {counts[name]}/{args.trials}")
    print("PASS")
    return 0


# ---------------------------------------------------------------------------
# dispatch


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="mseg", description="Exact multisegment combinatorics."
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help: str):
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.set_defaults(fn=fn)
        return p

    p = add("poset", _cmd_poset, "generate the lower set S(a)")
    p.add_argument("A")
    p.add_argument("--dot", action="store_true", help="emit a DOT Hasse diagram")

    p = add("min", _cmd_min, "minimal element of S(a)")
    p.add_argument("A")

    p = add("leq", _cmd_leq, "test b <= a")
    p.add_argument("B")
    p.add_argument("A")

    p = add("mult", _cmd_mult, "multiplicity m(b,a)")
    p.add_argument("B")
    p.add_argument("A")
    p.add_argument("--route", choices=["sym", "deg", "both"], default="deg")

    p = add("product", _cmd_product, "decompose L(a) x L(b), b a segment")
    p.add_argument("A")
    p.add_argument("B")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--formula", action="store_true")
    g.add_argument("--oracle", action="store_true")
    g.add_argument("--both", action="store_true")

    p = add("derive", _cmd_derive, "decompose the k-th derivative of L(a)")
    p.add_argument("K", type=int)
    p.add_argument("A")
    p.add_argument("--left", action="store_true")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--formula", action="store_true")
    g.add_argument("--oracle", action="store_true")
    g.add_argument("--both", action="store_true")

    p = add("truncate", _cmd_truncate, "remove the point k from ends (or begins)")
    p.add_argument("K", type=int)
    p.add_argument("A")
    p.add_argument("--left", action="store_true")

    p = add("sym", _cmd_sym, "symmetrization certificate, optional transport of b")
    p.add_argument("A")
    p.add_argument("B", nargs="?", default=None)

    p = add("classify", _cmd_classify, "parabolic model of S(a)")
    p.add_argument("A")

    p = add("kl", _cmd_kl, "Kazhdan-Lusztig polynomial P_{u,w}")
    p.add_argument("U")
    p.add_argument("W")
    p.add_argument("--J", default=None, help="parabolic generators i,j,...")

    p = add("wperm", _cmd_wperm, "Zelevinsky permutation of a")
    p.add_argument("A")

    p = add("theta", _cmd_theta, "theta table of an identity model, as JSON")
    p.add_argument("A")
    p.add_argument("K", type=int)
    p.add_argument("R0", type=int)

    p = add("selftest", _cmd_selftest, "seeded fuzz of the closed forms")
    p.add_argument("--max-deg", type=int, default=6, dest="max_deg")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=25)

    return top


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BadRange, SizeMismatch, NotInQuotient, ShapeMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnreducedCase as exc:
        print(f"unreduced: {exc}", file=sys.stderr)
        return 1
    except SizeLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
