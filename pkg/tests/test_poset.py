import pytest

from multiseg.core import Multisegment, degree_of, mseg, rank_invariant, weight_of
from multiseg.poset import (
    SizeLimit,
    chain_length,
    generate_poset,
    is_minimal,
    leq,
    minimal_element,
)

from conftest import random_multisegment


def test_two_element_poset():
    a = mseg((1, 2), (2, 3))
    snap = generate_poset(a)
    assert snap.root == a
    assert set(snap.elements) == {a, mseg((2, 2), (1, 3))}
    assert len(snap.cover_edges) == 1
    assert snap.levels[a] == 0
    assert snap.levels[mseg((2, 2), (1, 3))] == 1


def test_point_chain_poset():
    """Four points on a line close into the full staircase lower set."""
    a = mseg(1, 2, 2, 3)
    snap = generate_poset(a)
    assert set(snap.elements) == {
        a,
        mseg((1, 2), (2, 2), (3, 3)),
        mseg((1, 1), (2, 2), (2, 3)),
        mseg((1, 2), (2, 3)),
        mseg((2, 2), (1, 3)),
    }
    bottom = minimal_element(a)
    assert bottom == mseg((1, 3), (2, 2))
    assert all(leq(b, a) for b in snap.elements)
    assert all(leq(bottom, b) for b in snap.elements)


def test_leq_is_a_partial_order(rng):
    for _ in range(30):
        a = random_multisegment(rng, 6)
        elems = generate_poset(a).elements
        assert all(leq(b, b) for b in elems)
        for b in elems:
            for c in elems:
                if leq(b, c) and leq(c, b):
                    assert b == c


def test_leq_matches_rank_invariants(rng):
    """b <= a iff the weights agree and every r_ij grows weakly downward."""
    for _ in range(40):
        a = random_multisegment(rng, 6)
        lo = min(a.begins())
        hi = max(a.ends())
        for b in generate_poset(a).elements:
            assert weight_of(b) == weight_of(a)
            assert all(
                rank_invariant(b, i, j) >= rank_invariant(a, i, j)
                for i in range(lo, hi + 1)
                for j in range(i, hi + 1)
            )
        # strict inequality somewhere characterizes the non-root elements
        for b in generate_poset(a).elements:
            if b != a:
                assert any(
                    rank_invariant(b, i, j) > rank_invariant(a, i, j)
                    for i in range(lo, hi + 1)
                    for j in range(i, hi + 1)
                )


def test_minimal_element_is_unique_bottom(rng):
    for _ in range(25):
        a = random_multisegment(rng, 6)
        snap = generate_poset(a)
        bottom = minimal_element(a)
        assert bottom in snap.elements
        assert is_minimal(bottom)
        mins = [b for b in snap.elements if all(not leq(c, b) or c == b for c in snap.elements)]
        assert mins == [bottom]


def test_cover_edges_are_transitive_reduction(rng):
    for _ in range(15):
        a = random_multisegment(rng, 5)
        snap = generate_poset(a)
        succ = {i: set() for i in range(len(snap.elements))}
        for u, v in snap.cover_edges:
            succ[u].add(v)
        for u, v in snap.cover_edges:
            assert leq(snap.elements[v], snap.elements[u])
            # a cover admits no interpolating third element
            for w in range(len(snap.elements)):
                if w in (u, v):
                    continue
                assert not (
                    leq(snap.elements[w], snap.elements[u])
                    and leq(snap.elements[v], snap.elements[w])
                )


def test_levels_are_longest_chain_lengths():
    a = mseg(1, 2, 2, 3)
    snap = generate_poset(a)
    for b in snap.elements:
        assert snap.levels[b] == chain_length(b, a)


def test_size_limit():
    with pytest.raises(SizeLimit):
        generate_poset(mseg(1, 2, 2, 3), size_limit=3)
