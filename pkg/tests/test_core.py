import pytest
from hypothesis import given, strategies as st

from multiseg.core import (
    BadRange,
    Multisegment,
    NotLinked,
    NotMember,
    RelationKind,
    degree_of,
    elementary_op,
    linked,
    mseg,
    rank_invariant,
    seg,
    segment_relation,
    support_range,
    weight_of,
)

from conftest import random_multisegment


def test_seg_point_shorthand():
    assert seg(3) == (3, 3)
    assert seg(-1, 2) == (-1, 2)
    with pytest.raises(BadRange):
        seg(2, 1)


def test_canonical_order_end_major_begin_descending():
    a = Multisegment([(1, 3), (0, 2), (2, 3), (2, 2)])
    assert a.segs == ((2, 2), (0, 2), (2, 3), (1, 3))


def test_multiset_semantics():
    a = mseg((1, 2), (1, 2), (2, 3))
    assert len(a) == 3
    assert a.count((1, 2)) == 2
    assert a.entries == (((1, 2), 2), ((2, 3), 1))
    assert a.without((1, 2)) == mseg((1, 2), (2, 3))
    with pytest.raises(NotMember):
        a.without((5, 5))


def test_relation_kinds():
    assert segment_relation((1, 2), (3, 4)).kind is RelationKind.JUXTAPOSED
    assert segment_relation((1, 2), (2, 3)).kind is RelationKind.LINKED_NOT_JUXTAPOSED
    assert segment_relation((1, 4), (2, 3)).kind is RelationKind.COVERS
    assert segment_relation((2, 3), (1, 4)).kind is RelationKind.COVERED_BY
    assert segment_relation((1, 2), (1, 2)).kind is RelationKind.EQUAL
    assert segment_relation((1, 2), (4, 5)).kind is RelationKind.UNRELATED
    assert segment_relation((1, 2), (2, 3)).precedes
    assert not segment_relation((2, 3), (1, 2)).precedes
    # linked = juxtaposed or overlapping, never nested
    assert linked((1, 2), (3, 4))
    assert linked((1, 2), (2, 3))
    assert not linked((1, 4), (2, 3))
    assert not linked((1, 2), (4, 5))


def test_elementary_op_overlap_makes_union_and_intersection():
    a = mseg((1, 2), (2, 3))
    assert elementary_op(a, (1, 2), (2, 3)) == mseg((2, 2), (1, 3))


def test_elementary_op_juxtaposed_makes_union_only():
    a = mseg((1, 2), (3, 4))
    assert elementary_op(a, (1, 2), (3, 4)) == mseg((1, 4))


def test_elementary_op_rejects_unlinked():
    with pytest.raises(NotLinked):
        elementary_op(mseg((1, 4), (2, 3)), (1, 4), (2, 3))


def test_weight_and_degree():
    a = mseg((1, 3), (2, 2))
    assert degree_of(a) == 4
    w = weight_of(a)
    assert w[1] == 1 and w[2] == 2 and w[3] == 1
    assert support_range(a) == (1, 3)


def test_rank_invariant_counts_containing_segments():
    a = mseg((0, 3), (1, 2), (2, 4))
    assert rank_invariant(a, 1, 2) == 2
    assert rank_invariant(a, 2, 2) == 3
    assert rank_invariant(a, 0, 4) == 0


@given(st.integers(-3, 3), st.integers(0, 4), st.integers(-3, 3), st.integers(0, 4))
def test_relation_is_symmetric_in_kind(b1, l1, b2, l2):
    d1, d2 = (b1, b1 + l1), (b2, b2 + l2)
    assert linked(d1, d2) == linked(d2, d1)


def test_elementary_op_preserves_weight(rng):
    """Merging a linked pair never changes the point multiplicities."""
    for _ in range(80):
        a = random_multisegment(rng, 7)
        pairs = [
            (s, t)
            for i, s in enumerate(a)
            for t in a.segs[i + 1 :]
            if linked(s, t)
        ]
        for s, t in pairs:
            c = elementary_op(a, s, t)
            assert weight_of(c) == weight_of(a)
            assert degree_of(c) == degree_of(a)
