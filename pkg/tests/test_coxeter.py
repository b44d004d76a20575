import itertools

import pytest

from multiseg.core import mseg
from multiseg.coxeter import (
    NotInQuotient,
    Partition,
    bruhat_leq,
    compose,
    identity,
    in_double_quotient,
    in_right_quotient,
    inverse,
    left_descents,
    length,
    max_double_coset,
    phi,
    phi_inv,
    quotient_reps,
    right_descents,
    s_b_members,
    sigma2,
    transposition,
    w_J,
    zelevinsky_permutation,
)
from multiseg.poset import leq


def _subword_leq(u, w):
    """Bruhat order by the subword property on one reduced word of w."""
    word = []
    w = list(w)
    # bubble-sort reduced word
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                word.append(i + 1)
                changed = True
    word.reverse()
    n = len(w)
    found = {identity(n)}
    for s in word:
        found |= {compose(x, transposition(n, s)) for x in found}
    return tuple(u) in found


def test_group_basics():
    w = (3, 1, 2)
    assert compose(inverse(w), w) == identity(3)
    assert length(w) == 2
    assert length(identity(5)) == 0
    assert right_descents((2, 1, 3)) == {1}
    assert left_descents((3, 1, 2)) == {2}


def test_bruhat_matches_subword_oracle():
    for n in (2, 3, 4):
        perms = list(itertools.permutations(range(1, n + 1)))
        for u in perms:
            for w in perms:
                assert bruhat_leq(u, w) == _subword_leq(u, w), (u, w)


def test_longest_parabolic_elements():
    assert w_J(4, []) == identity(4)
    assert w_J(4, [1, 2, 3]) == (4, 3, 2, 1)
    assert w_J(4, [1, 3]) == (2, 1, 4, 3)
    assert length(w_J(5, [1, 2])) == 3


def test_quotient_representative_counts():
    # |S_n / S_J| for a maximal parabolic is a binomial coefficient
    assert len(quotient_reps(4, [], [1, 2])) == 4
    assert len(quotient_reps(4, [], [1, 3])) == 6
    # double cosets count 3x3 contingency tables with margins (2,1,1)/(1,1,2)
    assert len(quotient_reps(4, [1], [3])) == 7
    assert all(in_right_quotient(v, [1, 3]) for v in quotient_reps(4, [], [1, 3]))


def test_max_double_coset_dominates():
    J1, J2 = [1], [2]
    for v in quotient_reps(3, J1, J2):
        m = max_double_coset(v, J1, J2)
        assert bruhat_leq(v, m)
        assert in_double_quotient(v, J1, J2)


def test_phi_reverses_order():
    a_id = mseg((0, 2), (1, 3), (2, 4))
    perms = list(itertools.permutations((1, 2, 3)))
    for u in perms:
        for v in perms:
            assert bruhat_leq(u, v) == leq(phi(a_id, v), phi(a_id, u)), (u, v)


def test_phi_round_trip():
    a_id = mseg((0, 3), (1, 4), (2, 5), (3, 6))
    for v in itertools.permutations((1, 2, 3, 4)):
        assert phi_inv(a_id, phi(a_id, v)) == v


def test_zelevinsky_permutation_known_value():
    assert zelevinsky_permutation(mseg((1, 2), (2, 3))) == (3, 4, 1, 2)


def test_zelevinsky_permutation_dominates_members():
    for b in (
        mseg((1, 2), (2, 3)),
        mseg((2, 2), (1, 3)),
        mseg(1, 2, 2, 3),
        mseg((1, 1), (1, 2), (2, 3)),
    ):
        w = zelevinsky_permutation(b)
        members = s_b_members(b)
        assert w in members
        assert all(bruhat_leq(v, w) for v in members)


def test_sigma2_of_zero_partition_is_identity_tuple():
    assert sigma2(Partition((0, 0, 0))) == (1, 2, 3)
    assert sigma2(Partition((0, 2, 2))) == (1, 4, 5)


def test_partition_alternating_encoding_round_trip():
    lam = Partition((0, 1, 1, 3))
    a, b = lam.to_alternate(4)
    assert Partition.from_alternate(a, b) == lam


def test_quotient_membership_is_descent_free():
    assert in_right_quotient((1, 3, 2), [1])
    assert not in_right_quotient((2, 1, 3), [1])
    assert in_double_quotient((1, 2, 3), [1], [2])
    assert not in_double_quotient((1, 3, 2), [1], [2])
