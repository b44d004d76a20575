import json

import pytest

from multiseg.core import Multisegment, degree_of, mseg, weight_of
from multiseg.coxeter import identity, phi, phi_inv
from multiseg.kl import kl_poly
from multiseg.poset import generate_poset, leq, minimal_element
from multiseg.reduce import (
    NoBijection,
    NotInDomain,
    SymmetrizationCertificate,
    TruncationStep,
    classify_poset,
    hypothesis_Hk,
    in_S_a_k,
    parabolic_model,
    psi_k,
    psi_k_inv,
    reduce_to_ordinary,
    relation_type_equal,
    symmetrize,
    transport,
    truncate,
    truncate_seq,
    xi_transport,
)
from multiseg.ring import m_matrix

from conftest import random_multisegment


def test_truncate_shaves_matching_ends():
    a = mseg((1, 2), (2, 3), (3, 3))
    assert truncate(a, TruncationStep("right", 3)) == mseg((1, 2), (2, 2))
    assert truncate(a, TruncationStep("left", 1)) == mseg((2, 2), (2, 3), (3, 3))
    assert truncate(mseg((3, 3)), TruncationStep("right", 3)) == mseg()


def test_truncation_step_validates_side():
    with pytest.raises(ValueError):
        TruncationStep("up", 3)


def test_hypothesis_spot_cases():
    a = mseg((1, 2), (2, 3))
    assert hypothesis_Hk(a, a, 3)
    # the lower element loses the 3-ender, breaking the degree clause
    assert not hypothesis_Hk(mseg((2, 2), (1, 3)), a, 2)
    assert in_S_a_k(mseg((2, 2), (1, 3)), a, 3)
    # a linked pair ending at k-1 and k blocks the hypothesis
    b = mseg((1, 2), (2, 3), (0, 3))
    assert not hypothesis_Hk(b, b, 3)


def test_psi_round_trip(rng):
    for _ in range(40):
        a = random_multisegment(rng, 6)
        k = rng.randint(min(a.begins()) - 1, max(a.ends()) + 1)
        side = rng.choice(["right", "left"])
        ak = truncate(a, TruncationStep(side, k))
        for b in generate_poset(a).elements:
            if not in_S_a_k(b, a, k, side):
                continue
            d = psi_k(b, a, k, side)
            assert leq(d, ak)
            assert psi_k_inv(d, a, k, side) == b


def test_psi_is_a_bijection_onto_the_truncated_poset(rng):
    for _ in range(30):
        a = random_multisegment(rng, 6)
        k = rng.randint(min(a.begins()), max(a.ends()))
        dom = [b for b in generate_poset(a).elements if in_S_a_k(b, a, k)]
        img = {psi_k(b, a, k) for b in dom}
        assert len(img) == len(dom)
        ak = truncate(a, TruncationStep("right", k))
        assert img == set(generate_poset(ak).elements)


def test_psi_preserves_multiplicities(rng):
    for _ in range(12):
        a = random_multisegment(rng, 6)
        k = rng.randint(min(a.begins()), max(a.ends()))
        ak = truncate(a, TruncationStep("right", k))
        ma = m_matrix(a)
        mk = m_matrix(ak)
        for b in generate_poset(a).elements:
            if in_S_a_k(b, a, k):
                assert ma[b] == mk[psi_k(b, a, k)]


def test_psi_inv_rejects_foreign_elements():
    a = mseg((1, 2), (2, 3))
    with pytest.raises(NotInDomain):
        psi_k_inv(mseg((5, 5)), a, 3)


def test_reduce_to_ordinary_keeps_poset_size(rng):
    for _ in range(20):
        a = random_multisegment(rng, 6)
        b, c1, c2 = reduce_to_ordinary(a)
        assert len(set(b.begins())) == len(b)
        assert len(set(b.ends())) == len(b)
        assert len(generate_poset(b).elements) == len(generate_poset(a).elements)


def test_symmetrization_of_the_four_point_chain():
    """The chain of one point at 1, two at 2, one at 3."""
    a = mseg(1, 2, 2, 3)
    cert = symmetrize(a)
    assert cert.sym == mseg((0, 3), (1, 5), (2, 4), (3, 6))
    assert cert.a_id == mseg((0, 3), (1, 4), (2, 5), (3, 6))
    assert cert.w == (1, 3, 2, 4)
    assert phi(cert.a_id, cert.w) == cert.sym
    assert truncate_seq(cert.sym, cert.steps) == a

    b = mseg((1, 2), (2, 3))
    tb = transport(b, cert)
    assert tb == mseg((0, 5), (1, 6), (2, 3), (3, 4))
    # multiplicity carried to the symmetric model and read off as a KL value
    vb = phi_inv(cert.a_id, tb)
    assert kl_poly(cert.w, vb).eval_at_one() == 2


def test_transport_preserves_multiplicities(rng):
    for _ in range(12):
        a = random_multisegment(rng, 6)
        cert = symmetrize(a)
        msym = m_matrix(cert.sym)
        for b, m in m_matrix(a).items():
            assert msym[transport(b, cert)] == m


def test_certificate_json_round_trip():
    cert = symmetrize(mseg(1, 2, 2, 3))
    again = SymmetrizationCertificate.from_json(cert.to_json())
    assert again == cert
    data = json.loads(cert.to_json())
    assert data["format"] == "mseg-cert/1"


def test_relation_type_shift_always_matches(rng):
    for _ in range(25):
        a = random_multisegment(rng, 6)
        assert relation_type_equal(a, a.shift(3))
        assert relation_type_equal(a, a.shift(-7))


def test_relation_type_distinguishes_juxtaposition():
    assert not relation_type_equal(mseg((1, 2), (2, 3)), mseg((1, 2), (3, 4)))


def test_xi_transport_preserves_multiplicities(rng):
    checked = 0
    for _ in range(40):
        a = random_multisegment(rng, 6)
        lo = min(a.begins())
        hi = max(a.ends())
        candidates = [a.shift(2)]
        for t in range(lo, hi):
            a2 = Multisegment(
                (b + (b > t), e + (e > t)) for b, e in a
            )
            if relation_type_equal(a, a2):
                candidates.append(a2)
                break
        for a2 in candidates:
            ma = m_matrix(a)
            m2 = m_matrix(a2)
            for b, m in ma.items():
                assert m2[xi_transport(b, a, a2)] == m
            checked += 1
    assert checked >= 40


def test_xi_transport_rejects_type_mismatch():
    with pytest.raises(NoBijection):
        xi_transport(
            mseg((1, 2), (2, 3)), mseg((1, 2), (2, 3)), mseg((1, 2), (3, 4))
        )


def test_classify_four_point_chain():
    n, j1, j2, w, floor = classify_poset(mseg(1, 2, 2, 3))
    assert n == 4
    assert j1 == frozenset({2})
    assert j2 == frozenset({2})
    model = parabolic_model(mseg(1, 2, 2, 3))
    assert leq(floor, model)


def test_classify_identity_model_gives_identity():
    a = mseg((1, 3), (1, 4), (2, 5), (2, 6))
    n, j1, j2, w, floor = classify_poset(a)
    assert n == 4
    assert w == identity(4)
    assert j2 == frozenset({1, 3})


def test_classify_interval_matches_the_source_poset(rng):
    """S(a) embeds as the interval above the floor in the parabolic model."""
    for _ in range(15):
        a = random_multisegment(rng, 5)
        n, j1, j2, w, floor = classify_poset(a)
        model = parabolic_model(a)
        src = generate_poset(a)
        above = [c for c in generate_poset(model).elements if leq(floor, c)]
        assert len(above) == len(src.elements)
        src_levels = sorted(src.levels.values())
        model_poset = generate_poset(model)
        base = min(model_poset.levels[c] for c in above)
        assert sorted(model_poset.levels[c] - base for c in above) == src_levels


def test_ordinary_symmetric_case_classifies_trivially():
    a = mseg((0, 3), (1, 4), (2, 5))
    n, j1, j2, w, floor = classify_poset(a)
    assert j1 == frozenset() and j2 == frozenset()
    assert floor == minimal_element(parabolic_model(a))
