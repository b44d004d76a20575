from multiseg.core import Multisegment, degree_of, mseg
from multiseg.poset import generate_poset, leq, minimal_element
from multiseg.ring import (
    L,
    SIMPLE,
    STANDARD,
    convert,
    decompose_product,
    derivative_simple,
    derivative_standard,
    m_matrix,
    pi,
    ring_mult,
)

from conftest import random_multisegment

STAIRCASE = mseg((0, 2), (1, 3), (2, 3))


def test_multiplicity_matrix_two_segments():
    a = mseg((1, 2), (2, 3))
    assert m_matrix(a) == {a: 1, mseg((2, 2), (1, 3)): 1}


def test_multiplicity_two():
    """The smallest pair with a multiplicity above one."""
    a = mseg(1, 2, 2, 3)
    b = mseg((1, 2), (2, 3))
    for route in ("deg", "sym"):
        m = m_matrix(a, route=route)
        assert m[b] == 2
        assert m[a] == 1
        assert all(v >= 1 for v in m.values())


def test_m_matrix_is_unitriangular_on_the_poset(rng):
    for _ in range(25):
        a = random_multisegment(rng, 6)
        m = m_matrix(a)
        elems = set(generate_poset(a).elements)
        assert set(m) <= elems
        assert m[a] == 1
        assert m[minimal_element(a)] >= 1
        assert all(v >= 0 for v in m.values())


def test_routes_agree(rng):
    for _ in range(30):
        a = random_multisegment(rng, 6)
        assert m_matrix(a, route="deg") == m_matrix(a, route="sym")


def test_basis_conversion_round_trip(rng):
    for _ in range(20):
        a = random_multisegment(rng, 6)
        x = convert(L(a), STANDARD)
        assert convert(x, SIMPLE) == L(a)
        y = convert(pi(a), SIMPLE)
        assert convert(y, STANDARD) == pi(a)


def test_product_of_two_linked_segments():
    got = decompose_product(mseg((1, 2)), mseg((2, 3)))
    assert got == {mseg((1, 2), (2, 3)): 1, mseg((2, 2), (1, 3)): 1}


def test_product_commutes(rng):
    for _ in range(10):
        a = random_multisegment(rng, 4)
        b = random_multisegment(rng, 3)
        assert decompose_product(a, b) == decompose_product(b, a)


def test_staircase_product_with_the_next_point():
    """Frozen decomposition of the three-segment staircase times a point.

    Both routes give the same four simple terms, all with coefficient one.
    """
    b = mseg((4, 4))
    want = {
        STAIRCASE + b: 1,
        mseg((0, 2), (1, 3), (2, 4)): 1,
        mseg((0, 2), (2, 3), (1, 4)): 1,
        mseg((2, 2), (0, 3), (1, 4)): 1,
    }
    assert decompose_product(STAIRCASE, b, route="deg") == want
    assert decompose_product(STAIRCASE, b, route="sym") == want


def test_staircase_third_derivative():
    got = derivative_simple(STAIRCASE, 3)
    assert got == {STAIRCASE: 1, mseg((2, 2), (0, 2), (1, 3)): 1}


def test_derivative_is_an_algebra_morphism(rng):
    """On the standard basis the derivative distributes over products."""
    for _ in range(12):
        a = random_multisegment(rng, 4)
        b = random_multisegment(rng, 3)
        k = rng.randint(-1, 5)
        lhs = derivative_standard(ring_mult(pi(a), pi(b)), k)
        rhs = ring_mult(derivative_standard(pi(a), k), derivative_standard(pi(b), k))
        assert lhs == rhs


def test_left_derivative_mirrors_right(rng):
    for _ in range(12):
        a = random_multisegment(rng, 5)
        k = rng.randint(-2, 5)
        mirror = lambda m: Multisegment((-e, -b) for b, e in m)
        lhs = derivative_simple(a, k, "left")
        rhs = {
            mirror(d): c for d, c in derivative_simple(mirror(a), -k, "right").items()
        }
        assert lhs == rhs


def test_derivative_support_degrees(rng):
    """Every term of a simple derivative sits weakly below in degree."""
    for _ in range(15):
        a = random_multisegment(rng, 5)
        k = rng.randint(-2, 5)
        for d, c in derivative_simple(a, k).items():
            assert c >= 1
            assert degree_of(d) <= degree_of(a)
    assert derivative_simple(mseg((0, 1)), 5) == {mseg((0, 1)): 1}


def test_product_terms_sit_below_the_sum(rng):
    for _ in range(10):
        a = random_multisegment(rng, 4)
        b = random_multisegment(rng, 3)
        for c, m in decompose_product(a, b).items():
            assert m >= 1
            assert leq(c, a + b)
