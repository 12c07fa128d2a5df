import time
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from curvlinf.operadcheck import (OperadElement, check_d_squared, check_descends,
                                  cobar_differential, element, expand_structure_equation,
                                  format_element, gen, printed_identity, raw_structure_terms,
                                  reduce_to_clie, reproduces_printed, small_trees, arity)

L0 = (0, ())


def unshifted(terms):
    return OperadElement(terms, "unshifted")


def test_boundary_of_l0():
    d = cobar_differential(element(gen(0), "unshifted"))
    assert d == unshifted({(1, (L0,)): -1})


def test_boundary_of_l1():
    d = cobar_differential(element(gen(1), "unshifted"))
    assert d == unshifted({(1, ((1, (1,)),)): -1, (2, (L0, 1)): -1})


def test_boundary_of_l2():
    d = cobar_differential(element(gen(2), "unshifted"))
    expected = unshifted({(1, ((2, (1, 2)),)): 1, (2, ((1, (1,)), 2)): -1,
                          (2, ((1, (2,)), 1)): 1, (3, (L0, 1, 2)): 1})
    assert d == expected.scaled(-1)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_printed_identities(n):
    ok, lhs = reproduces_printed(n)
    assert ok
    assert format_element(lhs) == format_element(printed_identity(n))


def test_d_squared_arity_0():
    x = element(gen(0), "unshifted")
    assert cobar_differential(cobar_differential(x)).is_zero()


def test_d_squared_arity_2_weight_2():
    assert check_d_squared(2, 2).ok


def test_d_squared_arity_4_budget():
    t0 = time.perf_counter()
    rep = check_d_squared(4, 4)
    assert rep.ok and rep.residues == []
    assert time.perf_counter() - t0 < 60


@pytest.mark.parametrize("flavor", ["classical", "mixed"])
@pytest.mark.parametrize("conv", ["shifted", "unshifted"])
def test_d_squared_three_vertex_trees(flavor, conv):
    assert check_d_squared(3, 2, conventions=(conv,), flavors=(flavor,), max_vertices=3).ok


def test_reduce_keeps_binary_trees():
    x = element((2, ((2, (1, 2)), 3)))
    assert reduce_to_clie(x) == x


def test_reduce_drops_ideal():
    assert reduce_to_clie(element((3, (L0, 1, 2)))).is_zero()


def test_reduce_boundary_of_l2():
    d = cobar_differential(element(gen(2), "unshifted")).scaled(-1)
    expected = unshifted({(1, ((2, (1, 2)),)): 1, (2, ((1, (1,)), 2)): -1,
                          (2, ((1, (2,)), 1)): 1})
    assert reduce_to_clie(d) == expected


def test_descends():
    ok, dim = check_descends(3, 2)
    assert ok and dim > 0


def test_descends_mixed():
    ok, _ = check_descends(3, 2, flavor="mixed")
    assert ok


def _brute_force_count(n):
    # (p, q, S) with p + q = n + 1 and S a q-subset of the inputs
    count = 0
    for p in range(1, n + 2):
        q = n + 1 - p
        count += sum(1 for _ in combinations(range(n), q))
    return count


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_term_count(n):
    assert len(raw_structure_terms(n)) == _brute_force_count(n)
    assert len(raw_structure_terms(n, "mixed")) == _brute_force_count(n) + n + 1


def test_n3_term_count():
    # q-subsets of three inputs for q = 3, 2, 1, 0
    assert len(raw_structure_terms(3)) == 1 + 3 + 3 + 1


def test_structure_equation_low_arity():
    e0 = expand_structure_equation(0, convention="unshifted")
    assert e0 == unshifted({(1, (L0,)): 1})
    e1 = expand_structure_equation(1, convention="unshifted")
    assert e1 == unshifted({(1, ((1, (1,)),)): 1, (2, (L0, 1)): 1})
    m0 = expand_structure_equation(0, "mixed", "unshifted")
    assert m0 == unshifted({(1, (L0,)): 1, ("d", (L0,)): 1})


TREES = small_trees(3, 2, 2)


@given(st.sampled_from(TREES), st.sampled_from(TREES), st.integers(-3, 3))
@settings(max_examples=60, deadline=None)
def test_normalization_order_independent(t, u, c):
    x = OperadElement({t: 1}, "shifted")
    x.add_tree(u, c)
    y = OperadElement({u: c}, "shifted")
    y.add_tree(t, 1)
    assert x == y
    # re-normalizing canonical trees changes nothing
    assert OperadElement(dict(x.terms), "shifted") == x


@given(st.sampled_from(TREES))
@settings(max_examples=40, deadline=None)
def test_transposition_is_involution(t):
    x = element(t)
    n = arity(t)
    if n < 2:
        return
    sigma = list(range(1, n + 1))
    sigma[0], sigma[1] = sigma[1], sigma[0]
    assert x.act(sigma).act(sigma) == x


@given(st.sampled_from(TREES), st.permutations([1, 2, 3]))
@settings(max_examples=40, deadline=None)
def test_differential_is_equivariant(t, sigma):
    x = element(t)
    sigma = [s for s in sigma if s <= arity(t)]
    if len(sigma) != arity(t):
        return
    assert cobar_differential(x.act(sigma), 6) == cobar_differential(x, 6).act(sigma)
