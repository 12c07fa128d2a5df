from math import factorial

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from curvlinf.errors import InputError, ResourceError
from curvlinf.gradedcore import (DeformationRetract, FilteredComplex, GradedMixedComplex,
                                 GradedSpace, LinearMap, check_gm_infinity_morphism,
                                 enumerate_unshuffles, is_admissible_mono,
                                 is_graded_quasi_iso, koszul_sign, minimal_model, split,
                                 tot)
from curvlinf.samples import make_rng, random_filtered_automorphism, random_filtered_complex
from curvlinf.linalg import mat_inverse

import oracles


def sp(*triples):
    return GradedSpace.from_triples(triples)


# koszul signs

def test_koszul_identity():
    assert koszul_sign([1, 2, 3], [1, 3, 5]) == 1


def test_koszul_odd_transposition():
    assert koszul_sign([2, 1], [1, 1]) == -1


def test_koszul_cycle():
    # x1 x2 x3 -> x3 x1 x2 with degrees (1, 1, 2): x3 is even
    assert koszul_sign([3, 1, 2], [1, 1, 2]) == 1
    assert oracles.sign_by_adjacent_swaps([3, 1, 2], [1, 1, 2]) == 1


def test_koszul_length_mismatch():
    with pytest.raises(InputError):
        koszul_sign([1, 2], [1])


perm_and_degrees = st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.permutations(list(range(1, n + 1))), st.permutations(list(range(1, n + 1))),
    st.lists(st.integers(-3, 3), min_size=n, max_size=n)))


@given(perm_and_degrees)
def test_koszul_matches_adjacent_swaps(data):
    p, _, degs = data
    assert koszul_sign(p, degs) == oracles.sign_by_adjacent_swaps(p, degs)


@given(perm_and_degrees)
def test_koszul_homomorphism(data):
    sigma, tau, degs = data
    # reorder by tau, then reorder the result by sigma
    after_tau = [degs[t - 1] for t in tau]
    composite = [tau[s - 1] for s in sigma]
    assert koszul_sign(composite, degs) == koszul_sign(tau, degs) * koszul_sign(sigma, after_tau)


# unshuffles

@pytest.mark.parametrize("blocks,count", [((1, 1), 2), ((2, 1), 3), ((1, 1, 1), 6)])
def test_unshuffle_examples(blocks, count):
    perms = enumerate_unshuffles(blocks)
    assert len(perms) == count
    assert count == oracles.count_unshuffles(blocks)


def test_unshuffles_sorted_and_blockwise_increasing():
    perms = [p for p, _ in enumerate_unshuffles((2, 1))]
    assert perms == sorted(perms)
    assert perms == [(1, 2, 3), (1, 3, 2), (2, 3, 1)]


def test_unshuffle_bound():
    with pytest.raises(ResourceError):
        enumerate_unshuffles((3, 3), arity_bound=5)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4).filter(lambda b: sum(b) <= 7))
@settings(max_examples=40, deadline=None)
def test_unshuffle_cardinality(blocks):
    n = sum(blocks)
    expected = factorial(n)
    for b in blocks:
        expected //= factorial(b)
    assert len(enumerate_unshuffles(blocks)) == expected


# admissible monos and quasi-isomorphisms

def test_admissible_identity():
    V = sp(("x", 0, 0), ("y", 1, 2))
    assert is_admissible_mono(LinearMap.identity(V)).ok


def test_admissible_weight_shift_fails():
    V, W = sp(("x", 0, 0)), sp(("x'", 0, 1))
    rep = is_admissible_mono(LinearMap(V, W, 0, 0, {0: {0: 1}}))
    assert not rep.ok
    assert rep.witness == {"x": 1}


def test_admissible_summand_inclusion():
    V = sp(("v", 0, 0), ("v2", 1, 1))
    W = sp(("v", 0, 0), ("v2", 1, 1), ("w", 0, 0))
    f = LinearMap(V, W, 0, 0, {0: {0: 1}, 1: {1: 1}})
    assert is_admissible_mono(f).ok


def test_admissible_rejects_non_chain_map():
    V = sp(("x", 0, 0), ("y", 1, 0))
    c = FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {1: 1}}))
    z = FilteredComplex.zero(V)
    with pytest.raises(InputError):
        is_admissible_mono(LinearMap.identity(V), z, c)


def test_quasi_iso_identity():
    V = sp(("x", 0, 0), ("y", 1, 0))
    c = FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {1: 1}}))
    assert is_graded_quasi_iso(LinearMap.identity(V), c, c).ok


def test_quasi_iso_zero_into_acyclic():
    V = sp(("x", 0, 0), ("y", 1, 0))
    c = FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {1: 1}}))
    Z = GradedSpace([], [], [])
    assert is_graded_quasi_iso(LinearMap.zero(Z, V), FilteredComplex.zero(Z), c).ok


def test_quasi_iso_zero_map_fails():
    K = sp(("k", 0, 0))
    c = FilteredComplex.zero(K)
    rep = is_graded_quasi_iso(LinearMap.zero(K, K), c, c)
    assert not rep.ok
    assert rep.per_weight[0]["source"] == {0: 1}


# tot and split

def test_tot_without_deltas():
    V = sp(("x", 0, 0), ("y", 1, 0))
    d = LinearMap(V, V, 1, 0, {0: {1: 2}})
    assert tot(GradedMixedComplex(V, d)).d == d


def test_tot_single_delta():
    V = sp(("x", 0, 0), ("y", 1, 1))
    d1 = LinearMap(V, V, 1, 1, {0: {1: 1}})
    gm = GradedMixedComplex(V, LinearMap.zero(V, V, 1, 0), {1: d1})
    assert tot(gm).d.cols == {0: {1: 1}}


def test_tot_compensated_delta_squared():
    V = sp(("x", 0, 0), ("y", 1, 1), ("u", 1, 2), ("z", 2, 2))
    d = LinearMap(V, V, 1, 0, {2: {3: 1}})
    d1 = LinearMap(V, V, 1, 1, {0: {1: 1}, 1: {3: 1}})
    d2 = LinearMap(V, V, 1, 2, {0: {2: -1}})
    assert not (d1 @ d1).is_zero()
    gm = GradedMixedComplex(V, d, {1: d1, 2: d2})
    t = tot(gm)
    assert oracles.matmul(t.d, t.d) == {}


def test_split_examples():
    V = sp(("x", 0, 0), ("y", 1, 1), ("z", 1, 0))
    minimal = FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {1: 1}}))
    s = split(minimal)
    assert s.d.is_zero() and set(s.deltas) == {1}
    flat = FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {2: 1}}))
    assert split(flat).deltas == {}
    mixed = FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {1: 3, 2: 5}}))
    s = split(mixed)
    assert s.d.cols == {0: {2: 5}} and s.deltas[1].cols == {0: {1: 3}}


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_tot_split_roundtrip(seed):
    c = random_filtered_complex(make_rng(seed))
    assert tot(split(c)) == c
    gm = split(c)
    assert split(tot(gm)) == gm


# minimal models

def test_minimal_model_zero_differential():
    V = sp(("x", 0, 0), ("y", 1, 2))
    c = FilteredComplex.zero(V)
    small, r = minimal_model(c)
    assert small == c
    assert r.i == LinearMap.identity(V) and r.p == LinearMap.identity(V)
    assert r.h.is_zero()


def test_minimal_model_acyclic_pair():
    V = sp(("x", 0, 0), ("y", 1, 0))
    small, r = minimal_model(FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {1: 1}})))
    assert small.space.dim == 0
    assert oracles.gr_homology(V, LinearMap(V, V, 1, 0, {0: {1: 1}})) == {}


def test_minimal_model_already_minimal():
    V = sp(("x", 0, 0), ("y", 1, 1))
    c = FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {1: 1}}))
    small, r = minimal_model(c)
    assert small == c and r.h.is_zero()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_minimal_model_invariants(seed):
    c = random_filtered_complex(make_rng(seed))
    small, r = minimal_model(c)
    assert small.is_minimal()
    assert r.failing_identities(side=True) == []
    assert oracles.dims(small.space) == oracles.gr_homology(c.space, c.d)
    assert is_graded_quasi_iso(r.i, small, c).ok


def _acyclic(rng):
    triples, cols = [], {}
    for k in range(rng.randint(1, 3)):
        e, w = rng.choice([0, 1]), rng.randint(0, 2)
        triples += [("a%d" % k, e, w), ("b%d" % k, e + 1, w)]
        cols[2 * k] = {2 * k + 1: rng.choice([1, 2, -1])}
    V = GradedSpace.from_triples(triples)
    g = random_filtered_automorphism(rng, V)
    ginv = LinearMap(V, V, 0, 0, mat_inverse(g.cols, V.dim))
    d = (g @ LinearMap(V, V, 1, 0, cols) @ ginv).with_min_weight(0)
    return FilteredComplex(V, d)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_normalized_homotopy(seed):
    rng = make_rng(seed)
    c = _acyclic(rng)
    small, r = minimal_model(c)
    V = c.space
    # any h + [d, k] with k of degree -2 is again a contracting homotopy
    k = {}
    for j in range(V.dim):
        for i in range(V.dim):
            if V.degree[i] == V.degree[j] - 2 and V.weight[i] >= V.weight[j] and rng.random() < 0.5:
                k.setdefault(j, {})[i] = rng.choice([1, -1, 2])
    K = LinearMap(V, V, -2, 0, k)
    h = (r.h + c.d @ K - K @ c.d).with_min_weight(0)
    r2 = DeformationRetract(c, small, r.i, r.p, h)
    n = r2.normalized()
    assert n.failing_identities() == []
    assert (n.h @ n.h).is_zero()


# infinity-morphisms of graded mixed complexes

def test_gm_strict_chain_map():
    V = sp(("x", 0, 0), ("y", 1, 1))
    gm = GradedMixedComplex(V, LinearMap.zero(V, V, 1, 0), {1: LinearMap(V, V, 1, 1, {0: {1: 1}})})
    assert check_gm_infinity_morphism({0: LinearMap.identity(V)}, gm, gm) == (True, None)


def test_gm_mismatched_delta():
    V = sp(("x", 0, 0), ("y", 1, 1))
    zero = LinearMap.zero(V, V, 1, 0)
    a = GradedMixedComplex(V, zero, {1: LinearMap(V, V, 1, 1, {0: {1: 1}})})
    b = GradedMixedComplex(V, zero, {1: LinearMap(V, V, 1, 1, {0: {1: 2}})})
    assert check_gm_infinity_morphism({0: LinearMap.identity(V)}, a, b) == (False, 1)


def test_gm_homotopy_component():
    S = sp(("a", 0, 0))
    T = sp(("e", 0, 0), ("b", 0, 1), ("c", 1, 1))
    src = GradedMixedComplex(S, LinearMap.zero(S, S, 1, 0))
    tgt = GradedMixedComplex(T, LinearMap(T, T, 1, 0, {1: {2: 1}}),
                             {1: LinearMap(T, T, 1, 1, {0: {2: 1}})})
    phi0 = LinearMap(S, T, 0, 0, {0: {0: 1}})
    assert check_gm_infinity_morphism({0: phi0}, src, tgt) == (False, 1)
    # solve d_T phi1(a) + delta1(e) = 0 for phi1(a) = t b
    t = sympy.Symbol("t")
    sol = sympy.solve(sympy.Eq(t * 1 + 1, 0), t)[0]
    phi1 = LinearMap(S, T, 0, 1, {0: {1: int(sol)}})
    assert check_gm_infinity_morphism({0: phi0, 1: phi1}, src, tgt) == (True, None)
