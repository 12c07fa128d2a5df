from types import SimpleNamespace

import pytest
from hypothesis import given, settings, strategies as st

from curvlinf.algebroid import (algebroid_from_generators, apply_filtration,
                                check_algebroid, check_algebroid_morphism,
                                check_weight_zero_generation, chevalley_eilenberg,
                                compute_tangent, curv, curv_morphism, free_tangent_model,
                                rees, uncurv, unrees)
from curvlinf.cdga import Cdga, check_cdga, ground_field
from curvlinf.curvedalg import (CurvedStructure, check_infinity_morphism, check_structure,
                                identity_morphism, strict_morphism)
from curvlinf.errors import InputError
from curvlinf.gradedcore import GradedSpace, LinearMap
from curvlinf.modules import FreeModule
from curvlinf.multilinear import SymMultiMap
from curvlinf.samples import (base_cdgas, make_rng, perturb_algebroid,
                              random_action_algebroid, random_split_algebroid)

BASES = base_cdgas()
DUAL, EXT, K = BASES["dual"], BASES["ext"], ground_field()


def names(sp, vec):
    return {sp.basis[k]: c for k, c in vec.items()}


# tangent algebroids

def test_tangent_of_ground_field():
    assert compute_tangent(K).space.dim == 0


def test_tangent_of_dual_numbers():
    T = compute_tangent(DUAL)
    assert T.space.dim == 1
    # the single derivation sends eps to eps
    assert T.anchor_cols((0,)) == {1: {1: 1}}
    assert check_algebroid(T).ok


def test_tangent_of_exterior_algebra():
    T = compute_tangent(EXT)
    assert T.space.dim == 2
    assert sorted(T.space.degree) == [0, 1]
    assert check_algebroid(T).ok


# check_algebroid

def _aff(A, c=1):
    # the Lie algebra [e, f] = c f tensored with A, zero anchor
    G = GradedSpace(["e", "f"], [0, 0], [0, 0])
    return algebroid_from_generators(A, G, {2: {(0, 1): {A.dim: c}}})


def test_zero_anchor_reduces_to_structure_over_base():
    for A in BASES.values():
        L = _aff(A)
        over = CurvedStructure("classical", L.space, L.structure.ells, base=A, module=L.module)
        assert check_algebroid(L).ok == check_structure(over).ok == True


def test_zero_anchor_agreement_on_perturbations():
    rng = make_rng(4)
    seen = set()
    for _ in range(40):
        L2 = perturb_algebroid(rng, random_action_algebroid(rng))
        if L2.anchors:
            continue
        over = CurvedStructure("classical", L2.space, L2.structure.ells, base=L2.base,
                               module=L2.module, check=False)
        a, b = check_algebroid(L2).ok, check_structure(over).ok
        assert a == b
        seen.add(a)


def test_leibniz_violation_tagged():
    L = _aff(DUAL)
    M = L.module
    eps_e, f = M.index(1, 0), M.index(0, 1)
    m = L.structure.ells[2]
    vals = dict(m.values)
    key = tuple(sorted((eps_e, f)))
    assert vals[key] == {M.index(1, 1): 1}
    vals[key] = {M.index(1, 1): 2}
    bad = L.structure.replace(ells={2: SymMultiMap(2, m.source, m.target, 0, 0, vals)})
    L.structure = bad
    rep = check_algebroid(L)
    assert not rep.ok and rep.first()[0] == "leibniz"


# filtrations

def test_trivial_filtration():
    T = compute_tangent(EXT)
    assert set(apply_filtration(T, "trivial").space.weight) == {0}


def test_anchor_filtration_zero_anchor():
    L = _aff(K)
    assert set(apply_filtration(L, "anchor").space.weight) == {0}


def _tangent_plus_n():
    # T_A is free on d/du for A = k[u], |u| = -1; n is a zero-anchor summand
    G = GradedSpace(["D", "n"], [1, 0], [0, 0])
    return algebroid_from_generators(EXT, G, {}, {1: {(0,): {1: {0: 1}}}})


def test_anchor_filtration_on_tangent_plus_kernel():
    L = _tangent_plus_n()
    assert check_algebroid(L).ok
    F = apply_filtration(L, "anchor")
    assert list(F.module.generators.weight) == [-1, 0]
    assert F.split == ([0], [1])
    assert check_algebroid(F).ok


def test_anchor_filtration_needs_surjective_anchor():
    G = GradedSpace(["n"], [0], [0])
    L = algebroid_from_generators(EXT, G, {})
    with pytest.raises(InputError):
        apply_filtration(L, "anchor")


# Chevalley-Eilenberg algebras

def test_ce_abelian_line():
    G = GradedSpace(["e"], [0], [-1])
    ce = chevalley_eilenberg(algebroid_from_generators(K, G, {}), weight_bound=2)
    assert ce.space.triples() == [("1", 0, 0), ("e*", 1, 1)]
    assert ce.total.is_zero()
    assert check_cdga(ce).ok


def test_ce_two_dimensional_lie():
    G = GradedSpace(["e", "f"], [0, 0], [-1, -1])
    ce = chevalley_eilenberg(algebroid_from_generators(K, G, {2: {(0, 1): {1: 1}}}),
                             weight_bound=2)
    sp = ce.space
    d = {sp.basis[j]: names(sp, v) for j, v in ce.total.cols.items()}
    assert "e*" not in d
    assert list(d) == ["f*"] and set(d["f*"]) == {"e*.f*"} and abs(d["f*"]["e*.f*"]) == 1
    assert ce.d_squared_zero and check_cdga(ce).ok


def test_ce_de_rham_of_dual_numbers():
    ce = chevalley_eilenberg(free_tangent_model(DUAL, weight=-1), arity_bound=1)
    sp = ce.space
    assert sp.dim == 4
    # hand-built model: forms 1, eps, w, eps w with d_A = 0 and d_dR(eps) = eps w
    one, eps, w, epsw = range(4)
    assert [ce.forms[k] for k in range(4)] == [(0, ()), (1, ()), (0, (0,)), (1, (0,))]
    assert ce.total.cols == {eps: {epsw: 1}}
    assert ce.d.is_zero() and ce.delta.cols == {eps: {epsw: 1}}
    assert sp.weight == (0, 0, 1, 1)
    assert check_cdga(ce).ok


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_hodge_weight_is_form_degree(seed):
    L = random_action_algebroid(make_rng(seed))
    H = apply_filtration(L, "hodge")
    ce = chevalley_eilenberg(H, weight_bound=3)
    assert all(ce.space.weight[j] == len(U) for j, (a, U) in enumerate(ce.forms))
    assert check_algebroid(H).ok == check_algebroid(L).ok


# Rees

def test_rees_theta_squared():
    G = GradedSpace(["z"], [2], [2])
    L = algebroid_from_generators(K, G, {0: {(): {0: 1}}})
    R = rees(L)
    th = R.theta
    assert R.gen_data[0][2][(th, th)] == {0: 2}
    assert 0 not in R.gen_data[0]


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_rees_weight_zero_parts(seed):
    L = random_split_algebroid(make_rng(seed))
    R = rees(L)
    M, M2 = L.module, R.module
    for n, tab in L.gen_data[0].items():
        for U, v in tab.items():
            wsum = sum(L.module.generators.weight[g] for g in U)
            zero = {M2.index(*M.split(k)): c for k, c in v.items()
                    if M.space.weight[k] == wsum}
            assert R.gen_data[0].get(n, {}).get(U, {}) == zero
    assert unrees(R) == L


def test_rees_dual_numbers_hbar_de_rham():
    R = rees(free_tangent_model(DUAL, weight=-1))
    ce = chevalley_eilenberg(R, arity_bound=3)
    D, th = 0, R.theta
    eps = 1
    for j, (a, U) in enumerate(ce.forms):
        got = ce.total.cols.get(j, {})
        k = U.count(th)
        want = {}
        # theta-forms are divided powers: hbar^k = k! theta^(k), so
        # d(eps theta^(k)) = hbar d_dR(eps) theta^(k) = (k + 1) eps w theta^(k+1)
        if a == eps and D not in U and len(U) + 2 <= 3:
            want = {ce.form_index[(eps, (D,) + U + (th,))]: k + 1}
        assert got == want, ce.space.basis[j]
    assert ce.d_squared_zero


# curv and uncurv

def test_curv_without_n_part():
    G = GradedSpace(["t"], [0], [-1])
    L = algebroid_from_generators(K, G, {}, split=([0], []))
    g = curv(L)
    assert g.space.dim == 0 and g.ells == {}
    assert uncurv(g) == L


def test_curv_abelian_t_with_differential():
    G = GradedSpace(["t", "x", "y"], [0, 0, 1], [-1, 0, 0])
    L = algebroid_from_generators(K, G, {1: {(1,): {2: 1}}}, split=([0], [1, 2]))
    g = curv(L)
    assert g.flavor == "graded-mixed" and g.ells == {}
    assert check_structure(g).ok
    # d is the B-linear extension of x -> y
    M = g.module
    B = g.base
    for b in range(B.dim):
        x, y = M.index(b, 0), M.index(b, 1)
        assert abs(g.d.cols[x][y]) == 1 and len(g.d.cols[x]) == 1
    assert check_weight_zero_generation(g)


def test_curv_action_matches_formula():
    # t acts on n: l_2(t, x) = y; then l_1 on B (x) n is x -> +-(t* y)
    G = GradedSpace(["t", "x", "y"], [0, 0, 0], [-1, 0, 0])
    L = algebroid_from_generators(K, G, {2: {(0, 1): {2: 1}}}, split=([0], [1, 2]))
    g = curv(L)
    B, M = g.base, g.module
    tstar = B.form_index[(0, (0,))]
    val = g.ells[1].eval_basis((M.index(B.unit, 0),))
    assert val in ({M.index(tstar, 1): 1}, {M.index(tstar, 1): -1})
    assert uncurv(g) == L


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_curv_roundtrip(seed):
    L = random_split_algebroid(make_rng(seed))
    g = curv(L)
    assert uncurv(g) == L
    assert curv(uncurv(g), weight_bound=g.base.weight_bound) == g
    assert check_structure(g).ok == check_algebroid(L).ok
    assert check_weight_zero_generation(g)


def test_uncurv_rejects_broken_multilinearity():
    rng = make_rng(8)
    for _ in range(50):
        g = curv(random_split_algebroid(rng))
        M = g.module
        for n, m in g.ells.items():
            for tup, v in m.values.items():
                if any(M.split(k)[0] != g.base.unit for k in tup):
                    vals = dict(m.values)
                    vals[tup] = {k: 2 * c for k, c in v.items()}
                    ells = dict(g.ells)
                    ells[n] = SymMultiMap(n, m.source, m.target, m.degree_shift, m.min_weight, vals)
                    bad = g.replace(ells=ells)
                    with pytest.raises(InputError, match="multilinear"):
                        uncurv(bad)
                    return
    pytest.fail("no instance with a non-generator entry")


def test_weight_zero_generation_counterexample():
    g = curv(random_split_algebroid(make_rng(2)))
    N = g.module.generators
    N2 = GradedSpace(list(N.basis) + ["extra"], list(N.degree) + [0], list(N.weight) + [1])
    fake = SimpleNamespace(module=FreeModule(g.base, N2))
    assert not check_weight_zero_generation(fake)


def test_curv_morphism_identity_and_strict():
    L = random_split_algebroid(make_rng(11))
    g = curv(L)
    one = identity_morphism(L.structure)
    assert curv_morphism(one, L, L, g, g) == identity_morphism(g)
    two = strict_morphism(L.structure, L.structure, LinearMap.identity(L.space).scaled(1))
    c = curv_morphism(two, L, L, g, g)
    assert set(c.comps) <= {1}
    assert check_infinity_morphism(c).ok == check_algebroid_morphism(two, L, L).ok
