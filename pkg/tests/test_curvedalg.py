from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from curvlinf.cdga import GradedMixedCdga, check_cdga, ground_field
from curvlinf.curvedalg import (CurvedStructure, InfinityMorphism, MaurerCartanElement,
                                blend, blend_morphism, check_infinity_morphism,
                                check_structure, compose_infinity_morphisms, curvature_at,
                                homotopy_transfer, identity_morphism, mc_check,
                                mc_to_morphism, morphism_to_mc, strict_morphism,
                                structure_equation_value, tot_structure, transfer_bruteforce,
                                twist, unblend)
from curvlinf.errors import InputError
from curvlinf.gradedcore import DeformationRetract, FilteredComplex, GradedSpace, LinearMap, minimal_model
from curvlinf.linalg import vaddto, vscale
from curvlinf.multilinear import SymMultiMap, canonical_tuples, shifted_parities
from curvlinf.samples import (make_rng, random_classical_structure,
                              random_graded_mixed_structure, random_mixed_structure,
                              random_retract)


def sp(*triples):
    return GradedSpace.from_triples(triples)


def dglie(space, d=None, bracket=None, omega=None, flavor="classical"):
    """Curved dg Lie data on the suspension: l1 = -d, l2(X, Y) = (-1)^|X| [X, Y]."""
    ells = {}
    if omega:
        ells[0] = SymMultiMap(0, space, space, 2, 1, {(): omega})
    if d:
        ells[1] = SymMultiMap(1, space, space, 1, 0, {(j,): vscale(v, -1) for j, v in d.items()})
    if bracket:
        vals = {}
        for (i, j), v in bracket.items():
            vals[(i, j)] = vscale(v, -1 if space.degree[i] % 2 else 1)
        ells[2] = SymMultiMap(2, space, space, 0, 0, vals)
    return CurvedStructure(flavor, space, ells)


# check_structure

def test_abelian_passes():
    V = sp(("x", 0, 0), ("y", 1, 1))
    for flavor in ("classical", "mixed", "graded-mixed"):
        assert check_structure(CurvedStructure(flavor, V, {})).ok


TRIPLE = sp(("x", 0, 0), ("y", 1, 0), ("z", 2, 1))


def _triple(a, c, omega_sign=1):
    # nabla x = y, nabla y = z, omega = z, [x, y] = a y, [x, z] = c z
    br = {k: v for k, v in {(0, 1): {1: a}, (0, 2): {2: c}}.items() if v[k[1]]}
    return dglie(TRIPLE, d={0: {1: 1}, 1: {2: 1}}, bracket=br or None,
                 omega={2: omega_sign})


def _residuals(a, c):
    s = _triple(a, c)
    out = []
    for tup in [(0,), (0, 1)]:
        v = structure_equation_value(s, tup)
        out += [sympy.Rational(str(v.get(k, 0))) for k in range(3)]
    return out


def _solve_triple():
    # the arity 1 and 2 residuals are affine in (a, c): nabla^2 + [omega, -] = 0
    # and nabla a derivation of the bracket
    r0, ra, rc = _residuals(0, 0), _residuals(1, 0), _residuals(0, 1)
    a, c = sympy.symbols("a c")
    eqs = [e0 + a * (ea - e0) + c * (ec - e0) for e0, ea, ec in zip(r0, ra, rc)]
    sol = sympy.solve([e for e in eqs if e != 0], [a, c])
    return Fraction(str(sol[a])), Fraction(str(sol[c]))


def test_curved_lie_triple_passes():
    a, c = _solve_triple()
    # x acts by the Euler derivation on y and z
    assert (a, c) == (1, 1)
    assert check_structure(_triple(a, c)).ok


def test_curved_lie_triple_flipped_omega_fails_at_arity_1():
    rep = check_structure(_triple(*_solve_triple(), omega_sign=-1))
    assert not rep.ok
    assert rep.first()[0] == "arity 1"
    assert rep.arities[0] is True


def test_weight_zero_curvature_rejected():
    V = sp(("z", 2, 0))
    with pytest.raises(InputError):
        CurvedStructure("classical", V, {0: SymMultiMap(0, V, V, 2, 0, {(): {0: 1}})})


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_random_structures_valid(seed):
    rng = make_rng(seed)
    for s in (random_classical_structure(rng), random_mixed_structure(rng),
              random_graded_mixed_structure(rng)):
        assert check_structure(s).ok


# infinity-morphisms

def test_identity_morphism():
    s = random_mixed_structure(make_rng(3))
    assert check_infinity_morphism(identity_morphism(s)).ok


N0_H = sp(("a", 1, 1), ("b", 2, 1), ("c", 2, 2))
N0_G = sp(("u", 2, 1))


def _n0_instance(phi0, lin, phi1, l0h):
    h = CurvedStructure("mixed", N0_H,
                        {0: SymMultiMap(0, N0_H, N0_H, 2, 1, {(): l0h}),
                         2: SymMultiMap(2, N0_H, N0_H, 0, 0, {(0, 0): {2: 1}})},
                        d=LinearMap(N0_H, N0_H, 1, 0, {0: {1: 1}}))
    g = CurvedStructure("mixed", N0_G, {0: SymMultiMap(0, N0_G, N0_G, 2, 1, {(): {0: 1}})})
    comps = {0: SymMultiMap(0, N0_G, N0_H, 1, 1, {(): phi0})}
    if phi1:
        comps[1] = SymMultiMap(1, N0_G, N0_H, 0, 1, {(0,): phi1})
    return InfinityMorphism(g, h, comps, lin=LinearMap(N0_G, N0_H, 0, 0, {0: lin}))


def test_n0_relation_entrywise():
    phi0, lin, phi1 = {0: 2}, {1: 1}, {2: 3}
    h = _n0_instance(phi0, lin, phi1, {}).target
    # d(phi0) = lin(l0) + phi1(l0) - (l0h + l1h(phi0) + 1/2 l2h(phi0, phi0))
    lhs = h.d.apply(phi0)
    rhs = dict(lin)
    vaddto(rhs, phi1)
    vaddto(rhs, h.ells[2].eval_vectors([phi0, phi0]), Fraction(-1, 2))
    l0h = vadd_copy(rhs, lhs, -1)
    assert l0h == {1: -1, 2: 1}
    phi = _n0_instance(phi0, lin, phi1, l0h)
    assert check_structure(phi.target).ok and check_structure(phi.source).ok
    assert check_infinity_morphism(phi).ok
    bad = _n0_instance(phi0, lin, phi1, {1: 1, 2: 1})
    rep = check_infinity_morphism(bad)
    assert not rep.ok and rep.first()[1] == 0


def vadd_copy(v, w, s):
    out = dict(v)
    vaddto(out, w, s)
    return out


CM = sp(("p", 1, 1), ("q", 1, 1), ("r", 2, 2))


def test_strict_curved_map_equations():
    # h: d p = r, [p, p] = r, omega_h unknown; g: the same Lie algebra with
    # d'_g = d'_h + [phi0, -] and curvature omega_g = r; phi0 = s p, phi'_1 = id
    s, gamma = 2, 1
    h_d, br = {0: {2: 1}}, {(0, 0): {2: 1}}
    found = []
    for a1, a2, c in product(range(-4, 5), range(-4, 5), range(-8, 9)):
        g = dglie(CM, d={0: {2: a1}, 1: {2: a2}}, bracket=br, omega={2: gamma})
        h = dglie(CM, d=h_d, bracket=br, omega={2: c})
        phi = InfinityMorphism(g, h, {0: SymMultiMap(0, CM, CM, 1, 1, {(): {0: s}}),
                                      1: SymMultiMap(1, CM, CM, 0, 0, {(0,): {0: 1}, (1,): {1: 1}, (2,): {2: 1}})})
        if check_structure(g).ok and check_structure(h).ok and check_infinity_morphism(phi).ok:
            found.append((a1, a2, c))
    # omega_h = phi'_1(omega_g) + d phi0 + 1/2 [phi0, phi0] = (1 + s + s^2 / 2) r
    assert [f[2] for f in found] == [gamma + s + s * s // 2]
    # d'_g p = d'_h p + [phi0, p] and d'_g q = d'_h q + [phi0, q]
    assert found[0][:2] == (1 + s, 0)


def test_twisted_source_morphism():
    # phi0 = a, phi'_1 = id is a morphism from the twist by a
    for seed in range(10):
        rng = make_rng(seed)
        h = random_classical_structure(rng)
        a = {i: rng.choice([1, -1, 2]) for i in range(h.space.dim)
             if h.space.degree[i] == 1 and h.space.weight[i] >= 1}
        g = twist(h, a)
        assert check_structure(g).ok
        comps = {1: SymMultiMap(1, h.space, h.space, 0, 0, {(j,): {j: 1} for j in range(h.space.dim)})}
        if a:
            comps[0] = SymMultiMap(0, h.space, h.space, 1, 1, {(): a})
        assert check_infinity_morphism(InfinityMorphism(g, h, comps)).ok
        if a:
            k = next(iter(a))
            comps[0] = SymMultiMap(0, h.space, h.space, 1, 1, {(): vadd_copy(a, {k: 1}, 1)})
            if curvature_at(h, vadd_copy(a, {k: 1}, 1)) != curvature_at(h, a):
                assert not check_infinity_morphism(InfinityMorphism(g, h, comps)).ok


# composition

CSP = sp(("x", 1, 0), ("y", 1, 1))


def _random_maps(rng, top=2, with_phi0=True):
    comps = {}
    for n in range(0 if with_phi0 else 1, top + 1):
        vals = {}
        minw = 1 if n == 0 else 0
        for tup in canonical_tuples(CSP, n):
            dsum = sum(CSP.degree[j] for j in tup) + 1 - n
            wsum = sum(CSP.weight[j] for j in tup) + minw
            v = {i: rng.choice([0, 1, -1, 2, Fraction(1, 2)]) for i in range(CSP.dim)
                 if CSP.degree[i] == dsum and CSP.weight[i] >= wsum}
            v = {i: c for i, c in v.items() if c}
            if v:
                vals[tup] = v
        comps[n] = SymMultiMap(n, CSP, CSP, 1 - n, minw, vals)
    return comps


def _morphism(rng, with_phi0=True):
    z = CurvedStructure("classical", CSP, {})
    return InfinityMorphism(z, z, _random_maps(rng, with_phi0=with_phi0))


def test_compose_with_identity():
    rng = make_rng(1)
    phi = _morphism(rng)
    one = identity_morphism(phi.source)
    assert compose_infinity_morphisms(one, phi) == phi
    assert compose_infinity_morphisms(phi, one) == phi


def test_linear_part_of_composite():
    rng = make_rng(2)
    s = random_mixed_structure(rng)
    f = LinearMap.identity(s.space).scaled(2)
    g = LinearMap.identity(s.space).scaled(3)
    c = compose_infinity_morphisms(strict_morphism(s, s, g), strict_morphism(s, s, f))
    assert c.lin == g @ f


@pytest.mark.parametrize("seed", range(6))
def test_arity_two_component_bruteforce(seed):
    rng = make_rng(seed)
    phi, psi = _morphism(rng, with_phi0=False), _morphism(rng, with_phi0=False)
    c = compose_infinity_morphisms(psi, phi)
    f, g = phi.classical_maps(), psi.classical_maps()
    for n in (1, 2):
        for m in (f, g):
            m.setdefault(n, SymMultiMap.zero(n, CSP, CSP, 1 - n))
    for tup in canonical_tuples(CSP, 2):
        x, y = ({tup[0]: 1}, {tup[1]: 1})
        # psi'_1(phi_2(x, y)) + psi_2(phi'_1 x, phi'_1 y)
        want = g[1].eval_vectors([f[2].eval_basis(tup)])
        vaddto(want, g[2].eval_vectors([f[1].eval_vectors([x]), f[1].eval_vectors([y])]))
        got = c.classical_maps()[2].eval_basis(tup) if 2 in c.classical_maps() else {}
        assert got == {k: v for k, v in want.items() if v}


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_composition_associative(seed):
    rng = make_rng(seed)
    a, b, c = _morphism(rng), _morphism(rng), _morphism(rng)
    left = compose_infinity_morphisms(c, compose_infinity_morphisms(b, a, 10), 10)
    right = compose_infinity_morphisms(compose_infinity_morphisms(c, b, 10), a, 10)
    assert left.classical_maps() == right.classical_maps()


# blend and unblend

def test_blend_without_d():
    s = random_graded_mixed_structure(make_rng(4)).replace(d=None)
    assert blend(s).ells.get(1) == s.ells.get(1)


def test_blend_pure_d():
    V = sp(("x", 0, 0), ("y", 1, 0))
    s = CurvedStructure("mixed", V, {}, d=LinearMap(V, V, 1, 0, {0: {1: 1}}))
    b = blend(s)
    assert b.ells[1].values == {(0,): {1: 1}}
    assert check_structure(b).ok


def test_blend_valid_on_mixed_instances():
    rng = make_rng(5)
    for _ in range(10):
        s = random_mixed_structure(rng, max_dim=3)
        assert check_structure(blend(s)).ok


def test_unblend_examples():
    V = sp(("x", 0, 0), ("y", 1, 1))
    minimal = CurvedStructure("classical", V, {1: SymMultiMap(1, V, V, 1, 0, {(0,): {1: 1}})})
    assert unblend(minimal).d.is_zero()
    W = sp(("x", 0, 0), ("y", 1, 0))
    flat = CurvedStructure("classical", W, {1: SymMultiMap(1, W, W, 1, 0, {(0,): {1: 1}})})
    u = unblend(flat)
    assert u.d.cols == {0: {1: 1}} and 1 not in u.ells


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_blend_tot_unblend_roundtrip(seed):
    s = random_classical_structure(make_rng(seed))
    u = unblend(s)
    assert check_structure(u).ok
    assert blend(tot_structure(u)) == s
    m = random_mixed_structure(make_rng(seed))
    assert blend(unblend(blend(m))) == blend(m)


# homotopy transfer

def test_transfer_identity_retract():
    s = random_mixed_structure(make_rng(7))
    r = DeformationRetract.identity(FilteredComplex(s.space, s.d))
    t, ioo = homotopy_transfer(s, r)
    assert t == s
    assert ioo.comps == {} and ioo.lin == LinearMap.identity(s.space)


def test_transfer_onto_zero():
    W = sp(("a", 1, 1), ("b", 2, 1))
    s = CurvedStructure("mixed", W, {0: SymMultiMap(0, W, W, 2, 1, {(): {1: 1}})},
                        d=LinearMap(W, W, 1, 0, {0: {1: 1}}))
    assert check_structure(s).ok
    small, r = minimal_model(FilteredComplex(W, s.d))
    t, ioo = homotopy_transfer(s, r)
    assert t.space.dim == 0 and t.ells == {}
    assert set(ioo.comps) == {0}
    assert check_infinity_morphism(ioo).ok


def test_transfer_matches_tree_enumeration():
    W = sp(("u", 1, 0), ("v", 2, 0), ("a", 1, 0), ("b", 2, 0))
    s = CurvedStructure("mixed", W, {2: SymMultiMap(2, W, W, 0, 0, {(0, 0): {1: 1, 3: 1}, (0, 2): {1: 1}})},
                        d=LinearMap(W, W, 1, 0, {2: {3: 1}}))
    assert check_structure(s).ok
    small, r = minimal_model(FilteredComplex(W, s.d))
    assert small.space.basis == ("u", "v")
    t, ioo = homotopy_transfer(s, r)
    assert 3 in t.ells and 2 in t.ells
    for n in (2, 3):
        for tup in canonical_tuples(small.space, n):
            lv, pv = transfer_bruteforce(s, r, tup)
            assert t.ells[n].eval_basis(tup) == lv
            m = ioo.comps.get(n)
            assert (m.eval_basis(tup) if m else {}) == pv
    assert check_structure(t).ok and check_infinity_morphism(ioo).ok


@given(st.integers(0, 10 ** 6))
@settings(max_examples=10, deadline=None)
def test_transfer_preserves_validity(seed):
    rng = make_rng(seed)
    s = random_mixed_structure(rng)
    r = random_retract(rng, s)
    t, ioo = homotopy_transfer(s, r)
    assert check_structure(t).ok
    assert check_infinity_morphism(ioo).ok


def test_transfer_rejects_missing_side_conditions():
    V = sp(("x", 0, 0), ("y", 1, 0))
    c = FilteredComplex(V, LinearMap(V, V, 1, 0, {0: {1: 1}}))
    s = CurvedStructure("mixed", V, {}, d=c.d)
    one = LinearMap.identity(V)
    bad = DeformationRetract(c, c, one, one, LinearMap(V, V, -1, 0, {1: {0: 1}}), check=False)
    with pytest.raises(InputError):
        homotopy_transfer(s, bad)


# Maurer-Cartan elements

def test_mc_zero():
    h = dglie(CM, d={0: {2: 1}}, bracket={(0, 0): {2: 1}})
    m = MaurerCartanElement(h, {})
    assert mc_check(m)
    assert mc_to_morphism(m).comps == {}


def test_mc_abelian_closed():
    V = sp(("p", 1, 1), ("q", 1, 1), ("r", 2, 1))
    h = dglie(V, d={1: {2: 1}})
    assert mc_check(MaurerCartanElement(h, {0: 3}))
    assert not mc_check(MaurerCartanElement(h, {1: 1}))


def test_mc_nilpotent_solved():
    h = dglie(CM, d={1: {2: 1}}, bracket={(0, 0): {2: 1}})
    s, t = 2, sympy.Symbol("t")
    # d x + 1/2 [x, x] = (t + s^2 / 2) r for x = s p + t q
    sol = sympy.solve(t + sympy.Rational(s * s, 2), t)[0]
    x = {0: s, 1: Fraction(str(sol))}
    m = MaurerCartanElement(h, x)
    assert mc_check(m)
    phi = mc_to_morphism(m)
    assert check_infinity_morphism(phi).ok
    assert morphism_to_mc(phi) == m
    assert not mc_check(MaurerCartanElement(h, {0: s, 1: Fraction(str(sol)) + 1}))


def test_mc_weight_zero_rejected():
    V = sp(("p", 1, 0))
    with pytest.raises(InputError):
        MaurerCartanElement(CurvedStructure("classical", V, {}), {0: 1})


# cdgas

def test_check_cdga_examples():
    assert check_cdga(ground_field()).ok
    ext = GradedMixedCdga(GradedSpace(["1", "u"], [0, 1], [0, 1]), 0, {})
    assert check_cdga(ext).ok
