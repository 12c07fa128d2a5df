"""Generators of small valid instances, used by tests and the selftest command.

Valid curved structures are produced by construction rather than by
solving: start from a Lie algebra tensored with a small cdga, add a central
summand with its own differential, push the structure through a random
infinity-isomorphism whose nonlinear part lands in the central summand,
twist by a random degree-1 element, and finally conjugate by a random
filtered automorphism so that d acquires positive-weight parts.
"""

import random
from itertools import combinations

from .curvedalg import CurvedStructure, conjugate, twist, unblend
from .gradedcore import (DeformationRetract, FilteredComplex, GradedSpace, LinearMap,
                         minimal_model)
from .linalg import Reducer, mat_inverse, vaddto, vscale
from .multilinear import SymMultiMap, canonical, canonical_tuples, shifted_parities


def _coeff(rng):
    return rng.choice([-2, -1, 1, 1, 2])


LIE_ALGEBRAS = {
    "abelian1": (["a"], {}),
    "abelian2": (["a", "b"], {}),
    "aff": (["e", "f"], {(0, 1): {1: 1}}),   # [e, f] = f
}

# (names, degrees, products on index pairs i <= j)
SMALL_CDGAS = {
    "k": (["1"], [0], {}),
    "ext1": (["1", "u"], [0, 1], {}),          # u of degree 1
    "dual0": (["1", "t"], [0, 0], {}),         # t^2 = 0
    "dual2": (["1", "t"], [0, 2], {}),
}


def random_mixed_structure(rng, max_dim=6, max_weight=3):
    """A valid mixed-flavor structure with d having positive-weight parts
    (whenever the random automorphism allows it)."""
    s = random_graded_mixed_structure(rng, max_dim, max_weight)
    g = random_filtered_automorphism(rng, s.space)
    return conjugate(s.replace(flavor="mixed"), g)


def random_graded_mixed_structure(rng, max_dim=6, max_weight=3):
    return unblend(random_classical_structure(rng, max_dim, max_weight))


def random_classical_structure(rng, max_dim=6, max_weight=3):
    while True:
        s = _random_classical(rng, max_dim, max_weight)
        if s is not None:
            return s


def _random_classical(rng, max_dim, max_weight):
    lie = rng.choice(["aff", "aff", "aff", "abelian1", "abelian2"])
    cname = rng.choice(sorted(SMALL_CDGAS))
    gnames, gbr = LIE_ALGEBRAS[lie]
    cnames, cdeg, cmul = SMALL_CDGAS[cname]
    if len(gnames) * len(cnames) > max_dim:
        cname = "k"
        cnames, cdeg, cmul = SMALL_CDGAS[cname]
    gw = [0] + [rng.randint(0, 1) for _ in gnames[1:]]
    if lie == "aff":
        gw[0] = 0
    cw = [0] + [rng.randint(1, 2) for _ in cnames[1:]]
    # the Lie algebra is graded: its second generator may sit in degree 1
    gdeg = [0] + [rng.choice([0, 1]) for _ in gnames[1:]]
    basis, deg, wt = [], [], []
    for x, xn in enumerate(gnames):
        for c, cn in enumerate(cnames):
            basis.append(xn if c == 0 else "%s%s" % (xn, cn))
            deg.append(gdeg[x] + cdeg[c])
            wt.append(gw[x] + cw[c])
    nc = len(cnames)
    # central summand
    room = max_dim - len(basis)
    zkind = rng.choice(["none", "one", "pair", "pair"]) if room >= 2 else (
        rng.choice(["none", "one"]) if room == 1 else "none")
    zstart = len(basis)
    dz = {}
    if zkind == "one":
        basis.append("z")
        deg.append(rng.choice([-1, 0, 1, 2]))
        wt.append(rng.randint(0, max_weight))
    elif zkind == "pair":
        e = rng.choice([-1, 0, 1])
        w = rng.randint(0, max_weight)
        w2 = min(max_weight, w + rng.choice([0, 0, 1]))
        basis += ["z", "dz"]
        deg += [e, e + 1]
        wt += [w, w2]
        dz[zstart] = {zstart + 1: 1}
    sp = GradedSpace(basis, deg, wt)
    if any(wt[i] > max_weight for i in range(len(wt))):
        return None
    L = list(range(zstart))
    Z = list(range(zstart, sp.dim))
    # l_2 on the Lie part via decalage: l2(sX, sY) = (-1)^{|X|} s[X, Y]
    l2 = {}
    for x in range(len(gnames)):
        for y in range(len(gnames)):
            br = gbr.get((x, y))
            sgn = 1
            if br is None and (y, x) in gbr:
                br, sgn = gbr[(y, x)], -1
            if not br:
                continue
            for a in range(nc):
                for b in range(nc):
                    prod = _cmul(a, b, cdeg, cmul)
                    if prod is None:
                        continue
                    c, cc = prod
                    X, Y = x * nc + a, y * nc + b
                    if X > Y:
                        continue
                    # [x a, y b] = (-1)^{|a||y|} [x, y] ab, then the decalage sign
                    koz = -1 if (cdeg[a] * gdeg[y]) % 2 else 1
                    dec = -1 if (gdeg[x] + cdeg[a]) % 2 else 1
                    val = {}
                    for zt, zc in br.items():
                        vaddto(val, {zt * nc + c: zc * sgn * cc * koz * dec})
                    if val and all(wt[k] >= wt[X] + wt[Y] for k in val):
                        l2[(X, Y)] = val
    ells = {}
    if l2:
        ells[2] = SymMultiMap(2, sp, sp, 0, 0, l2)
    if dz:
        ells[1] = SymMultiMap(1, sp, sp, 1, 0, {(k,): v for k, v in dz.items()})
    base = CurvedStructure("classical", sp, ells)
    s = _central_transport(rng, base, L, Z, dz, max_weight)
    a = _random_degree_one(rng, sp)
    if a:
        s = twist(s, a)
    return s


def _cmul(a, b, cdeg, cmul):
    if a == 0:
        return b, 1
    if b == 0:
        return a, 1
    return None


def _random_degree_one(rng, sp):
    cands = [i for i in range(sp.dim) if sp.degree[i] == 1 and sp.weight[i] >= 1]
    a = {}
    for i in cands:
        if rng.random() < 0.6:
            a[i] = _coeff(rng)
    return a


def _central_transport(rng, s, L, Z, dz, max_weight):
    """Push s through 1 + c with c: Sym(L) -> Z vanishing on Z."""
    sp = s.space
    if not Z:
        return s
    par = shifted_parities(sp)
    Lsp = GradedSpace([sp.basis[j] for j in L], [sp.degree[j] for j in L],
                      [sp.weight[j] for j in L])
    cs = {}
    for k in range(0, 4):
        vals = {}
        for tup in canonical_tuples(Lsp, k, max_weight):
            tup = tuple(L[j] for j in tup)
            dsum = sum(sp.degree[j] - 1 for j in tup) + 1
            wsum = sum(sp.weight[j] for j in tup) + (1 if k == 0 else 0)
            for z in Z:
                if sp.degree[z] == dsum and sp.weight[z] >= wsum and rng.random() < 0.5:
                    vals.setdefault(tup, {})[z] = _coeff(rng)
        if vals:
            cs[k] = SymMultiMap(k, sp, sp, 1 - k, 1 if k == 0 else 0, vals)
    if not cs:
        return s
    maps = s.classical_maps()
    dZ = LinearMap(sp, sp, 1, 0, dz)
    N = max(maps, default=0) + max(cs) - 1
    ells = {}
    for n in range(0, N + 1):
        vals = {}
        for tup in canonical_tuples(sp, n, max_weight, par=par):
            out = {}
            m = maps.get(n)
            if m is not None:
                vaddto(out, m.eval_basis(tup))
            for q in range(0, n + 1):
                lq = maps.get(q)
                c = cs.get(n - q + 1)
                if lq is None or c is None:
                    continue
                for S in combinations(range(n), q):
                    rest = [i for i in range(n) if i not in S]
                    inner = lq.eval_basis(tuple(tup[i] for i in S))
                    if not inner:
                        continue
                    sign = _unshuffle_sign(tup, S, rest, par)
                    v = c.eval_vectors([inner] + [{tup[i]: 1} for i in rest])
                    vaddto(out, v, sign)
            cn = cs.get(n)
            if cn is not None:
                vaddto(out, dZ.apply(cn.eval_basis(tup)), -1)
            if out:
                vals[tup] = out
        if vals:
            ells[n] = SymMultiMap(n, sp, sp, 2 - n, 1 if n == 0 else 0, vals)
    return CurvedStructure("classical", sp, ells)


def _unshuffle_sign(tup, S, rest, par):
    order = list(S) + list(rest)
    sign = 1
    for a in range(len(order)):
        if not par[tup[order[a]]]:
            continue
        for b in range(a + 1, len(order)):
            if order[b] < order[a] and par[tup[order[b]]]:
                sign = -sign
    return sign


def random_filtered_automorphism(rng, sp, density=0.4):
    """Unipotent degree-0 map 1 + N with N strictly raising weight or
    strictly upper triangular within a (degree, weight) block."""
    cols = {j: {j: 1} for j in range(sp.dim)}
    for j in range(sp.dim):
        for i in range(sp.dim):
            if i == j or sp.degree[i] != sp.degree[j]:
                continue
            dw = sp.weight[i] - sp.weight[j]
            if dw > 0 or (dw == 0 and i < j):
                if rng.random() < density:
                    cols[j][i] = _coeff(rng)
    return LinearMap(sp, sp, 0, 0, cols)


def random_retract(rng, s):
    """Side-condition retract of (space, d) onto its minimal model, with a
    random automorphism applied to the small side."""
    c = FilteredComplex(s.space, s.d)
    small, r = minimal_model(c)
    V = small.space
    a = random_filtered_automorphism(rng, V)
    ainv = LinearMap(V, V, 0, 0, mat_inverse(a.cols, V.dim))
    dV = (a @ small.d @ ainv).with_min_weight(0)
    small2 = FilteredComplex(V, dV)
    return DeformationRetract(c, small2, (r.i @ ainv).with_min_weight(0),
                              (a @ r.p).with_min_weight(0), r.h)


def random_filtered_complex(rng, max_dim=10, max_weight=3, degrees=(0, 1, 2, 3)):
    """d = g d0 g^{-1} for a block-diagonal acyclic-plus-zero d0."""
    n = rng.randint(0, max_dim)
    basis, deg, wt, cols = [], [], [], {}
    i = 0
    while i < n:
        if i + 1 < n and rng.random() < 0.5:
            e = rng.choice(degrees[:-1])
            w = rng.randint(0, max_weight)
            w2 = rng.randint(w, max_weight)
            basis += ["x%d" % i, "x%d" % (i + 1)]
            deg += [e, e + 1]
            wt += [w, w2]
            cols[i] = {i + 1: _coeff(rng)}
            i += 2
        else:
            basis.append("x%d" % i)
            deg.append(rng.choice(degrees))
            wt.append(rng.randint(0, max_weight))
            i += 1
    sp = GradedSpace(basis, deg, wt)
    d0 = LinearMap(sp, sp, 1, 0, cols)
    g = random_filtered_automorphism(rng, sp)
    ginv = LinearMap(sp, sp, 0, 0, mat_inverse(g.cols, sp.dim))
    return FilteredComplex(sp, (g @ d0 @ ginv).with_min_weight(0))


def make_rng(seed):
    return random.Random(seed)


# algebroids

def base_cdgas():
    """Small cdgas in nonpositive degrees (dimension <= 4)."""
    from .cdga import Cdga, ground_field
    out = {"k": ground_field()}
    out["dual"] = Cdga(GradedSpace(["1", "eps"], [0, 0], [0, 0]), 0, {})
    out["ext"] = Cdga(GradedSpace(["1", "u"], [0, -1], [0, 0]), 0, {})
    out["trunc3"] = Cdga(GradedSpace(["1", "x", "x2"], [0, 0, 0], [0, 0, 0]), 0,
                         {(1, 1): {2: 1}})
    out["ext2"] = Cdga(GradedSpace(["1", "u", "v", "uv"], [0, -1, -1, -2], [0] * 4), 0,
                       {(1, 2): {3: 1}})
    sp = GradedSpace(["1", "u", "v", "uv"], [0, 0, -1, -1], [0] * 4)
    d = LinearMap(sp, sp, 1, 0, {2: {1: 1}})
    out["koszul"] = Cdga(sp, 0, {(1, 2): {3: 1}}, d)
    return out


def _closure(A, seeds, cap=3):
    """k-span of seeds closed under commutators and [d_A, -]."""
    from .algebroid import _commutator, _flat
    n = A.dim
    basis, red = [], Reducer()
    todo = list(seeds)
    while todo:
        e, cols = todo.pop(0)
        if not cols or not red.add(_flat(cols, n)):
            continue
        basis.append((e, cols))
        if len(basis) > cap:
            return None
        todo.append((e + 1, _commutator(A, A.d.cols, 1, cols, e)))
        for e2, c2 in list(basis):
            todo.append((e + e2, _commutator(A, cols, e, c2, e2)))
    return basis


def random_action_algebroid(rng, bases=None, max_rank=3):
    """Action algebroid A (x) g for a dg Lie subalgebra g of Der(A), with an
    optional zero-anchor abelian summand; valid by construction."""
    from .algebroid import _commutator, _flat, algebroid_from_generators, derivations
    bases = bases or base_cdgas()
    while True:
        name = rng.choice(sorted(bases))
        A = bases[name]
        ders = derivations(A)
        seeds = []
        for _ in range(rng.randint(0, 2)):
            if not ders:
                break
            e = rng.choice(sorted({d[0] for d in ders}))
            cols = {}
            for e2, c in ders:
                if e2 == e and rng.random() < 0.7:
                    s = _coeff(rng)
                    for i, col in c.items():
                        vaddto(cols.setdefault(i, {}), col, s)
            cols = {i: v for i, v in cols.items() if v}
            if cols:
                seeds.append((e, cols))
        g = _closure(A, seeds, max_rank)
        if g is None:
            continue
        extra = rng.randint(0, max_rank - len(g))
        if not g and not extra:
            extra = 1
        n = A.dim
        names = ["g%d" % i for i in range(len(g))] + ["z%d" % i for i in range(extra)]
        degs = [e for e, _ in g] + [rng.choice([0, 1]) for _ in range(extra)]
        G = GradedSpace(names, degs, [0] * len(names))
        M_idx = lambda a, k: k * n + a
        red = Reducer([_flat(c, n) for _, c in g])

        def express(cols):
            v = _flat(cols, n)
            comb = red.express(v) if v else {}
            return {M_idx(A.unit, j): c for j, c in comb.items()}

        gen_ells, gen_anch = {}, {}
        for k, (e, cols) in enumerate(g):
            gen_anch.setdefault(1, {})[(k,)] = {i: vscale(c, -1 if e % 2 else 1)
                                                for i, c in cols.items()}
            v = express(_commutator(A, A.d.cols, 1, cols, e))
            if v:
                gen_ells.setdefault(1, {})[(k,)] = v
        for a in range(len(g)):
            for b in range(a, len(g)):
                (e1, D), (e2, E) = g[a], g[b]
                if a == b and (e1 - 1) % 2:
                    continue
                v = express(_commutator(A, D, e1, E, e2))
                if v:
                    gen_ells.setdefault(2, {})[(a, b)] = vscale(v, -1 if e1 % 2 else 1)
        return algebroid_from_generators(A, G, gen_ells, gen_anch)


def perturb_algebroid(rng, L):
    """Change one generator-level datum at random (an anchor, a bracket or
    a new ternary operation); the result may or may not stay valid."""
    from .algebroid import algebroid_from_generators, derivations
    A, M = L.base, L.module
    G = M.generators
    gen_ells, gen_anch = L.gen_data
    gen_ells = {n: {t: dict(v) for t, v in tab.items()} for n, tab in gen_ells.items()}
    gen_anch = {n: dict(tab) for n, tab in gen_anch.items()}
    sp = M.space
    kind = rng.choice(["anchor", "l1", "l2", "l2", "l3"])
    gpar = shifted_parities(G)
    if kind == "anchor":
        ders = derivations(A)
        k = rng.randrange(G.dim)
        cands = [c for e, c in ders if e == G.degree[k]]
        if cands:
            old = dict(gen_anch.get(1, {}).get((k,), {}))
            new = {i: dict(v) for i, v in old.items()}
            c = _coeff(rng)
            for i, col in rng.choice(cands).items():
                vaddto(new.setdefault(i, {}), col, c)
            gen_anch.setdefault(1, {})[(k,)] = {i: v for i, v in new.items() if v}
            return algebroid_from_generators(A, G, gen_ells, gen_anch)
        kind = "l2"
    n = {"l1": 1, "l2": 2, "l3": 3}[kind]
    tups = canonical_tuples(G, n, par=gpar)
    rng.shuffle(tups)
    for tup in tups:
        deg = sum(G.degree[g] for g in tup) + 2 - n
        outs = [k for k in range(sp.dim) if sp.degree[k] == deg]
        if outs:
            v = gen_ells.setdefault(n, {}).setdefault(tup, {})
            vaddto(v, {rng.choice(outs): _coeff(rng)})
            return algebroid_from_generators(A, G, gen_ells, gen_anch)
    return L


def random_split_algebroid(rng, bases=None, max_t=2, max_n=2):
    """Candidate split curved algebroid t + n (t weights <= -1, n weight 0).

    t is a dg Lie subalgebra of Der(A) acting through the anchor (or an
    abelian algebra with zero anchor), n carries a random action of t, an
    optional differential and random t-valued-in-n cocycle-like terms.  The
    result satisfies the splitting hypotheses but need not be valid.
    """
    from .algebroid import _commutator, _flat, algebroid_from_generators, derivations
    bases = bases or base_cdgas()
    names = [b for b in sorted(bases) if bases[b].dim <= 3]
    while True:
        A = bases[rng.choice(names)]
        nA = A.dim
        ders = derivations(A)
        seeds = []
        if ders and rng.random() < 0.6:
            e, cols = rng.choice([d for d in ders if d[0] == 0] or ders)
            seeds.append((e, cols))
        g = _closure(A, seeds, max_t)
        if g is None:
            continue
        nt_extra = rng.randint(0 if g else 1, max_t - len(g))
        tdeg = [e for e, _ in g] + [rng.choice([0, 0, 1]) for _ in range(nt_extra)]
        nt = len(tdeg)
        nn = rng.randint(1, max_n)
        ndeg = [rng.choice([0, 0, 1])]
        if nn == 2:
            ndeg.append(ndeg[0] + 1 if rng.random() < 0.5 else rng.choice([0, 1]))
        gnames = ["t%d" % i for i in range(nt)] + ["n%d" % i for i in range(nn)]
        G = GradedSpace(gnames, tdeg + ndeg, [-1] * nt + [0] * nn)
        if rng.random() < 0.3 and nt:
            G = GradedSpace(gnames, tdeg + ndeg,
                            [-rng.choice([1, 2]) for _ in range(nt)] + [0] * nn)
        idx = lambda a, k: k * nA + a
        u = A.unit
        red = Reducer([_flat(c, nA) for _, c in g])

        def express(cols):
            v = _flat(cols, nA)
            comb = red.express(v) if v else {}
            return {idx(u, j): c for j, c in comb.items()}

        gen_ells, gen_anch = {}, {}
        for k, (e, cols) in enumerate(g):
            gen_anch.setdefault(1, {})[(k,)] = {i: vscale(c, -1 if e % 2 else 1)
                                                for i, c in cols.items()}
            v = express(_commutator(A, A.d.cols, 1, cols, e))
            if v:
                gen_ells.setdefault(1, {})[(k,)] = v
        for a in range(len(g)):
            for b in range(a, len(g)):
                (e1, D), (e2, E) = g[a], g[b]
                if a == b and (e1 - 1) % 2:
                    continue
                v = express(_commutator(A, D, e1, E, e2))
                if v:
                    gen_ells.setdefault(2, {})[(a, b)] = vscale(v, -1 if e1 % 2 else 1)
        N = list(range(nt, nt + nn))
        T = list(range(nt))
        gpar = shifted_parities(G)

        def add(tup, out_gen, c):
            sign, srt = canonical(tup, gpar)
            if not sign:
                return
            deg = sum(G.degree[x] for x in tup) + 2 - len(tup)
            if sum(G.weight[x] for x in tup) > 0:
                return
            # sometimes a non-unit coefficient of the right degree
            coeffs = [a for a in range(nA) if A.space.degree[a] == deg - G.degree[out_gen]]
            a = u
            if coeffs and (G.degree[out_gen] != deg or rng.random() < 0.3):
                a = rng.choice(coeffs)
            elif G.degree[out_gen] != deg:
                return
            vaddto(gen_ells.setdefault(len(tup), {}).setdefault(srt, {}),
                   {idx(a, out_gen): sign * c})

        # differential on n
        if nn == 2 and ndeg[1] == ndeg[0] + 1 and rng.random() < 0.7:
            add((N[0],), N[1], _coeff(rng))
        # action of t on n, brackets into n, and higher terms into n
        for tup in [(t, n) for t in T for n in N] + [(n, m) for n in N for m in N if n <= m]:
            if rng.random() < 0.3:
                add(tup, rng.choice(N), _coeff(rng))
        for k in range(0, 4):
            for tup in canonical_tuples(GradedSpace([G.basis[t] for t in T],
                                                    [G.degree[t] for t in T],
                                                    [G.weight[t] for t in T]), k):
                if rng.random() < (0.25 if k >= 1 else 0.0):
                    add(tup, rng.choice(N), _coeff(rng))
        for tab in gen_ells.values():
            for t in [t for t, v in tab.items() if not v]:
                del tab[t]
        return algebroid_from_generators(A, G, gen_ells, gen_anch, split=(T, N))


def perturb_split_algebroid(rng, L):
    """Change one n-valued generator datum, keeping the splitting hypotheses."""
    from .algebroid import algebroid_from_generators
    A, M = L.base, L.module
    G = M.generators
    T, N = L.split
    gen_ells, gen_anch = L.gen_data
    gen_ells = {n: {t: dict(v) for t, v in tab.items()} for n, tab in gen_ells.items()}
    gpar = shifted_parities(G)
    for _ in range(30):
        n = rng.choice([1, 2, 2, 3])
        tups = canonical_tuples(G, n, par=gpar)
        if not tups:
            continue
        tup = rng.choice(tups)
        if sum(G.weight[x] for x in tup) > 0:
            continue
        deg = sum(G.degree[x] for x in tup) + 2 - n
        outs = [g for g in N if G.degree[g] == deg]
        if not outs:
            continue
        k = M.index(rng.choice(range(A.dim)), rng.choice(outs))
        if M.space.degree[k] != deg:
            continue
        vaddto(gen_ells.setdefault(n, {}).setdefault(tup, {}), {k: _coeff(rng)})
        return algebroid_from_generators(A, G, gen_ells, gen_anch, split=L.split)
    return L


def _elementary_n_map(rng, L):
    """A-linear map on the module: identity plus one term n_j -> c a n_i."""
    A, M = L.base, L.module
    G = M.generators
    T, N = L.split
    F = {k: {k: 1} for k in range(M.space.dim)}
    opts = [(i, j, a) for i in N for j in N for a in range(A.dim)
            if G.degree[j] == G.degree[i] + A.space.degree[a]
            and (i != j or a != A.unit)]
    if not opts:
        return F
    i, j, a = rng.choice(opts)
    c = _coeff(rng)
    for b in range(A.dim):
        # b n_j -> b n_j + c (b a) n_i
        for e, coef in A.mul_basis(b, a).items():
            vaddto(F[M.index(b, j)], {M.index(e, i): c * coef})
    return F


def random_split_iso(rng, L):
    """(H, F): H is L transported along a random A-linear automorphism F of
    the module that fixes t; F is returned as column dicts."""
    from .algebroid import algebroid_from_generators
    A, M = L.base, L.module
    G = M.generators
    sp = M.space
    F = _elementary_n_map(rng, L)
    if rng.random() < 0.5:
        F2 = _elementary_n_map(rng, L)
        F = {k: _apply(F2, v) for k, v in F.items()}
    Finv = mat_inverse(F, sp.dim)
    gpar = shifted_parities(G)
    top = max(max(L.structure.ells, default=0), L.max_anchor_arity() + 1)
    gen_ells, gen_anch = {}, {}
    for n in range(0, top + 1):
        for U in canonical_tuples(G, n, par=gpar):
            vecs = [Finv[M.generator_index(g)] for g in U]
            m = L.structure.ells.get(n)
            if m is not None:
                v = _apply(F, m.eval_vectors(vecs))
                if v:
                    gen_ells.setdefault(n, {})[U] = v
            if n >= 1:
                cols = L.anchor_vectors(vecs)
                if cols:
                    gen_anch.setdefault(n, {})[U] = cols
    H = algebroid_from_generators(A, G, gen_ells, gen_anch, split=L.split)
    return H, F


def _apply(F, v):
    out = {}
    for k, c in v.items():
        vaddto(out, F[k], c)
    return out


def perturb_split_map(rng, L, F):
    """F followed by a random elementary A-linear change on n."""
    E = _elementary_n_map(rng, L)
    return {k: _apply(E, v) for k, v in F.items()}
