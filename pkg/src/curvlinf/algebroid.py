"""(Curved) L-infinity algebroids over a finite-dimensional cdga.

An algebroid is a module M over a cdga A with a classical (possibly curved)
structure l'_n on M viewed over the ground field and an anchor family
R_n: Sym^n(M[1]) -> Der(A), R_0 = d_A.  The anchor family generalises the
single anchor: l_{n+1} obeys the Leibniz rule along R_n,

    l_{n+1}(x, a y) = R_n(x)(a) y + (-1)^{|a|(1 + sum |x_i|')} a l_{n+1}(x, y),

so l_1 is a derivation over d_A, l_2 the usual Leibniz rule and the higher
l_n are A-multilinear when only R_0 and R_1 are present.  Compatibility of
the anchors with the brackets is the structure equation of the semidirect
product M + A e, where l(x_1, ..., x_n, a e) = R_n(x)(a) e.

Algebroids on free modules are usually built from their values on
generators; the k-level tables are then the Leibniz extension of those
values.
"""

from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from math import factorial

from .cdga import GradedMixedCdga, check_cdga, is_derivation
from .curvedalg import (CurvedStructure, InfinityMorphism, Report, _check_over_base,
                        _from_classical_maps, _subsets_with_sign, check_infinity_morphism,
                        check_structure, classical_equation_value, structure_equation_value,
                        unblend)
from .errors import InputError, ResourceError
from .gradedcore import GradedSpace, LinearMap
from .linalg import Reducer, nullspace, rank, vaddto, vscale
from .modules import (FreeModule, Module, check_multilinear, extend_linear,
                      extend_multilinear)
from .multilinear import (SymMultiMap, canonical, canonical_tuples, linear_as_multimap,
                          shifted_parities)

# sign conventions for reading n-valued forms on t as elements of B (x) n:
# the value at (t, n) picks up (-1)^{CURV_NT |n|'|t|' + CURV_OT |out|'|t|'}
CURV_NT = 0
CURV_OT = 0


def _odd(k):
    return k % 2 != 0


def _sgn(k):
    return -1 if k % 2 else 1


def _der_map(A, cols, degree):
    return LinearMap(A.space, A.space, degree, 0, cols, check=False)


class Algebroid:
    """Module, structure and anchor family over a cdga.

    ``structure`` is a classical CurvedStructure on ``module.space`` (over
    the ground field).  ``anchors[n]`` maps canonical k-tuples of length n
    to derivations of A given as column dicts.  For algebroids on free
    modules ``gen_data = (gen_ells, gen_anchors)`` holds the values on
    generator tuples; ``split = (t_gens, n_gens)`` optionally records a
    splitting by generator indices.
    """

    def __init__(self, base, module, structure, anchors, gen_data=None, split=None,
                 theta=None):
        if structure.space != module.space:
            raise InputError("structure and module live on different spaces")
        if structure.flavor != "classical":
            raise InputError("algebroid structures are stored in the classical flavor")
        self.base = base
        self.module = module
        self.structure = structure
        self.anchors = {n: {t: {i: dict(c) for i, c in cols.items() if c}
                            for t, cols in tab.items()}
                        for n, tab in anchors.items() if n >= 1}
        self.anchors = {n: {t: c for t, c in tab.items() if c}
                        for n, tab in self.anchors.items()}
        self.anchors = {n: tab for n, tab in self.anchors.items() if tab}
        self.gen_data = gen_data
        self.split = split
        self.theta = theta

    @property
    def space(self):
        return self.module.space

    def is_free(self):
        return self.module.is_free()

    def anchor_cols(self, tup):
        """Derivation R_n(x) for an arbitrary basis tuple (n >= 1)."""
        par = shifted_parities(self.space)
        sign, srt = canonical(tup, par)
        if not sign:
            return {}
        cols = self.anchors.get(len(tup), {}).get(srt, {})
        if sign == 1 or not cols:
            return cols
        return {i: vscale(c, -1) for i, c in cols.items()}

    def anchor_vectors(self, vecs):
        out = {}
        from itertools import product
        for combo in product(*[list(v.items()) for v in vecs]):
            c = 1
            tup = []
            for j, cj in combo:
                c *= cj
                tup.append(j)
            cols = self.anchor_cols(tuple(tup))
            for i, col in cols.items():
                vaddto(out.setdefault(i, {}), col, c)
        return {i: v for i, v in out.items() if v}

    def max_anchor_arity(self):
        return max(self.anchors, default=0)

    def __eq__(self, other):
        return (isinstance(other, Algebroid) and self.base == other.base
                and self.module == other.module and self.structure == other.structure
                and self.anchors == other.anchors)

    def __hash__(self):
        return hash(self.space)

    def __repr__(self):
        return "Algebroid(dim %d over dim %d, arities %s, anchors %s)" % (
            self.space.dim, self.base.dim, sorted(self.structure.ells),
            sorted(self.anchors))


# building from generator data

class _GenExtension:
    """Leibniz extension of generator data to k-level tables."""

    def __init__(self, A, M, gen_ells, gen_anchors):
        self.A, self.M = A, M
        G = M.generators
        self.G = G
        self.gpar = shifted_parities(G)
        self.gsd = [e - 1 for e in G.degree]
        self.gen_ells = gen_ells
        self.gen_anchors = gen_anchors
        self.memo = {}

    def gen_ell(self, n, gtup):
        sign, srt = canonical(gtup, self.gpar)
        if not sign:
            return {}
        v = self.gen_ells.get(n, {}).get(srt)
        if not v:
            return {}
        return v if sign == 1 else vscale(v, -1)

    def gen_anchor(self, gtup):
        sign, srt = canonical(gtup, self.gpar)
        if not sign:
            return {}
        cols = self.gen_anchors.get(len(gtup), {}).get(srt)
        if not cols:
            return {}
        return cols if sign == 1 else {i: vscale(c, -1) for i, c in cols.items()}

    def anchor_items(self, items):
        """R_n on pure tensors (a, g), n = len(items) >= 1."""
        A = self.A
        adeg = A.space.degree
        sign, prefix = 1, 0
        prod = {A.unit: 1}
        for a, g in items:
            if _odd(adeg[a] * (1 + prefix)):
                sign = -sign
            prefix += self.gsd[g]
            prod = A.mul(prod, {a: 1})
            if not prod:
                return {}
        cols = self.gen_anchor(tuple(g for _, g in items))
        out = {}
        for i, col in cols.items():
            v = A.mul(prod, col)
            if v:
                out[i] = vscale(v, sign)
        return out

    def sdeg(self, item):
        a, g = item
        return self.A.space.degree[a] + self.gsd[g]

    def ell_items(self, items):
        key = items
        if key in self.memo:
            return self.memo[key]
        A, M = self.A, self.M
        n = len(items)
        j = next((k for k, (a, _) in enumerate(items) if a != A.unit), None)
        if j is None:
            val = self.gen_ell(n, tuple(g for _, g in items))
            self.memo[key] = val
            return val
        after = sum(self.sdeg(it) for it in items[j + 1:])
        s_move = _sgn(self.sdeg(items[j]) * after)
        others = items[:j] + items[j + 1:]
        a, g = items[j]
        osum = sum(self.sdeg(it) for it in others)
        out = {}
        if n == 1:
            Da = A.d.cols.get(a, {})
        else:
            Da = self.anchor_items(others).get(a, {})
        if Da:
            vaddto(out, M.act(Da, {M.generator_index(g): 1}))
        inner = self.ell_items(others + ((A.unit, g),))
        if inner:
            vaddto(out, M.act({a: 1}, inner), _sgn(A.space.degree[a] * (1 + osum)))
        if s_move < 0:
            out = vscale(out, -1)
        self.memo[key] = out
        return out


def _gen_max_arity(gen_ells, gen_anchors):
    n1 = max((n for n, t in gen_ells.items() if t), default=-1)
    n2 = max((n + 1 for n, t in gen_anchors.items() if t), default=-1)
    return max(n1, n2)


def _live_gen_tuples(ext, n, with_ell=True):
    """Generator multisets of length n on which the extension can be nonzero.

    ell_n on (a_1 g_1, ..., a_n g_n) only involves ell_n(g) and anchors of
    (n-1)-subtuples of g, so other multisets give zero.
    """
    G = ext.G
    out = set()
    if with_ell:
        out.update(ext.gen_ells.get(n, {}))
        if n == 1 and not ext.A.d.is_zero():
            out.update((g,) for g in range(G.dim))
        if n >= 1:
            for K in ext.gen_anchors.get(n - 1, {}):
                for g in range(G.dim):
                    sign, srt = canonical(K + (g,), ext.gpar)
                    if sign:
                        out.add(srt)
    else:
        out.update(ext.gen_anchors.get(n, {}))
    return out


def _k_tuples(ext, gtups, par):
    """Canonical module-basis tuples lying over the given generator tuples."""
    M, A = ext.M, ext.A
    na = A.space.dim
    out = set()
    for U in gtups:
        groups = {}
        for g in U:
            groups[g] = groups.get(g, 0) + 1
        choices = [[tuple(M.index(a, g) for a in combo)
                    for combo in combinations_with_replacement(range(na), m)]
                   for g, m in groups.items()]
        for pick in product(*choices):
            tup = tuple(sorted(k for part in pick for k in part))
            if any(tup[i] == tup[i + 1] and par[tup[i]] for i in range(len(tup) - 1)):
                continue
            out.add(tup)
    return sorted(out)


def algebroid_from_generators(A, generators, gen_ells, gen_anchors=None, split=None,
                              theta=None, names=None):
    """Algebroid on the free module A (x) generators.

    ``gen_ells[n]`` maps canonical generator tuples to vectors of the free
    module (k-indices); ``gen_anchors[n]`` maps them to derivations of A
    (column dicts).  The k-level tables are the Leibniz extension.
    """
    gen_anchors = gen_anchors or {}
    M = FreeModule(A, generators, names)
    ext = _GenExtension(A, M, gen_ells, gen_anchors)
    sp = M.space
    par = shifted_parities(sp)
    ells = {}
    N = _gen_max_arity(gen_ells, gen_anchors)
    if not A.d.is_zero():
        N = max(N, 1)
    for n in range(0, N + 1):
        vals = {}
        for tup in _k_tuples(ext, _live_gen_tuples(ext, n), par):
            items = tuple(M.split(k) for k in tup)
            v = ext.ell_items(items)
            if v:
                vals[tup] = v
        if vals:
            ells[n] = SymMultiMap(n, sp, sp, 2 - n, 0, vals, check=False)
    for n, m in list(ells.items()):
        w = m.actual_min_weight()
        ells[n] = m.with_min_weight(min(w, 1 if n == 0 else 0) if w is not None else 0)
    anchors = {}
    for n in range(1, max(gen_anchors, default=0) + 1):
        tab = {}
        for tup in _k_tuples(ext, _live_gen_tuples(ext, n, False), par):
            cols = ext.anchor_items(tuple(M.split(k) for k in tup))
            if cols:
                tab[tup] = cols
        if tab:
            anchors[n] = tab
    s = CurvedStructure("classical", sp, ells)
    clean_ells = {n: {t: v for t, v in tab.items() if v} for n, tab in gen_ells.items()}
    clean_ells = {n: t for n, t in clean_ells.items() if t}
    clean_anch = {n: {t: c for t, c in tab.items() if c} for n, tab in gen_anchors.items()}
    clean_anch = {n: t for n, t in clean_anch.items() if t}
    return Algebroid(A, M, s, anchors, gen_data=(clean_ells, clean_anch), split=split,
                     theta=theta)


def _require_free(L, what):
    if not L.is_free() or L.gen_data is None:
        raise InputError("%s needs an algebroid on a free module given by generators"
                         % what)


# tangent algebroid

def derivations(A):
    """Basis of Der(A) as (degree, column dict) pairs, ordered by degree."""
    sp = A.space
    n = sp.dim
    if n == 0:
        return []
    degs = sorted(set(sp.degree))
    out = []
    for e in range(degs[0] - degs[-1], degs[-1] - degs[0] + 1):
        unknowns = [(o, i) for i in range(n) for o in range(n)
                    if sp.degree[o] == sp.degree[i] + e]
        if not unknowns:
            continue
        uidx = {u: k for k, u in enumerate(unknowns)}
        rows = {}
        for a in range(n):
            for b in range(n):
                s = _sgn(e * sp.degree[a])
                # D(ab) - D(a) b - s a D(b), linear in the unknown entries
                for i, c in A.mul_basis(a, b).items():
                    for o in range(n):
                        if (o, i) in uidx:
                            rows.setdefault((a, b, o), {})
                            vaddto(rows[(a, b, o)], {uidx[(o, i)]: c})
                for o in range(n):
                    if (o, a) in uidx:
                        for k, c in A.mul_basis(o, b).items():
                            vaddto(rows.setdefault((a, b, k), {}), {uidx[(o, a)]: -c})
                    if (o, b) in uidx:
                        for k, c in A.mul_basis(a, o).items():
                            vaddto(rows.setdefault((a, b, k), {}), {uidx[(o, b)]: -s * c})
        rows = [r for r in rows.values() if r]
        # also D commutes with nothing else: D(unit) follows from the rows
        for v in nullspace(rows, len(unknowns)):
            cols = {}
            for k, c in v.items():
                o, i = unknowns[k]
                cols.setdefault(i, {})[o] = c
            out.append((e, cols))
    return out


def _flat(cols, n):
    return {o * n + i: c for i, col in cols.items() for o, c in col.items()}


def _unflat(v, n):
    cols = {}
    for k, c in v.items():
        o, i = divmod(k, n)
        cols.setdefault(i, {})[o] = c
    return cols


def _compose(A, D, E):
    """Column dict of D o E."""
    n = A.dim
    out = {}
    for i in range(n):
        v = {}
        for k, c in E.get(i, {}).items():
            vaddto(v, D.get(k, {}), c)
        if v:
            out[i] = v
    return out


def _commutator(A, D, dD, E, dE):
    out = _compose(A, D, E)
    other = _compose(A, E, D)
    s = -_sgn(dD * dE)
    for i, v in other.items():
        vaddto(out.setdefault(i, {}), v, s)
    return {i: v for i, v in out.items() if v}


def _left_mult(A, a, D):
    return {i: A.mul({a: 1}, v) for i, v in D.items() if A.mul({a: 1}, v)}


def _der_name(A, cols):
    sp = A.space
    i = min(cols)
    o = min(cols[i])
    return "d[%s->%s]" % (sp.basis[i], sp.basis[o])


def compute_tangent(A):
    """T_A with the commutator bracket and the identity anchor."""
    n = A.dim
    ders = derivations(A)
    names, used = [], set()
    for e, cols in ders:
        nm = _der_name(A, cols)
        k = 1
        base = nm
        while nm in used:
            k += 1
            nm = "%s%d" % (base, k)
        used.add(nm)
        names.append(nm)
    sp = GradedSpace(names, [e for e, _ in ders], [0] * len(ders))
    red = Reducer([_flat(c, n) for _, c in ders])

    def express(cols):
        v = _flat(cols, n)
        if not v:
            return {}
        comb = red.express(v)
        if comb is None:
            raise InputError("derivation space is not closed; A may be invalid")
        return comb

    action = {}
    for a in range(n):
        if a == A.unit:
            continue
        for k, (e, cols) in enumerate(ders):
            v = express(_left_mult(A, a, cols))
            if v:
                action[(a, k)] = v
    M = Module(A, sp, action, check=False)
    dA = A.d.cols
    ells = {}
    l1, l2 = {}, {}
    for k, (e, cols) in enumerate(ders):
        v = express(_commutator(A, dA, 1, cols, e))
        if v:
            l1[(k,)] = v
    par = shifted_parities(sp)
    for tup in canonical_tuples(sp, 2, par=par):
        (e1, D), (e2, E) = ders[tup[0]], ders[tup[1]]
        v = express(_commutator(A, D, e1, E, e2))
        if v:
            l2[tup] = vscale(v, _sgn(e1))
    if l1:
        ells[1] = SymMultiMap(1, sp, sp, 1, 0, l1, check=False)
    if l2:
        ells[2] = SymMultiMap(2, sp, sp, 0, 0, l2, check=False)
    anchors = {1: {(k,): {i: vscale(c, _sgn(e)) for i, c in cols.items()}
                   for k, (e, cols) in enumerate(ders)}}
    s = CurvedStructure("classical", sp, ells)
    return Algebroid(A, M, s, anchors)


def free_tangent_model(A, weight=0):
    """Free algebroid on a minimal A-generating set of derivations.

    Generators map to their derivations under the anchor; brackets and l_1
    are lifted along the A-linear surjection onto T_A.  For the dual numbers
    this is the rank-one module on the log derivation eps d/d eps.
    """
    n = A.dim
    ders = derivations(A)
    span = Reducer()
    chosen = []
    for e, cols in sorted(ders, key=lambda d: -d[0]):
        vecs = [_flat(_left_mult(A, a, c), n) for a in range(n) for _, c in chosen]
        span = Reducer(vecs)
        if span.express(_flat(cols, n)) is None:
            chosen.append((e, cols))
    G = GradedSpace([_der_name(A, c) for _, c in chosen], [e for e, _ in chosen],
                    [weight] * len(chosen))
    M = FreeModule(A, G)
    lifts = [(M.index(a, k), _flat(_left_mult(A, a, c), n))
             for k, (_, c) in enumerate(chosen) for a in range(n)]
    red = Reducer([v for _, v in lifts])

    def lift(cols):
        v = _flat(cols, n)
        if not v:
            return {}
        comb = red.express(v)
        if comb is None:
            raise InputError("chosen derivations do not generate T_A")
        out = {}
        for j, c in comb.items():
            vaddto(out, {lifts[j][0]: c})
        return out

    gen_ells, gen_anch = {}, {1: {}}
    gpar = shifted_parities(G)
    for k, (e, cols) in enumerate(chosen):
        gen_anch[1][(k,)] = {i: vscale(c, _sgn(e)) for i, c in cols.items()}
        v = lift(_commutator(A, A.d.cols, 1, cols, e))
        if v:
            gen_ells.setdefault(1, {})[(k,)] = v
    for tup in canonical_tuples(G, 2, par=gpar):
        (e1, D), (e2, E) = chosen[tup[0]], chosen[tup[1]]
        v = lift(_commutator(A, D, e1, E, e2))
        if v:
            gen_ells.setdefault(2, {})[tup] = vscale(v, _sgn(e1))
    return algebroid_from_generators(A, G, gen_ells, gen_anch)


# validation

def semidirect(L):
    """Classical structure on M + A e with l(x, a e) = R(x)(a) e."""
    A, sp = L.base, L.space
    m, na = sp.dim, A.dim
    names = list(sp.basis) + ["e:" + b for b in A.space.basis]
    S = GradedSpace(names, list(sp.degree) + [d + 1 for d in A.space.degree],
                    list(sp.weight) + [0] * na)
    par = shifted_parities(S)
    maps = L.structure.ells
    top = max(L.structure.max_arity(), L.max_anchor_arity() + 1, 1)
    ells = {}
    for n in range(0, top + 1):
        vals = {}
        m_n = maps.get(n)
        if m_n is not None:
            for tup, v in m_n.values.items():
                vals[tup] = dict(v)
        if n >= 1:
            for rest in canonical_tuples(sp, n - 1, par=shifted_parities(sp)):
                cols = A.d.cols if n == 1 else L.anchors.get(n - 1, {}).get(rest, {})
                for a, col in cols.items():
                    if col:
                        vals[rest + (m + a,)] = {m + k: c for k, c in col.items()}
        if vals:
            ells[n] = SymMultiMap(n, S, S, 2 - n, -10 ** 6, vals, check=False)
    return CurvedStructure("classical", S, ells, check=False)


def check_algebroid(L, arity_bound=None):
    """Axiom-by-axiom check; failure relations name the axiom class
    (module, anchor, anchor-weight, derivation, leibniz, anchor-compat,
    structure).

    On free modules the tables are compared with the Leibniz extension of
    their generator values, and the anchor compatibility and structure
    equations are evaluated on generator tuples: once the Leibniz rule and
    the anchor compatibility hold, both defects are A-multilinear.
    """
    rep = Report()
    bad = L.module.failing_axiom()
    if bad:
        rep.fail("module", None, bad)
    if L.is_free():
        _check_free(L, rep, arity_bound)
    else:
        _check_general(L, rep, arity_bound)
    return rep


def _anchor_derivation_checks(L, rep, tuples_by_n):
    A, sp = L.base, L.space
    sd = [e - 1 for e in sp.degree]
    for n, tups in tuples_by_n.items():
        for tup in tups:
            cols = L.anchor_cols(tup)
            if not cols:
                continue
            deg = sum(sd[j] for j in tup) + 1
            wrong = any(A.space.degree[o] != A.space.degree[i] + deg
                        for i, col in cols.items() for o in col)
            if wrong or is_derivation(A, _der_map(A, cols, deg), deg):
                rep.fail("anchor", n, _names(sp, tup))
            if sum(sp.weight[j] for j in tup) >= 1:
                rep.fail("anchor-weight", n, _names(sp, tup))


def _compat_and_structure(L, rep, arity_bound, tuples_for):
    """Semidirect-product equations with one A-input, then the structure
    equations, on the tuples supplied by ``tuples_for(n)``."""
    A, sp = L.base, L.space
    semi = semidirect(L)
    S = semi.space
    m = sp.dim
    stop = 2 * max(semi.max_arity(), 1) - 1
    if arity_bound is not None:
        stop = min(stop, arity_bound)
    degrees = set(S.degree)
    smaps = semi.classical_maps()
    spar = shifted_parities(S)
    for n in range(1, stop + 1):
        done = False
        for rest in tuples_for(n - 1):
            for a in range(A.dim):
                tup = rest + (m + a,)
                if sum(S.degree[j] - 1 for j in tup) + 3 not in degrees:
                    continue
                if classical_equation_value(smaps, tup, spar):
                    rep.fail("anchor-compat", n, _names(S, tup))
                    done = True
                    break
            if done:
                break
    s = L.structure
    maps = s.classical_maps()
    top = 2 * max(s.max_arity(), 0) - 1
    if arity_bound is not None:
        top = min(top, arity_bound)
    degrees = set(sp.degree)
    par = shifted_parities(sp)
    for n in range(0, top + 1):
        for tup in tuples_for(n):
            if sum(sp.degree[j] - 1 for j in tup) + 3 not in degrees:
                continue
            if classical_equation_value(maps, tup, par):
                rep.fail("structure: arity %d" % n, n, _names(sp, tup))
                break
    rep.checked_up_to = top
    rep.complete = arity_bound is None or top < arity_bound


def _check_free(L, rep, arity_bound):
    A, M, sp = L.base, L.module, L.space
    G = M.generators
    gpar = shifted_parities(G)
    gi = M.generator_index
    maps = L.structure.classical_maps()
    gen_ells = {n: {U: m.eval_basis(tuple(gi(g) for g in U))
                    for U in canonical_tuples(G, n, par=gpar)}
                for n, m in maps.items()}
    gen_anch = {n: {U: L.anchor_cols(tuple(gi(g) for g in U))
                    for U in canonical_tuples(G, n, par=gpar)}
                for n in L.anchors}
    wmax = sp.weight_span()[1] if sp.dim else 0
    gtuples = lambda n: [tuple(gi(g) for g in U)
                         for U in canonical_tuples(G, n, wmax, par=gpar)]
    _anchor_derivation_checks(L, rep, {n: gtuples(n) for n in L.anchors})
    ext = algebroid_from_generators(A, G, gen_ells, gen_anch, names=list(sp.basis))
    emaps = ext.structure.classical_maps()
    for n in sorted(set(maps) | set(emaps)):
        mine = maps[n].values if n in maps else {}
        theirs = emaps[n].values if n in emaps else {}
        for tup in sorted(set(mine) | set(theirs)):
            if mine.get(tup, {}) != theirs.get(tup, {}):
                rep.fail("derivation" if n == 1 else "leibniz", n, _names(sp, tup))
                break
    for n in sorted(set(L.anchors) | set(ext.anchors)):
        mine, theirs = L.anchors.get(n, {}), ext.anchors.get(n, {})
        for tup in sorted(set(mine) | set(theirs)):
            if mine.get(tup, {}) != theirs.get(tup, {}):
                rep.fail("anchor", n, _names(sp, tup))
                break
    _compat_and_structure(L, rep, arity_bound, gtuples)


def _check_general(L, rep, arity_bound):
    A, M, sp = L.base, L.module, L.space
    par = shifted_parities(sp)
    sd = [e - 1 for e in sp.degree]
    wmax = sp.weight_span()[1] if sp.dim else 0
    ktuples = lambda n: canonical_tuples(sp, n, wmax, par=par)
    _anchor_derivation_checks(L, rep, {n: list(tab) for n, tab in L.anchors.items()})
    # anchors are A-linear in each slot
    for n in sorted(L.anchors):
        done = False
        for r in range(A.dim):
            if r == A.unit or done:
                continue
            for x in range(sp.dim):
                rx = M.act_basis(r, x)
                for rest in ktuples(n - 1):
                    lhs = L.anchor_vectors([rx] + [{j: 1} for j in rest])
                    base = L.anchor_cols((x,) + rest)
                    s = _sgn(A.space.degree[r])
                    rhs = {i: vscale(A.mul({r: 1}, c), s) for i, c in base.items()}
                    rhs = {i: v for i, v in rhs.items() if v}
                    if lhs != rhs:
                        rep.fail("anchor", n, (A.space.basis[r],) + _names(sp, (x,) + rest))
                        done = True
                        break
                if done:
                    break
    # Leibniz along the anchor family (derivation rule for l_1)
    maps = L.structure.classical_maps()
    top = max(L.structure.max_arity(), L.max_anchor_arity() + 1)
    for n in range(1, top + 1):
        f = maps.get(n)
        tag = "derivation" if n == 1 else "leibniz"
        failed = False
        for r in range(A.dim):
            if r == A.unit or failed:
                continue
            dr = A.space.degree[r]
            for x in range(sp.dim):
                rx = M.act_basis(r, x)
                for rest in ktuples(n - 1):
                    yv = [{j: 1} for j in rest]
                    ysum = sum(sd[j] for j in rest)
                    lhs = f.eval_vectors([rx] + yv) if f is not None else {}
                    Dr = (A.d.cols if n == 1 else L.anchor_cols(rest)).get(r, {})
                    inner = M.act(Dr, {x: 1})
                    lyx = f.eval_basis((x,) + rest) if f is not None else {}
                    if lyx:
                        # l(y, x) = (-1)^{|x|' ysum} l(x, y)
                        s2 = _sgn(dr * (1 + ysum)) * _sgn(sd[x] * ysum)
                        vaddto(inner, M.act({r: 1}, lyx), s2)
                    rhs = vscale(inner, _sgn((dr + sd[x]) * ysum))
                    if lhs != rhs:
                        rep.fail(tag, n, (A.space.basis[r],) + _names(sp, (x,) + rest))
                        failed = True
                        break
                if failed:
                    break
    _compat_and_structure(L, rep, arity_bound, ktuples)


def _names(space, tup):
    return tuple(space.basis[j] for j in tup)


# filtrations

def _reweighted(L, weights, split=None):
    """Same algebroid with new weights on the module basis."""
    sp = L.space
    new = sp.reweighted(weights)
    if L.is_free():
        G = L.module.generators
        gw = [weights[L.module.generator_index(g)] for g in range(G.dim)]
        G2 = G.reweighted(gw)
        M = FreeModule(L.base, G2, list(new.basis))
    else:
        M = Module(L.base, new, {k: v for k, v in L.module.action.items()}, check=False)
    ells = {}
    for n, m in L.structure.ells.items():
        mm = SymMultiMap(n, new, new, m.degree_shift, -10 ** 6, m.values, check=False)
        w = mm.actual_min_weight()
        ells[n] = mm.with_min_weight(w if w is not None else 0)
    s = CurvedStructure("classical", new, ells)
    return Algebroid(L.base, M, s, L.anchors, gen_data=L.gen_data, split=split,
                     theta=L.theta)


def apply_filtration(L, kind, kernel=None):
    """Reweight a plain algebroid: trivial (all 0), hodge (all -1) or
    anchor (kernel generators 0, the rest -1).

    ``kernel`` lists generator names spanning ker R; by default the n-part
    of the recorded splitting is used.
    """
    sp = L.space
    if kind == "trivial":
        return _reweighted(L, [0] * sp.dim, L.split)
    if kind == "hodge":
        return _reweighted(L, [-1] * sp.dim, L.split)
    if kind != "anchor":
        raise InputError("unknown filtration kind %r" % (kind,))
    if not L.is_free():
        raise InputError("the anchor filtration needs a free module")
    M = L.module
    G = M.generators
    if kernel is not None:
        kern = [G.index(k) if isinstance(k, str) else k for k in kernel]
    elif L.split is not None:
        kern = list(L.split[1])
    else:
        kern = [g for g in range(G.dim)
                if not L.anchor_cols((M.generator_index(g),))]
    for g in kern:
        if L.anchor_cols((M.generator_index(g),)):
            raise InputError("generator %s is not in the kernel of the anchor"
                             % G.basis[g])
    comp = [g for g in range(G.dim) if g not in kern]
    # the anchor must map onto Der(A)
    n = L.base.dim
    ders = derivations(L.base)
    red = Reducer([_flat(L.anchor_cols((k,)), n) for k in range(sp.dim)])
    if red.rank != len(ders):
        raise InputError("the anchor is not surjective onto Der(A)")
    gw = {g: (0 if g in kern else -1) for g in range(G.dim)}
    weights = [gw[M.split(k)[1]] for k in range(sp.dim)]
    return _reweighted(L, weights, (comp, kern))


# Chevalley-Eilenberg algebras

class CEAlgebra(GradedMixedCdga):
    """CE algebra with its form basis (A-index, generator tuple) and the
    truncation used.  ``d_squared_zero`` is the cross-oracle flag."""

    __slots__ = ("algebroid", "forms", "form_index", "weight_bound", "arity_bound",
                 "total", "d_squared_zero")


def _form_name(A, G, a, U):
    if not U:
        return A.space.basis[a]
    body = ".".join(G.basis[g] + "*" for g in U)
    if a == A.unit:
        return body
    return A.space.basis[a] + "." + body


def _form_tuples(G, weight_bound, arity_bound, curved):
    gpar = shifted_parities(G)
    if arity_bound is None:
        if all(gpar):
            arity_bound = G.dim
        elif weight_bound is not None and all(w <= -1 for w in G.weight):
            arity_bound = weight_bound
        else:
            raise InputError("the CE algebra needs a weight bound (with all generator "
                             "weights <= -1) or an arity bound")
    elif curved and weight_bound is None and not all(gpar):
        raise InputError("arity truncation is not a quotient in the presence of curvature")
    out = []
    for p in range(0, arity_bound + 1):
        for U in canonical_tuples(G, p, par=gpar):
            w = -sum(G.weight[g] for g in U)
            if weight_bound is not None and w > weight_bound:
                continue
            out.append(U)
    return out, arity_bound


def chevalley_eilenberg(L, weight_bound=None, arity_bound=None):
    """A-multilinear forms on a free algebroid with the CE differential.

    The basis form (a, U) takes the value a on the canonical generator
    tuple U and vanishes on the others; forms have weight -sum w(g).
    """
    if not L.is_free() or L.gen_data is None:
        raise InputError("the CE algebra needs a free module given by generators")
    A, M = L.base, L.module
    G = M.generators
    gpar = shifted_parities(G)
    gsd = [e - 1 for e in G.degree]
    gen_ells, gen_anch = L.gen_data
    ext = _GenExtension(A, M, gen_ells, gen_anch)
    curved = bool(gen_ells.get(0))
    tuples, P = _form_tuples(G, weight_bound, arity_bound, curved)
    forms = [(a, U) for U in tuples for a in range(A.dim)]
    findex = {f: k for k, f in enumerate(forms)}
    tindex = {}
    for U in tuples:
        tindex.setdefault(len(U), []).append(U)
    names = [_form_name(A, G, a, U) for a, U in forms]
    fdeg = [A.space.degree[a] - sum(gsd[g] for g in U) for a, U in forms]
    fwt = [-sum(G.weight[g] for g in U) for a, U in forms]
    space = GradedSpace(names, fdeg, fwt)

    def value(a, U, V):
        """Value of the basis form (a, U) on a generator tuple V."""
        sign, srt = canonical(V, gpar)
        if not sign or srt != U:
            return {}
        return {a: sign}

    K = max(_gen_max_arity(gen_ells, gen_anch), 1)
    cols = {}
    for k, (a, U) in enumerate(forms):
        fd = fdeg[k]
        out = {}
        p = len(U)
        for q in range(max(p - 1, 0), p + K):
            for V in tindex.get(q, []):
                val = {}
                for S, rest, sgn in _subsets_with_sign(V, gpar):
                    gS = tuple(V[i] for i in S)
                    gR = tuple(V[i] for i in rest)
                    # anchor term R(g_S)(alpha(g_rest))
                    av = value(a, U, gR)
                    if av:
                        if not S:
                            D = A.d.cols
                        else:
                            D = ext.gen_anchor(gS)
                        if D:
                            s = sgn * _sgn(fd * sum(gsd[g] for g in gS))
                            for b, c in av.items():
                                vaddto(val, D.get(b, {}), c * s)
                    # bracket term alpha(l(g_S), g_rest)
                    lv = ext.gen_ell(len(S), gS)
                    for kk, c in lv.items():
                        b, g2 = M.split(kk)
                        av2 = value(a, U, (g2,) + gR)
                        if not av2:
                            continue
                        s = -_sgn(fd) * sgn * _sgn(A.space.degree[b] * fd)
                        for a2, c2 in av2.items():
                            vaddto(val, A.mul({b: 1}, {a2: 1}), c * c2 * s)
                for b, c in val.items():
                    j = findex.get((b, V))
                    if j is not None:
                        out[j] = c
        if out:
            cols[k] = out
    total = LinearMap(space, space, 1, -10 ** 6, cols, check=False)
    # shuffle product
    mult = {}
    for i, (a, U) in enumerate(forms):
        for j in range(i, len(forms)):
            b, U2 = forms[j]
            sign, V = canonical(U + U2, gpar)
            if not sign:
                continue
            if (A.unit, V) not in findex:
                continue
            bd = fdeg[j]
            val = {}
            for S in combinations(range(len(V)), len(U)):
                rest = [t for t in range(len(V)) if t not in S]
                gS = tuple(V[t] for t in S)
                gR = tuple(V[t] for t in rest)
                if gS != U or gR != U2:
                    continue
                order = list(S) + rest
                s = _perm_sign(order, V, gpar) * _sgn(bd * sum(gsd[g] for g in gS))
                vaddto(val, A.mul({a: 1}, {b: 1}), s)
            v = {}
            for c_idx, c in val.items():
                vaddto(v, {findex[(c_idx, V)]: c})
            if v:
                mult[(i, j)] = v
    comps = total.weight_components()
    d0 = LinearMap(space, space, 1, 0, total.weight_component(0).cols, check=False)
    delta = LinearMap(space, space, 1, 1,
                      (total - total.weight_component(0)).cols, check=False)
    if any(w < 0 for w in comps):
        raise InputError("the CE differential lowers weight; check the weights")
    B = CEAlgebra(space, findex[(A.unit, ())], mult, d0, delta)
    B.algebroid = L
    B.forms = forms
    B.form_index = findex
    B.weight_bound = weight_bound
    B.arity_bound = P
    B.total = total
    B.d_squared_zero = (total @ total).is_zero()
    return B


def _perm_sign(order, tup, par):
    sign = 1
    for x in range(len(order)):
        if not par[tup[order[x]]]:
            continue
        for y in range(x + 1, len(order)):
            if order[y] < order[x] and par[tup[order[y]]]:
                sign = -sign
    return sign


# Rees construction

def _weight_part(M, vec, wsum, p):
    """Entries of a module vector whose weight exceeds wsum by exactly p."""
    return {k: c for k, c in vec.items() if M.space.weight[k] - wsum == p}


def rees(L):
    """Adjoin theta (degree 1, weight +1) with
    l_n(theta^p, x) = p! l^p_{n-p}(x) and R_n(theta^p, x) = p! R^p_{n-p}(x)."""
    _require_free(L, "rees")
    if L.theta is not None:
        raise InputError("algebroid already carries a Rees generator")
    A, M = L.base, L.module
    G = M.generators
    gen_ells, gen_anch = L.gen_data
    nb = A.dim
    G2 = GradedSpace(list(G.basis) + ["theta"], list(G.degree) + [1],
                     list(G.weight) + [1])
    th = G.dim
    M2 = FreeModule(A, G2)

    def embed(v):
        return {M2.index(*M.split(k)): c for k, c in v.items()}

    ells, anch = {}, {}
    for n, tab in gen_ells.items():
        for U, v in tab.items():
            wsum = sum(G.weight[g] for g in U)
            parts = {}
            for k, c in v.items():
                p = M.space.weight[k] - wsum
                parts.setdefault(p, {})[k] = c
            for p, part in parts.items():
                if p < 0:
                    raise InputError("operation lowers weight")
                ells.setdefault(n + p, {})[U + (th,) * p] = vscale(embed(part),
                                                                    factorial(p))
    for n, tab in gen_anch.items():
        for U, cols in tab.items():
            p = -sum(G.weight[g] for g in U)
            if p < 0:
                if cols:
                    raise InputError("anchor is nonzero in positive weight")
                continue
            anch.setdefault(n + p, {})[U + (th,) * p] = {
                i: vscale(c, factorial(p)) for i, c in cols.items()}
    # canonical order: theta is the largest generator, so U + theta^p is sorted
    split = L.split
    return algebroid_from_generators(A, G2, ells, anch, split=split, theta=th)


def unrees(R):
    """Inverse of rees: l_m(x) = sum_p (1/p!) l_{m+p}(theta^p, x)."""
    _require_free(R, "unrees")
    if R.theta is None:
        raise InputError("algebroid carries no Rees generator")
    A, M2 = R.base, R.module
    G2 = M2.generators
    th = R.theta
    if th != G2.dim - 1:
        raise InputError("the Rees generator must be the last generator")
    G = GradedSpace(G2.basis[:th], G2.degree[:th], G2.weight[:th])
    M = FreeModule(A, G)
    gen_ells, gen_anch = R.gen_data
    ells, anch = {}, {}

    def strip(v):
        out = {}
        for k, c in v.items():
            a, g = M2.split(k)
            if g == th:
                raise InputError("operation has a component along theta")
            out[M.index(a, g)] = c
        return out

    for n, tab in gen_ells.items():
        for U, v in tab.items():
            p = sum(1 for g in U if g == th)
            x = U[:len(U) - p]
            if th in x:
                raise InputError("non-canonical Rees tuple")
            wsum = sum(G2.weight[g] for g in U)
            if any(M2.space.weight[k] != wsum for k in v):
                raise InputError("Rees operations must have weight exactly 0")
            vaddto(ells.setdefault(n - p, {}).setdefault(x, {}),
                   vscale(strip(v), _inv_fact(p)))
    for n, tab in gen_anch.items():
        for U, cols in tab.items():
            p = sum(1 for g in U if g == th)
            x = U[:len(U) - p]
            if n - p == 0:
                if cols:
                    raise InputError("theta^p has a nonzero anchor")
                continue
            if sum(G2.weight[g] for g in U) != 0:
                raise InputError("Rees anchors must have weight exactly 0")
            tgt = anch.setdefault(n - p, {}).setdefault(x, {})
            for i, c in cols.items():
                vaddto(tgt.setdefault(i, {}), vscale(c, _inv_fact(p)))
    return algebroid_from_generators(A, G, ells, anch, split=R.split)


def _inv_fact(p):
    from fractions import Fraction
    return Fraction(1, factorial(p))


# curv / uncurv

def _check_split(L):
    _require_free(L, "curv")
    if L.split is None:
        raise InputError("curv needs a splitting into t and n generators")
    t_gens, n_gens = L.split
    M = L.module
    G = M.generators
    if sorted(list(t_gens) + list(n_gens)) != list(range(G.dim)):
        raise InputError("the splitting must partition the generators")
    if any(G.weight[g] > -1 for g in t_gens):
        raise InputError("t generators must have weight <= -1")
    if any(G.weight[g] != 0 for g in n_gens):
        raise InputError("n generators must have weight 0")
    tset = set(t_gens)
    gen_ells, gen_anch = L.gen_data
    for n, tab in gen_ells.items():
        for U, v in tab.items():
            if any(g not in tset for g in U):
                if any(M.split(k)[1] in tset for k in v):
                    raise InputError("projection to t is not structure-preserving")
    for n, tab in gen_anch.items():
        for U, cols in tab.items():
            if any(g not in tset for g in U) and cols:
                raise InputError("anchor does not factor through t")
    return list(t_gens), list(n_gens)


def _sub_algebroid(L, gens):
    """Restriction to the generators in ``gens`` (projecting outputs)."""
    A, M = L.base, L.module
    G = M.generators
    sub = GradedSpace([G.basis[g] for g in gens], [G.degree[g] for g in gens],
                      [G.weight[g] for g in gens])
    pos = {g: k for k, g in enumerate(gens)}
    M2 = FreeModule(A, sub)
    gen_ells, gen_anch = L.gen_data
    ells, anch = {}, {}
    for n, tab in gen_ells.items():
        for U, v in tab.items():
            if all(g in pos for g in U):
                w = {}
                for k, c in v.items():
                    a, g = M.split(k)
                    if g in pos:
                        w[M2.index(a, pos[g])] = c
                if w:
                    ells.setdefault(n, {})[tuple(pos[g] for g in U)] = w
    for n, tab in gen_anch.items():
        for U, cols in tab.items():
            if all(g in pos for g in U):
                anch.setdefault(n, {})[tuple(pos[g] for g in U)] = cols
    return algebroid_from_generators(A, sub, ells, anch)


def _curv_sign(gsd_t, U, n_sum, out_sd, adeg=0):
    # adeg: degree of the A-coefficient of the output, which passes the t's
    t_sum = sum(gsd_t[g] for g in U)
    return _sgn(CURV_NT * n_sum * t_sum + CURV_OT * out_sd * t_sum + adeg * t_sum)


def _needed_weight(L, t_gens, n_gens):
    """(largest form weight of an n-valued component, largest weight
    raised by a t-valued component or anchor)."""
    G = L.module.generators
    M = L.module
    gen_ells, gen_anch = L.gen_data
    tset = set(t_gens)
    need, raise_t = 0, 0
    for n, tab in gen_ells.items():
        for U, v in tab.items():
            tw = -sum(G.weight[g] for g in U if g in tset)
            for k in v:
                g = M.split(k)[1]
                if g in tset:
                    raise_t = max(raise_t, G.weight[g] + tw)
                else:
                    need = max(need, tw)
    for n, tab in gen_anch.items():
        for U in tab:
            raise_t = max(raise_t, -sum(G.weight[g] for g in U))
    return need, raise_t


def default_weight_bound(L):
    """Smallest truncation seeing every relation of curv(L): a relation
    composes two components, so its form weight is bounded by the sum."""
    t_gens, n_gens = _check_split(L)
    need, raise_t = _needed_weight(L, t_gens, n_gens)
    return max(1, need + max(need, raise_t))


class CurvLayout:
    """Generator bookkeeping shared by curv, uncurv and curv_morphism."""

    def __init__(self, L_gens, t_gens, n_gens, t_alg, B):
        self.L_gens = L_gens
        self.t_gens = list(t_gens)
        self.n_gens = list(n_gens)
        self.t_alg = t_alg
        self.B = B


def curv(L, weight_bound=None):
    """Graded-mixed structure over B = CE(t) on B (x)_A n.

    ``l_p(n_1..n_p)`` is the n-valued form t -> l(t, n)|_n; l_1 is
    extended as a derivation over the differential of B, the others
    B-multilinearly.
    """
    t_gens, n_gens = _check_split(L)
    need = _needed_weight(L, t_gens, n_gens)[0]
    T = _sub_algebroid(L, t_gens)
    if weight_bound is None:
        weight_bound = default_weight_bound(L)
    elif weight_bound < need:
        raise ResourceError("weight bound %d cuts off components of weight %d"
                            % (weight_bound, need))
    B = chevalley_eilenberg(T, weight_bound=weight_bound)
    layout = CurvLayout(L.module.generators, t_gens, n_gens, T, B)
    return _curv_on(L, layout)


def _curv_on(L, layout):
    A, M = L.base, L.module
    B = layout.B
    G = M.generators
    t_gens, n_gens = layout.t_gens, layout.n_gens
    tpos = {g: k for k, g in enumerate(t_gens)}
    npos = {g: k for k, g in enumerate(n_gens)}
    N = GradedSpace([G.basis[g] for g in n_gens], [G.degree[g] for g in n_gens],
                    [0] * len(n_gens))
    MB = FreeModule(B, N)
    MB.layout = layout
    ext = _GenExtension(A, M, *L.gen_data)
    gsd = [e - 1 for e in G.degree]
    Tgens = layout.t_alg.module.generators
    gsd_t = [e - 1 for e in Tgens.degree]
    t_tuples = sorted({U for _, U in B.forms}, key=lambda U: (len(U), U))
    N_ar = _gen_max_arity(*L.gen_data)

    def gen_value(ntup):
        n_sum = sum(gsd[n_gens[j]] for j in ntup)
        out = {}
        for U in t_tuples:
            if len(U) + len(ntup) > N_ar:
                continue
            full = tuple(t_gens[g] for g in U) + tuple(n_gens[j] for j in ntup)
            v = ext.gen_ell(len(full), full)
            for k, c in v.items():
                a, g = M.split(k)
                if g not in npos:
                    continue
                s = _curv_sign(gsd_t, U, n_sum, gsd[g], A.space.degree[a])
                f = B.form_index.get((a, U))
                if f is None:
                    raise ResourceError("component beyond the weight bound")
                vaddto(out, {MB.index(f, npos[g]): c * s})
        return out

    tact = lambda a, v: MB.act({a: 1}, v)
    ells = {}
    npar = shifted_parities(N)
    top = max(N_ar, 1)
    for p in range(0, top + 1):
        if p == 1:
            gv = {j: gen_value((j,)) for j in range(N.dim)}
            lin = extend_linear(MB, MB, gv, 1, 0, D=B.total_differential())
            m = linear_as_multimap(lin)
            if not m.is_zero():
                ells[1] = m
            continue
        vals = extend_multilinear(MB, p, 1, gen_value, tact)
        if vals:
            ells[p] = SymMultiMap(p, MB.space, MB.space, 2 - p,
                                  1 if p == 0 else 0, vals, check=False)
    s = CurvedStructure("classical", MB.space, ells, base=B, module=MB, check=False)
    return unblend(s)


def uncurv(g):
    """Inverse of curv: read the algebroid back from the generator values."""
    MB = g.module
    layout = getattr(MB, "layout", None)
    if layout is None or not isinstance(g.base, CEAlgebra):
        raise InputError("structure is not over a CE algebra of the form B (x) n")
    rep = Report()
    _check_over_base(g, rep)
    if not rep.ok:
        rel, ar, where = rep.first()
        raise InputError("structure is not B-multilinear: %s at %s" % (rel, where))
    B = layout.B
    T = layout.t_alg
    A = B.algebroid.base
    Lg = layout.L_gens
    t_gens, n_gens = layout.t_gens, layout.n_gens
    M = FreeModule(A, Lg)
    gsd = [e - 1 for e in Lg.degree]
    Tgens = T.module.generators
    gsd_t = [e - 1 for e in Tgens.degree]
    Lpar = shifted_parities(Lg)
    maps = g.classical_maps()
    ells, anch = {}, {}

    def store(n, full, vec):
        sign, srt = canonical(full, Lpar)
        if not sign:
            return
        vaddto(ells.setdefault(n, {}).setdefault(srt, {}), vec, sign)

    # t-part from the CE source
    TM = T.module
    t_ells, t_anch = T.gen_data
    for n, tab in t_ells.items():
        for U, v in tab.items():
            vec = {}
            for k, c in v.items():
                a, gg = TM.split(k)
                vec[M.index(a, t_gens[gg])] = c
            store(n, tuple(t_gens[x] for x in U), vec)
    for n, tab in t_anch.items():
        for U, cols in tab.items():
            full = tuple(t_gens[x] for x in U)
            sign, srt = canonical(full, Lpar)
            anch.setdefault(n, {})[srt] = {i: vscale(c, sign) for i, c in cols.items()}
    npar = shifted_parities(MB.generators)
    top = max(maps, default=0)
    for p in range(0, top + 1):
        m = maps.get(p)
        if m is None:
            continue
        for ntup in canonical_tuples(MB.generators, p, par=npar):
            val = m.eval_basis(tuple(MB.generator_index(j) for j in ntup))
            n_sum = sum(gsd[n_gens[j]] for j in ntup)
            for k, c in val.items():
                f, j2 = MB.split(k)
                a, U = B.forms[f]
                gout = n_gens[j2]
                s = _curv_sign(gsd_t, U, n_sum, gsd[gout], A.space.degree[a])
                full = tuple(t_gens[x] for x in U) + tuple(n_gens[j] for j in ntup)
                store(len(full), full, {M.index(a, gout): c * s})
    ells = {n: {t: v for t, v in tab.items() if v} for n, tab in ells.items()}
    out = algebroid_from_generators(A, Lg, ells, anch, split=(t_gens, n_gens))
    return out


# infinity-morphisms of split algebroids over t

def check_algebroid_morphism(phi, L, H, arity_bound=None):
    """Infinity-morphism of algebroids over t: A-multilinear components,
    strict over t, and the L-infinity relations."""
    rep = Report()
    _check_over_t(phi, L, H, rep)
    for n, m in phi.classical_maps().items():
        if n == 0:
            continue
        bad = check_multilinear(m, L.module, lambda a, v: H.module.act({a: 1}, v))
        if bad:
            rep.fail("multilinearity", n, bad)
    kw = {} if arity_bound is None else {"arity_bound": arity_bound}
    r2 = check_infinity_morphism(phi, **kw)
    for rel, ar, where in r2.failures:
        rep.fail(rel, ar, where)
    rep.checked_up_to = r2.checked_up_to
    rep.complete = r2.complete
    return rep


def _check_over_t(phi, L, H, rep=None):
    tL, nL = _check_split(L)
    tH, nH = _check_split(H)
    GL, GH = L.module.generators, H.module.generators
    if [GL.basis[g] for g in tL] != [GH.basis[g] for g in tH]:
        raise InputError("algebroids are not split over the same t")
    ML, MH = L.module, H.module
    tmap = dict(zip(tL, tH))
    tHset = set(tH)
    maps = phi.classical_maps()
    problems = []
    for n, m in maps.items():
        for tup, v in m.values.items():
            gens = [ML.split(k) for k in tup]
            if any(a != L.base.unit for a, _ in gens):
                continue
            tpart = {k: c for k, c in v.items() if MH.split(k)[1] in tHset}
            if n == 1 and gens[0][1] in tmap:
                want = {MH.generator_index(tmap[gens[0][1]]): 1}
                if tpart != want:
                    problems.append(tup)
            elif tpart:
                problems.append(tup)
    for tL_g in tL:
        k = ML.generator_index(tL_g)
        m1 = maps.get(1)
        v = m1.eval_basis((k,)) if m1 is not None else {}
        tpart = {kk: c for kk, c in v.items() if MH.split(kk)[1] in tHset}
        if tpart != {MH.generator_index(tmap[tL_g]): 1}:
            problems.append((k,))
    if problems:
        if rep is None:
            raise InputError("morphism is not strict over t")
        rep.fail("over-t", 1, _names(L.space, problems[0]))
    return tL, nL, tH, nH


def curv_morphism(phi, L, H, gL=None, gH=None):
    """B-multilinear infinity-morphism curv(L) ~> curv(H) with
    phi_p(n_1..n_p) the n-valued form t -> Phi(t, n)|_n."""
    rep = Report()
    tL, nL, tH, nH = _check_over_t(phi, L, H, rep)
    if not rep.ok:
        raise InputError("morphism is not strict over t")
    if gL is None:
        gL = curv(L)
    if gH is None:
        gH = curv(H, weight_bound=gL.base.weight_bound)
    B = gL.base
    if gH.base is not B and gH.base != B:
        raise InputError("source and target live over different CE algebras")
    MBL, MBH = gL.module, gH.module
    layout = MBL.layout
    ML, MH = L.module, H.module
    GL, GH = ML.generators, MH.generators
    gsdL = [e - 1 for e in GL.degree]
    gsdH = [e - 1 for e in GH.degree]
    gsd_t = [e - 1 for e in layout.t_alg.module.generators.degree]
    nHpos = {g: k for k, g in enumerate(nH)}
    t_tuples = sorted({U for _, U in B.forms}, key=lambda U: (len(U), U))
    maps = phi.classical_maps()
    Nf = max(maps, default=0)

    def gen_value(ntup):
        n_sum = sum(gsdL[nL[j]] for j in ntup)
        out = {}
        for U in t_tuples:
            q = len(U) + len(ntup)
            m = maps.get(q)
            if m is None:
                continue
            full = tuple(ML.generator_index(tL[x]) for x in U) + \
                tuple(ML.generator_index(nL[j]) for j in ntup)
            v = m.eval_basis(full)
            for k, c in v.items():
                a, g = MH.split(k)
                if g not in nHpos:
                    continue
                s = _curv_sign(gsd_t, U, n_sum, gsdH[g], L.base.space.degree[a])
                f = B.form_index.get((a, U))
                if f is None:
                    raise ResourceError("component beyond the weight bound")
                vaddto(out, {MBH.index(f, nHpos[g]): c * s})
        return out

    tact = lambda a, v: MBH.act({a: 1}, v)
    comps = {}
    for p in range(0, Nf + 1):
        if p == 1:
            gv = {j: gen_value((j,)) for j in range(len(nL))}
            lin = extend_linear(MBL, MBH, gv, 0, 0)
            m = linear_as_multimap(lin)
        else:
            vals = extend_multilinear(MBL, p, 0, gen_value, tact)
            m = SymMultiMap(p, MBL.space, MBH.space, 1 - p, 0, vals, check=False)
        if not m.is_zero():
            comps[p] = m.with_min_weight(1 if p == 0 else 0)
    return _from_classical_maps(gL, gH, comps)


def compose_algebroid_morphisms(psi, phi, arity_bound=None):
    from .curvedalg import compose_infinity_morphisms
    kw = {} if arity_bound is None else {"arity_bound": arity_bound}
    return compose_infinity_morphisms(psi, phi, **kw)


# essential image

def check_weight_zero_generation(g):
    """Whether M_0 (x)_{B_0} B -> M is bijective, piece by piece."""
    M = g.module
    B = M.algebra
    sp, bs = M.space, B.space
    m0 = [x for x in range(sp.dim) if sp.weight[x] == 0]
    b0 = [b for b in range(bs.dim) if bs.weight[b] == 0]
    pairs = [(x, b) for x in m0 for b in range(bs.dim)]
    pidx = {p: k for k, p in enumerate(pairs)}
    # multiplication map, b acting on the left
    image = []
    for x, b in pairs:
        s = _sgn(bs.degree[b] * sp.degree[x])
        image.append(vscale(M.act({b: 1}, {x: 1}), s))
    # relations (b0 x) (x) b - x (x) (b0 b) written with the right action
    rels = []
    for x in m0:
        for c in b0:
            cx = M.act({c: 1}, {x: 1})
            for b in range(bs.dim):
                v = {}
                s = _sgn(bs.degree[c] * sp.degree[x])
                for y, coef in cx.items():
                    if (y, b) in pidx:
                        vaddto(v, {pidx[(y, b)]: coef * s})
                for e, coef in B.mul({c: 1}, {b: 1}).items():
                    vaddto(v, {pidx[(x, e)]: -coef})
                if v:
                    rels.append(v)
    quotient_dim = len(pairs) - rank(rels)
    img_rank = rank(image)
    return img_rank == sp.dim and quotient_dim == sp.dim
