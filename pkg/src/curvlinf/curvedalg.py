"""Curved L-infinity structures, infinity-morphisms and homotopy transfer.

Everything is written on the suspension: l_n and the differential have
shifted degree 1 and are graded symmetric, infinity-morphism components have
shifted degree 0, and all signs are Koszul signs of shifted degrees.  The
structure equation in this convention reads

    sum_{p+q=n+1} sum_{|S|=q} eps(S) l_p(l_q(x_S), x_rest) = 0

(plus the d-terms in the mixed flavors), with no further signs.
"""

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InputError, ResourceError
from .gradedcore import GradedSpace, LinearMap
from .linalg import vaddto, vscale
from .modules import check_derivation, check_linear_over, check_multilinear
from .multilinear import (Family, IncompleteData, SymMultiMap, _sum_insertions,
                          canonical, canonical_tuples, inv_factorial,
                          linear_as_multimap, multimap_as_linear, pushforward,
                          set_partitions, shifted_parities)
from .operadcheck import expand_structure_equation, is_leaf, tree_eval_sign

FLAVORS = ("classical", "mixed", "graded-mixed")
DEFAULT_ARITY_BOUND = 4
# sign in front of h on internal edges of transfer trees (for i p - 1 = d h + h d)
TRANSFER_SIGN = 1


def required_weight(flavor, n):
    """Smallest weight an operation l_n may raise in the given flavor."""
    if n == 0:
        return 1
    if n == 1 and flavor != "classical":
        return 1
    return 0


def _map_weight(m):
    w = m.actual_min_weight()
    return w


class CurvedStructure:
    """Operations l_n on a graded space (plus d in the mixed flavors).

    ``known`` is None when the family is exact (l_n = 0 beyond the stored
    arities) and otherwise the largest arity whose component is known.
    ``base`` and ``module`` describe the structure over a graded mixed cdga,
    ``module`` being a FreeModule whose k-space is ``space``.
    """

    __slots__ = ("flavor", "space", "ells", "d", "known", "base", "module")

    def __init__(self, flavor, space, ells, d=None, known=None, base=None,
                 module=None, check=True):
        if flavor not in FLAVORS:
            raise InputError("unknown flavor %r" % (flavor,))
        self.flavor = flavor
        self.space = space
        self.ells = {n: m for n, m in sorted(ells.items())
                     if m is not None and not m.is_zero()}
        if flavor == "classical":
            if d is not None and not d.is_zero():
                raise InputError("classical structures carry no separate d")
            d = None
        elif d is None:
            d = LinearMap.zero(space, space, 1, 0)
        self.d = d
        self.known = known
        self.base = base
        self.module = module
        if (base is None) != (module is None):
            raise InputError("a base cdga needs a module and vice versa")
        if check:
            self._validate()

    def _validate(self):
        sp = self.space
        for n, m in self.ells.items():
            if n < 0:
                raise InputError("negative arity %d" % n)
            if m.arity != n:
                raise InputError("l_%d stored with arity %d" % (n, m.arity))
            if m.source != sp or m.target != sp:
                raise InputError("l_%d must act on the structure's space" % n)
            if m.degree_shift != 2 - n:
                raise InputError("l_%d must have degree %d" % (n, 2 - n))
            if self.known is not None and n > self.known:
                raise InputError("l_%d lies beyond the known arity" % n)
            w = _map_weight(m)
            req = required_weight(self.flavor, n)
            if w is not None and w < req:
                raise InputError("l_%d raises weight by %d, needs at least %d"
                                 % (n, w, req), "l_%d" % n)
        if self.d is not None:
            d = self.d
            if d.source != sp or d.target != sp or d.degree_shift != 1:
                raise InputError("d must be a degree-1 endomorphism")
            comps = d.weight_components()
            if any(k < 0 for k in comps):
                raise InputError("d must not lower weight", "d")
            if self.flavor == "graded-mixed" and any(k != 0 for k in comps):
                raise InputError("graded-mixed d must have weight exactly 0", "d")
        if self.module is not None and self.module.space != sp:
            raise InputError("module space differs from the structure's space")

    # access

    def ell(self, n):
        m = self.ells.get(n)
        if m is None and self.known is not None and n > self.known:
            raise IncompleteData(n)
        return m

    def max_arity(self):
        return max(self.ells, default=-1)

    def component(self, n, p):
        """Weight-p part l_n^p of l_n."""
        m = self.ells.get(n)
        if m is None:
            return SymMultiMap.zero(n, self.space, self.space, 2 - n, p)
        return m.weight_component(p)

    def classical_maps(self):
        """l'_n with l'_1 = d + l_1."""
        maps = dict(self.ells)
        if self.d is not None and not self.d.is_zero():
            dm = linear_as_multimap(self.d.with_min_weight(0))
            maps[1] = dm + maps[1] if 1 in maps else dm
            maps[1] = maps[1].with_min_weight(0)
        return maps

    def family(self):
        return Family(self.classical_maps(), self.space, self.space, 2,
                      known=self.known)

    def perturbation_family(self):
        """The l_n without d (for the mixed flavors)."""
        return Family(dict(self.ells), self.space, self.space, 2, known=self.known)

    def is_uncurved(self):
        return 0 not in self.ells

    def __eq__(self, other):
        return (isinstance(other, CurvedStructure) and self.flavor == other.flavor
                and self.space == other.space and self.ells == other.ells
                and self.d == other.d and self.known == other.known
                and self.base == other.base)

    def __hash__(self):
        return hash((self.flavor, self.space))

    def __repr__(self):
        return "CurvedStructure(%s, dim %d, arities %s)" % (
            self.flavor, self.space.dim, sorted(self.ells))

    def replace(self, **kw):
        args = dict(flavor=self.flavor, space=self.space, ells=self.ells, d=self.d,
                    known=self.known, base=self.base, module=self.module)
        args.update(kw)
        return CurvedStructure(**args)


def zero_structure(flavor="mixed", space=None, base=None, module=None):
    if space is None:
        space = GradedSpace([], [], [])
    return CurvedStructure(flavor, space, {}, base=base, module=module)


# reports

@dataclass
class Report:
    ok: bool = True
    failures: list = field(default_factory=list)   # (relation, arity, tuple)
    arities: dict = field(default_factory=dict)    # arity -> bool
    checked_up_to: int = -1
    complete: bool = True

    def __bool__(self):
        return self.ok

    def fail(self, relation, arity, where):
        self.ok = False
        self.failures.append((relation, arity, where))
        if arity is not None:
            self.arities[arity] = False

    def first(self):
        return self.failures[0] if self.failures else None

    def summary(self):
        if self.ok:
            return "ok (arity <= %d%s)" % (self.checked_up_to,
                                           "" if self.complete else ", truncated")
        rel, ar, where = self.failures[0]
        return "failed: %s at %s" % (rel, where)


# tree evaluation

@lru_cache(maxsize=None)
def _equation_terms(n, flavor):
    op_flavor = "classical" if flavor == "classical" else "mixed"
    x = expand_structure_equation(n, op_flavor, "shifted")
    return tuple(x.sorted_terms())


def _labels(t, acc):
    if is_leaf(t):
        return acc
    acc.add(t[0])
    for c in t[1]:
        _labels(c, acc)
    return acc


def _eval_tree(t, tup, maps):
    if is_leaf(t):
        return {tup[t - 1]: 1}
    lab, ch = t
    vals = []
    for c in ch:
        v = _eval_tree(c, tup, maps)
        if not v:
            return {}
        vals.append(v)
    m = maps[lab]
    if lab == "d":
        return m.apply(vals[0])
    return m.eval_vectors(vals)


def structure_equation_value(s, tup, maps=None):
    """Left-hand side of the arity-len(tup) structure equation at a basis tuple."""
    n = len(tup)
    if maps is None:
        maps = dict(s.ells)
        if s.flavor != "classical":
            maps["d"] = s.d
        else:
            maps = s.classical_maps()
    sdeg = [s.space.degree[j] - 1 for j in tup]
    out = {}
    for t, c in _equation_terms(n, s.flavor):
        labs = _labels(t, set())
        if any(lab not in maps for lab in labs):
            continue
        v = _eval_tree(t, tup, maps)
        if v:
            vaddto(out, v, c * tree_eval_sign(t, sdeg, "shifted"))
    return out


def _names(space, tup):
    return tuple(space.basis[j] for j in tup)


def classical_equation_value(maps, tup, par):
    """sum_S eps(S) l'(l'(x_S), x_rest) on a canonical tuple, visiting only
    the stored nonzero values of the inner operation.

    Repeated entries are even, so every realisation of a sub-multiset by
    positions carries the same sign and they are counted by binomials.
    """
    from collections import Counter
    from math import comb
    n = len(tup)
    cnt = Counter(tup)
    out = {}
    for q, inner in maps.items():
        outer = maps.get(n - q + 1)
        if outer is None or q > n:
            continue
        for K, v in inner.values.items():
            kc = Counter(K)
            if any(kc[x] > cnt[x] for x in kc):
                continue
            mult = 1
            for x, k in kc.items():
                mult *= comb(cnt[x], k)
            # positions: first occurrences of each element of K
            used = Counter()
            S = []
            for i, x in enumerate(tup):
                if used[x] < kc.get(x, 0):
                    used[x] += 1
                    S.append(i)
            Sset = set(S)
            rest = [i for i in range(n) if i not in Sset]
            sign = 1
            order = S + rest
            for a in range(n):
                if not par[tup[order[a]]]:
                    continue
                for b in range(a + 1, n):
                    if order[b] < order[a] and par[tup[order[b]]]:
                        sign = -sign
            val = outer.eval_vectors([v] + [{tup[i]: 1} for i in rest])
            if val:
                vaddto(out, val, sign * mult)
    return out


def _degree_ok(space, tup, out_shift, degrees):
    return sum(space.degree[j] - 1 for j in tup) + out_shift in degrees


def _structure_arity_range(s):
    N = s.max_arity()
    if s.known is not None:
        return s.known - 1, False
    if N < 0:
        return -1, True
    top = 2 * N - 1
    if s.flavor != "classical":
        top = max(top, N)
    return top, True


def check_structure(s, arity_bound=None):
    """Verify the structure equations (and the axioms over a base)."""
    rep = Report()
    sp = s.space
    if s.flavor != "classical" and not (s.d @ s.d).is_zero():
        rep.fail("d squared", 1, ())
    top, exact = _structure_arity_range(s)
    if arity_bound is not None and top > arity_bound:
        top = arity_bound
        exact = False
    rep.complete = exact
    if s.base is not None:
        _check_over_base(s, rep)
        indices = s.module.generator_indices()
    else:
        indices = None
    degrees = set(sp.degree)
    wmax = sp.weight_span()[1] if sp.dim else 0
    maps = dict(s.ells)
    if s.flavor != "classical":
        maps["d"] = s.d
    for n in range(0, top + 1):
        ok_n = True
        for tup in _tuples(sp, n, wmax, indices):
            if not _degree_ok(sp, tup, 3, degrees):
                continue
            v = structure_equation_value(s, tup, maps)
            if v:
                rep.fail("arity %d" % n, n, _names(sp, tup))
                ok_n = False
                break
        rep.arities.setdefault(n, ok_n)
    rep.checked_up_to = top
    return rep


def _tuples(sp, n, wmax, indices=None):
    if indices is None:
        return canonical_tuples(sp, n, wmax)
    sub = GradedSpace([sp.basis[j] for j in indices], [sp.degree[j] for j in indices],
                      [sp.weight[j] for j in indices])
    return [tuple(indices[k] for k in t) for t in canonical_tuples(sub, n, wmax)]


def _check_over_base(s, rep):
    B, M = s.base, s.module
    if s.flavor == "classical":
        D1 = B.total_differential()
    else:
        D1 = B.delta
        bad = check_derivation(linear_as_multimap(s.d), M, B.d)
        if bad:
            rep.fail("derivation", 1, ("d",) + bad)
    for n, m in s.classical_maps().items() if s.flavor == "classical" else s.ells.items():
        if n == 1:
            bad = check_derivation(m, M, D1)
            if bad:
                rep.fail("derivation", 1, bad)
        else:
            bad = check_multilinear(m, M)
            if bad:
                rep.fail("multilinearity", n, bad)
    if s.flavor != "classical" and 1 not in s.ells:
        zero = SymMultiMap.zero(1, s.space, s.space, 1, 1)
        bad = check_derivation(zero, M, D1)
        if bad:
            rep.fail("derivation", 1, bad)


# flavor conversions

def blend(s):
    if s.flavor == "classical":
        raise InputError("blend expects a mixed or graded-mixed structure")
    return CurvedStructure("classical", s.space, s.classical_maps(), known=s.known,
                           base=s.base, module=s.module)


def unblend(s):
    if s.flavor != "classical":
        raise InputError("unblend expects a classical structure")
    ells = dict(s.ells)
    d = LinearMap.zero(s.space, s.space, 1, 0)
    if 1 in ells:
        l1 = ells.pop(1)
        d0 = l1.weight_component(0)
        d = multimap_as_linear(d0).with_min_weight(0)
        rest = (l1 - d0).with_min_weight(1)
        if not rest.is_zero():
            ells[1] = rest
    return CurvedStructure("graded-mixed", s.space, ells, d=d, known=s.known,
                           base=s.base, module=s.module)


def tot_structure(s):
    if s.flavor != "graded-mixed":
        raise InputError("tot expects a graded-mixed structure")
    return s.replace(flavor="mixed")


def split_structure(s):
    """Mixed structure with weight-0 d as a graded-mixed one."""
    if s.flavor != "mixed":
        raise InputError("split expects a mixed structure")
    if any(k != 0 for k in s.d.weight_components()):
        raise InputError("d has positive-weight components; use blend then unblend")
    return s.replace(flavor="graded-mixed")


# infinity-morphisms

class InfinityMorphism:
    """Components phi_n (shifted degree 0) plus a linear part in the mixed
    flavors.  For classical structures ``comps[1]`` is phi'_1, which contains
    the linear part."""

    __slots__ = ("source", "target", "comps", "lin", "known")

    def __init__(self, source, target, comps, lin=None, known=None, check=True):
        self.source = source
        self.target = target
        self.comps = {n: m for n, m in sorted(comps.items())
                      if m is not None and not m.is_zero()}
        if source.flavor == "classical":
            if lin is not None:
                raise InputError("classical morphisms keep their linear part in phi'_1")
        elif lin is None:
            lin = LinearMap.zero(source.space, target.space, 0, 0)
        self.lin = lin
        self.known = known
        if check:
            self._validate()

    def _validate(self):
        g, h = self.source, self.target
        if g.flavor != h.flavor:
            raise InputError("flavor mismatch: %s vs %s" % (g.flavor, h.flavor))
        if g.base != h.base:
            raise InputError("source and target live over different bases")
        for n, m in self.comps.items():
            if m.arity != n or m.source != g.space or m.target != h.space:
                raise InputError("phi_%d has the wrong shape" % n)
            if m.degree_shift != 1 - n:
                raise InputError("phi_%d must have degree %d" % (n, 1 - n))
            w = m.actual_min_weight()
            req = 1 if n == 0 or (n == 1 and g.flavor != "classical") else 0
            if w is not None and w < req:
                raise InputError("phi_%d raises weight by %d, needs %d" % (n, w, req))
        if self.lin is not None:
            f = self.lin
            if f.source != g.space or f.target != h.space or f.degree_shift != 0:
                raise InputError("linear part has the wrong shape")
            w = f.actual_min_weight()
            if w is not None and w < 0:
                raise InputError("linear part lowers weight")

    def classical_maps(self):
        maps = dict(self.comps)
        if self.lin is not None and not self.lin.is_zero():
            lm = linear_as_multimap(self.lin.with_min_weight(0))
            maps[1] = (lm + maps[1] if 1 in maps else lm).with_min_weight(0)
        return maps

    def family(self):
        return Family(self.classical_maps(), self.source.space, self.target.space, 1,
                      known=self.known)

    def component(self, n):
        return self.comps.get(n)

    def max_arity(self):
        return max(self.classical_maps(), default=-1)

    def __eq__(self, other):
        return (isinstance(other, InfinityMorphism) and self.source == other.source
                and self.target == other.target and self.comps == other.comps
                and self.lin == other.lin and self.known == other.known)

    def __hash__(self):
        return hash((self.source, self.target))

    def __repr__(self):
        return "InfinityMorphism(%s, arities %s)" % (self.source.flavor, sorted(self.comps))


def identity_morphism(s):
    sp = s.space
    one = LinearMap.identity(sp)
    if s.flavor == "classical":
        return InfinityMorphism(s, s, {1: linear_as_multimap(one)})
    return InfinityMorphism(s, s, {}, lin=one)


def strict_morphism(source, target, f):
    if source.flavor == "classical":
        return InfinityMorphism(source, target, {1: linear_as_multimap(f)})
    return InfinityMorphism(source, target, {}, lin=f)


def _from_classical_maps(source, target, maps, known=None, lin=None):
    """Split phi'_1 = lin + phi_1 for the mixed flavors.

    Without an explicit linear part the weight-0 piece of phi'_1 is used.
    """
    maps = dict(maps)
    if source.flavor == "classical":
        return InfinityMorphism(source, target, maps, known=known)
    m1 = maps.pop(1, SymMultiMap.zero(1, source.space, target.space, 0, 0))
    if lin is None:
        low = m1.weight_component(0)
        lin = multimap_as_linear(low).with_min_weight(0)
    rest = (m1 - linear_as_multimap(lin)).with_min_weight(1)
    if not rest.is_zero():
        maps[1] = rest
    return InfinityMorphism(source, target, maps, lin=lin.with_min_weight(0), known=known)


def _relation_value(phi, tup, lhs_maps, gfam, hfam, par, tw_max):
    """sum_S phi'(l^g(x_S), x_rest) - pushforward(l^h, phi')(x)."""
    n = len(tup)
    out = {}
    for S, rest, sign in _subsets_with_sign(tup, par):
        lq = gfam.get(len(S))
        if lq is None:
            continue
        inner = lq.eval_basis(tuple(tup[i] for i in S))
        if not inner:
            continue
        f = lhs_maps.get(n - len(S) + 1)
        if f is None:
            if phi.known is not None and n - len(S) + 1 > phi.known:
                raise IncompleteData(n - len(S) + 1)
            continue
        v = f.eval_vectors([inner] + [{tup[i]: 1} for i in rest])
        if v:
            vaddto(out, v, sign)
    ffam = Family(lhs_maps, phi.source.space, phi.target.space, 1, known=phi.known)
    G0 = lhs_maps.get(0)
    G0v = G0.values.get((), {}) if G0 is not None else {}

    def G_eval(block):
        f = ffam.get(len(block))
        return f.eval_basis(block) if f is not None else {}

    rhs = pushforward(hfam, G_eval, G0v, tup, par, tw_max)
    vaddto(out, rhs, -1)
    return out


def _subsets_with_sign(tup, par):
    from itertools import combinations
    n = len(tup)
    for q in range(0, n + 1):
        for S in combinations(range(n), q):
            rest = [i for i in range(n) if i not in S]
            order = list(S) + rest
            sign = 1
            for a in range(n):
                if not par[tup[order[a]]]:
                    continue
                for b in range(a + 1, n):
                    if order[b] < order[a] and par[tup[order[b]]]:
                        sign = -sign
            yield S, rest, sign


def check_infinity_morphism(phi, arity_bound=DEFAULT_ARITY_BOUND + 2):
    g, h = phi.source, phi.target
    if g.flavor != h.flavor:
        raise InputError("flavor mismatch: %s vs %s" % (g.flavor, h.flavor))
    if g.base != h.base:
        raise InputError("base mismatch")
    rep = Report()
    if g.flavor != "classical":
        if not (h.d @ phi.lin - phi.lin @ g.d).is_zero():
            rep.fail("linear part is not a chain map", 1, ())
    indices = None
    if g.base is not None:
        Mg, Mh = g.module, h.module
        if phi.lin is not None:
            bad = check_linear_over(phi.lin, Mg, Mh)
            if bad:
                rep.fail("multilinearity", 1, bad)
        for n, m in phi.comps.items():
            bad = check_multilinear(m, Mg, lambda a, v: Mh.act({a: 1}, v))
            if bad:
                rep.fail("multilinearity", n, bad)
        indices = Mg.generator_indices()
    lhs_maps = phi.classical_maps()
    gfam = g.family()
    hfam = h.family()
    # largest arity with a possibly nonzero relation
    Ng, Nh = g.family().max_arity(), h.family().max_arity()
    Nf = max(lhs_maps, default=-1)
    top = max(Nf + Ng - 1, max(Nh, 0) * max(Nf, 1), 0)
    exact = phi.known is None and g.known is None and h.known is None
    if phi.known is not None:
        top = phi.known - 1
    if g.known is not None:
        top = min(top, g.known)
    if top > arity_bound:
        top = arity_bound
        exact = False
    sp, tsp = g.space, h.space
    par = shifted_parities(sp)
    tw_max = tsp.weight_span()[1] if tsp.dim else 0
    degrees = set(tsp.degree)
    reached = top
    for n in range(0, top + 1):
        ok_n = True
        try:
            for tup in _tuples(sp, n, tw_max, indices):
                if not _degree_ok(sp, tup, 2, degrees):
                    continue
                v = _relation_value(phi, tup, lhs_maps, gfam, hfam, par, tw_max)
                if v:
                    rep.fail("arity %d" % n, n, _names(sp, tup))
                    ok_n = False
                    break
        except IncompleteData:
            reached = n - 1
            exact = False
            break
        rep.arities[n] = ok_n
    rep.checked_up_to = reached
    rep.complete = exact
    return rep


def compose_infinity_morphisms(psi, phi, arity_bound=DEFAULT_ARITY_BOUND + 2):
    """psi o phi for phi: g ~> h and psi: h ~> k."""
    if phi.target != psi.source:
        if phi.target.base != psi.source.base:
            raise InputError("base mismatch")
        raise InputError("target of the first morphism is not the source of the second")
    g, k = phi.source, psi.target
    fmaps = phi.classical_maps()
    pmaps = psi.classical_maps()
    ffam = Family(fmaps, g.space, phi.target.space, 1, known=phi.known)
    pfam = Family(pmaps, psi.source.space, k.space, 1, known=psi.known)
    Nf, Np = max(fmaps, default=-1), max(pmaps, default=-1)
    exact = phi.known is None and psi.known is None
    top = max(Np, 0) * max(Nf, 0) if exact else None
    if top is None:
        top = phi.known if phi.known is not None else arity_bound
    known = None
    if top > arity_bound:
        top = arity_bound
        known = arity_bound
    elif not exact:
        known = top
    sp = g.space
    par = shifted_parities(sp)
    tw_max = k.space.weight_span()[1] if k.space.dim else 0
    degrees = set(k.space.degree)
    G0 = fmaps.get(0)
    G0v = G0.values.get((), {}) if G0 is not None else {}

    def G_eval(block):
        f = ffam.get(len(block))
        return f.eval_basis(block) if f is not None else {}

    out = {}
    for n in range(0, top + 1):
        vals = {}
        try:
            for tup in canonical_tuples(sp, n, tw_max, par=par):
                if not _degree_ok(sp, tup, 1, degrees):
                    continue
                v = pushforward(pfam, G_eval, G0v, tup, par, tw_max)
                if v:
                    vals[tup] = v
        except IncompleteData:
            known = n - 1
            break
        if vals:
            out[n] = SymMultiMap(n, sp, k.space, 1 - n, 0, vals, check=False)
    for n in out:
        out[n] = out[n].with_min_weight(1 if n == 0 else 0)
    lin = None if g.flavor == "classical" else psi.lin @ phi.lin
    return _from_classical_maps(g, k, out, known=known, lin=lin)


def blend_morphism(phi):
    return InfinityMorphism(blend(phi.source), blend(phi.target), phi.classical_maps(),
                            known=phi.known)


# Maurer-Cartan elements

@dataclass(eq=True)
class MaurerCartanElement:
    target: CurvedStructure
    x: dict

    def __post_init__(self):
        sp = self.target.space
        for i, c in self.x.items():
            if not 0 <= i < sp.dim:
                raise InputError("index %d out of range" % i)
            if sp.degree[i] != 1:
                raise InputError("MC element must have degree 1, found %s"
                                 % sp.basis[i])
            if sp.weight[i] < 1:
                raise InputError("MC element must have weight >= 1, found %s"
                                 % sp.basis[i])
        self.x = {i: c for i, c in self.x.items() if c}


def curvature_at(s, x):
    """sum_k (1/k!) l'_k(x, ..., x)."""
    sp = s.space
    tw_max = sp.weight_span()[1] if sp.dim else 0
    out = {}
    _sum_insertions(s.family(), [], x, tw_max, 1, out)
    return out


def mc_check(m):
    return not curvature_at(m.target, m.x)


def mc_to_morphism(m):
    h = m.target
    src = zero_structure(h.flavor, base=None) if h.base is None else None
    if src is None:
        raise InputError("Maurer-Cartan morphisms over a base are not supported")
    comps = {}
    if m.x:
        comps[0] = SymMultiMap(0, src.space, h.space, 1, 1, {(): dict(m.x)})
    return InfinityMorphism(src, h, comps)


def morphism_to_mc(phi):
    if phi.source.space.dim != 0:
        raise InputError("expected a morphism out of the zero structure")
    f0 = phi.classical_maps().get(0)
    x = dict(f0.values.get((), {})) if f0 is not None else {}
    return MaurerCartanElement(phi.target, x)


def twist(s, a):
    """Classical structure l^a_n(x) = sum_k (1/k!) l'_{n+k}(a^k, x)."""
    sp = s.space
    for i in a:
        if sp.degree[i] != 1 or sp.weight[i] < 1:
            raise InputError("twisting element must have degree 1 and weight >= 1")
    fam = s.family()
    par = shifted_parities(sp)
    tw_max = sp.weight_span()[1] if sp.dim else 0
    N = fam.max_arity()
    ells = {}
    for n in range(0, max(N, 0) + 1):
        vals = {}
        for tup in canonical_tuples(sp, n, tw_max, par=par):
            out = {}
            _sum_insertions(fam, [{j: 1} for j in tup], a, tw_max, 1, out)
            if out:
                vals[tup] = out
        if vals:
            ells[n] = SymMultiMap(n, sp, sp, 2 - n, required_weight("classical", n),
                                  vals, check=False)
    return CurvedStructure("classical", sp, ells, known=s.known, base=s.base,
                           module=s.module)


def conjugate(s, g, ginv=None):
    """Transport a structure along a strict filtered isomorphism g."""
    sp = s.space
    if ginv is None:
        from .linalg import mat_inverse
        ginv = LinearMap(sp, sp, 0, 0, mat_inverse(g.cols, sp.dim), check=False)
    ells = {}
    for n, m in s.ells.items():
        ells[n] = m.precompose_linear(ginv).compose_linear(g).with_min_weight(m.min_weight)
    d = None
    if s.d is not None:
        d = (g @ s.d @ ginv).with_min_weight(0)
    return CurvedStructure(s.flavor, sp, ells, d=d, known=s.known)


# homotopy transfer

class _Transfer:
    def __init__(self, s, r, sign):
        self.s, self.r, self.sign = s, r, sign
        self.W = s.space
        self.V = r.small.space
        self.F = s.perturbation_family() if s.flavor != "classical" else None
        self.parV = shifted_parities(self.V)
        self.tw_max = self.W.weight_span()[1] if self.W.dim else 0
        lo, hi = self.W.weight_span() if self.W.dim else (0, 0)
        self.max_iter = hi - lo + 3
        self.P = {}
        self.Q = {}
        self.P0 = self._fix0()

    def _sh(self, v):
        return vscale(self.r.h.apply(v), self.sign)

    def _fix0(self):
        cur = {}
        for _ in range(self.max_iter):
            Q = {}
            _sum_insertions(self.F, [], cur, self.tw_max, 1, Q)
            new = self._sh(Q)
            if new == cur:
                self.Q[()] = Q
                self.P[()] = cur
                return cur
            cur = new
        raise ResourceError("transfer recursion did not stabilize")

    def value(self, tup):
        """P on an arbitrary V-tuple (with symmetry sign)."""
        s, srt = canonical(tup, self.parV)
        if not s:
            return {}
        v = self.P_canon(srt)
        return v if s == 1 else vscale(v, -1)

    def P_canon(self, tup):
        if tup in self.P:
            return self.P[tup]
        n = len(tup)
        base = dict(self.r.i.cols.get(tup[0], {})) if n == 1 else {}
        cur = base
        for _ in range(self.max_iter):
            Q = self._Q(tup, cur)
            new = dict(base)
            vaddto(new, self._sh(Q))
            if new == cur:
                self.P[tup] = cur
                self.Q[tup] = Q
                return cur
            cur = new
        raise ResourceError("transfer recursion did not stabilize")

    def _Q(self, tup, self_val):
        n = len(tup)

        def G_eval(block):
            if len(block) == n:
                return self_val
            return self.value(block)

        return pushforward(self.F, G_eval, self.P0, tup, self.parV, self.tw_max)

    def Q_canon(self, tup):
        self.P_canon(tup)
        return self.Q[tup]


def _transfer_input(s, r):
    if s.flavor == "classical":
        gm = unblend(s)
    else:
        gm = s
    if r.big.space != s.space:
        raise InputError("retract does not start at the structure's space")
    if r.big.d != gm.d:
        raise InputError("retract differential differs from the structure's d")
    bad = r.failing_identities(side=True)
    if bad:
        raise InputError("retract fails: " + ", ".join(bad))
    return gm


def homotopy_transfer(s, r, arity_bound=DEFAULT_ARITY_BOUND, sign=TRANSFER_SIGN,
                      small_module=None):
    """Transferred structure on r.small and the infinity-morphism i_oo."""
    gm = _transfer_input(s, r)
    if s.base is not None:
        if small_module is None:
            raise InputError("transfer over a base needs the small module")
        for name, f, src, tgt in (("i", r.i, small_module, s.module),
                                  ("p", r.p, s.module, small_module),
                                  ("h", r.h, s.module, s.module)):
            bad = check_linear_over(f, src, tgt)
            if bad:
                raise InputError("%s is not linear over the base at %s" % (name, bad))
    T = _Transfer(gm, r, sign)
    V, W = T.V, T.W
    exact = r.h.is_zero() or gm.max_arity() <= 1
    N = gm.max_arity() if exact else arity_bound
    if gm.known is not None:
        N = min(N, gm.known)
        exact = False
    parV = T.parV
    vwmax = V.weight_span()[1] if V.dim else 0
    ww = W.weight_span()[1] if W.dim else 0
    degV, degW = set(V.degree), set(W.degree)
    ells, phis = {}, {}
    for n in range(0, max(N, 0) + 1):
        lv, pv = {}, {}
        for tup in canonical_tuples(V, n, max(vwmax, ww), par=parV):
            if not (_degree_ok(V, tup, 2, degV) or _degree_ok(V, tup, 1, degW)):
                continue
            T.P_canon(tup)
            Q = T.Q[tup]
            if Q:
                x = r.p.apply(Q)
                if x:
                    lv[tup] = x
                y = T._sh(Q)
                if y:
                    pv[tup] = y
        if lv:
            ells[n] = SymMultiMap(n, V, V, 2 - n, 0, lv, check=False)
        if pv:
            phis[n] = SymMultiMap(n, V, W, 1 - n, 0, pv, check=False)
    for n in (0, 1):
        if n in ells:
            ells[n] = ells[n].with_min_weight(1)
        if n in phis:
            phis[n] = phis[n].with_min_weight(1)
    known = None if exact else N
    base, mod = (s.base, small_module) if s.base is not None else (None, None)
    dV = r.small.d
    flavor = gm.flavor
    if flavor == "graded-mixed" and any(k != 0 for k in dV.weight_components()):
        flavor = "mixed"
    tV = CurvedStructure(flavor, V, ells, d=dV, known=known, base=base, module=mod)
    src_gm = gm if gm.flavor == flavor else gm.replace(flavor=flavor)
    ioo = InfinityMorphism(tV, src_gm, phis, lin=r.i, known=known)
    if s.flavor == "classical":
        return blend(tV), blend_morphism(ioo)
    return tV, ioo


def transfer_bruteforce(s, r, tup, sign=TRANSFER_SIGN):
    """Independent tree enumeration: (transferred l_n(tup), phi_n(tup)).

    Sums over planar trees whose vertices are the operations without d,
    whose internal edges carry sign * h and whose leaves carry i; each vertex
    of arity k contributes 1/k! and the only sign is the Koszul sign of the
    leaf order.
    """
    gm = _transfer_input(s, r)
    W, V = gm.space, r.small.space
    ells = gm.ells
    N = max(ells, default=-1)
    parV = shifted_parities(V)
    wmax = W.weight_span()[1] if W.dim else 0
    budget = wmax - sum(V.weight[j] for j in tup)
    n = len(tup)
    if budget < 0 or N < 0:
        return {}, {}
    positions = tuple(range(n))

    def internal(S, b):
        # dict cost -> vertex value with leaves S, before applying h
        out = {}
        for k in range(0, N + 1):
            lk = ells.get(k)
            if lk is None:
                continue
            vcost = 1 if k <= 1 else 0
            if vcost > b:
                continue
            fk = inv_factorial(k)
            for assign in _assignments(S, k):
                for children, cost in _child_choices(assign, b - vcost):
                    order = [i for slot in assign for i in slot]
                    sg = _order_sign(order, tup, parV)
                    val = lk.eval_vectors(children)
                    if val:
                        acc = out.setdefault(cost + vcost, {})
                        vaddto(acc, val, sg * fk)
        return out

    memo = {}

    def child_values(S, b):
        # list of (vector, cost) for one child with leaf set S
        key = (S, b)
        if key in memo:
            return memo[key]
        res = []
        if len(S) == 1:
            res.append((dict(r.i.cols.get(tup[S[0]], {})), 0))
        for cost, v in internal(S, b).items():
            hv = vscale(r.h.apply(v), sign)
            if hv:
                res.append((hv, cost))
        memo[key] = res
        return res

    def _child_choices(assign, b):
        # every leafless child costs at least 1, which keeps the recursion finite
        empties = [0] * (len(assign) + 1)
        for j in range(len(assign) - 1, -1, -1):
            empties[j] = empties[j + 1] + (0 if assign[j] else 1)

        def rec(j, acc, cost):
            if j == len(assign):
                yield list(acc), cost
                return
            room = b - cost - empties[j + 1]
            if room < 0:
                return
            for v, c in child_values(tuple(assign[j]), room):
                if not v:
                    continue
                acc.append(v)
                yield from rec(j + 1, acc, cost + c)
                acc.pop()
        yield from rec(0, [], 0)

    top = internal(positions, budget)
    total = {}
    for v in top.values():
        vaddto(total, v)
    ell = r.p.apply(total)
    phi = vscale(r.h.apply(total), sign)
    return ell, phi


def _assignments(S, k):
    """All ways to distribute the ordered leaf set S into k ordered slots."""
    if k == 0:
        if not S:
            yield ()
        return
    from itertools import product
    for labels in product(range(k), repeat=len(S)):
        slots = [[] for _ in range(k)]
        for i, lab in zip(S, labels):
            slots[lab].append(i)
        yield tuple(tuple(sl) for sl in slots)


def _order_sign(order, tup, par):
    sign = 1
    n = len(order)
    for a in range(n):
        if not par[tup[order[a]]]:
            continue
        for b in range(a + 1, n):
            if order[b] < order[a] and par[tup[order[b]]]:
                sign = -sign
    return sign
