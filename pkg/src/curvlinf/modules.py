"""Modules over finite-dimensional cdgas and the multilinearity axioms.

Signs follow the word convention on the suspension: an algebra element r of
degree |r| acts by r.(sx) = s(rx), and moving r out of slot j of a map F of
shifted degree |F| costs (-1)^{|r| (|F| + sum_{i<j} |x_i|')}, where |x|' is
the shifted degree.
"""

from .errors import InputError
from .gradedcore import GradedSpace, LinearMap
from .linalg import norm, vaddto
from .multilinear import canonical_tuples, shifted_parities


class Module:
    """Left module over a GradedMixedCdga on a finite graded space.

    ``action`` maps (algebra index, module index) to a module vector; the unit
    acts as the identity and need not be listed.
    """

    def __init__(self, algebra, space, action, check=True):
        self.algebra = algebra
        self.space = space
        table = {}
        for (a, m), v in action.items():
            v = {k: norm(c) for k, c in v.items() if c}
            if v:
                table[(a, m)] = v
        u = algebra.unit
        for m in range(space.dim):
            table[(u, m)] = {m: 1}
        self.action = table
        if check:
            self._validate()

    def _validate(self):
        A, sp = self.algebra.space, self.space
        for (a, m), v in self.action.items():
            for k in v:
                if sp.degree[k] != A.degree[a] + sp.degree[m]:
                    raise InputError("action of %s on %s has wrong degree"
                                     % (A.basis[a], sp.basis[m]))
                if sp.weight[k] != A.weight[a] + sp.weight[m]:
                    raise InputError("action of %s on %s is not weight-additive"
                                     % (A.basis[a], sp.basis[m]))

    @property
    def dim(self):
        return self.space.dim

    def act_basis(self, a, m):
        return self.action.get((a, m), {})

    def act(self, avec, mvec):
        out = {}
        for a, x in avec.items():
            for m, y in mvec.items():
                v = self.action.get((a, m))
                if v:
                    vaddto(out, v, x * y)
        return out

    def is_free(self):
        return False

    def failing_axiom(self):
        """Associativity of the action on basis triples, or None."""
        B = self.algebra
        for a in range(B.dim):
            for b in range(B.dim):
                ab = B.mul_basis(a, b)
                for m in range(self.dim):
                    lhs = self.act(ab, {m: 1})
                    rhs = self.act({a: 1}, self.act_basis(b, m))
                    if lhs != rhs:
                        return (B.space.basis[a], B.space.basis[b], self.space.basis[m])
        return None

    def __eq__(self, other):
        return (isinstance(other, Module) and self.space == other.space
                and self.action == other.action and self.algebra == other.algebra)

    def __hash__(self):
        return hash(self.space)


def _elt_name(a_name, g_name, unit_name):
    return g_name if a_name == unit_name else "%s*%s" % (a_name, g_name)


class FreeModule(Module):
    """B (x) G for a graded space of generators G.

    The k-basis is ordered generator-major: (a, g) sits at index
    g * dim B + a.
    """

    def __init__(self, algebra, generators, names=None):
        self.generators = generators
        B = algebra.space
        nb = B.dim
        basis, deg, wt = [], [], []
        unit_name = B.basis[algebra.unit]
        for g in range(generators.dim):
            for a in range(nb):
                if names is not None:
                    basis.append(names[g * nb + a])
                else:
                    basis.append(_elt_name(B.basis[a], generators.basis[g], unit_name))
                deg.append(B.degree[a] + generators.degree[g])
                wt.append(B.weight[a] + generators.weight[g])
        space = GradedSpace(basis, deg, wt)
        action = {}
        for a in range(nb):
            for g in range(generators.dim):
                for b in range(nb):
                    p = algebra.mul_basis(a, b)
                    if p:
                        action[(a, g * nb + b)] = {g * nb + c: x for c, x in p.items()}
        Module.__init__(self, algebra, space, action, check=False)

    def is_free(self):
        return True

    def index(self, a, g):
        return g * self.algebra.dim + a

    def split(self, k):
        g, a = divmod(k, self.algebra.dim)
        return a, g

    def generator_index(self, g):
        return self.index(self.algebra.unit, g)

    def generator_indices(self):
        return [self.generator_index(g) for g in range(self.generators.dim)]


def _slot_sign(r_deg, map_sdeg, prefix_sdeg):
    return -1 if (r_deg * (map_sdeg + prefix_sdeg)) % 2 else 1


def check_multilinear(F, module, tgt_act=None, skip_unary=False):
    """First failing (algebra elt, basis tuple) for A-multilinearity of a
    SymMultiMap F on a module, or None.

    ``tgt_act(a, vec)`` multiplies a target vector by algebra basis element
    a; by default the target is the same module.  By symmetry it suffices to
    test the first slot.
    """
    if tgt_act is None:
        tgt_act = lambda a, v: module.act({a: 1}, v)
    B = module.algebra
    sp = module.space
    n = F.arity
    if n == 0 or (skip_unary and n == 1):
        return None
    if module.is_free():
        return _free_multilinear_defect(F, module, tgt_act)
    sdeg = F.shifted_degree
    rests = canonical_tuples(sp, n - 1, par=shifted_parities(sp))
    for a in range(B.dim):
        if a == B.unit:
            continue
        s = _slot_sign(B.space.degree[a], sdeg, 0)
        for x in range(sp.dim):
            ax = module.act_basis(a, x)
            for rest in rests:
                lhs = F.eval_vectors([ax] + [{j: 1} for j in rest])
                val = F.eval_basis((x,) + rest)
                rhs = tgt_act(a, val) if val else {}
                if s < 0:
                    rhs = {k: -c for k, c in rhs.items()}
                if lhs != rhs:
                    return (B.space.basis[a], (sp.basis[x],) + tuple(sp.basis[j] for j in rest))
    return None


def _free_multilinear_defect(F, module, tgt_act):
    # on a free module F is multilinear iff it is the extension of its
    # values on generator tuples
    B = module.algebra
    sp = module.space
    gi = module.generator_index
    ext = extend_multilinear(module, F.arity, F.shifted_degree,
                             lambda gens: F.eval_basis(tuple(gi(g) for g in gens)),
                             tgt_act)
    for tup in sorted(set(ext) | set(F.values)):
        if ext.get(tup, {}) != F.values.get(tup, {}):
            a = next((module.split(k)[0] for k in tup
                      if module.split(k)[0] != B.unit), B.unit)
            return (B.space.basis[a], tuple(sp.basis[j] for j in tup))
    return None


def check_derivation(F, module, D):
    """ell(b x) = D(b) x + (-1)^{|b| |ell|} b ell(x) for a unary F over a
    derivation D of the algebra.  Returns the first failing pair or None."""
    B = module.algebra
    sp = module.space
    sdeg = F.shifted_degree
    for a in range(B.dim):
        Da = D.cols.get(a, {})
        s = -1 if (B.space.degree[a] * sdeg) % 2 else 1
        for x in range(sp.dim):
            lhs = F.eval_vectors([module.act_basis(a, x)])
            rhs = module.act(Da, {x: 1})
            vaddto(rhs, module.act({a: 1}, F.eval_basis((x,))), s)
            if lhs != rhs:
                return (B.space.basis[a], sp.basis[x])
    return None


def check_linear_over(f, src_module, tgt_module, D=None):
    """A-linearity of a LinearMap (or derivation rule over D when given)."""
    B = src_module.algebra
    sp = src_module.space
    for a in range(B.dim):
        s = -1 if (B.space.degree[a] * f.degree_shift) % 2 else 1
        for x in range(sp.dim):
            lhs = f.apply(src_module.act_basis(a, x))
            rhs = tgt_module.act({a: 1}, f.cols.get(x, {}))
            if s < 0:
                rhs = {k: -c for k, c in rhs.items()}
            if D is not None:
                vaddto(rhs, tgt_module.act(D.cols.get(a, {}), {x: 1}))
            if lhs != rhs:
                return (B.space.basis[a], sp.basis[x])
    return None


def extend_linear(module, tgt_module, gen_values, degree_shift, min_weight, D=None):
    """Extend values on generators to the A-linear map (or the derivation
    over D) of the given unshifted degree."""
    B = module.algebra
    cols = {}
    for k in range(module.dim):
        a, g = module.split(k)
        val = gen_values.get(g, {})
        s = -1 if (B.space.degree[a] * degree_shift) % 2 else 1
        col = tgt_module.act({a: 1}, val) if val else {}
        if s < 0:
            col = {i: -c for i, c in col.items()}
        if D is not None:
            Da = D.cols.get(a, {})
            if Da:
                vaddto(col, tgt_module.act(Da, {module.generator_index(g): 1}))
        if col:
            cols[k] = col
    return LinearMap(module.space, tgt_module.space, degree_shift, min_weight, cols,
                     check=False)


def extend_multilinear(module, n, sdeg, gen_eval, tgt_act, max_weight=None):
    """Values on canonical k-tuples of the A-multilinear extension of
    ``gen_eval`` (a function of generator-index tuples in any order).

    ``sdeg`` is the shifted degree of the map, ``tgt_act(a, vec)`` the action
    on the target.
    """
    B = module.algebra
    sp = module.space
    gd = module.generators.degree
    vals = {}
    for tup in canonical_tuples(sp, n, max_weight):
        sign = 1
        prefix = 0
        prod = {B.unit: 1}
        gens = []
        for k in tup:
            a, g = module.split(k)
            if (B.space.degree[a] * (sdeg + prefix)) % 2:
                sign = -sign
            prefix += gd[g] - 1
            prod = B.mul(prod, {a: 1})
            gens.append(g)
        if not prod:
            continue
        val = gen_eval(tuple(gens))
        if not val:
            continue
        out = {}
        for a, c in prod.items():
            vaddto(out, tgt_act(a, val), c * sign)
        if out:
            vals[tup] = out
    return vals
