"""Graded-symmetric multilinear maps on the suspension of a graded space.

Every map here acts on the shifted space V[1]: a basis element of degree
``e`` has shifted degree ``e - 1``, and symmetry signs are Koszul signs for
shifted degrees.  ``degree_shift`` is recorded in unshifted terms (so l_n
has degree_shift 2 - n and an infinity-morphism component 1 - n); the
shifted degree of the map is ``degree_shift + arity - 1``.
"""

from fractions import Fraction
from itertools import product

from .errors import InputError, ResourceError
from .gradedcore import perm_sign
from .linalg import norm, vaddto, vscale


def shifted_parities(space):
    return tuple((d - 1) % 2 for d in space.degree)


def canonical(tup, par):
    """Sort a basis tuple; returns (sign, sorted tuple) or (0, None)."""
    n = len(tup)
    if n < 2:
        return 1, tuple(tup)
    order = sorted(range(n), key=lambda i: tup[i])
    srt = tuple(tup[i] for i in order)
    for a in range(n - 1):
        if srt[a] == srt[a + 1] and par[srt[a]]:
            return 0, None
    sign = 1
    for a in range(n):
        ta = tup[a]
        if not par[ta]:
            continue
        for b in range(a + 1, n):
            tb = tup[b]
            if tb < ta and par[tb]:
                sign = -sign
    return sign, srt


def canonical_tuples(space, n, max_weight=None, degree=None, par=None):
    """Sorted basis tuples of length n without repeated odd entries.

    ``max_weight`` bounds the weight sum, ``degree`` (if given) fixes the sum
    of shifted degrees.
    """
    if par is None:
        par = shifted_parities(space)
    m = space.dim
    if n == 0:
        return [()]
    wts = space.weight
    wmin = min(wts) if m else 0
    sdeg = [d - 1 for d in space.degree]
    out = []
    cur = []

    def rec(start, k, wsum, dsum):
        if k == n:
            if degree is None or dsum == degree:
                out.append(tuple(cur))
            return
        for j in range(start, m):
            if max_weight is not None and wsum + wts[j] + (n - k - 1) * wmin > max_weight:
                continue
            if cur and cur[-1] == j and par[j]:
                continue
            cur.append(j)
            rec(j, k + 1, wsum + wts[j], dsum + sdeg[j])
            cur.pop()

    rec(0, 0, 0, 0)
    return out


class SymMultiMap:
    """Graded-symmetric n-linear map stored on canonical basis tuples."""

    __slots__ = ("arity", "source", "target", "degree_shift", "min_weight",
                 "values", "_par")

    def __init__(self, arity, source, target, degree_shift, min_weight,
                 values=None, check=True):
        self.arity = arity
        self.source = source
        self.target = target
        self.degree_shift = degree_shift
        self.min_weight = min_weight
        self._par = shifted_parities(source)
        clean = {}
        for tup, vec in (values or {}).items():
            tup = tuple(tup)
            vec = {i: norm(c) for i, c in vec.items() if c}
            if vec:
                clean[tup] = vec
        self.values = clean
        if check:
            self.validate()

    @property
    def shifted_degree(self):
        return self.degree_shift + self.arity - 1

    @classmethod
    def zero(cls, arity, source, target, degree_shift, min_weight=0):
        return cls(arity, source, target, degree_shift, min_weight, {}, check=False)

    @classmethod
    def from_function(cls, arity, source, target, degree_shift, min_weight, fn,
                      max_weight=None):
        """Tabulate fn(canonical tuple) -> vector."""
        vals = {}
        for tup in canonical_tuples(source, arity, max_weight):
            v = fn(tup)
            if v:
                vals[tup] = v
        return cls(arity, source, target, degree_shift, min_weight, vals, check=False)

    def validate(self):
        s, t = self.source, self.target
        n = self.arity
        for tup, vec in self.values.items():
            if len(tup) != n:
                raise InputError("tuple %r has the wrong arity" % (tup,))
            if any(not 0 <= j < s.dim for j in tup):
                raise InputError("tuple %r out of range" % (tup,))
            sign, srt = canonical(tup, self._par)
            if srt != tup:
                raise InputError("tuple %s is not canonical" % self._names(tup))
            dsum = sum(s.degree[j] for j in tup)
            wsum = sum(s.weight[j] for j in tup)
            for i in vec:
                if not 0 <= i < t.dim:
                    raise InputError("target index %d out of range" % i)
                if t.degree[i] != dsum + self.degree_shift:
                    raise InputError("value at %s has wrong degree"
                                     % self._names(tup))
                if t.weight[i] < wsum + self.min_weight:
                    raise InputError("value at %s has weight below %d"
                                     % (self._names(tup), self.min_weight))

    def _names(self, tup):
        return "(" + ",".join(self.source.basis[j] for j in tup) + ")"

    def eval_basis(self, tup):
        """Value on an arbitrary basis tuple (with symmetry sign)."""
        sign, srt = canonical(tup, self._par)
        if not sign:
            return {}
        v = self.values.get(srt)
        if not v:
            return {}
        return v if sign == 1 else vscale(v, -1)

    def eval_vectors(self, vecs):
        """Multilinear evaluation on sparse input vectors."""
        n = self.arity
        if n == 0:
            return dict(self.values.get((), {}))
        out = {}
        items = [list(v.items()) for v in vecs]
        if any(not it for it in items):
            return out
        for combo in product(*items):
            c = 1
            tup = []
            for j, cj in combo:
                c *= cj
                tup.append(j)
            val = self.eval_basis(tup)
            if val:
                vaddto(out, val, c)
        return out

    def __call__(self, *vecs):
        return self.eval_vectors(vecs)

    def is_zero(self):
        return not self.values

    def __eq__(self, other):
        return (isinstance(other, SymMultiMap) and self.arity == other.arity
                and self.source == other.source and self.target == other.target
                and self.values == other.values)

    def __hash__(self):
        return hash((self.arity, len(self.values)))

    def __repr__(self):
        return "SymMultiMap(arity %d, deg %+d, wt>=%d, %d values)" % (
            self.arity, self.degree_shift, self.min_weight, len(self.values))

    def scaled(self, s):
        return SymMultiMap(self.arity, self.source, self.target, self.degree_shift,
                           self.min_weight,
                           {t: vscale(v, s) for t, v in self.values.items()},
                           check=False)

    def __add__(self, other):
        if other.arity != self.arity:
            raise InputError("cannot add maps of different arity")
        vals = {t: dict(v) for t, v in self.values.items()}
        for t, v in other.values.items():
            acc = vals.setdefault(t, {})
            vaddto(acc, v)
            if not acc:
                del vals[t]
        return SymMultiMap(self.arity, self.source, self.target, self.degree_shift,
                           min(self.min_weight, other.min_weight), vals, check=False)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def weight_component(self, k):
        sw, tw = self.source.weight, self.target.weight
        vals = {}
        for tup, vec in self.values.items():
            base = sum(sw[j] for j in tup)
            sel = {i: c for i, c in vec.items() if tw[i] - base == k}
            if sel:
                vals[tup] = sel
        return SymMultiMap(self.arity, self.source, self.target, self.degree_shift,
                           k, vals, check=False)

    def weights_present(self):
        sw, tw = self.source.weight, self.target.weight
        out = set()
        for tup, vec in self.values.items():
            base = sum(sw[j] for j in tup)
            for i in vec:
                out.add(tw[i] - base)
        return sorted(out)

    def actual_min_weight(self):
        ws = self.weights_present()
        return ws[0] if ws else None

    def with_min_weight(self, m):
        return SymMultiMap(self.arity, self.source, self.target, self.degree_shift,
                           m, self.values)

    def compose_linear(self, f):
        """f o self for a linear map f out of the target."""
        vals = {}
        for t, v in self.values.items():
            w = f.apply(v)
            if w:
                vals[t] = w
        return SymMultiMap(self.arity, self.source, f.target,
                           self.degree_shift + f.degree_shift,
                           self.min_weight + f.min_weight, vals, check=False)

    def precompose_linear(self, g, source=None):
        """self o (g x ... x g) for a degree-0 linear map g into the source."""
        src = g.source if source is None else source
        n = self.arity
        vals = {}
        par = shifted_parities(src)
        for tup in canonical_tuples(src, n, par=par):
            vecs = [g.cols.get(j, {}) for j in tup]
            v = self.eval_vectors(vecs)
            if v:
                vals[tup] = v
        return SymMultiMap(n, src, self.target, self.degree_shift,
                           self.min_weight + n * g.min_weight, vals, check=False)

    def retarget(self, source, target):
        return SymMultiMap(self.arity, source, target, self.degree_shift,
                           self.min_weight, self.values)


def linear_as_multimap(f):
    """A LinearMap of degree e viewed as a unary map."""
    return SymMultiMap(1, f.source, f.target, f.degree_shift, f.min_weight,
                       {(j,): col for j, col in f.cols.items()}, check=False)


def multimap_as_linear(m):
    from .gradedcore import LinearMap
    return LinearMap(m.source, m.target, m.degree_shift, m.min_weight,
                     {t[0]: v for t, v in m.values.items()}, check=False)


def set_partitions(n):
    """Set partitions of range(n), blocks ordered by minimum element."""
    if n == 0:
        yield []
        return

    def rec(i, blocks):
        if i == n:
            yield [tuple(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def ordered_subsets(n, q):
    from itertools import combinations
    return combinations(range(n), q)


class IncompleteData(Exception):
    """A truncated family was asked for a component beyond its known arity."""


_FACT_INV = [Fraction(1)]


def inv_factorial(m):
    while len(_FACT_INV) <= m:
        _FACT_INV.append(_FACT_INV[-1] / len(_FACT_INV))
    return norm(_FACT_INV[m])


class Family:
    """Indexed family of SymMultiMaps n -> map, possibly truncated.

    ``known`` is None when the family is exact (zero beyond the stored
    arities), otherwise the largest arity whose component is known.
    """

    __slots__ = ("maps", "known", "source", "target", "degree_shift0", "min_weights")

    def __init__(self, maps, source, target, degree_shift0, known=None,
                 min_weights=None):
        self.maps = {n: m for n, m in maps.items()}
        self.known = known
        self.source = source
        self.target = target
        self.degree_shift0 = degree_shift0    # degree_shift of the arity-0 part
        self.min_weights = min_weights or {}

    def get(self, n):
        m = self.maps.get(n)
        if m is not None:
            return m
        if self.known is not None and n > self.known:
            raise IncompleteData(n)
        return None

    def is_known(self, n):
        return self.known is None or n <= self.known

    def max_arity(self):
        return max([n for n, m in self.maps.items() if not m.is_zero()], default=-1)

    def lower_weight(self, n):
        """Guaranteed lower bound on the weight raised by component n."""
        m = self.maps.get(n)
        if m is not None and self.known is None:
            return m.min_weight
        return self.min_weights.get(n, self.min_weights.get("default", 0))


def pushforward(F, G_eval, G0, tup, par, tw_max):
    """Sum over set partitions of sum_m (1/m!) F_{k+m}(G_B1, ..., G_Bk, G0^m).

    ``G_eval(block_tuple)`` returns the vector G_{|B|}(x_B) and ``G0`` the
    vector G_0 (possibly empty).  The m-sum stops at the last stored
    component of an exact F, or once weight forces every further term to
    vanish (``tw_max`` is the largest weight present in the target).
    """
    n = len(tup)
    out = {}
    for blocks in set_partitions(n):
        order = [i for b in blocks for i in b]
        sign = _block_sign(order, tup, par)
        vals = []
        for b in blocks:
            v = G_eval(tuple(tup[i] for i in b))
            if not v:
                break
            vals.append(v)
        else:
            _sum_insertions(F, vals, G0, tw_max, sign, out)
    return out


def _sum_insertions(F, vals, G0, tw_max, sign, out):
    k = len(vals)
    m = 0
    g0s = []
    while True:
        if F.known is None and k + m > F.max_arity():
            break
        if _zero_by_weight(F, k + m, vals, g0s, G0, tw_max):
            break
        Fk = F.get(k + m)
        if Fk is not None:
            val = Fk.eval_vectors(vals + g0s)
            if val:
                vaddto(out, val, sign * inv_factorial(m))
        if not G0:
            break
        m += 1
        g0s = g0s + [G0]


def F_target_weight(F, i):
    return F.target.weight[i]


def _block_sign(order, tup, par):
    sign = 1
    n = len(order)
    for a in range(n):
        if not par[tup[order[a]]]:
            continue
        oa = order[a]
        for b in range(a + 1, n):
            ob = order[b]
            if ob < oa and par[tup[ob]]:
                sign = -sign
    return sign


def _vec_min_weight(vec, space):
    return min(space.weight[i] for i in vec)


def _zero_by_weight(F, ar, vals, g0s, G0, tw_max):
    if tw_max is None:
        return False
    src = F.source
    lb = sum(_vec_min_weight(v, src) for v in vals)
    lb += len(g0s) * (_vec_min_weight(G0, src) if G0 else 0)
    lb += F.lower_weight(ar)
    return lb > tw_max
