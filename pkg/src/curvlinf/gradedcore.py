"""Weight-graded cochain complexes over Q.

A complete filtered complex with finite basis is stored in split form: every
basis element carries a cohomological degree and a filtration weight, and a
linear map is filtered of weight >= r when every nonzero entry raises weight
by at least r.
"""

from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb

from .errors import InputError, ResourceError
from .linalg import Reducer, norm, rank, rref, vaddto, vscale

ARITY_BOUND = 12


class GradedSpace:
    """Finite basis of named symbols with degree and weight."""

    __slots__ = ("basis", "degree", "weight", "_index")

    def __init__(self, basis, degree, weight):
        basis = tuple(str(b) for b in basis)
        degree = tuple(int(d) for d in degree)
        weight = tuple(int(w) for w in weight)
        if not (len(basis) == len(degree) == len(weight)):
            raise InputError("basis, degree and weight lengths differ")
        index = {}
        for i, b in enumerate(basis):
            if b in index:
                raise InputError("duplicate basis symbol %r" % b)
            index[b] = i
        self.basis = basis
        self.degree = degree
        self.weight = weight
        self._index = index

    @classmethod
    def from_triples(cls, triples):
        triples = list(triples)
        return cls([t[0] for t in triples], [t[1] for t in triples],
                   [t[2] for t in triples])

    @property
    def dim(self):
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def index(self, sym):
        try:
            return self._index[sym]
        except KeyError:
            raise InputError("undeclared basis symbol %r" % (sym,)) from None

    def __contains__(self, sym):
        return sym in self._index

    def triples(self):
        return list(zip(self.basis, self.degree, self.weight))

    def __eq__(self, other):
        return (isinstance(other, GradedSpace) and self.basis == other.basis
                and self.degree == other.degree and self.weight == other.weight)

    def __hash__(self):
        return hash((self.basis, self.degree, self.weight))

    def __repr__(self):
        return "GradedSpace(%s)" % ", ".join(
            "%s:%d/%d" % t for t in self.triples())

    def weight_span(self):
        if not self.basis:
            return (0, 0)
        return (min(self.weight), max(self.weight))

    def reweighted(self, weights):
        return GradedSpace(self.basis, self.degree, weights)

    def direct_sum(self, other, prefixes=("", "")):
        return GradedSpace(
            [prefixes[0] + b for b in self.basis] + [prefixes[1] + b for b in other.basis],
            self.degree + other.degree, self.weight + other.weight)

    def vector(self, coeffs):
        """Sparse vector from a mapping symbol -> scalar."""
        out = {}
        for s, c in coeffs.items():
            if c:
                out[self.index(s)] = norm(c)
        return out


class LinearMap:
    """Sparse matrix between graded spaces, stored by columns."""

    __slots__ = ("source", "target", "degree_shift", "min_weight", "cols")

    def __init__(self, source, target, degree_shift, min_weight, cols=None,
                 check=True):
        self.source = source
        self.target = target
        self.degree_shift = degree_shift
        self.min_weight = min_weight
        clean = {}
        for j, col in (cols or {}).items():
            col = {i: norm(c) for i, c in col.items() if c}
            if col:
                clean[j] = col
        self.cols = clean
        if check:
            self._validate()

    def _validate(self):
        s, t = self.source, self.target
        for j, col in self.cols.items():
            if not 0 <= j < s.dim:
                raise InputError("column index %d out of range" % j)
            for i in col:
                if not 0 <= i < t.dim:
                    raise InputError("row index %d out of range" % i)
                if t.degree[i] != s.degree[j] + self.degree_shift:
                    raise InputError(
                        "entry (%s, %s) has degree %d, expected shift %d"
                        % (t.basis[i], s.basis[j], t.degree[i] - s.degree[j],
                           self.degree_shift))
                if t.weight[i] < s.weight[j] + self.min_weight:
                    raise InputError(
                        "entry (%s, %s) raises weight by %d < %d"
                        % (t.basis[i], s.basis[j], t.weight[i] - s.weight[j],
                           self.min_weight))

    @classmethod
    def from_entries(cls, source, target, degree_shift, min_weight, entries):
        """entries: iterable of (target symbol, source symbol, scalar)."""
        cols = {}
        for w, v, c in entries:
            i, j = target.index(w), source.index(v)
            col = cols.setdefault(j, {})
            col[i] = norm(col.get(i, 0) + c)
        return cls(source, target, degree_shift, min_weight, cols)

    @classmethod
    def identity(cls, space):
        return cls(space, space, 0, 0, {j: {j: 1} for j in range(space.dim)},
                   check=False)

    @classmethod
    def zero(cls, source, target, degree_shift=0, min_weight=0):
        return cls(source, target, degree_shift, min_weight, {}, check=False)

    def entries(self):
        for j in sorted(self.cols):
            col = self.cols[j]
            for i in sorted(col):
                yield i, j, col[i]

    def entry(self, i, j):
        return self.cols.get(j, {}).get(i, 0)

    def apply(self, vec):
        out = {}
        for j, c in vec.items():
            col = self.cols.get(j)
            if col:
                vaddto(out, col, c)
        return out

    def __call__(self, vec):
        return self.apply(vec)

    def __matmul__(self, other):
        """Composition self o other."""
        if other.target != self.source:
            raise InputError("composition of incompatible maps")
        cols = {}
        for j, col in other.cols.items():
            v = self.apply(col)
            if v:
                cols[j] = v
        return LinearMap(other.source, self.target,
                         self.degree_shift + other.degree_shift,
                         self.min_weight + other.min_weight, cols, check=False)

    def _combine(self, other, s):
        if (other.source != self.source or other.target != self.target
                or other.degree_shift != self.degree_shift) and other.cols:
            if other.degree_shift != self.degree_shift and self.cols:
                raise InputError("sum of maps of different degree")
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, col in other.cols.items():
            tgt = cols.setdefault(j, {})
            vaddto(tgt, col, s)
            if not tgt:
                del cols[j]
        deg = self.degree_shift if self.cols or not other.cols else other.degree_shift
        return LinearMap(self.source, self.target, deg,
                         min(self.min_weight, other.min_weight), cols, check=False)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, s):
        return LinearMap(self.source, self.target, self.degree_shift,
                         self.min_weight,
                         {j: vscale(c, s) for j, c in self.cols.items()},
                         check=False)

    def is_zero(self):
        return not self.cols

    def __eq__(self, other):
        return (isinstance(other, LinearMap) and self.source == other.source
                and self.target == other.target and self.cols == other.cols)

    def __hash__(self):
        return hash((self.source, self.target, len(self.cols)))

    def __repr__(self):
        return "LinearMap(%d->%d, deg %+d, wt>=%d, %d entries)" % (
            self.source.dim, self.target.dim, self.degree_shift,
            self.min_weight, sum(len(c) for c in self.cols.values()))

    def weight_component(self, k):
        """Entries raising weight by exactly k."""
        sw, tw = self.source.weight, self.target.weight
        cols = {}
        for j, col in self.cols.items():
            sel = {i: c for i, c in col.items() if tw[i] - sw[j] == k}
            if sel:
                cols[j] = sel
        return LinearMap(self.source, self.target, self.degree_shift, k, cols,
                         check=False)

    def weight_components(self):
        sw, tw = self.source.weight, self.target.weight
        ks = {tw[i] - sw[j] for j, col in self.cols.items() for i in col}
        return {k: self.weight_component(k) for k in sorted(ks)}

    def with_min_weight(self, m):
        return LinearMap(self.source, self.target, self.degree_shift, m,
                         self.cols)

    def retarget(self, source, target):
        """Same matrix viewed between spaces with identical basis layout."""
        return LinearMap(source, target, self.degree_shift, self.min_weight,
                         self.cols)

    def actual_min_weight(self):
        sw, tw = self.source.weight, self.target.weight
        ks = [tw[i] - sw[j] for j, col in self.cols.items() for i in col]
        return min(ks) if ks else None

    def row_dicts(self):
        rows = {}
        for j, col in self.cols.items():
            for i, c in col.items():
                rows.setdefault(i, {})[j] = c
        return rows

    def rank(self):
        return rank(list(self.cols.values()))


class FilteredComplex:
    __slots__ = ("space", "d")

    def __init__(self, space, d, check=True):
        if d.source != space or d.target != space:
            raise InputError("differential must be an endomorphism of the space")
        if d.degree_shift != 1:
            raise InputError("differential must have degree 1")
        if d.actual_min_weight() is not None and d.actual_min_weight() < 0:
            raise InputError("differential must not lower weight")
        self.space = space
        self.d = d if d.min_weight == 0 else d.with_min_weight(0)
        if check and not (self.d @ self.d).is_zero():
            raise InputError("d o d is not zero")

    @classmethod
    def zero(cls, space):
        return cls(space, LinearMap.zero(space, space, 1, 0), check=False)

    def __eq__(self, other):
        return (isinstance(other, FilteredComplex) and self.space == other.space
                and self.d == other.d)

    def __hash__(self):
        return hash(self.space)

    def is_minimal(self):
        return self.d.weight_component(0).is_zero()

    def __repr__(self):
        return "FilteredComplex(%r)" % (self.space,)


class GradedMixedComplex:
    """Split complex with weight-0 d and weight-k components delta_k."""

    __slots__ = ("space", "d", "deltas")

    def __init__(self, space, d, deltas=None, check=True):
        self.space = space
        self.d = d.with_min_weight(0) if d.min_weight != 0 else d
        self.deltas = {}
        for k, dk in sorted((deltas or {}).items()):
            if k < 1:
                raise InputError("delta index must be >= 1, got %d" % k)
            if not dk.is_zero():
                self.deltas[k] = dk if dk.min_weight == k else dk.with_min_weight(k)
        if check:
            self.validate()

    def validate(self):
        sp = self.space
        for name, m, k in [("d", self.d, 0)] + [
                ("delta_%d" % k, v, k) for k, v in self.deltas.items()]:
            if m.source != sp or m.target != sp or m.degree_shift != 1:
                raise InputError("%s must be a degree-1 endomorphism" % name)
            comps = m.weight_components()
            if any(w != k for w in comps):
                raise InputError("%s is not of weight exactly %d" % (name, k))
        bad = self.failing_relation()
        if bad is not None:
            raise InputError("graded mixed relation fails at weight %d" % bad)

    def failing_relation(self):
        for k in range(0, self.max_relation_weight() + 1):
            if not self.relation(k).is_zero():
                return k
        return None

    def component(self, k):
        if k == 0:
            return self.d
        return self.deltas.get(k) or LinearMap.zero(self.space, self.space, 1, k)

    def max_relation_weight(self):
        lo, hi = self.space.weight_span()
        return hi - lo

    def relation(self, k):
        acc = LinearMap.zero(self.space, self.space, 2, k)
        for i in range(k + 1):
            acc = acc + self.component(i) @ self.component(k - i)
        return acc

    def __eq__(self, other):
        return (isinstance(other, GradedMixedComplex) and self.space == other.space
                and self.d == other.d and self.deltas == other.deltas)

    def __hash__(self):
        return hash(self.space)


class DeformationRetract:
    """Retract (i, p, h) of big onto small with i p - 1 = d h + h d."""

    __slots__ = ("big", "small", "i", "p", "h")

    def __init__(self, big, small, i, p, h, check=True):
        self.big, self.small, self.i, self.p, self.h = big, small, i, p, h
        if check:
            problems = self.failing_identities()
            if problems:
                raise InputError("not a deformation retract: " + ", ".join(problems))

    def __eq__(self, other):
        return (isinstance(other, DeformationRetract) and self.big == other.big
                and self.small == other.small and self.i == other.i
                and self.p == other.p and self.h == other.h)

    def __hash__(self):
        return hash((self.big, self.small))

    def failing_identities(self, side=False):
        W, V = self.big.space, self.small.space
        i, p, h = self.i, self.p, self.h
        if (i.source, i.target, p.source, p.target, h.source, h.target) != (
                V, W, W, V, W, W):
            return ["shape"]
        if i.degree_shift or p.degree_shift or h.degree_shift != -1:
            return ["degree"]
        out = []
        dW, dV = self.big.d, self.small.d
        if not (dW @ i - i @ dV).is_zero():
            out.append("i chain map")
        if not (dV @ p - p @ dW).is_zero():
            out.append("p chain map")
        if p @ i != LinearMap.identity(V):
            out.append("p i = 1")
        if (i @ p - LinearMap.identity(W)) != (dW @ h + h @ dW):
            out.append("i p - 1 = d h + h d")
        if side:
            out += self.failing_side_conditions()
        return out

    def failing_side_conditions(self):
        out = []
        if not (self.p @ self.h).is_zero():
            out.append("p h = 0")
        if not (self.h @ self.i).is_zero():
            out.append("h i = 0")
        if not (self.h @ self.h).is_zero():
            out.append("h h = 0")
        return out

    def has_side_conditions(self):
        return not self.failing_side_conditions()

    @classmethod
    def identity(cls, c):
        one = LinearMap.identity(c.space)
        return cls(c, c, one, one, LinearMap.zero(c.space, c.space, -1, 0),
                   check=False)

    def normalized(self):
        """Replace h by -h d h, which keeps the retract and squares to 0."""
        h = self.h
        d = self.big.d
        h2 = (h @ d @ h).scaled(-1)
        return DeformationRetract(self.big, self.small, self.i, self.p,
                                  h2.with_min_weight(0))


# signs and unshuffles

def koszul_sign(permutation, degrees):
    """Sign of reordering x_1...x_n into x_{perm[0]}...x_{perm[n-1]}.

    ``permutation`` lists 1-based positions of the original factors in
    their new order; ``degrees[k]`` is the degree of the k-th original factor.
    """
    n = len(permutation)
    if len(degrees) != n:
        raise InputError("permutation and degree list lengths differ")
    if sorted(permutation) != list(range(1, n + 1)):
        raise InputError("not a permutation of 1..%d" % n)
    sign = 1
    for a in range(n):
        pa = permutation[a]
        for b in range(a + 1, n):
            pb = permutation[b]
            if pa > pb and degrees[pa - 1] % 2 and degrees[pb - 1] % 2:
                sign = -sign
    return sign


def perm_sign(seq, parity):
    """Koszul sign of sorting the list of factors ``seq`` (0-based labels)."""
    sign = 1
    n = len(seq)
    for a in range(n):
        if not parity[a]:
            continue
        sa = seq[a]
        for b in range(a + 1, n):
            if parity[b] and seq[b] < sa:
                sign = -sign
    return sign


def enumerate_unshuffles(block_sizes, arity_bound=ARITY_BOUND):
    """Inverse shuffles for the given block sizes.

    Each result is ``(perm, None)`` where ``perm`` lists 1-based positions,
    block by block, each block increasing.  The second slot is a placeholder
    to be filled with a Koszul sign once degrees are known.
    """
    sizes = list(block_sizes)
    if any(s < 0 for s in sizes):
        raise InputError("block sizes must be nonnegative")
    n = sum(sizes)
    if n > arity_bound:
        raise ResourceError("arity %d exceeds bound %d" % (n, arity_bound))
    out = []

    def rec(remaining, k, acc):
        if k == len(sizes):
            out.append((tuple(acc), None))
            return
        for block in combinations(remaining, sizes[k]):
            rest = [x for x in remaining if x not in block]
            rec(rest, k + 1, acc + list(block))

    rec(list(range(1, n + 1)), 0, [])
    out.sort()
    return out


def unshuffle_count_bruteforce(block_sizes):
    n = sum(block_sizes)
    cnt = 0
    for perm in permutations(range(1, n + 1)):
        pos, ok = 0, True
        for s in block_sizes:
            blk = perm[pos:pos + s]
            if list(blk) != sorted(blk):
                ok = False
                break
            pos += s
        cnt += ok
    return cnt


# filtration predicates

def _blocks(space):
    """Basis indices grouped by (degree, weight)."""
    out = {}
    for j in range(space.dim):
        out.setdefault((space.degree[j], space.weight[j]), []).append(j)
    return out


def _check_chain_map(f, src, tgt):
    if src is None or tgt is None:
        return
    if f.source != src.space or f.target != tgt.space:
        raise InputError("map does not match the given complexes")
    if not (tgt.d @ f - f @ src.d).is_zero():
        raise InputError("map does not commute with the differentials")


@dataclass
class AdmissibleReport:
    ok: bool
    witness: dict   # kernel vector of Gr(f) as symbol -> scalar, or {}
    weight: int = None

    def __bool__(self):
        return self.ok


def is_admissible_mono(f, source=None, target=None):
    """Admissible monos are the maps injective on the associated graded."""
    if f.degree_shift != 0 or (f.actual_min_weight() or 0) < 0:
        raise InputError("expected a degree-0 filtered map")
    _check_chain_map(f, source, target)
    f0 = f.weight_component(0)
    by_w = {}
    for j in range(f.source.dim):
        by_w.setdefault(f.source.weight[j], []).append(j)
    for w in sorted(by_w):
        cols = by_w[w]
        red = Reducer()
        for j in cols:
            v = f0.cols.get(j, {})
            if not red.add(v):
                comb = red.express(v)
                # v - sum comb_k image(cols[k]) = 0
                ker = {j: 1}
                for k, c in comb.items():
                    vaddto(ker, {cols[k]: 1}, -c)
                wit = {f.source.basis[k]: c for k, c in sorted(ker.items())}
                return AdmissibleReport(False, wit, w)
    return AdmissibleReport(True, {})


def gr_differential(c):
    return c.d.weight_component(0)


def homology_ranks(space, d0):
    """{(degree, weight): dim H} for a weight-preserving differential."""
    out = {}
    for (deg, w), idx in _blocks(space).items():
        out[(deg, w)] = len(idx) - _rank_from(d0, idx) - _rank_into(space, d0, deg, w)
    return out


def _rank_from(d0, idx):
    return rank([d0.cols.get(j, {}) for j in idx])


def _rank_into(space, d0, deg, w):
    idx = [j for j in range(space.dim)
           if space.degree[j] == deg - 1 and space.weight[j] == w]
    return _rank_from(d0, idx)


@dataclass
class QuasiIsoReport:
    ok: bool
    per_weight: dict   # weight -> {"source": {deg: rank}, "target": ..., "cone_acyclic": bool}

    def __bool__(self):
        return self.ok


def is_graded_quasi_iso(f, source, target):
    """Quasi-iso on Gr, tested by acyclicity of the mapping cone per weight."""
    if f.degree_shift != 0:
        raise InputError("expected a degree-0 map")
    _check_chain_map(f, source, target)
    f0 = f.weight_component(0)
    d0s, d0t = gr_differential(source), gr_differential(target)
    hs = homology_ranks(source.space, d0s)
    ht = homology_ranks(target.space, d0t)
    weights = sorted(set(source.space.weight) | set(target.space.weight))
    ok = True
    report = {}
    ns = source.space.dim
    for w in weights:
        # cone basis: source elements (shifted down by one) then target elements
        sidx = [j for j in range(ns) if source.space.weight[j] == w]
        tidx = [j for j in range(target.space.dim) if target.space.weight[j] == w]
        cols = {}
        deg = {}
        for j in sidx:
            v = {ns + i: c for i, c in f0.cols.get(j, {}).items()}
            vaddto(v, d0s.cols.get(j, {}), -1)
            cols[j] = v
            deg[j] = source.space.degree[j] - 1
        for j in tidx:
            cols[ns + j] = {ns + i: c for i, c in d0t.cols.get(j, {}).items()}
            deg[ns + j] = target.space.degree[j]
        by_deg = {}
        for j, dg in deg.items():
            by_deg.setdefault(dg, []).append(j)
        acyclic = True
        for dg, idx in by_deg.items():
            r_out = rank([cols[j] for j in idx])
            r_in = rank([cols[j] for j in by_deg.get(dg - 1, [])])
            if len(idx) != r_out + r_in:
                acyclic = False
        ok = ok and acyclic
        report[w] = {
            "source": {k[0]: v for k, v in sorted(hs.items()) if k[1] == w and v},
            "target": {k[0]: v for k, v in sorted(ht.items()) if k[1] == w and v},
            "cone_acyclic": acyclic,
        }
    return QuasiIsoReport(ok, report)


# graded mixed <-> filtered

def tot(gm):
    d = gm.d
    for k, dk in gm.deltas.items():
        d = d + dk
    return FilteredComplex(gm.space, d.with_min_weight(0), check=True)


def split(c):
    comps = c.d.weight_components()
    d = comps.pop(0, LinearMap.zero(c.space, c.space, 1, 0))
    return GradedMixedComplex(c.space, d, comps, check=False)


def check_gm_infinity_morphism(phi, source, target):
    """Check sum_{i+j=k} (delta_i phi_j - phi_i delta_j) = 0 for all k.

    Returns ``(ok, failing_k)``.
    """
    for k, f in phi.items():
        if k < 0:
            raise InputError("component index must be >= 0")
        if f.source != source.space or f.target != target.space:
            raise InputError("component %d has the wrong shape" % k)
        if f.degree_shift != 0:
            raise InputError("component %d must have degree 0" % k)
        if any(w != k for w in f.weight_components()):
            raise InputError("component %d must have weight exactly %d" % (k, k))
    if 0 not in phi:
        raise InputError("phi_0 must be declared")
    lo = min(source.space.weight_span()[0], target.space.weight_span()[0])
    hi = max(source.space.weight_span()[1], target.space.weight_span()[1])
    zero = LinearMap.zero(source.space, target.space, 0, 0)
    for k in range(0, hi - lo + 1):
        acc = LinearMap.zero(source.space, target.space, 1, k)
        for i in range(k + 1):
            fj = phi.get(k - i, zero)
            fi = phi.get(i, zero)
            acc = acc + target.component(i) @ fj - fi @ source.component(k - i)
        if not acc.is_zero():
            return False, k
    return True, None


# minimal models

def _sub_basis_space(space, idx, names=None):
    return GradedSpace([names[k] if names else space.basis[j] for k, j in enumerate(idx)],
                       [space.degree[j] for j in idx], [space.weight[j] for j in idx])


def contraction_of_gr(c):
    """Retract of (W, d0) onto its homology, d0 = weight-0 part of d.

    Returns (V space, i cols, p cols, h cols) with i p - 1 = d0 h + h d0 and
    the side conditions.
    """
    W = c.space
    d0 = c.d.weight_component(0)
    blocks = _blocks(W)
    H_vecs = []     # (representative vector, symbol index for naming)
    h_cols = {}
    p_rows = []     # functional per V element, as dict on W indices
    for (deg, w) in sorted(blocks, key=lambda t: (t[1], t[0])):
        idx = blocks[(deg, w)]
        prev = blocks.get((deg - 1, w), [])
        # C^{deg-1}: columns of prev with independent images; B^deg = their images
        red = Reducer()
        C_prev, B_here = [], []
        for j in prev:
            img = d0.cols.get(j, {})
            if red.add(img):
                C_prev.append(j)
                B_here.append(img)
        # Z^deg = kernel of d0 on this block
        zrows = _kernel_in(d0, idx)
        # H^deg: kernel vectors independent of B
        zred = Reducer(B_here)
        H_here = []
        for z in zrows:
            if zred.add(z):
                H_here.append(z)
        # C^deg: the same standard vectors the next degree uses as C_prev
        cred = Reducer()
        C_here = []
        for j in idx:
            if cred.add(d0.cols.get(j, {})):
                C_here.append({j: 1})
        basis = B_here + H_here + C_here
        # coordinate functionals via the inverse change of basis
        full = Reducer(basis)
        coords = {}
        for j in idx:
            comb = full.express({j: 1})
            for k, cc in comb.items():
                coords.setdefault(k, {})[j] = cc
        nb = len(B_here)
        for t, j in enumerate(C_prev):
            # h(b_t) = -c_t where b_t = d0(e_j)
            fn = coords.get(t, {})
            for src, cc in fn.items():
                vaddto(h_cols.setdefault(src, {}), {j: 1}, -cc)
        for t, z in enumerate(H_here):
            H_vecs.append(z)
            p_rows.append(coords.get(nb + t, {}))
    h_cols = {j: v for j, v in h_cols.items() if v}
    return H_vecs, p_rows, h_cols


def _kernel_in(d0, idx):
    """Kernel of d0 restricted to the span of idx, in W coordinates."""
    out = []
    red = Reducer()
    added = []
    for j in idx:
        img = d0.cols.get(j, {})
        comb = red.express(img)
        if comb is None:
            red.add(img)
            added.append(j)
        else:
            v = {j: 1}
            for k, cc in comb.items():
                vaddto(v, {added[k]: 1}, -cc)
            out.append(v)
    return out


def _name_for(vec, space, used):
    lead = min(vec)
    name = space.basis[lead]
    base, n = name, 1
    while name in used:
        n += 1
        name = "%s~%d" % (base, n)
    used.add(name)
    return name


def minimal_model(c):
    """Minimal complex V with a deformation retract of c onto V."""
    W = c.space
    H_vecs, p_rows, h_cols = contraction_of_gr(c)
    # order V by the position of each representative's leading basis element
    order = sorted(range(len(H_vecs)), key=lambda t: min(H_vecs[t]))
    H_vecs = [H_vecs[t] for t in order]
    p_rows = [p_rows[t] for t in order]
    used = set()
    names = [_name_for(v, W, used) for v in H_vecs]
    leads = [min(v) for v in H_vecs]
    V = GradedSpace(names, [W.degree[j] for j in leads], [W.weight[j] for j in leads])
    i0 = LinearMap(V, W, 0, 0, {t: v for t, v in enumerate(H_vecs)})
    pcols = {}
    for t, row in enumerate(p_rows):
        for j, cc in row.items():
            pcols.setdefault(j, {})[t] = cc
    p0 = LinearMap(W, V, 0, 0, pcols)
    h0 = LinearMap(W, W, -1, 0, h_cols)
    # perturbation lemma for i p - 1 = d h + h d:
    # A = sum (delta h)^n delta, i' = i + h A i, p' = p + p A h, h' = h + h A h
    delta = c.d - c.d.weight_component(0)
    A = _perturbation_series(delta, h0, c)
    dV = p0 @ A @ i0
    i1 = i0 + h0 @ A @ i0
    p1 = p0 + p0 @ A @ h0
    h1 = h0 + h0 @ A @ h0
    small = FilteredComplex(V, dV.with_min_weight(0))
    r = DeformationRetract(c, small, i1.with_min_weight(0), p1.with_min_weight(0),
                           h1.with_min_weight(0))
    return small, r


def _perturbation_series(delta, k, c):
    """A = sum_n (delta k)^n delta; terminates since delta raises weight."""
    W = c.space
    lo, hi = W.weight_span()
    term = delta
    acc = LinearMap.zero(W, W, 1, 0)
    for _ in range(hi - lo + 2):
        if term.is_zero():
            break
        acc = acc + term
        term = delta @ k @ term
    if not term.is_zero():
        raise ResourceError("perturbation series did not terminate")
    return acc


def homology_dims_oracle(c):
    """Independent Gr-homology ranks via plain row reduction of d0 blocks."""
    W = c.space
    d0 = c.d.weight_component(0)
    rows = d0.row_dicts()
    out = {}
    for (deg, w), idx in _blocks(W).items():
        idxs = set(idx)
        # rank of d0 out of this block
        sub_rows = [{j: cc for j, cc in r.items() if j in idxs} for r in rows.values()]
        r_out = len(rref([r for r in sub_rows if r])[1])
        prev = {j for j in range(W.dim) if W.degree[j] == deg - 1 and W.weight[j] == w}
        sub_rows = [{j: cc for j, cc in r.items() if j in prev} for r in rows.values()]
        r_in = len(rref([r for r in sub_rows if r])[1])
        dim = len(idx) - r_out - r_in
        if dim:
            out[(deg, w)] = dim
    return out


def space_dims(space):
    out = {}
    for j in range(space.dim):
        key = (space.degree[j], space.weight[j])
        out[key] = out.get(key, 0) + 1
    return out


def binomial(n, k):
    return comb(n, k)
