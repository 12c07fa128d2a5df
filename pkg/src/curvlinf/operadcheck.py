"""Tree calculus for the free operad on the curved L-infinity generators.

A tree is either a leaf (a positive int label) or a pair ``(label, children)``
where ``label`` is an int ``k`` standing for the k-ary generator l_k, or the
string ``"d"`` for the separate unary differential of the mixed flavor.
Operad elements are dicts ``canonical tree -> scalar``.

Two sign conventions are supported:

* ``"unshifted"``: l_k has degree 2 - k and is graded antisymmetric;
  this is the convention of the printed low-arity identities.
* ``"shifted"``: every generator has degree 1 and is graded symmetric;
  this is what algebras on the suspension see, and what
  :mod:`curvlinf.curvedalg` evaluates.

The differential is ``d(f) = d o f - (-1)^{|f|} f o d`` extended to trees as
a derivation over the preorder of vertices.
"""

from dataclasses import dataclass, field
from itertools import combinations, permutations
from time import perf_counter

from .errors import InputError, ResourceError
from .gradedcore import perm_sign
from .linalg import Reducer, norm, vaddto

CONVENTIONS = ("unshifted", "shifted")
FLAVORS = ("classical", "mixed", "graded-mixed")
DEFAULT_ARITY_BOUND = 6


def is_leaf(t):
    return isinstance(t, int)


def node(label, *children):
    return (label, tuple(children))


def gen(label, n=None):
    """The corolla l_n (or d) with leaves 1..n."""
    if label == "d":
        n = 1
    elif n is None:
        n = label
    return (label, tuple(range(1, n + 1)))


def vertex_degree(label, convention):
    if convention == "shifted" or label == "d":
        return 1
    return 2 - label


def leaves(t):
    if is_leaf(t):
        return [t]
    out = []
    for c in t[1]:
        out.extend(leaves(c))
    return out


def tree_degree(t, convention):
    if is_leaf(t):
        return 0
    return vertex_degree(t[0], convention) + sum(tree_degree(c, convention) for c in t[1])


def vertices(t):
    """Vertices in preorder as (label, arity)."""
    if is_leaf(t):
        return []
    out = [(t[0], len(t[1]))]
    for c in t[1]:
        out.extend(vertices(c))
    return out


def tree_weight(t, flavor="mixed"):
    """Number of l_0 / l_1 vertices (d has weight 0)."""
    return sum(1 for lab, _ in vertices(t) if lab in (0, 1))


def arity(t):
    return len(leaves(t))


def _label_code(label):
    return -1 if label == "d" else label


def _key(t):
    if is_leaf(t):
        return (0, t)
    return (1, _label_code(t[0]), tuple(_key(c) for c in t[1]))


def _sort_key(t):
    ls = leaves(t)
    if ls:
        return (1, min(ls), ())
    return (0, 0, _key(t))


def canon(t, convention):
    """Canonical representative: returns (sign, tree) or (0, None)."""
    if is_leaf(t):
        return 1, t
    label, children = t
    sign = 1
    cs = []
    for c in children:
        s, cc = canon(c, convention)
        if s == 0:
            return 0, None
        sign *= s
        cs.append(cc)
    keys = [_sort_key(c) for c in cs]
    order = sorted(range(len(cs)), key=lambda i: keys[i])
    degs = [tree_degree(c, convention) % 2 for c in cs]
    # sign of reordering: Koszul on subtree degrees, times sgn for antisymmetry
    ks = perm_sign(order, [degs[i] for i in order])
    sign *= ks
    if convention == "unshifted" and label != "d":
        sign *= _perm_parity_sign(order)
    new = [cs[i] for i in order]
    # equal adjacent leafless children whose swap is odd kill the tree
    for a in range(len(new) - 1):
        if not leaves(new[a]) and _key(new[a]) == _key(new[a + 1]):
            swap = -1 if degs[order[a]] else 1
            if convention == "unshifted" and label != "d":
                swap = -swap
            if swap == -1:
                return 0, None
    return sign, (label, tuple(new))


def _perm_parity_sign(order):
    sign = 1
    n = len(order)
    for a in range(n):
        for b in range(a + 1, n):
            if order[a] > order[b]:
                sign = -sign
    return sign


def relabel(t, mapping):
    if is_leaf(t):
        return mapping[t]
    return (t[0], tuple(relabel(c, mapping) for c in t[1]))


class OperadElement:
    """Finite linear combination of canonical trees of a common arity."""

    __slots__ = ("terms", "convention")

    def __init__(self, terms=None, convention="shifted"):
        if convention not in CONVENTIONS:
            raise InputError("unknown convention %r" % convention)
        self.convention = convention
        self.terms = {}
        for t, c in (terms or {}).items():
            self.add_tree(t, c)

    def add_tree(self, t, c):
        if not c:
            return
        s, ct = canon(t, self.convention)
        if s == 0:
            return
        x = self.terms.get(ct, 0) + s * c
        if x:
            self.terms[ct] = norm(x)
        else:
            self.terms.pop(ct, None)

    def copy(self):
        out = OperadElement(convention=self.convention)
        out.terms = dict(self.terms)
        return out

    def __add__(self, other):
        out = self.copy()
        for t, c in other.terms.items():
            out.add_tree(t, c)
        return out

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, s):
        out = OperadElement(convention=self.convention)
        if s:
            out.terms = {t: norm(c * s) for t, c in self.terms.items()}
        return out

    def __eq__(self, other):
        return (isinstance(other, OperadElement)
                and self.convention == other.convention
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms))

    def is_zero(self):
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda tc: _key(tc[0]))

    def __repr__(self):
        return format_element(self)

    def act(self, sigma):
        """Relabel leaves: leaf i becomes sigma[i-1]."""
        mapping = {i + 1: s for i, s in enumerate(sigma)}
        out = OperadElement(convention=self.convention)
        for t, c in self.terms.items():
            out.add_tree(relabel(t, mapping), c)
        return out


def element(tree, convention="shifted", coeff=1):
    return OperadElement({tree: coeff}, convention)


def format_tree(t):
    if is_leaf(t):
        return str(t)
    name = "d" if t[0] == "d" else "l%d" % t[0]
    return "%s(%s)" % (name, ",".join(format_tree(c) for c in t[1]))


def format_element(x):
    if not x.terms:
        return "0"
    parts = []
    for t, c in x.sorted_terms():
        parts.append("%s*%s" % (c, format_tree(t)))
    return " + ".join(parts)


# the generator formula

def composite(p_label, q_label, p, q, S, n):
    """Tree l_p(l_q(x_S), x_rest) (q_label may be "d")."""
    rest = [i for i in range(1, n + 1) if i not in S]
    inner = (q_label, tuple(S))
    return (p_label, (inner,) + tuple(rest))


def _unshuffle_sign(S, rest):
    # sign of the permutation listing S then rest
    order = list(S) + list(rest)
    return _perm_parity_sign([i - 1 for i in order])


def generator_boundary(label, n, convention, flavor="classical"):
    """The image of the generator under the differential (one vertex)."""
    mixed = flavor in ("mixed", "graded-mixed")
    out = OperadElement(convention=convention)
    if label == "d":
        out.add_tree(("d", (("d", (1,)),)), -1)
        return out
    for p in range(1, n + 2):
        q = n + 1 - p
        for S in combinations(range(1, n + 1), q):
            rest = [i for i in range(1, n + 1) if i not in S]
            t = composite(p, q, p, q, S, n)
            c = _coefficient(convention, p, q, S, rest)
            out.add_tree(t, -c)
    if mixed:
        # d o l_n and l_n o_i d, as if d were an extra weight-0 copy of l_1
        out.add_tree(("d", ((n, tuple(range(1, n + 1))),)), -_coefficient(convention, 1, n, tuple(range(1, n + 1)), []))
        for j in range(1, n + 1):
            rest = [i for i in range(1, n + 1) if i != j]
            t = (n, (("d", (j,)),) + tuple(rest))
            out.add_tree(t, -_coefficient(convention, n, 1, (j,), rest))
    return out


def _coefficient(convention, p, q, S, rest):
    if convention == "shifted":
        return 1
    return _unshuffle_sign(S, rest) * (-1) ** ((p - 1) * q)


def differential(x, arity_bound=DEFAULT_ARITY_BOUND, flavor="classical"):
    """Apply the derivation to an operad element."""
    conv = x.convention
    out = OperadElement(convention=conv)
    for t, c in x.terms.items():
        if arity(t) > arity_bound:
            raise ResourceError("tree arity exceeds bound %d" % arity_bound)
        for tt, cc in _diff_tree(t, conv, flavor):
            out.add_tree(tt, c * cc)
    return out


def _diff_tree(t, conv, flavor):
    """Yield (tree, coeff) terms of the derivation applied to t."""
    if is_leaf(t):
        return []
    label, children = t
    out = []
    k = len(children)
    # the root vertex
    for tau, c in generator_boundary(label, k, conv, flavor).terms.items():
        sub, s = _substitute(tau, children, conv)
        out.append((sub, c * s))
    # descendants, with the preorder sign
    pre = vertex_degree(label, conv)
    for j, ch in enumerate(children):
        for sub, c in _diff_tree(ch, conv, flavor):
            new = children[:j] + (sub,) + children[j + 1:]
            out.append(((label, new), c * (-1) ** (pre % 2)))
        pre += tree_degree(ch, conv)
    return out


def _substitute(tau, children, conv):
    """Plug children[i-1] into leaf i of tau.

    The composite is read as the word (vertices of tau, children in label
    order); the sign is the Koszul sign of rearranging that word into the
    preorder of the resulting tree.
    """
    verts = vertices(tau)
    m = len(verts)
    seq, par = [], []
    counter = [0]

    def walk(t):
        if is_leaf(t):
            seq.append(m + t - 1)
            par.append(tree_degree(children[t - 1], conv) % 2)
            return
        seq.append(counter[0])
        par.append(vertex_degree(t[0], conv) % 2)
        counter[0] += 1
        for c in t[1]:
            walk(c)

    walk(tau)
    sign = perm_sign(seq, par)

    def rec(t):
        if is_leaf(t):
            return children[t - 1]
        return (t[0], tuple(rec(c) for c in t[1]))

    return rec(tau), sign


# checks

@dataclass
class DSquaredReport:
    ok: bool
    checked: int = 0
    residues: list = field(default_factory=list)   # (tree, residue) pairs
    seconds: float = 0.0

    def __bool__(self):
        return self.ok


def small_trees(arity_bound, weight_bound, max_vertices=2, flavor="classical",
                convention="shifted"):
    """Canonical trees with at most max_vertices vertices."""
    labels = list(range(0, arity_bound + 1))
    if flavor in ("mixed", "graded-mixed"):
        labels = ["d"] + labels
    found = set()

    def ar(lab):
        return 1 if lab == "d" else lab

    # one vertex
    for lab in labels:
        found.add(gen(lab))
    if max_vertices >= 2:
        for a in labels:
            for b in labels:
                ka, kb = ar(a), ar(b)
                if ka == 0:
                    continue
                n = ka - 1 + kb
                if n > arity_bound:
                    continue
                for S in combinations(range(1, n + 1), kb):
                    found.add(composite(a, b, ka, kb, S, n))
    if max_vertices >= 3:
        for shape in _shapes(labels, max_vertices, arity_bound):
            n = _count_slots(shape)
            for perm in permutations(range(1, n + 1)):
                found.add(_fill(shape, iter(perm)))
    out = []
    for t in found:
        if tree_weight(t) > weight_bound:
            continue
        s, ct = canon(t, convention)
        if s:
            out.append(ct)
    out = sorted(set(out), key=_key)
    return out


def _shapes(labels, max_vertices, arity_bound):
    """Trees with unlabeled leaves (None) and at most max_vertices vertices."""
    ar = lambda lab: 1 if lab == "d" else lab

    def rec(budget):
        out = []
        for lab in labels:
            for kids, used in slots(ar(lab), budget - 1):
                out.append(((lab, kids), used + 1))
        return out

    def slots(k, budget):
        if k == 0:
            return [((), 0)]
        out = []
        for rest, used in slots(k - 1, budget):
            out.append(((None,) + rest, used))
            if budget - used >= 1:
                for sub, u in rec(budget - used):
                    out.append(((sub,) + rest, used + u))
        return out

    return [t for t, _ in rec(max_vertices) if _count_slots(t) <= arity_bound]


def _count_slots(t):
    if t is None:
        return 1
    return sum(_count_slots(c) for c in t[1])


def _fill(t, labels):
    if t is None:
        return next(labels)
    return (t[0], tuple(_fill(c, labels) for c in t[1]))


def check_d_squared(arity_bound, weight_bound, conventions=CONVENTIONS,
                    flavors=("classical", "mixed"), max_vertices=2):
    """Verify that the differential squares to zero on generators and on
    all trees with at most ``max_vertices`` vertices within the bounds."""
    if arity_bound < 0 or weight_bound < 0:
        raise InputError("bounds must be nonnegative")
    t0 = perf_counter()
    report = DSquaredReport(True)
    for conv in conventions:
        for flavor in flavors:
            for t in small_trees(arity_bound, weight_bound, max_vertices, flavor, conv):
                x = element(t, conv)
                dd = differential(differential(x, arity_bound + 2, flavor),
                                  arity_bound + 2, flavor)
                report.checked += 1
                if not dd.is_zero():
                    report.ok = False
                    report.residues.append((conv, flavor, t, dd))
    report.seconds = perf_counter() - t0
    return report


def cobar_differential(x, arity_bound=DEFAULT_ARITY_BOUND, flavor="classical"):
    return differential(x, arity_bound, flavor)


def printed_identity(n):
    """The printed right-hand sides of -d(l_n) for n = 0, 1, 2 (unshifted)."""
    conv = "unshifted"
    x = OperadElement(convention=conv)
    l0 = (0, ())
    if n == 0:
        x.add_tree((1, (l0,)), 1)
    elif n == 1:
        x.add_tree((1, ((1, (1,)),)), 1)
        x.add_tree((2, (l0, 1)), 1)
    elif n == 2:
        x.add_tree((1, ((2, (1, 2)),)), 1)
        x.add_tree((2, ((1, (1,)), 2)), -1)
        # (l2 o_1 l1)^(12): relabel leaves 1 <-> 2
        x.add_tree((2, ((1, (2,)), 1)), 1)
        x.add_tree((3, (l0, 1, 2)), 1)
    else:
        raise InputError("only n = 0, 1, 2 are printed")
    return x


def reproduces_printed(n):
    lhs = differential(element(gen(n), "unshifted")).scaled(-1)
    return lhs == printed_identity(n), lhs


def reduce_to_clie(x):
    """Drop every tree with a vertex of arity >= 3."""
    out = OperadElement(convention=x.convention)
    for t, c in x.terms.items():
        if all(lab == "d" or k < 3 for lab, k in vertices(t)):
            out.terms[t] = c
    return out


def check_descends(arity_bound=3, weight_bound=2, convention="shifted",
                   flavor="classical", max_vertices=2):
    """The reduced images of ideal trees span a subspace J that the
    reduced differential maps into J: the quotient inherits a differential.

    Trees with up to ``max_vertices`` vertices are tested; J is spanned by
    ideal trees with one vertex more, since the second differential adds
    two vertices.  Returns ``(ok, dim_J)``.
    """
    def in_ideal(t):
        return any(lab != "d" and k >= 3 for lab, k in vertices(t))

    def reduced_d(t):
        return reduce_to_clie(differential(element(t, convention), arity_bound + 2, flavor))

    index = {}
    span = [t for t in small_trees(arity_bound, weight_bound, max_vertices + 1, flavor,
                                   convention) if in_ideal(t)]
    red = Reducer([_as_vec(reduced_d(t), index) for t in span])
    for t in small_trees(arity_bound, weight_bound, max_vertices, flavor, convention):
        if not in_ideal(t):
            continue
        z = reduce_to_clie(differential(reduced_d(t), arity_bound + 2, flavor))
        if red.express(_as_vec(z, index)) is None:
            return False, red.rank
    return True, red.rank


def _as_vec(x, index):
    v = {}
    for t, c in x.terms.items():
        k = index.setdefault(t, len(index))
        v[k] = c
    return v


def expand_structure_equation(n, flavor="classical", convention="shifted"):
    """Left-hand side of the arity-n structure equation (= -d(l_n))."""
    if flavor not in FLAVORS:
        raise InputError("unknown flavor %r" % flavor)
    return generator_boundary(n, n, convention, flavor).scaled(-1)


def raw_structure_terms(n, flavor="classical"):
    """Unnormalized (coefficient, outer, inner, S) triples in the shifted
    convention; used for term counts and by the evaluator."""
    out = []
    for p in range(1, n + 2):
        q = n + 1 - p
        for S in combinations(range(1, n + 1), q):
            out.append((1, p, q, S))
    if flavor in ("mixed", "graded-mixed"):
        out.append((1, "d", n, tuple(range(1, n + 1))))
        for j in range(1, n + 1):
            out.append((1, n, "d", (j,)))
    return out


def tree_eval_sign(t, input_degrees, convention="shifted"):
    """Koszul sign for evaluating tree t on inputs x_1..x_n of the given
    (shifted) degrees: reorder inputs into leaf order, then pass each
    vertex past the inputs to its left."""
    order = leaves(t)
    sign = perm_sign([i - 1 for i in order], [input_degrees[i - 1] % 2 for i in order])

    def rec(tr):
        # returns (sign, total input degree below)
        if is_leaf(tr):
            return 1, input_degrees[tr - 1]
        s = 1
        left = 0
        for c in tr[1]:
            sc, dc = rec(c)
            s *= sc
            if tree_degree(c, convention) % 2 and left % 2:
                s = -s
            left += dc
        return s, left

    s2, _ = rec(t)
    return sign * s2
