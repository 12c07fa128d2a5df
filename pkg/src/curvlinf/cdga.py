"""Finite-dimensional graded mixed cdgas given by structure constants."""

from dataclasses import dataclass, field

from .errors import InputError
from .gradedcore import GradedSpace, LinearMap
from .linalg import norm, vaddto, vscale


class GradedMixedCdga:
    """Unital graded-commutative algebra with a weight-0 differential d and
    a derivation delta whose components raise weight by at least one.

    ``mult`` maps index pairs ``(i, j)`` with ``i <= j`` to the product
    vector; the remaining products follow by graded commutativity.
    """

    __slots__ = ("space", "unit", "mult", "d", "delta", "_table")

    def __init__(self, space, unit, mult, d=None, delta=None, check=True):
        self.space = space
        self.unit = space.index(unit) if isinstance(unit, str) else unit
        clean = {}
        for (i, j), v in mult.items():
            if i > j:
                s = -1 if space.degree[i] % 2 and space.degree[j] % 2 else 1
                i, j, v = j, i, vscale(v, s)
            v = {k: norm(c) for k, c in v.items() if c}
            if v:
                if (i, j) in clean and clean[(i, j)] != v:
                    raise InputError("inconsistent products for (%s, %s)"
                                     % (space.basis[i], space.basis[j]))
                clean[(i, j)] = v
        u = self.unit
        for i in range(space.dim):
            key = (min(u, i), max(u, i))
            if key not in clean:
                clean[key] = {i: 1}
        self.mult = clean
        self.d = d if d is not None else LinearMap.zero(space, space, 1, 0)
        self.delta = delta if delta is not None else LinearMap.zero(space, space, 1, 1)
        self._table = None
        if check:
            self._validate_shape()

    def _validate_shape(self):
        sp = self.space
        if sp.degree[self.unit] != 0 or sp.weight[self.unit] != 0:
            raise InputError("unit must have degree 0 and weight 0")
        for (i, j), v in self.mult.items():
            for k in v:
                if sp.degree[k] != sp.degree[i] + sp.degree[j]:
                    raise InputError("product of %s and %s has wrong degree"
                                     % (sp.basis[i], sp.basis[j]))
                if sp.weight[k] != sp.weight[i] + sp.weight[j]:
                    raise InputError("product of %s and %s is not weight-additive"
                                     % (sp.basis[i], sp.basis[j]))
        for name, m in (("d", self.d), ("delta", self.delta)):
            if m.source != sp or m.target != sp or m.degree_shift != 1:
                raise InputError("%s must be a degree-1 endomorphism" % name)
        if any(k != 0 for k in self.d.weight_components()):
            raise InputError("d must have weight exactly 0")
        if any(k < 1 for k in self.delta.weight_components()):
            raise InputError("delta must raise weight by at least 1")

    @property
    def dim(self):
        return self.space.dim

    def sign(self, i, j):
        return -1 if self.space.degree[i] % 2 and self.space.degree[j] % 2 else 1

    def mul_basis(self, i, j):
        if i <= j:
            return self.mult.get((i, j), {})
        v = self.mult.get((j, i), {})
        if not v:
            return v
        return v if self.sign(i, j) == 1 else vscale(v, -1)

    def mul(self, u, v):
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                p = self.mul_basis(i, j)
                if p:
                    vaddto(out, p, a * b)
        return out

    def unit_vec(self):
        return {self.unit: 1}

    def total_differential(self):
        return self.d + self.delta

    def delta_component(self, r):
        return self.delta.weight_component(r)

    def __eq__(self, other):
        return (isinstance(other, GradedMixedCdga) and self.space == other.space
                and self.unit == other.unit and self.mult == other.mult
                and self.d == other.d and self.delta == other.delta)

    def __hash__(self):
        return hash(self.space)

    def __repr__(self):
        return "GradedMixedCdga(%r)" % (self.space,)


def Cdga(space, unit, mult, d=None, check=True):
    """Base algebra of an algebroid: weights 0, degrees <= 0, no delta."""
    if any(w != 0 for w in space.weight):
        raise InputError("base cdga must sit in weight 0")
    if any(e > 0 for e in space.degree):
        raise InputError("base cdga must be concentrated in nonpositive degrees")
    return GradedMixedCdga(space, unit, mult, d, None, check=check)


def ground_field():
    sp = GradedSpace(["1"], [0], [0])
    return GradedMixedCdga(sp, 0, {(0, 0): {0: 1}})


@dataclass
class CdgaReport:
    ok: bool
    failures: list = field(default_factory=list)   # (tag, detail)

    def __bool__(self):
        return self.ok

    def first(self):
        return self.failures[0] if self.failures else None


def is_derivation(B, D, degree):
    """Check D(ab) = D(a) b + (-1)^{degree |a|} a D(b) on basis pairs."""
    sp = B.space
    n = sp.dim
    for i in range(n):
        for j in range(n):
            lhs = D.apply(B.mul_basis(i, j))
            rhs = B.mul(D.cols.get(i, {}), {j: 1})
            s = -1 if degree % 2 and sp.degree[i] % 2 else 1
            vaddto(rhs, B.mul({i: 1}, D.cols.get(j, {})), s)
            if lhs != rhs:
                return (sp.basis[i], sp.basis[j])
    return None


def check_cdga(B):
    sp = B.space
    n = sp.dim
    rep = CdgaReport(True)

    def fail(tag, detail):
        rep.ok = False
        rep.failures.append((tag, detail))

    u = B.unit
    for i in range(n):
        if B.mul_basis(u, i) != {i: 1}:
            fail("unit", sp.basis[i])
            break
    for (i, j), v in B.mult.items():
        if i == j and sp.degree[i] % 2 and v:
            fail("commutativity", (sp.basis[i], sp.basis[i]))
    for i in range(n):
        for j in range(n):
            ij = B.mul_basis(i, j)
            for k in range(n):
                lhs = B.mul(ij, {k: 1})
                rhs = B.mul({i: 1}, B.mul_basis(j, k))
                if lhs != rhs:
                    fail("associativity", (sp.basis[i], sp.basis[j], sp.basis[k]))
                    break
            else:
                continue
            break
        else:
            continue
        break
    bad = is_derivation(B, B.d, 1)
    if bad:
        fail("d derivation", bad)
    bad = is_derivation(B, B.delta, 1)
    if bad:
        fail("delta derivation", bad)
    if not (B.d @ B.d).is_zero():
        fail("d squared", "")
    # per weight: [d, delta_r] + sum_{p+q=r} delta_p delta_q = 0
    comps = B.delta.weight_components()
    lo, hi = sp.weight_span()
    for r in range(1, hi - lo + 1):
        acc = LinearMap.zero(sp, sp, 2, r)
        dr = comps.get(r)
        if dr is not None:
            acc = acc + B.d @ dr + dr @ B.d
        for p in range(1, r):
            dp, dq = comps.get(p), comps.get(r - p)
            if dp is not None and dq is not None:
                acc = acc + dp @ dq
        if not acc.is_zero():
            fail("delta relation", "weight %d" % r)
    return rep
