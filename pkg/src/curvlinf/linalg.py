"""Exact sparse linear algebra over the rationals.

Vectors are dicts ``index -> coefficient``; coefficients are ints whenever
they happen to be integral and ``Fraction`` otherwise.  Zero entries are
never stored.
"""

from fractions import Fraction


def norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def qparse(c):
    """Coerce an int, Fraction or "n/d" string to a normalized scalar."""
    if isinstance(c, bool):
        raise ValueError("boolean is not a scalar")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return norm(c)
    if isinstance(c, str):
        s = c.strip()
        if "/" in s:
            num, den = s.split("/", 1)
            n, d = int(num), int(den)
            if d == 0:
                raise ZeroDivisionError("zero denominator in %r" % c)
            return norm(Fraction(n, d))
        return int(s)
    raise ValueError("not an exact scalar: %r" % (c,))


def qformat(c):
    c = Fraction(c)
    return "%d/%d" % (c.numerator, c.denominator)


def inv(c):
    if c == 1 or c == -1:
        return c
    return norm(Fraction(1) / c)


def vadd(v, w, s=1):
    """Return v + s*w as a new vector."""
    out = dict(v)
    for k, c in w.items():
        x = out.get(k, 0) + s * c
        if x:
            out[k] = norm(x)
        else:
            out.pop(k, None)
    return out


def vaddto(v, w, s=1):
    """In place v += s*w."""
    if not s:
        return v
    for k, c in w.items():
        x = v.get(k, 0) + s * c
        if x:
            v[k] = norm(x) if type(x) is Fraction else x
        else:
            v.pop(k, None)
    return v


def vscale(v, s):
    if not s:
        return {}
    if s == 1:
        return dict(v)
    return {k: norm(s * c) for k, c in v.items()}


def vadd_entry(v, k, c):
    x = v.get(k, 0) + c
    if x:
        v[k] = norm(x) if type(x) is Fraction else x
    else:
        v.pop(k, None)


def rref(rows, ncols=None):
    """Reduced row echelon form of a list of sparse rows.

    Returns ``(reduced_rows, pivots)``; ``reduced_rows[i]`` has a 1 at
    column ``pivots[i]`` and zeros in every other pivot column.
    """
    work = [dict(r) for r in rows if r]
    out = []
    pivots = []
    for r in work:
        for p, prow in zip(pivots, out):
            c = r.get(p)
            if c:
                vaddto(r, prow, -c)
        if not r:
            continue
        p = min(r)
        c = r[p]
        if c != 1:
            r = vscale(r, inv(c))
        for j, orow in enumerate(out):
            c2 = orow.get(p)
            if c2:
                vaddto(orow, r, -c2)
        out.append(r)
        pivots.append(p)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [out[i] for i in order], [pivots[i] for i in order]


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncols):
    """Basis of {x : row.x = 0 for all rows}, one vector per free column."""
    red, pivots = rref(rows)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = {f: 1}
        for p, r in zip(pivots, red):
            c = r.get(f)
            if c:
                v[p] = norm(-c)
        basis.append(v)
    return basis


def transpose(cols):
    """Turn ``{col: {row: c}}`` into ``{row: {col: c}}``."""
    rows = {}
    for j, col in cols.items():
        for i, c in col.items():
            rows.setdefault(i, {})[j] = c
    return rows


def solve(cols, b):
    """Solve sum_j x_j * cols[j] = b; cols is a list of sparse vectors.

    Returns the solution as a dict ``j -> x_j`` or None when inconsistent.
    """
    # augmented system: unknown j lives in column j, rhs in column n
    n = len(cols)
    rows_by_idx = transpose(dict(enumerate(cols)))
    for i, c in b.items():
        rows_by_idx.setdefault(i, {})[n] = c
    red, pivots = rref(list(rows_by_idx.values()))
    if n in pivots:
        return None
    x = {}
    for p, r in zip(pivots, red):
        c = r.get(n)
        if c:
            x[p] = c
    return x


class Reducer:
    """Incremental echelon basis used to test span membership and
    express vectors in terms of a fixed list of spanning vectors."""

    def __init__(self, vectors=()):
        self.rows = []      # echelon rows (each with leading 1 at its pivot)
        self.pivots = []
        self.combos = []    # rows[i] = sum combos[i][j] * vectors[j]
        self.count = 0
        for v in vectors:
            self.add(v)

    def reduce(self, v):
        """Return (residue, combination) with v = residue + sum comb_j vec_j."""
        r = dict(v)
        comb = {}
        for p, row, cmb in zip(self.pivots, self.rows, self.combos):
            c = r.get(p)
            if c:
                vaddto(r, row, -c)
                vaddto(comb, cmb, c)
        return r, comb

    def add(self, v):
        """Add v; return True when it was independent of earlier vectors."""
        j = self.count
        self.count += 1
        r, comb = self.reduce(v)
        if not r:
            return False
        comb = vscale(comb, -1)
        comb[j] = 1
        p = min(r)
        c = r[p]
        if c != 1:
            ic = inv(c)
            r = vscale(r, ic)
            comb = vscale(comb, ic)
        self.rows.append(r)
        self.pivots.append(p)
        self.combos.append(comb)
        return True

    def express(self, v):
        """Coefficients expressing v in the added vectors, or None."""
        r, comb = self.reduce(v)
        if r:
            return None
        return comb

    @property
    def rank(self):
        return len(self.rows)


def mat_inverse(cols, n):
    """Inverse of an n x n matrix given by columns; None when singular."""
    red = Reducer([cols.get(j, {}) for j in range(n)])
    if red.rank < n:
        return None
    out = {}
    for i in range(n):
        comb = red.express({i: 1})
        out[i] = comb
    return out
