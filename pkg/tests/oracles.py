"""Independent reference computations used as test oracles."""
from fractions import Fraction
from itertools import permutations

import sympy


def sign_by_adjacent_swaps(permutation, degrees):
    # bubble sort the factors into their new order, one adjacent swap at a time
    target = list(permutation)
    cur = list(range(1, len(target) + 1))
    sign = 1
    for pos, want in enumerate(target):
        k = cur.index(want)
        while k > pos:
            a, b = cur[k - 1], cur[k]
            if degrees[a - 1] % 2 and degrees[b - 1] % 2:
                sign = -sign
            cur[k - 1], cur[k] = b, a
            k -= 1
    return sign


def count_unshuffles(blocks):
    n = sum(blocks)
    total = 0
    for p in permutations(range(n)):
        pos, ok = 0, True
        for s in blocks:
            if list(p[pos:pos + s]) != sorted(p[pos:pos + s]):
                ok = False
            pos += s
        total += ok
    return total


def dense(cols, nrows, ncols, rows=None, columns=None):
    rows = list(range(nrows)) if rows is None else rows
    columns = list(range(ncols)) if columns is None else columns
    ri = {r: k for k, r in enumerate(rows)}
    m = sympy.zeros(len(rows), len(columns))
    for k, j in enumerate(columns):
        for i, c in cols.get(j, {}).items():
            if i in ri:
                m[ri[i], k] = sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
    return m


def gr_homology(space, d):
    """dim H of the weight-preserving part of d, per (degree, weight)."""
    n = space.dim
    d0 = {j: {i: c for i, c in col.items() if space.weight[i] == space.weight[j]}
          for j, col in d.cols.items()}
    out = {}
    for key in sorted(set(zip(space.degree, space.weight))):
        deg, w = key
        here = [j for j in range(n) if (space.degree[j], space.weight[j]) == key]
        prev = [j for j in range(n) if (space.degree[j], space.weight[j]) == (deg - 1, w)]
        nxt = [j for j in range(n) if (space.degree[j], space.weight[j]) == (deg + 1, w)]
        r_out = dense(d0, n, n, nxt, here).rank() if nxt and here else 0
        r_in = dense(d0, n, n, here, prev).rank() if here and prev else 0
        h = len(here) - r_out - r_in
        if h:
            out[key] = h
    return out


def dims(space):
    out = {}
    for key in zip(space.degree, space.weight):
        out[key] = out.get(key, 0) + 1
    return out


def matmul(f, g):
    """Columns of f o g computed entry by entry."""
    out = {}
    for j, col in g.cols.items():
        acc = {}
        for k, c in col.items():
            for i, e in f.cols.get(k, {}).items():
                acc[i] = acc.get(i, 0) + c * e
        acc = {i: c for i, c in acc.items() if c}
        if acc:
            out[j] = acc
    return out
