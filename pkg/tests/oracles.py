"""Independent reference computations used to freeze and cross-check values.

Nothing here imports the code under test.
"""

from fractions import Fraction
from itertools import permutations, product
from math import gcd

import numpy as np


def cf_value(weights):
    """b1 - 1/(b2 - 1/(...)) by direct recursion over Fractions."""
    if len(weights) == 1:
        return Fraction(weights[0])
    return weights[0] - 1 / cf_value(weights[1:])


def leibniz_det(m):
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = (-1) ** inversions
        for i in range(n):
            term *= m[i][perm[i]]
            if not term:
                break
        total += term
    return total


def brute_t_types(p, q):
    """All (d, n, a) with p = d n^2 and q = d n a - 1, by exhaustive search."""
    out = []
    for n in range(2, p + 1):
        if n * n > p:
            break
        for d in range(1, p + 1):
            if d * n * n != p:
                continue
            for a in range(1, n):
                if gcd(a, n) == 1 and d * n * a - 1 == q:
                    out.append((d, n, a))
    return out


def gram(weights):
    r = len(weights)
    return [[-weights[i] if i == j else int(abs(i - j) == 1) for j in range(r)] for i in range(r)]


def gauss_solve(m, rhs):
    """Dense Gauss-Jordan over Fractions (no tridiagonal shortcut)."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(m, rhs)]
    for c in range(n):
        piv = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [a[i][n] / a[i][i] for i in range(n)]


def t_chains_bruteforce(max_len, max_weight, block=6):
    """Every chain within bounds whose value p/q has the form dn^2/(dna-1).

    Vectorized over all weight tuples: the values of every suffix of length
    ``block`` are computed once with the recurrence (p, q) <- (b p - q, p),
    then each prefix is applied on top.  A fraction p/q is of the wanted
    form exactly when n = p / gcd(p, q + 1) satisfies n >= 2 and n^2 | p.
    Prime by prime that is v(p) <= 2 v(q + 1) with q + 1 < p, so the test
    below is p | (q + 1)^2 together with q + 1 < p.
    """
    found = set()
    ws = np.arange(2, max_weight + 1, dtype=np.int64)
    suffix_cache = {}

    def suffixes(k):
        if k not in suffix_cache:
            grids = np.meshgrid(*([ws] * k), indexing="ij")
            tails = np.stack([g.ravel() for g in grids], axis=1)
            p = tails[:, -1].copy()
            q = np.ones_like(p)
            for j in range(k - 2, -1, -1):
                p, q = tails[:, j] * p - q, p
            suffix_cache[k] = (tails, p, q)
        return suffix_cache[k]

    for r in range(1, max_len + 1):
        tail = min(r, block)
        tails, p, q = suffixes(tail)
        for prefix in product(range(2, max_weight + 1), repeat=r - tail):
            pp, qq = p, q
            for b in reversed(prefix):
                pp, qq = b * pp - qq, pp
            s = qq + 1
            hit = (s < pp) & ((s * s) % pp == 0)
            for idx in np.flatnonzero(hit):
                found.add(tuple(prefix) + tuple(int(x) for x in tails[idx]))
    return found
