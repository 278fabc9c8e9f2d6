"""Independent reference implementations used only to cross-check the
package. Deliberately written with plain loops and itertools, no numpy,
so they share no code path with the implementations under test."""

import itertools
import math


def kappa_direct(counts, scheme):
    """Weighted Cohen's kappa straight from the defining sums."""
    n_cat = len(counts)
    total = float(sum(sum(row) for row in counts))
    p = [[counts[i][j] / total for j in range(n_cat)] for i in range(n_cat)]
    row = [sum(p[i][j] for j in range(n_cat)) for i in range(n_cat)]
    col = [sum(p[i][j] for i in range(n_cat)) for j in range(n_cat)]

    def weight(i, j):
        if scheme == "linear":
            return 1.0 - abs(i - j) / (n_cat - 1)
        return 1.0 - (i - j) ** 2 / (n_cat - 1) ** 2

    p_obs = sum(weight(i, j) * p[i][j] for i in range(n_cat) for j in range(n_cat))
    p_exp = sum(weight(i, j) * row[i] * col[j] for i in range(n_cat) for j in range(n_cat))
    return (p_obs - p_exp) / (1.0 - p_exp)


def _midranks(values):
    indexed = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[indexed[j + 1]] == values[indexed[i]]:
            j += 1
        mid = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[indexed[k]] = mid
        i = j + 1
    return ranks


def wilcoxon_enum(diffs):
    """Exact two-sided signed-rank p by enumerating every sign assignment.

    Returns (w_plus, p_two_sided). Zero differences are discarded and
    tied magnitudes get mid-ranks, so this also serves as the reference
    for the normal approximation on tied data.
    """
    d = [x for x in diffs if x != 0]
    n = len(d)
    if n == 0:
        raise ValueError("no nonzero differences")
    ranks = _midranks([abs(x) for x in d])
    w_plus = sum(r for x, r in zip(d, ranks) if x > 0)
    count_ge = 0
    count_le = 0
    total = 2 ** n
    for signs in itertools.product((0, 1), repeat=n):
        w = sum(r for s, r in zip(signs, ranks) if s)
        if w >= w_plus - 1e-9:
            count_ge += 1
        if w <= w_plus + 1e-9:
            count_le += 1
    p = min(1.0, 2.0 * min(count_ge, count_le) / total)
    return w_plus, p


def median_sorted(values):
    """Median by explicit sorting."""
    s = sorted(values)
    n = len(s)
    if n % 2 == 1:
        return float(s[n // 2])
    return (s[n // 2 - 1] + s[n // 2]) / 2.0


def quartiles_sorted(values):
    """Type-7 quartiles (linear interpolation between order statistics)."""

    def quantile(q):
        s = sorted(values)
        h = (len(s) - 1) * q
        lo = math.floor(h)
        hi = min(lo + 1, len(s) - 1)
        return s[lo] + (h - lo) * (s[hi] - s[lo])

    return quantile(0.25), quantile(0.75)
