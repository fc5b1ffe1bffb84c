"""Independent reference implementations used to check the package."""

import itertools
import math


def brute_force_assignment(cost):
    """Exhaustive minimum over one-to-one matchings of size min(rows, cols).

    Returns (total, pairs) where pairs is the lexicographically smallest
    optimal list of (row, col).
    """
    n_r, n_c = len(cost), len(cost[0]) if len(cost) else 0
    k = min(n_r, n_c)
    best, best_pairs = math.inf, None
    for rows in itertools.combinations(range(n_r), k):
        for cols in itertools.permutations(range(n_c), k):
            pairs = sorted(zip(rows, cols))
            total = math.fsum(cost[r][c] for r, c in pairs)
            if total < best or (total == best and pairs < best_pairs):
                best, best_pairs = total, pairs
    return best, best_pairs or []


def rolling_mean(vectors, gamma):
    window = vectors[-gamma:]
    return [sum(col) / len(window) for col in zip(*window)]
