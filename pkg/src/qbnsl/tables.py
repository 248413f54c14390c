"""Random local-score tables for harnesses and benchmarks.

Every generated table keeps the empty parent set as a universal fallback,
so any subset of candidates admits a feasible choice and every solver in
the package accepts the instance.
"""

from __future__ import annotations

import numpy as np

from .instance import LocalScoreTable


def random_table(
    rng: np.random.Generator,
    n: int,
    max_sets: int = 12,
    lo: float = -10.0,
    hi: float = 10.0,
) -> LocalScoreTable:
    """Sample a table with 1..max_sets parent sets per node, scores U[lo, hi).

    Parent sets are drawn uniformly (with rejection of duplicates) from all
    subsets of the other nodes; the empty set is always present.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if max_sets < 1:
        raise ValueError("need at least one parent set per node")
    entries: list[dict[int, float]] = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        pool = 1 << len(others)
        want = int(rng.integers(1, max_sets + 1))
        masks = {0}
        # Rejection sampling; the pool at n <= 8 is at most 128 so this is cheap.
        while len(masks) < min(want, pool):
            choice = int(rng.integers(pool))
            mask = 0
            for bit, node in enumerate(others):
                if choice >> bit & 1:
                    mask |= 1 << node
            masks.add(mask)
        entries.append({mask: float(rng.uniform(lo, hi)) for mask in sorted(masks)})
    return LocalScoreTable(n, entries)
