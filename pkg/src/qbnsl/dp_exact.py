"""Classical exact solvers: subset dynamic programming and brute forcers.

The subset DP runs in O(2^n * n^2) after per-node subset-max tables are
built, and is the reference solver for n up to ~20.  The brute forcers
exist purely as oracles for the test suite: one maximizes over all node
orderings, one over all parent assignments that form a DAG.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .instance import (
    Dag,
    InstanceTooLargeError,
    LocalScoreTable,
    NodeSet,
    best_parents_in,
    is_acyclic,
    total_score,
)

DP_CAP = 20
ORDER_BRUTE_CAP = 8
DAG_BRUTE_CAP = 4

# argmax tie keys pack (cardinality, bitmask) into one int64; n <= 30 so a
# mask needs at most 30 bits and the packed key stays far below 2^63.
_KEY_SHIFT = 30
_UNSET_KEY = np.int64(1) << 62


def popcounts(size: int, n: int) -> np.ndarray:
    """Bit-count of every integer in [0, size) as an int64 array."""
    values = np.arange(size, dtype=np.int64)
    counts = np.zeros(size, dtype=np.int64)
    for j in range(n):
        counts += (values >> j) & 1
    return counts


@dataclass(frozen=True)
class SubsetTable:
    """Best listed parent score (and argmax set) for one node, per subset.

    ``values[S]`` is max{ s_i(J) : J listed for i, J subset of S } and
    ``argmax[S]`` the witness bitmask, ties preferring smaller cardinality
    then smaller bitmask.  Indices run over all 2^n masks; bit i is simply
    ignored (values[S] == values[S minus i]).
    """

    node: int
    n: int
    values: np.ndarray
    argmax: np.ndarray

    def best(self, allowed: "NodeSet | int") -> tuple[float, NodeSet]:
        mask = int(allowed)
        return float(self.values[mask]), NodeSet(int(self.argmax[mask]))


def best_parents_all_subsets(
    table: LocalScoreTable, i: int, cap: int = DP_CAP
) -> SubsetTable:
    """Subset-max transform of node i's score entries over all 2^n masks."""
    n = table.n
    if n > cap:
        raise InstanceTooLargeError(f"n={n} exceeds the subset-table cap {cap}")
    if not 0 <= i < n:
        raise ValueError(f"node index {i} out of range")
    size = 1 << n
    values = np.full(size, -np.inf, dtype=np.float64)
    keys = np.full(size, _UNSET_KEY, dtype=np.int64)
    for mask, score in table.items(i):
        values[mask] = score
        keys[mask] = (mask.bit_count() << _KEY_SHIFT) | mask
    # One max-propagation pass per dimension: after pass j, each mask holds
    # the best over seeded submasks differing only in bits <= j.
    for j in range(n):
        v = values.reshape(-1, 2, 1 << j)
        k = keys.reshape(-1, 2, 1 << j)
        lo_v, hi_v = v[:, 0, :], v[:, 1, :]
        lo_k, hi_k = k[:, 0, :], k[:, 1, :]
        update = (lo_v > hi_v) | ((lo_v == hi_v) & (lo_k < hi_k))
        hi_v[update] = lo_v[update]
        hi_k[update] = lo_k[update]
    return SubsetTable(
        node=i,
        n=n,
        values=values,
        argmax=(keys & ((np.int64(1) << _KEY_SHIFT) - 1)).astype(np.int64),
    )


def solve_dp(table: LocalScoreTable, cap: int = DP_CAP) -> tuple[float, Dag]:
    """Exact optimum over all DAGs by dynamic programming over subsets.

    opt[S] is the best score of a network on the nodes of S; each step
    chooses the last node of S in some topological order.  Returns the
    optimal total score together with a witness DAG whose rescoring equals
    the returned value; sink ties take the smallest node index and parent
    ties the smallest (cardinality, bitmask).
    """
    n = table.n
    if n > cap:
        raise InstanceTooLargeError(f"n={n} exceeds the DP cap {cap}")
    size = 1 << n
    best_parent_values = [
        best_parents_all_subsets(table, i, cap=cap).values for i in range(n)
    ]
    layer_of = popcounts(size, n)
    opt = np.full(size, -np.inf, dtype=np.float64)
    opt[0] = 0.0
    chosen_sink = np.full(size, -1, dtype=np.int8)
    all_masks = np.arange(size, dtype=np.int64)
    for layer in range(1, n + 1):
        layer_masks = all_masks[layer_of == layer]
        for i in range(n):
            with_i = layer_masks[((layer_masks >> i) & 1) == 1]
            if with_i.size == 0:
                continue
            without_i = with_i ^ (1 << i)
            candidate = opt[without_i] + best_parent_values[i][without_i]
            update = candidate > opt[with_i]
            targets = with_i[update]
            opt[targets] = candidate[update]
            chosen_sink[targets] = i
    parents: list[NodeSet] = [NodeSet(0)] * n
    mask = size - 1
    while mask:
        i = int(chosen_sink[mask])
        assert i >= 0
        mask ^= 1 << i
        parents[i] = best_parents_in(table, i, mask)[1]
    dag = Dag(n, tuple(parents))
    return total_score(dag, table), dag


def brute_force_orders(table: LocalScoreTable, cap: int = ORDER_BRUTE_CAP) -> float:
    """Oracle: maximize over all n! node orderings.

    For a fixed ordering the best network takes, per node, its best listed
    parent set among its predecessors; the maximum over orderings equals
    the DAG optimum.  Per-(node, predecessor-mask) bests are direct linear
    scans, independent of the DP's subset-max propagation.
    """
    n = table.n
    if n > cap:
        raise InstanceTooLargeError(f"n={n} exceeds the order brute-force cap {cap}")
    size = 1 << n
    best_in: list[list[float]] = [[0.0] * size for _ in range(n)]
    for i in range(n):
        row = best_in[i]
        entries = table.items(i)
        for mask in range(size):
            if (mask >> i) & 1:
                continue
            best = None
            for pset, score in entries:
                if pset & ~mask:
                    continue
                if best is None or score > best:
                    best = score
            row[mask] = best  # empty set always qualifies
    best_total = -float("inf")
    for perm in itertools.permutations(range(n)):
        placed = 0
        acc = 0.0
        for v in perm:
            acc += best_in[v][placed]
            placed |= 1 << v
        if acc > best_total:
            best_total = acc
    return best_total


def enumerate_dags(table: LocalScoreTable):
    """Yield every acyclic assignment of listed parent sets, one per node."""
    n = table.n
    per_node = [tuple(mask for mask, _ in table.items(i)) for i in range(n)]
    for assignment in itertools.product(*per_node):
        dag = Dag.from_masks(n, assignment)
        if is_acyclic(dag):
            yield dag


def brute_force_dags(table: LocalScoreTable, cap: int = DAG_BRUTE_CAP) -> float:
    """Oracle: maximize the total score over every explicitly enumerated DAG."""
    n = table.n
    if n > cap:
        raise InstanceTooLargeError(f"n={n} exceeds the DAG brute-force cap {cap}")
    best = None
    for dag in enumerate_dags(table):
        score = sum(table.score(i, dag.parents[i]) for i in range(n))
        if best is None or score > best:
            best = score
    assert best is not None  # empty assignment is always acyclic
    return best
