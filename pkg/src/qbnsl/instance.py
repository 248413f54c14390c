"""Core domain types for decomposable-score DAG search.

Nodes are the integers 0..n-1 and node sets are immutable bitmask wrappers,
so subsets are hashable, cheap to copy, and usable as array indices.  n is
capped at 30: every subset then fits comfortably in a machine word and a
full subset-indexed array stays addressable at desk scale.

A problem instance is a :class:`LocalScoreTable`: per node i, a finite
collection of candidate parent sets J (never containing i) with a real
score s_i(J).  A DAG's total score is the sum of its per-node local scores,
which is what every solver in this package maximizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

MAX_NODES = 30


class CyclicGraphError(ValueError):
    """The operation needs an acyclic graph but the input contains a cycle."""


class MissingParentSetError(LookupError):
    """A node was assigned a parent set its score table does not list."""

    def __init__(self, node: int, parents: "NodeSet") -> None:
        super().__init__(
            f"node {node} has no score entry for parent set {parents}"
        )
        self.node = node
        self.parents = parents


class InstanceTooLargeError(ValueError):
    """The instance exceeds a solver's configured size cap."""


def _bits(value: "NodeSet | int") -> int:
    if isinstance(value, NodeSet):
        return value.bits
    return int(value)


@dataclass(frozen=True, slots=True)
class NodeSet:
    """An immutable set of node indices backed by a single bitmask."""

    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0:
            raise ValueError("node-set bitmask must be non-negative")

    @classmethod
    def of(cls, *nodes: int) -> "NodeSet":
        return cls.from_nodes(nodes)

    @classmethod
    def from_nodes(cls, nodes: Iterable[int]) -> "NodeSet":
        bits = 0
        for v in nodes:
            if v < 0:
                raise ValueError(f"negative node index {v}")
            bits |= 1 << v
        return cls(bits)

    @classmethod
    def full(cls, n: int) -> "NodeSet":
        if n < 0:
            raise ValueError("n must be non-negative")
        return cls((1 << n) - 1)

    def __contains__(self, node: int) -> bool:
        return node >= 0 and (self.bits >> node) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __int__(self) -> int:
        return self.bits

    __index__ = __int__

    def __or__(self, other: "NodeSet | int") -> "NodeSet":
        return NodeSet(self.bits | _bits(other))

    def __and__(self, other: "NodeSet | int") -> "NodeSet":
        return NodeSet(self.bits & _bits(other))

    def __sub__(self, other: "NodeSet | int") -> "NodeSet":
        return NodeSet(self.bits & ~_bits(other))

    def __xor__(self, other: "NodeSet | int") -> "NodeSet":
        return NodeSet(self.bits ^ _bits(other))

    def add(self, node: int) -> "NodeSet":
        if node < 0:
            raise ValueError(f"negative node index {node}")
        return NodeSet(self.bits | (1 << node))

    def remove(self, node: int) -> "NodeSet":
        return NodeSet(self.bits & ~(1 << node))

    def issubset(self, other: "NodeSet | int") -> bool:
        return self.bits & ~_bits(other) == 0

    def issuperset(self, other: "NodeSet | int") -> bool:
        return _bits(other) & ~self.bits == 0

    def isdisjoint(self, other: "NodeSet | int") -> bool:
        return self.bits & _bits(other) == 0

    def __le__(self, other: "NodeSet | int") -> bool:
        return self.issubset(other)

    def __ge__(self, other: "NodeSet | int") -> bool:
        return self.issuperset(other)

    def __lt__(self, other: "NodeSet | int") -> bool:
        return self.issubset(other) and self.bits != _bits(other)

    def __gt__(self, other: "NodeSet | int") -> bool:
        return self.issuperset(other) and self.bits != _bits(other)

    def __repr__(self) -> str:
        if not self.bits:
            return "NodeSet()"
        return f"NodeSet.of({', '.join(map(str, self))})"


EMPTY_SET = NodeSet(0)


class LocalScoreTable:
    """Per-node scored candidate parent sets.

    ``entries[i]`` maps parent-set bitmasks (bit i always clear) to scores.
    Every node must list the empty parent set: that guarantees every node
    ordering admits at least one feasible parent assignment, so solvers
    never hit dead ends.  Tables are immutable after construction; per-node
    entries iterate in (cardinality, bitmask) order, which makes linear
    scans deterministic and gives first-wins tie-breaking for free.

    ``names`` is display metadata only and is excluded from equality.
    """

    __slots__ = ("n", "names", "_maps", "_sorted")

    def __init__(
        self,
        n: int,
        entries: Sequence[Mapping["NodeSet | int", float]],
        names: Sequence[str] | None = None,
    ) -> None:
        if not 1 <= n <= MAX_NODES:
            raise ValueError(f"n must be in 1..{MAX_NODES}, got {n}")
        if len(entries) != n:
            raise ValueError(f"expected {n} per-node entries, got {len(entries)}")
        if names is not None:
            names = tuple(names)
            if len(names) != n:
                raise ValueError("names length must equal n")
            if len(set(names)) != n:
                raise ValueError("variable names must be unique")
        maps: list[dict[int, float]] = []
        limit = 1 << n
        for i, node_entries in enumerate(entries):
            cleaned: dict[int, float] = {}
            for key, score in node_entries.items():
                mask = _bits(key)
                if not 0 <= mask < limit:
                    raise ValueError(f"parent set {mask:#x} out of range for n={n}")
                if (mask >> i) & 1:
                    raise ValueError(f"node {i} cannot be its own parent")
                cleaned[mask] = float(score)
            if 0 not in cleaned:
                raise ValueError(f"node {i} is missing the empty parent set")
            maps.append(cleaned)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_maps", tuple(maps))
        object.__setattr__(
            self,
            "_sorted",
            tuple(
                tuple(sorted(m.items(), key=lambda kv: (kv[0].bit_count(), kv[0])))
                for m in maps
            ),
        )

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("LocalScoreTable is immutable")

    @property
    def total_entries(self) -> int:
        """Total number of stored (node, parent set) records."""
        return sum(len(m) for m in self._maps)

    def set_count(self, i: int) -> int:
        return len(self._maps[i])

    def items(self, i: int) -> tuple[tuple[int, float], ...]:
        """Raw (bitmask, score) pairs for node i in (cardinality, mask) order."""
        return self._sorted[i]

    def sets(self, i: int) -> Iterator[tuple[NodeSet, float]]:
        for mask, score in self._sorted[i]:
            yield NodeSet(mask), score

    def contains(self, i: int, parents: "NodeSet | int") -> bool:
        return _bits(parents) in self._maps[i]

    def score(self, i: int, parents: "NodeSet | int") -> float:
        mask = _bits(parents)
        try:
            return self._maps[i][mask]
        except KeyError:
            raise MissingParentSetError(i, NodeSet(mask)) from None

    def relabel(self, perm: Sequence[int]) -> "LocalScoreTable":
        """Rename node i to perm[i] everywhere; scores are carried along."""
        n = self.n
        if sorted(perm) != list(range(n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        new_entries: list[dict[int, float]] = [dict() for _ in range(n)]
        for i in range(n):
            for mask, score in self._maps[i].items():
                new_mask = 0
                for j in NodeSet(mask):
                    new_mask |= 1 << perm[j]
                new_entries[perm[i]][new_mask] = score
        new_names = None
        if self.names is not None:
            assigned: list[str] = [""] * n
            for i in range(n):
                assigned[perm[i]] = self.names[i]
            new_names = assigned
        return LocalScoreTable(n, new_entries, new_names)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalScoreTable):
            return NotImplemented
        return self.n == other.n and self._maps == other._maps

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"LocalScoreTable(n={self.n}, total_entries={self.total_entries})"
        )


@dataclass(frozen=True, slots=True)
class Dag:
    """A directed graph given by per-node parent sets.

    Construction is permissive about cycles so that candidate graphs can be
    built and then checked; operations that require acyclicity verify it
    and raise :class:`CyclicGraphError`.
    """

    n: int
    parents: tuple[NodeSet, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_NODES:
            raise ValueError(f"n must be in 1..{MAX_NODES}, got {self.n}")
        if len(self.parents) != self.n:
            raise ValueError("parents must list one set per node")
        limit = 1 << self.n
        for ps in self.parents:
            if not isinstance(ps, NodeSet):
                raise TypeError("parents must be NodeSet instances")
            if ps.bits >= limit:
                raise ValueError("parent set references a node outside 0..n-1")

    @classmethod
    def from_masks(cls, n: int, masks: Iterable["NodeSet | int"]) -> "Dag":
        return cls(n, tuple(NodeSet(_bits(m)) for m in masks))

    def arcs(self) -> Iterator[tuple[int, int]]:
        """Yield (parent, child) pairs in (child, parent) index order."""
        for child in range(self.n):
            for parent in self.parents[child]:
                yield parent, child

    @property
    def arc_count(self) -> int:
        return sum(len(ps) for ps in self.parents)


@dataclass(frozen=True, slots=True)
class LinearOrder:
    """A total order on 0..n-1, stored as the node sequence itself."""

    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm must be a permutation of 0..n-1")

    @property
    def n(self) -> int:
        return len(self.perm)

    def __iter__(self) -> Iterator[int]:
        return iter(self.perm)

    def positions(self) -> tuple[int, ...]:
        """positions()[i] is the rank of node i in the order."""
        pos = [0] * len(self.perm)
        for rank, node in enumerate(self.perm):
            pos[node] = rank
        return tuple(pos)

    def predecessors(self, node: int) -> NodeSet:
        """Nodes strictly before ``node`` in the order."""
        bits = 0
        for v in self.perm:
            if v == node:
                return NodeSet(bits)
            bits |= 1 << v
        raise ValueError(f"node {node} not in order")

    def prefixes(self) -> Iterator[tuple[int, NodeSet]]:
        """Yield (node, strict predecessors) along the order."""
        bits = 0
        for v in self.perm:
            yield v, NodeSet(bits)
            bits |= 1 << v


def is_acyclic(dag: Dag) -> bool:
    """True iff the graph admits a topological order."""
    placed = 0
    remaining = set(range(dag.n))
    while remaining:
        sink = None
        for i in sorted(remaining):
            if dag.parents[i].bits & ~placed == 0:
                sink = i
                break
        if sink is None:
            return False
        placed |= 1 << sink
        remaining.discard(sink)
    return True


def topological_order(dag: Dag) -> LinearOrder:
    """A topological order of the DAG; ties pick the smallest node index."""
    order: list[int] = []
    placed = 0
    remaining = set(range(dag.n))
    while remaining:
        ready = None
        for i in sorted(remaining):
            if dag.parents[i].bits & ~placed == 0:
                ready = i
                break
        if ready is None:
            raise CyclicGraphError("graph contains a cycle")
        order.append(ready)
        placed |= 1 << ready
        remaining.discard(ready)
    return LinearOrder(tuple(order))


def total_score(dag: Dag, table: LocalScoreTable) -> float:
    """Sum of per-node local scores; the quantity every solver maximizes."""
    if dag.n != table.n:
        raise ValueError(f"graph has {dag.n} nodes, table has {table.n}")
    if not is_acyclic(dag):
        raise CyclicGraphError("cannot score a cyclic graph")
    return sum(table.score(i, dag.parents[i]) for i in range(dag.n))


def best_parents_in(
    table: LocalScoreTable, i: int, allowed: "NodeSet | int"
) -> tuple[float, NodeSet]:
    """Best listed parent set for node i inside ``allowed``.

    Returns (score, parent set).  ``allowed`` must exclude i.  Ties prefer
    smaller cardinality, then smaller bitmask; the empty set is always
    listed, so the scan always succeeds.
    """
    if not 0 <= i < table.n:
        raise ValueError(f"node index {i} out of range")
    allowed_bits = _bits(allowed)
    if (allowed_bits >> i) & 1:
        raise ValueError("allowed set must exclude the child node")
    best_score = None
    best_mask = 0
    for mask, score in table.items(i):
        if mask & ~allowed_bits:
            continue
        if best_score is None or score > best_score:
            best_score = score
            best_mask = mask
    assert best_score is not None  # empty set is always present
    return best_score, NodeSet(best_mask)
