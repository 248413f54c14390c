"""Two-level bucket orders over a block partition, and their downsets.

A block partition splits the n nodes into blocks of a common even size k
(one smaller remainder block is allowed).  A cover member fixes, inside
each block, a first half that precedes the second half; sweeping the first
half over all balanced choices yields a family of partial orders whose
linear extensions jointly cover all n! orders.  Per member, the subsets
closed downward under the member's precedence constraints form a small
lattice, which is what the constrained dynamic program walks.

Members and downsets both get canonical dense indices so that search
routines can treat a member family as a plain integer domain.  Member
indexing uses colexicographic ranking of each block's first half, which
matches sorting by bitmask and needs no enumeration even for huge blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .instance import MAX_NODES, LinearOrder, NodeSet, _bits
from .seeding import rng_for


class InvalidKError(ValueError):
    """The block size k is unusable for the given n."""


class IndexOutOfRangeError(IndexError):
    """A canonical index fell outside its domain."""


class NotADownsetError(ValueError):
    """A subset is not downward closed for the given cover member."""


def _half(size: int) -> int:
    return (size + 1) // 2


def _block_sizes(n: int, k: int) -> list[int]:
    # Pure arithmetic: no MAX_NODES cap here, so count formulas stay usable
    # for report-only sizes far beyond what instances may construct.
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if k % 2 != 0 or not 2 <= k <= n:
        raise InvalidKError(f"k must be even with 2 <= k <= n, got k={k} for n={n}")
    sizes = [k] * (n // k)
    if n % k:
        sizes.append(n % k)
    return sizes


def _unrank_combination(rank: int, size: int, count: int) -> int:
    """rank-th ``count``-subset of positions 0..size-1 in colex order, as a bitmask."""
    mask = 0
    remaining = rank
    for j in range(count, 0, -1):
        p = j - 1
        while math.comb(p + 1, j) <= remaining:
            p += 1
        mask |= 1 << p
        remaining -= math.comb(p, j)
    if remaining or mask >> size:
        raise IndexOutOfRangeError(f"combination rank {rank} out of range")
    return mask


def _rank_combination(position_mask: int) -> int:
    rank = 0
    for j, p in enumerate(NodeSet(position_mask), start=1):
        rank += math.comb(p, j)
    return rank


@dataclass(frozen=True)
class BlockPartition:
    """A partition of 0..n-1 into blocks, all of size k except a remainder."""

    n: int
    k: int
    blocks: tuple[NodeSet, ...]

    def __post_init__(self) -> None:
        if self.n > MAX_NODES:
            raise ValueError(f"n must be at most {MAX_NODES}, got {self.n}")
        sizes = _block_sizes(self.n, self.k)
        if len(self.blocks) != len(sizes):
            raise ValueError(f"expected {len(sizes)} blocks, got {len(self.blocks)}")
        union = 0
        for block, size in zip(self.blocks, sizes):
            if len(block) != size:
                raise ValueError(f"block {block} should have {size} elements")
            if union & block.bits:
                raise ValueError("blocks must be disjoint")
            union |= block.bits
        if union != (1 << self.n) - 1:
            raise ValueError("blocks must cover all nodes")

    @classmethod
    def contiguous(cls, n: int, k: int) -> "BlockPartition":
        sizes = _block_sizes(n, k)
        blocks = []
        start = 0
        for size in sizes:
            blocks.append(NodeSet.from_nodes(range(start, start + size)))
            start += size
        return cls(n, k, tuple(blocks))

    @classmethod
    def shuffled(cls, n: int, k: int, seed: int) -> "BlockPartition":
        sizes = _block_sizes(n, k)
        nodes = rng_for(seed, "block-partition").permutation(n)
        blocks = []
        start = 0
        for size in sizes:
            blocks.append(NodeSet.from_nodes(int(v) for v in nodes[start : start + size]))
            start += size
        return cls(n, k, tuple(blocks))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def block_of(self, node: int) -> int:
        for t, block in enumerate(self.blocks):
            if node in block:
                return t
        raise ValueError(f"node {node} not in partition")


@dataclass(frozen=True)
class CoverMember:
    """One two-level bucket order: per block, a first half and a second half.

    Every first-half element precedes every second-half element of the same
    block; elements of different blocks are incomparable.  ``splits[t]`` is
    block t's first half and has ceil(size/2) elements.
    """

    partition: BlockPartition
    splits: tuple[NodeSet, ...]

    def __post_init__(self) -> None:
        if len(self.splits) != self.partition.block_count:
            raise ValueError("one split per block required")
        for block, split in zip(self.partition.blocks, self.splits):
            if not split.issubset(block):
                raise ValueError(f"split {split} is not inside block {block}")
            if len(split) != _half(len(block)):
                raise ValueError(
                    f"split {split} must take the ceil-half of block {block}"
                )

    def second_half(self, t: int) -> NodeSet:
        return self.partition.blocks[t] - self.splits[t]

    def predecessors(self, node: int) -> NodeSet:
        """Nodes required to precede ``node``; empty for first-half nodes."""
        t = self.partition.block_of(node)
        if node in self.splits[t]:
            return NodeSet(0)
        return self.splits[t]

    def pairs(self) -> Iterator[tuple[int, int]]:
        """All ordered precedence pairs (earlier, later)."""
        for t in range(self.partition.block_count):
            for later in self.second_half(t):
                for earlier in self.splits[t]:
                    yield earlier, later

    def extended_by(self, order: LinearOrder) -> bool:
        """True iff the linear order respects every precedence pair."""
        pos = order.positions()
        return all(pos[a] < pos[b] for a, b in self.pairs())


def cover_size(n: int, k: int) -> int:
    """Number of members in the balanced-split cover for (n, k), exactly."""
    return math.prod(math.comb(size, _half(size)) for size in _block_sizes(n, k))


def _block_radices(partition: BlockPartition) -> list[int]:
    return [math.comb(len(b), _half(len(b))) for b in partition.blocks]


def member_by_index(partition: BlockPartition, index: int) -> CoverMember:
    """Canonical member for a dense index in [0, cover_size).

    Mixed-radix decoding, block 0 most significant; within a block, first
    halves are ordered by bitmask (equivalently, colex on sorted elements).
    """
    radices = _block_radices(partition)
    total = math.prod(radices)
    if not 0 <= index < total:
        raise IndexOutOfRangeError(f"member index {index} not in [0, {total})")
    digits = []
    rest = index
    for radix in reversed(radices):
        digits.append(rest % radix)
        rest //= radix
    digits.reverse()
    splits = []
    for block, digit in zip(partition.blocks, digits):
        elems = list(block)
        pos_mask = _unrank_combination(digit, len(elems), _half(len(elems)))
        splits.append(NodeSet.from_nodes(elems[p] for p in NodeSet(pos_mask)))
    return CoverMember(partition, tuple(splits))


def index_of_member(member: CoverMember) -> int:
    """Inverse of :func:`member_by_index`."""
    radices = _block_radices(member.partition)
    index = 0
    for t, (block, split) in enumerate(zip(member.partition.blocks, member.splits)):
        positions = {e: p for p, e in enumerate(block)}
        pos_mask = 0
        for e in split:
            pos_mask |= 1 << positions[e]
        index = index * radices[t] + _rank_combination(pos_mask)
    return index


def downset_count_formula(n: int, k: int) -> int:
    """Per-member downset count for (n, k): prod of 2^ceil(s/2) + 2^floor(s/2) - 1.

    Pure arithmetic over block sizes, usable for report-only n beyond the
    instance cap.
    """
    total = 1
    for size in _block_sizes(n, k):
        first = _half(size)
        total *= (1 << first) + (1 << (size - first)) - 1
    return total


def downsets_per_member(partition: BlockPartition) -> int:
    """Downset count of any member of the partition (split-independent)."""
    return downset_count_formula(partition.n, partition.k)


def downset_count(member: CoverMember) -> int:
    """Number of downward-closed subsets of the member's order (split-independent)."""
    return downsets_per_member(member.partition)


def is_downset(member: CoverMember, subset: "NodeSet | int") -> bool:
    """True iff taking any element forces no missing required predecessor.

    Blockwise: touching a second half requires containing that block's
    entire first half.
    """
    bits = _bits(subset)
    if bits >> member.partition.n:
        raise ValueError("subset references nodes outside the partition")
    for t, block in enumerate(member.partition.blocks):
        split_bits = member.splits[t].bits
        second_bits = block.bits & ~split_bits
        if bits & second_bits and split_bits & ~bits:
            return False
    return True


def covering_member(partition: BlockPartition, order: LinearOrder) -> CoverMember:
    """The member whose constraints the given linear order extends.

    Per block, the first half collects the ceil-half of the block's
    elements that appear earliest in the order.
    """
    if order.n != partition.n:
        raise ValueError("order and partition sizes differ")
    pos = order.positions()
    splits = []
    for block in partition.blocks:
        ranked = sorted(block, key=lambda v: pos[v])
        splits.append(NodeSet.from_nodes(ranked[: _half(len(block))]))
    return CoverMember(partition, tuple(splits))


class DownsetIndex:
    """Dense canonical indexing of one member's downset lattice.

    Per block, the valid local traces are the subsets of the first half
    (bitmask-ascending) followed by first-half-union-nonempty-subset of the
    second half (bitmask-ascending); global indices are mixed radix with
    block 0 most significant.  Index 0 is the empty set and the last index
    is the full node set.

    The covering lattice is exposed as, per downset, the list of single
    elements whose removal yields again a downset: the removable elements
    of a block trace are its second-half part if nonempty, else all of it.
    """

    __slots__ = (
        "member",
        "size",
        "_block_bits",
        "_split_bits",
        "_second_bits",
        "_traces",
        "_digit_maps",
        "_weights",
        "_masks",
        "_by_cardinality",
        "_edges",
    )

    def __init__(self, member: CoverMember) -> None:
        self.member = member
        partition = member.partition
        self._block_bits = tuple(b.bits for b in partition.blocks)
        self._split_bits = tuple(s.bits for s in member.splits)
        self._second_bits = tuple(
            b & ~s for b, s in zip(self._block_bits, self._split_bits)
        )
        traces: list[tuple[int, ...]] = []
        for split_bits, second_bits in zip(self._split_bits, self._second_bits):
            split_elems = list(NodeSet(split_bits))
            second_elems = list(NodeSet(second_bits))
            local: list[int] = []
            for c in range(1 << len(split_elems)):
                local.append(_spread(c, split_elems))
            for c in range(1, 1 << len(second_elems)):
                local.append(split_bits | _spread(c, second_elems))
            traces.append(tuple(local))
        self._traces = tuple(traces)
        self._digit_maps = tuple(
            {mask: d for d, mask in enumerate(local)} for local in traces
        )
        weights = [1] * len(traces)
        for t in range(len(traces) - 2, -1, -1):
            weights[t] = weights[t + 1] * len(traces[t + 1])
        self._weights = tuple(weights)
        self.size = math.prod(len(local) for local in traces)
        masks = np.zeros(self.size, dtype=np.int64)
        for idx, combo in enumerate(product(*traces)):
            acc = 0
            for part in combo:
                acc |= part
            masks[idx] = acc
        self._masks = masks
        self._by_cardinality: list[tuple[int, int]] | None = None
        self._edges: list[list[tuple[int, int]]] | None = None

    @property
    def block_bits(self) -> tuple[int, ...]:
        return self._block_bits

    @property
    def split_bits(self) -> tuple[int, ...]:
        return self._split_bits

    @property
    def second_bits(self) -> tuple[int, ...]:
        return self._second_bits

    def __len__(self) -> int:
        return self.size

    def downset_by_index(self, index: int) -> NodeSet:
        if not 0 <= index < self.size:
            raise IndexOutOfRangeError(f"downset index {index} not in [0, {self.size})")
        return NodeSet(int(self._masks[index]))

    def index_of_downset(self, subset: "NodeSet | int") -> int:
        bits = _bits(subset)
        if bits >> self.member.partition.n:
            raise NotADownsetError("subset references nodes outside the partition")
        index = 0
        for t, block_bits in enumerate(self._block_bits):
            digit = self._digit_maps[t].get(bits & block_bits)
            if digit is None:
                raise NotADownsetError(
                    f"subset {bits:#x} violates block {t}'s precedence constraints"
                )
            index += digit * self._weights[t]
        return index

    def by_cardinality(self) -> list[tuple[int, int]]:
        """(index, bitmask) pairs sorted by (cardinality, index)."""
        if self._by_cardinality is None:
            pairs = [(idx, int(mask)) for idx, mask in enumerate(self._masks)]
            pairs.sort(key=lambda p: (p[1].bit_count(), p[0]))
            self._by_cardinality = pairs
        return self._by_cardinality

    def removable_elements(self, subset: "NodeSet | int") -> NodeSet:
        """Elements whose removal keeps the subset downward closed."""
        bits = _bits(subset)
        out = 0
        for t, block_bits in enumerate(self._block_bits):
            local = bits & block_bits
            in_second = local & self._second_bits[t]
            out |= in_second if in_second else local
        return NodeSet(out)

    def edges(self) -> list[list[tuple[int, int]]]:
        """Per downset index, its (removed element, child index) pairs.

        Children are the downsets obtained by removing one removable
        element; pairs are listed with elements ascending.  Every nonempty
        downset has at least one removable element, so the lattice is
        connected from the empty set.
        """
        if self._edges is not None:
            return self._edges
        digit_maps = self._digit_maps
        weights = self._weights
        second_bits = self._second_bits
        out: list[list[tuple[int, int]]] = []
        enumerated = [list(enumerate(local)) for local in self._traces]
        for combo in product(*enumerated):
            base = 0
            for t, (digit, _) in enumerate(combo):
                base += digit * weights[t]
            links: list[tuple[int, int]] = []
            for t, (digit, local) in enumerate(combo):
                in_second = local & second_bits[t]
                movable = in_second if in_second else local
                while movable:
                    low = movable & -movable
                    movable ^= low
                    child_digit = digit_maps[t][local ^ low]
                    links.append(
                        (low.bit_length() - 1, base + (child_digit - digit) * weights[t])
                    )
            links.sort()
            out.append(links)
        self._edges = out
        return out


def _spread(counter: int, elems: Sequence[int]) -> int:
    """Map a local combination counter onto the given (ascending) elements."""
    mask = 0
    for j, e in enumerate(elems):
        if (counter >> j) & 1:
            mask |= 1 << e
    return mask
