"""Score-file parsing/serialization, BIC scoring of discrete data, pruning.

Score file layout (whitespace-separated, ``#`` starts a comment line,
blank lines are ignored)::

    n
    NAME K            per variable: its name and its record count
    SCORE P P1 .. PP  K records: score, parent count, parent names

Parent references may point at variables declared later in the file, so
parsing resolves names in a second pass.  Serialization writes variables
in index order and records in (cardinality, bitmask) order with ``repr``
floats, which makes parse/write a lossless round trip.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .instance import MAX_NODES, LocalScoreTable, NodeSet


class ScoreFileError(ValueError):
    """Base class for score-file format violations."""


class ScoreSyntaxError(ScoreFileError):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownVariableError(ScoreFileError):
    def __init__(self, line_no: int, name: str) -> None:
        super().__init__(f"line {line_no}: unknown variable {name!r}")
        self.line_no = line_no
        self.name = name


class SelfParentError(ScoreFileError):
    def __init__(self, line_no: int, name: str) -> None:
        super().__init__(f"line {line_no}: variable {name!r} lists itself as a parent")
        self.line_no = line_no
        self.name = name


class DuplicateParentSetError(ScoreFileError):
    def __init__(self, line_no: int, name: str) -> None:
        super().__init__(f"line {line_no}: duplicate parent set for variable {name!r}")
        self.line_no = line_no
        self.name = name


class MissingEmptySetError(ScoreFileError):
    def __init__(self, name: str) -> None:
        super().__init__(f"variable {name!r} has no empty-parent-set record")
        self.name = name


class TooManyEntriesError(ValueError):
    """Score generation would exceed the configured entry budget."""


class DatasetError(ValueError):
    """Raised for malformed discrete datasets."""


def _content_lines(data: str) -> list[tuple[int, list[str]]]:
    out = []
    for line_no, raw in enumerate(data.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        out.append((line_no, stripped.split()))
    return out


def parse_scores(data: str | bytes) -> LocalScoreTable:
    """Parse a score file into a :class:`LocalScoreTable` (names attached)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = _content_lines(data)
    if not lines:
        raise ScoreSyntaxError(1, "empty score file")

    pos = 0

    def take() -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise ScoreSyntaxError(last, "unexpected end of file")
        item = lines[pos]
        pos += 1
        return item

    line_no, tokens = take()
    if len(tokens) != 1:
        raise ScoreSyntaxError(line_no, "expected the variable count alone")
    try:
        n = int(tokens[0])
    except ValueError:
        raise ScoreSyntaxError(line_no, f"invalid variable count {tokens[0]!r}") from None
    if not 1 <= n <= MAX_NODES:
        raise ScoreSyntaxError(line_no, f"variable count must be in 1..{MAX_NODES}")

    # First pass keeps parent names unresolved: forward references are legal.
    names: list[str] = []
    records: list[list[tuple[int, float, list[str]]]] = []
    for _ in range(n):
        line_no, tokens = take()
        if len(tokens) != 2:
            raise ScoreSyntaxError(line_no, "expected 'NAME COUNT'")
        name, count_tok = tokens
        try:
            count = int(count_tok)
        except ValueError:
            raise ScoreSyntaxError(line_no, f"invalid record count {count_tok!r}") from None
        if count < 0:
            raise ScoreSyntaxError(line_no, "record count must be non-negative")
        if name in names:
            raise ScoreSyntaxError(line_no, f"duplicate variable {name!r}")
        names.append(name)
        var_records: list[tuple[int, float, list[str]]] = []
        for _ in range(count):
            line_no, tokens = take()
            if len(tokens) < 2:
                raise ScoreSyntaxError(line_no, "expected 'SCORE COUNT [PARENTS...]'")
            try:
                score = float(tokens[0])
            except ValueError:
                raise ScoreSyntaxError(line_no, f"invalid score {tokens[0]!r}") from None
            if not math.isfinite(score):
                raise ScoreSyntaxError(line_no, "score must be finite")
            try:
                p_count = int(tokens[1])
            except ValueError:
                raise ScoreSyntaxError(line_no, f"invalid parent count {tokens[1]!r}") from None
            parents = tokens[2:]
            if p_count != len(parents):
                raise ScoreSyntaxError(
                    line_no,
                    f"parent count {p_count} does not match {len(parents)} listed parents",
                )
            var_records.append((line_no, score, parents))
        records.append(var_records)
    if pos != len(lines):
        raise ScoreSyntaxError(lines[pos][0], "trailing content after the last record")

    index = {name: i for i, name in enumerate(names)}
    entries: list[dict[int, float]] = []
    for i, var_records in enumerate(records):
        node_entries: dict[int, float] = {}
        for line_no, score, parents in var_records:
            mask = 0
            for p_name in parents:
                if p_name == names[i]:
                    raise SelfParentError(line_no, p_name)
                j = index.get(p_name)
                if j is None:
                    raise UnknownVariableError(line_no, p_name)
                bit = 1 << j
                if mask & bit:
                    raise ScoreSyntaxError(line_no, f"parent {p_name!r} repeated")
                mask |= bit
            if mask in node_entries:
                raise DuplicateParentSetError(line_no, names[i])
            node_entries[mask] = score
        if 0 not in node_entries:
            raise MissingEmptySetError(names[i])
        entries.append(node_entries)
    return LocalScoreTable(n, entries, names)


def write_scores(table: LocalScoreTable, names: Sequence[str] | None = None) -> str:
    """Serialize a table to score-file text; inverse of :func:`parse_scores`."""
    if names is None:
        names = table.names
    if names is None:
        names = tuple(f"X{i}" for i in range(table.n))
    names = tuple(names)
    if len(names) != table.n:
        raise ValueError("names length must equal the variable count")
    if len(set(names)) != table.n:
        raise ValueError("variable names must be unique")
    out = [str(table.n)]
    for i in range(table.n):
        out.append(f"{names[i]} {table.set_count(i)}")
        for mask, score in table.items(i):
            parts = [repr(score), str(mask.bit_count())]
            parts.extend(names[j] for j in NodeSet(mask))
            out.append(" ".join(parts))
    return "\n".join(out) + "\n"


@dataclass(frozen=True, eq=False)
class DiscreteDataset:
    """Complete discrete data: named columns, integer states, known arities."""

    names: tuple[str, ...]
    rows: np.ndarray
    arities: tuple[int, ...]

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.int64)
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2:
            raise DatasetError("rows must be a 2-D array")
        m, n = rows.shape
        if m < 1:
            raise DatasetError("dataset needs at least one row")
        if not 1 <= n <= MAX_NODES:
            raise DatasetError(f"column count must be in 1..{MAX_NODES}")
        if len(self.names) != n or len(set(self.names)) != n:
            raise DatasetError("column names must be unique and match the row width")
        if len(self.arities) != n:
            raise DatasetError("arities must list one value per column")
        for j, r in enumerate(self.arities):
            if r < 1:
                raise DatasetError(f"column {self.names[j]!r} has arity < 1")
            col = rows[:, j]
            if col.min() < 0 or col.max() >= r:
                raise DatasetError(
                    f"column {self.names[j]!r} has values outside 0..{r - 1}"
                )

    @property
    def m(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n(self) -> int:
        return int(self.rows.shape[1])

    @classmethod
    def from_csv(
        cls, text: str, arities: Sequence[int] | None = None
    ) -> "DiscreteDataset":
        """Read a header + integer-cell CSV; arities default to max+1."""
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("empty CSV") from None
        names = tuple(h.strip() for h in header)
        rows: list[list[int]] = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(names):
                raise DatasetError(f"row {row_no}: expected {len(names)} cells")
            try:
                rows.append([int(c) for c in row])
            except ValueError:
                raise DatasetError(f"row {row_no}: non-integer cell") from None
        if not rows:
            raise DatasetError("CSV has no data rows")
        data = np.asarray(rows, dtype=np.int64)
        if data.min() < 0:
            raise DatasetError("cells must be non-negative state indices")
        if arities is None:
            arities = tuple(int(v) + 1 for v in data.max(axis=0))
        return cls(names, data, tuple(int(r) for r in arities))


def _log_likelihood(
    data: DiscreteDataset, child: int, parents: tuple[int, ...]
) -> float:
    """Multinomial maximum log-likelihood of the child given its parents."""
    child_col = data.rows[:, child]
    r_child = data.arities[child]
    if not parents:
        counts = np.bincount(child_col, minlength=r_child).astype(np.float64)
        counts = counts.reshape(1, r_child)
    else:
        config = np.zeros(data.m, dtype=np.int64)
        stride = 1
        for j in parents:
            config += data.rows[:, j] * stride
            stride *= data.arities[j]
        joint = config * r_child + child_col
        counts = (
            np.bincount(joint, minlength=stride * r_child)
            .astype(np.float64)
            .reshape(stride, r_child)
        )
    row_totals = counts.sum(axis=1, keepdims=True)
    nz = counts > 0
    ratios = np.zeros_like(counts)
    np.divide(counts, row_totals, out=ratios, where=nz)
    ll = float((counts[nz] * np.log(ratios[nz])).sum())
    return ll


def bic_scores(
    data: DiscreteDataset,
    max_indegree: int,
    candidate_parents: Sequence["NodeSet | int"] | None = None,
    max_entries: int = 1_000_000,
) -> LocalScoreTable:
    """BIC local scores for every candidate parent set up to ``max_indegree``.

    score = log-likelihood - (log m)/2 * (r_i - 1) * prod_j r_j, with
    natural logs and zero-count cells contributing zero likelihood.
    """
    if max_indegree < 0:
        raise ValueError("max_indegree must be non-negative")
    n = data.n
    full = (1 << n) - 1
    cand_masks: list[int] = []
    for i in range(n):
        if candidate_parents is None:
            mask = full & ~(1 << i)
        else:
            mask = int(candidate_parents[i])
            if (mask >> i) & 1:
                raise ValueError(f"candidate parents of node {i} include itself")
            if mask & ~full:
                raise ValueError(f"candidate parents of node {i} out of range")
        cand_masks.append(mask)

    planned = 0
    for i in range(n):
        c = cand_masks[i].bit_count()
        planned += sum(math.comb(c, d) for d in range(min(max_indegree, c) + 1))
    if planned > max_entries:
        raise TooManyEntriesError(
            f"would generate {planned} entries, budget is {max_entries}"
        )

    half_log_m = 0.5 * math.log(data.m)
    entries: list[dict[int, float]] = []
    for i in range(n):
        elems = list(NodeSet(cand_masks[i]))
        node_entries: dict[int, float] = {}
        r_child = data.arities[i]
        for size in range(min(max_indegree, len(elems)) + 1):
            for combo in combinations(elems, size):
                mask = 0
                params = r_child - 1
                for j in combo:
                    mask |= 1 << j
                    params *= data.arities[j]
                ll = _log_likelihood(data, i, combo)
                node_entries[mask] = ll - half_log_m * params
        entries.append(node_entries)
    return LocalScoreTable(n, entries, data.names)


def prune_dominated(table: LocalScoreTable) -> LocalScoreTable:
    """Drop entries beaten by a strict subset scoring at least as well.

    Domination is judged against the input table, not against survivors,
    and ties keep the subset.  The empty set survives by construction.
    The result can fail :func:`is_closed_under_inclusion` even when the
    input satisfied it: a surviving set may lose an intermediate subset.
    """
    entries: list[dict[int, float]] = []
    for i in range(table.n):
        source = dict(table.items(i))
        kept: dict[int, float] = {}
        for mask, score in table.items(i):
            dominated = False
            sub = (mask - 1) & mask
            while True:
                other = source.get(sub)
                if other is not None and other >= score and sub != mask:
                    dominated = True
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & mask
            if not dominated or mask == 0:
                kept[mask] = score
        entries.append(kept)
    return LocalScoreTable(table.n, entries, table.names)


def is_closed_under_inclusion(table: LocalScoreTable) -> bool:
    """True iff every subset of every listed parent set is also listed."""
    for i in range(table.n):
        listed = {mask for mask, _ in table.items(i)}
        for mask in listed:
            # Removing single elements suffices: closure follows by induction.
            bits = mask
            while bits:
                low = bits & -bits
                if (mask ^ low) not in listed:
                    return False
                bits ^= low
    return True
