"""Downset-constrained DP: closures, per-downset best parents, member DP."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbnsl.bucket_cover import (
    BlockPartition,
    DownsetIndex,
    cover_size,
    is_downset,
    member_by_index,
)
from qbnsl.dp_exact import solve_dp
from qbnsl.instance import (
    Dag,
    InstanceTooLargeError,
    LinearOrder,
    LocalScoreTable,
    NodeSet,
    best_parents_in,
    is_acyclic,
    total_score,
)
from qbnsl.po_dp import (
    StrategyUnavailableError,
    downset_best_parents,
    downward_closure,
    solve_cover,
    solve_member,
)
from qbnsl.seeding import rng_for
from qbnsl.tables import random_table


def random_member(rng, n, k):
    partition = BlockPartition.contiguous(n, k)
    return member_by_index(partition, int(rng.integers(cover_size(n, k))))


def test_downward_closure_minimal_rule(demo_member):
    # Only second-half membership pulls in a first half; first-half
    # elements close to themselves.
    assert downward_closure(demo_member, NodeSet.of(7)) == NodeSet.of(7)
    assert downward_closure(demo_member, NodeSet.of(3, 6)) == NodeSet.of(3, 6)
    assert downward_closure(demo_member, NodeSet.of(0)) == NodeSet.of(0, 2, 3)
    assert downward_closure(demo_member, NodeSet.of(4, 5)) == NodeSet.of(4, 5, 6, 7)
    assert downward_closure(demo_member, NodeSet(0)) == NodeSet(0)
    with pytest.raises(ValueError):
        downward_closure(demo_member, NodeSet.of(11))


@given(st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_downward_closure_is_minimal_and_idempotent(seed):
    rng = rng_for(seed, "closure")
    n = int(rng.integers(2, 11))
    k = int(rng.choice([e for e in (2, 4, 6) if e <= n]))
    member = random_member(rng, n, k)
    bits = int(rng.integers(1 << n))
    closed = downward_closure(member, bits)
    assert is_downset(member, closed)
    assert int(closed) & bits == bits
    assert downward_closure(member, closed) == closed
    # Membership transfer: J inside a downset iff its closure is.
    idx = DownsetIndex(member)
    for i in range(len(idx)):
        s = int(idx.downset_by_index(i))
        assert (bits & ~s == 0) == (int(closed) & ~s == 0)


def test_downset_best_parents_demo_values(demo_member):
    entries = [{0: 0.0} for _ in range(8)]
    entries[5] = {0: 0.0, 1 << 7: 2.0, (1 << 3) | (1 << 6): 3.0}
    table = LocalScoreTable(8, entries)
    idx = DownsetIndex(demo_member)
    best = downset_best_parents(table, demo_member, idx)
    at = idx.index_of_downset
    assert best.values[5][at(NodeSet.of(6, 7))] == 2.0
    assert best.values[5][at(NodeSet.of(2, 3, 6, 7))] == 3.0
    assert best.argmax[5][at(NodeSet.of(2, 3, 6, 7))] == (1 << 3) | (1 << 6)
    assert best.values[5][at(NodeSet(0))] == 0.0


@given(st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_downset_best_parents_equals_scan_oracle(seed):
    rng = rng_for(seed, "hat-oracle")
    n = int(rng.integers(3, 9))
    k = int(rng.choice([e for e in (2, 4) if e <= n]))
    table = random_table(rng, n)
    member = random_member(rng, n, k)
    idx = DownsetIndex(member)
    best = downset_best_parents(table, member, idx)
    for d in range(len(idx)):
        s = int(idx.downset_by_index(d))
        for i in range(n):
            score, parents = best_parents_in(table, i, s & ~(1 << i))
            assert best.values[i][d] == pytest.approx(score, abs=0)
            assert best.argmax[i][d] == int(parents)


@given(st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_downset_best_parents_monotone_along_edges(seed):
    rng = rng_for(seed, "hat-monotone")
    n = int(rng.integers(3, 10))
    k = int(rng.choice([e for e in (2, 4, 6) if e <= n]))
    table = random_table(rng, n)
    member = random_member(rng, n, k)
    idx = DownsetIndex(member)
    best = downset_best_parents(table, member, idx)
    for d, links in enumerate(idx.edges()):
        for _, child in links:
            for i in range(n):
                assert best.values[i][child] <= best.values[i][d] + 1e-12


@given(st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_downset_best_parents_edge_budget(seed):
    rng = rng_for(seed, "hat-budget")
    n = int(rng.integers(3, 10))
    k = int(rng.choice([e for e in (2, 4, 6) if e <= n]))
    table = random_table(rng, n)
    member = random_member(rng, n, k)
    idx = DownsetIndex(member)
    best = downset_best_parents(table, member, idx)
    assert best.edge_visits <= n * n * len(idx)


def test_solve_member_all_empty_tables(demo_member):
    table = LocalScoreTable(8, [{0: 0.0}] * 8)
    score, dag = solve_member(table, demo_member)
    assert score == 0.0
    assert dag.parents == tuple([NodeSet(0)] * 8)


def test_solve_member_two_node_both_orientations():
    table = LocalScoreTable(2, [{0: 0.0}, {0: 0.0, 0b01: 5.0}])
    partition = BlockPartition.contiguous(2, 2)
    forward = member_by_index(partition, 0)  # 0 precedes 1
    backward = member_by_index(partition, 1)  # 1 precedes 0
    score_f, dag_f = solve_member(table, forward)
    assert score_f == 5.0 and dag_f.parents[1] == NodeSet.of(0)
    score_b, dag_b = solve_member(table, backward)
    assert score_b == 0.0 and dag_b.parents[1] == NodeSet(0)


def brute_best_over_extensions(table, member):
    best = float("-inf")
    for perm in itertools.permutations(range(table.n)):
        order = LinearOrder(perm)
        if not member.extended_by(order):
            continue
        total = sum(
            best_parents_in(table, node, preds)[0] for node, preds in order.prefixes()
        )
        best = max(best, total)
    return best


@given(st.integers(0, 2**31))
@settings(max_examples=10, deadline=None)
def test_solve_member_equals_extension_enumeration(seed):
    rng = rng_for(seed, "ext-oracle")
    n = 8
    table = random_table(rng, n)
    member = random_member(rng, n, 4)
    expect = brute_best_over_extensions(table, member)
    got, dag = solve_member(table, member)
    assert got == pytest.approx(expect, abs=1e-9)
    assert is_acyclic(dag)
    assert total_score(dag, table) == pytest.approx(got, abs=1e-12)


@given(st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_solve_member_bounded_by_unconstrained_optimum(seed):
    rng = rng_for(seed, "member-bound")
    n = int(rng.integers(2, 9))
    k = int(rng.choice([e for e in (2, 4) if e <= n]))
    table = random_table(rng, n)
    member = random_member(rng, n, k)
    assert solve_member(table, member)[0] <= solve_dp(table)[0] + 1e-9


@given(st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_cover_maximum_equals_unconstrained_optimum(seed):
    rng = rng_for(seed, "cover-identity")
    n = int(rng.integers(2, 11))
    k = int(rng.choice([e for e in (2, 4) if e <= n]))
    table = random_table(rng, n)
    partition = BlockPartition.contiguous(n, k)
    score, dag, ledger = solve_cover(table, partition, "classical-scan")
    reference = solve_dp(table)[0]
    assert score == pytest.approx(reference, abs=1e-9)
    assert is_acyclic(dag)
    assert total_score(dag, table) == pytest.approx(score, abs=1e-12)
    assert ledger.classical_evals == cover_size(n, k)
    assert ledger.charged_quantum_queries == 0


def test_cover_two_members_is_max_of_both():
    table = LocalScoreTable(2, [{0: 0.0, 0b10: -3.0}, {0: 0.0, 0b01: 5.0}])
    partition = BlockPartition.contiguous(2, 2)
    g0 = solve_member(table, member_by_index(partition, 0))[0]
    g1 = solve_member(table, member_by_index(partition, 1))[0]
    score, _, _ = solve_cover(table, partition, "classical-scan")
    assert score == max(g0, g1) == 5.0


def test_cover_grover_sim_is_deterministic_given_seed():
    rng = rng_for(77, "det")
    table = random_table(rng, 6)
    partition = BlockPartition.contiguous(6, 2)
    runs = [
        solve_cover(table, partition, "grover-sim", seed=123) for _ in range(2)
    ]
    assert runs[0][0] == runs[1][0]
    assert runs[0][1] == runs[1][1]
    assert runs[0][2].as_dict() == runs[1][2].as_dict()


def test_cover_grover_sim_ledger_separates_units():
    rng = rng_for(78, "ledger")
    table = random_table(rng, 6)
    partition = BlockPartition.contiguous(6, 2)
    score, dag, ledger = solve_cover(table, partition, "grover-sim", seed=5)
    assert score == pytest.approx(solve_dp(table)[0], abs=1e-9)
    assert ledger.charged_quantum_queries > 0
    # 8 member solves + verifications + the final witness re-solve.
    assert ledger.classical_evals > cover_size(6, 2)


def test_cover_cost_model_charges_analytic_formula():
    rng = rng_for(79, "cost")
    table = random_table(rng, 8)
    partition = BlockPartition.contiguous(8, 4)
    score, dag, ledger = solve_cover(table, partition, "grover-cost-model")
    assert score == pytest.approx(solve_dp(table)[0], abs=1e-9)
    assert ledger.charged_quantum_queries == 36  # ceil(sqrt(36)) * ceil(log2(36))
    assert is_acyclic(dag) and total_score(dag, table) == pytest.approx(score)


def test_cover_strategy_validation_and_caps():
    rng = rng_for(80, "caps")
    table = random_table(rng, 8)
    partition = BlockPartition.contiguous(8, 4)
    with pytest.raises(StrategyUnavailableError):
        solve_cover(table, partition, "annealing")
    with pytest.raises(InstanceTooLargeError):
        solve_cover(table, partition, "classical-scan", scan_cap=10)
    with pytest.raises(InstanceTooLargeError):
        solve_cover(table, partition, "grover-sim", sim_cap=10)
    with pytest.raises(ValueError):
        solve_cover(table, BlockPartition.contiguous(6, 2), "classical-scan")
