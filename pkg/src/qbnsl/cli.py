"""Command-line surface: score generation, solving, cover stats, benchmarks.

Exit codes: 0 success, 1 failed benchmark suite, 2 infeasible configuration
(caps, invalid k, unavailable strategy), 3 I/O or parse errors.  All report
output is plain ``key = value`` text; DAGs are written as an edge list
("child <- parent parent ..." per node) and as DOT (arcs parent -> child).
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bucket_cover import (
    BlockPartition,
    InvalidKError,
    cover_size,
    downset_count_formula,
)
from .dp_exact import (
    DAG_BRUTE_CAP,
    DP_CAP,
    brute_force_dags,
    brute_force_orders,
    solve_dp,
)
from .grover_sim import (
    MAX_SIM_DOMAIN,
    DomainTooLargeError,
    MaxOracle,
    cost_report,
    grover_trial,
    max_find,
    optimal_iterations,
    padded_size,
    quantum_charge,
    success_probability,
)
from .instance import Dag, InstanceTooLargeError, total_score
from .po_dp import StrategyUnavailableError, solve_cover
from .scores_io import (
    DatasetError,
    DiscreteDataset,
    ScoreFileError,
    TooManyEntriesError,
    bic_scores,
    parse_scores,
    write_scores,
)
from .seeding import rng_for
from .tables import random_table

ALGORITHMS = ("dp", "cover", "cover-grover", "brute-orders", "brute-dags")
SUITES = ("oracle", "grover", "scaling")


@dataclass
class RunConfig:
    """One parsed invocation: subcommand plus its knobs and caps."""

    subcommand: str
    input_path: str | None = None
    algo: str = "dp"
    k: int = 2
    seed: int = 0
    out: str | None = None
    report: str | None = None
    max_indegree: int = 2
    max_entries: int = 1_000_000
    n: int = 8
    entries: int | None = None
    suite: str = "oracle"
    instances: int = 500
    trials: int = 2000
    dp_cap: int = DP_CAP
    sim_cap: int = MAX_SIM_DOMAIN
    shuffle_blocks: bool = False

    def __post_init__(self) -> None:
        if self.subcommand == "solve" and self.algo in ("cover", "cover-grover"):
            if self.k < 2 or self.k % 2:
                raise InvalidKError(f"block size k={self.k} must be even and >= 2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbnsl",
        description="Exact Bayesian-network structure learning with bucket-order "
        "cover search and simulated quantum maximum finding.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_score = sub.add_parser("score", help="compute BIC local scores from a CSV")
    p_score.add_argument("data", help="CSV with a header row and integer cells")
    p_score.add_argument("--max-indegree", type=int, default=2)
    p_score.add_argument("--max-entries", type=int, default=1_000_000)
    p_score.add_argument("--out", help="score file to write (default: stdout)")

    p_solve = sub.add_parser("solve", help="maximize the score over DAGs")
    p_solve.add_argument("scores", help="score file to solve")
    p_solve.add_argument("--algo", choices=ALGORITHMS, default="dp")
    p_solve.add_argument(
        "--k", type=int, default=2, help="even block size for cover algorithms"
    )
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--out", help="edge-list path; a .dot sibling is written too")
    p_solve.add_argument("--dp-cap", type=int, default=DP_CAP)
    p_solve.add_argument("--sim-cap", type=int, default=MAX_SIM_DOMAIN)
    p_solve.add_argument(
        "--shuffle-blocks",
        action="store_true",
        help="assign nodes to blocks by seeded shuffle instead of index order",
    )

    p_stats = sub.add_parser("cover-stats", help="cover counts and the cost report")
    p_stats.add_argument("--n", type=int, required=True)
    p_stats.add_argument("--k", type=int, required=True)
    p_stats.add_argument(
        "--entries", type=int, default=None, help="table size F (default n * 2^(n-1))"
    )
    p_stats.add_argument("--report", help="also write the key-value lines to this path")

    p_bench = sub.add_parser("bench", help="run a verification suite")
    p_bench.add_argument("--suite", choices=SUITES, default="oracle")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument(
        "--instances", type=int, default=500, help="oracle suite: instance count"
    )
    p_bench.add_argument(
        "--trials", type=int, default=2000, help="grover suite: trials per domain size"
    )
    p_bench.add_argument("--report", help="also write the key-value lines to this path")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(subcommand=args.subcommand)
    for name in (
        "algo",
        "k",
        "seed",
        "out",
        "report",
        "max_indegree",
        "max_entries",
        "n",
        "entries",
        "suite",
        "instances",
        "trials",
        "dp_cap",
        "sim_cap",
        "shuffle_blocks",
    ):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if args.subcommand == "score":
        cfg.input_path = args.data
    elif args.subcommand == "solve":
        cfg.input_path = args.scores
    cfg.__post_init__()
    return cfg


def _emit(lines: list[str], report_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")


def _edge_list(dag: Dag, names: tuple[str, ...]) -> str:
    rows = []
    for child in range(dag.n):
        parents = " ".join(names[p] for p in dag.parents[child])
        rows.append(f"{names[child]} <- {parents}".rstrip())
    return "\n".join(rows) + "\n"


def _dot(dag: Dag, names: tuple[str, ...]) -> str:
    rows = ["digraph network {"]
    for i in range(dag.n):
        rows.append(f'  "{names[i]}";')
    for parent, child in dag.arcs():
        rows.append(f'  "{names[parent]}" -> "{names[child]}";')
    rows.append("}")
    return "\n".join(rows) + "\n"


def cmd_score(cfg: RunConfig) -> int:
    text = Path(cfg.input_path).read_text(encoding="utf-8")
    data = DiscreteDataset.from_csv(text)
    table = bic_scores(data, cfg.max_indegree, max_entries=cfg.max_entries)
    out_text = write_scores(table)
    lines = [f"F = {table.total_entries}"]
    for i in range(table.n):
        lines.append(f"parent_sets[{table.names[i]}] = {table.set_count(i)}")
    sys.stdout.write("\n".join(lines) + "\n")
    if cfg.out:
        Path(cfg.out).write_text(out_text, encoding="utf-8")
    else:
        sys.stdout.write(out_text)
    return 0


def cmd_solve(cfg: RunConfig) -> int:
    table = parse_scores(Path(cfg.input_path).read_text(encoding="utf-8"))
    names = table.names or tuple(f"X{i}" for i in range(table.n))
    ledger = None
    dag = None
    if cfg.algo == "dp":
        score, dag = solve_dp(table, cap=cfg.dp_cap)
    elif cfg.algo == "brute-orders":
        score = brute_force_orders(table)
    elif cfg.algo == "brute-dags":
        score = brute_force_dags(table)
    else:
        if cfg.shuffle_blocks:
            partition = BlockPartition.shuffled(table.n, cfg.k, cfg.seed)
        else:
            partition = BlockPartition.contiguous(table.n, cfg.k)
        strategy = "classical-scan" if cfg.algo == "cover" else "grover-sim"
        score, dag, ledger = solve_cover(
            table,
            partition,
            strategy,
            seed=cfg.seed,
            sim_cap=cfg.sim_cap,
            dp_cap=cfg.dp_cap,
        )
    lines = [f"score = {score:.9f}", f"algo = {cfg.algo}"]
    if ledger is not None:
        lines.append(f"classical_evals = {ledger.classical_evals}")
        lines.append(f"charged_quantum_queries = {ledger.charged_quantum_queries}")
    sys.stdout.write("\n".join(lines) + "\n")
    if dag is not None:
        check = total_score(dag, table)
        if abs(check - score) > 1e-9:
            raise RuntimeError("witness DAG does not rescore to the printed value")
        edge_text = _edge_list(dag, names)
        if cfg.out:
            Path(cfg.out).write_text(edge_text, encoding="utf-8")
            Path(cfg.out).with_suffix(".dot").write_text(
                _dot(dag, names), encoding="utf-8"
            )
        else:
            sys.stdout.write(edge_text)
    return 0


def cmd_cover_stats(cfg: RunConfig) -> int:
    members = cover_size(cfg.n, cfg.k)
    downsets = downset_count_formula(cfg.n, cfg.k)
    report = cost_report(cfg.n, cfg.entries, cfg.k)
    lines = report.lines()
    lines.append(f"work_proxy = {members * downsets}")
    _emit(lines, cfg.report)
    return 0


def _bench_oracle(seed: int, instances: int) -> tuple[list[str], bool]:
    """Cross-check brute orders, subset DP, cover scan, and brute DAGs."""
    rng = rng_for(seed, "bench-oracle")
    max_gap = 0.0
    dag_checked = 0
    for trial in range(instances):
        n = 2 + trial % 7
        table = random_table(rng, n)
        reference, _ = solve_dp(table)
        gaps = [abs(reference - brute_force_orders(table))]
        for k in (2, 4):
            if k <= n:
                got, _, _ = solve_cover(
                    table, BlockPartition.contiguous(n, k), "classical-scan"
                )
                gaps.append(abs(reference - got))
        if n <= DAG_BRUTE_CAP:
            gaps.append(abs(reference - brute_force_dags(table)))
            dag_checked += 1
        max_gap = max(max_gap, max(gaps))
    ok = max_gap <= 1e-9
    lines = [
        "suite = oracle",
        f"instances = {instances}",
        f"dag_oracle_instances = {dag_checked}",
        f"max_abs_score_gap = {max_gap:.3e}",
        f"result = {'pass' if ok else 'fail'}",
    ]
    if not ok:
        lines.append("failed = oracle-equivalence")
    return lines, ok


def _bench_grover(seed: int, trials: int) -> tuple[list[str], bool]:
    """Bounded-error rate of single-pass maximum finding, plus closed forms."""
    from scipy.stats import binom

    lines = ["suite = grover"]
    ok = True
    for m in (16, 64, 256):
        successes = 0
        queries = 0
        for t in range(trials):
            rng = rng_for(seed, "bench-grover-values", m, t)
            values = rng.permutation(m)
            truth = int(np.argmax(values))
            oracle = MaxOracle(m, lambda x, v=values: float(v[x]))
            x, _, led = max_find(
                oracle, m, "sim", rng_seed=seed * 1_000_003 + m * 101 + t, repetitions=1
            )
            successes += int(x == truth)
            queries += led.charged_quantum_queries
        rate = successes / trials
        margin = 1.96 * math.sqrt(max(rate * (1.0 - rate), 1e-12) / trials)
        constant = queries / trials / (math.sqrt(m) * math.log2(m))
        p_below = float(binom.cdf(successes, trials, 2.0 / 3.0))
        lines.append(f"success_rate[{m}] = {rate:.4f}")
        lines.append(
            f"ci95[{m}] = [{max(0.0, rate - margin):.4f}, {min(1.0, rate + margin):.4f}]"
        )
        lines.append(f"measured_query_constant[{m}] = {constant:.3f}")
        lines.append(f"binomial_p_below_two_thirds[{m}] = {p_below:.4g}")
        if p_below < 0.01:
            ok = False
            lines.append(f"failed = bounded-error[{m}]")
    for m in (4, 64):
        size = padded_size(m)
        r = optimal_iterations(size, 1)
        predicted = success_probability(size, 1, r)
        marks = np.zeros(size, dtype=bool)
        marks[m - 1] = True
        sub_trials = max(trials, 500)
        hits = 0
        for t in range(sub_trials):
            rng = rng_for(seed, "bench-grover-single", m, t)
            hits += int(grover_trial(marks, r, rng) == m - 1)
        freq = hits / sub_trials
        lines.append(f"single_search_freq[{m}] = {freq:.4f}")
        lines.append(f"single_search_closed_form[{m}] = {predicted:.4f}")
        if abs(freq - predicted) > 0.05:
            ok = False
            lines.append(f"failed = closed-form-gap[{m}]")
    lines.append(f"result = {'pass' if ok else 'fail'}")
    return lines, ok


def _bench_scaling(seed: int) -> tuple[list[str], bool]:
    """Charged-query formula checks and the desk-scale constants table."""
    lines = ["suite = scaling"]
    ok = True
    for n in (8, 12, 16, 20, 24):
        k = 4
        members = cover_size(n, k)
        charge = quantum_charge(members)
        recomputed = math.ceil(math.sqrt(members)) * max(
            1, math.ceil(math.log2(max(members, 2)))
        )
        reference = 1.982**n
        lines.append(
            f"row[n={n},k={k}] = members {members} charged {charge} reference {reference:.6g}"
        )
        if charge != recomputed:
            ok = False
            lines.append(f"failed = charge-formula[n={n}]")
    block = cost_report(26, None, 26)
    lines.append(f"block26_members = {block.block26_first_half_choices}")
    lines.append(f"block26_downsets = {block.block26_downsets}")
    lines.append(f"per_node_base_product_30 = {block.product_30}")
    speed24 = cost_report(24, None, 4).speedup_vs_subset
    speed48 = cost_report(48, None, 4).speedup_vs_subset
    lines.append(f"speedup_n24 = {speed24:.4f}")
    lines.append(f"speedup_n48 = {speed48:.4f}")
    if not (9.5 <= speed24 <= 10.5 and 95.0 <= speed48 <= 105.0):
        ok = False
        lines.append("failed = desk-scale-speedup")
    lines.append(f"result = {'pass' if ok else 'fail'}")
    return lines, ok


def cmd_bench(cfg: RunConfig) -> int:
    if cfg.suite == "oracle":
        lines, ok = _bench_oracle(cfg.seed, cfg.instances)
    elif cfg.suite == "grover":
        lines, ok = _bench_grover(cfg.seed, cfg.trials)
    else:
        lines, ok = _bench_scaling(cfg.seed)
    _emit(lines, cfg.report)
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.subcommand == "score":
            return cmd_score(cfg)
        if cfg.subcommand == "solve":
            return cmd_solve(cfg)
        if cfg.subcommand == "cover-stats":
            return cmd_cover_stats(cfg)
        return cmd_bench(cfg)
    except (
        InstanceTooLargeError,
        InvalidKError,
        DomainTooLargeError,
        StrategyUnavailableError,
        TooManyEntriesError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ScoreFileError, DatasetError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
