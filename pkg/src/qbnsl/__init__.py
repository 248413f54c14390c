"""Exact structure learning for Bayesian networks at desk scale.

The package solves the decomposable-score DAG optimization problem three
ways: a classical subset dynamic program, a parallel bucket-order cover
whose members are searched independently, and a simulated (or analytically
charged) quantum maximum-finding layer over the cover members.  Every
solver returns a witness DAG and is cross-checked against brute-force
oracles in the test suite.
"""

from .instance import (
    MAX_NODES,
    CyclicGraphError,
    Dag,
    InstanceTooLargeError,
    LinearOrder,
    LocalScoreTable,
    MissingParentSetError,
    NodeSet,
    best_parents_in,
    is_acyclic,
    topological_order,
    total_score,
)
from .scores_io import (
    DatasetError,
    DiscreteDataset,
    DuplicateParentSetError,
    MissingEmptySetError,
    ScoreFileError,
    ScoreSyntaxError,
    SelfParentError,
    TooManyEntriesError,
    UnknownVariableError,
    bic_scores,
    is_closed_under_inclusion,
    parse_scores,
    prune_dominated,
    write_scores,
)
from .dp_exact import (
    SubsetTable,
    best_parents_all_subsets,
    brute_force_dags,
    brute_force_orders,
    enumerate_dags,
    solve_dp,
)
from .bucket_cover import (
    BlockPartition,
    CoverMember,
    DownsetIndex,
    IndexOutOfRangeError,
    InvalidKError,
    NotADownsetError,
    cover_size,
    covering_member,
    downset_count,
    downset_count_formula,
    downsets_per_member,
    is_downset,
    member_by_index,
    index_of_member,
)
from .po_dp import (
    COVER_STRATEGIES,
    DownsetScoreTable,
    StrategyUnavailableError,
    downset_best_parents,
    downward_closure,
    solve_cover,
    solve_member,
)
from .grover_sim import (
    MAX_SIM_DOMAIN,
    CostReport,
    DomainTooLargeError,
    MaxOracle,
    QueryLedger,
    Statevector,
    cost_report,
    grover_search_sim,
    grover_trial,
    max_find,
    optimal_iterations,
    padded_size,
    quantum_charge,
    success_probability,
)
from .seeding import rng_for, seed_sequence
from .tables import random_table

__version__ = "0.1.0"
