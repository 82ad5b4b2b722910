"""Nontrivial minimum fixed points of Boolean threshold synchronous systems."""
from .system import (
    CapacityError,
    StructureError,
    ThresholdSystem,
    VertexClass,
    build_system,
    classify_vertex,
    hamming_weight,
    load_system,
)
from .dynamics import (
    EvolutionTrace,
    evolve,
    greatest_fixed_point,
    is_fixed_point,
    monotone_closure,
    successor,
)
from .special import (
    detect_case,
    fpt_solve,
    solve_complete,
    solve_constant1,
    solve_dag,
    solve_progressive,
)
from .exact import (
    IlpModel,
    branch_and_bound_opt,
    brute_force_opt,
    build_ilp,
    export_lp,
    solve_exact,
    verify_ilp_solution,
)
from .greedy import greedy_framework, greedy_seeded, passive_closure
from .baselines import baseline_fixed_point, rank_vertices
from .reductions import build_clique_reduction, build_mvc_reduction

__version__ = "0.1.0"
