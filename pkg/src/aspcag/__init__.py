"""Grounding, solving and constraint-aware rewriting for a normal-ASP fragment."""
from .cag import (
    FilterCondition,
    FilteredRule,
    GuessCheckPartition,
    cag_rewrite,
    filter_conditions,
    guess_check_partition,
    negate_condition,
    unfold_constraints,
)
from .errors import AspError
from .grounder import GroundProgram, GroundingStats, ground, grounding_stats, herbrand_instantiate
from .hcp import HcpSolution, InstanceSpec, batch_facts, gen_instance, verify_solution
from .incremental import FactBatch, IterationTrace, facts_of, incremental_solve
from .kernels import BACKEND
from .parser import parse_program, render_program
from .solver import check_stable, enumerate_brute_force, eval_aggregate, solve
from .syntax import (
    Aggregate,
    AggregateElement,
    Atom,
    Comparison,
    Literal,
    Program,
    Rule,
    Variable,
    apply_substitution,
    check_safety,
    unify,
)

__version__ = "0.1.0"
