from mlgnet.config import ExactLimits, Mode, SolverConfig
from mlgnet.optimizer.design import Design, Infeasible, build_design, design_load, objective
from mlgnet.optimizer.exact import exact_bruteforce
from mlgnet.optimizer.greedy import greedy_construct
from mlgnet.optimizer.local_search import local_search
from mlgnet.optimizer.solve import certify, solve

__all__ = [
    "Design",
    "ExactLimits",
    "Infeasible",
    "Mode",
    "SolverConfig",
    "build_design",
    "certify",
    "design_load",
    "exact_bruteforce",
    "greedy_construct",
    "local_search",
    "objective",
    "solve",
]
