from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional


class Mode(str, enum.Enum):
    GREEDY = "greedy"
    LOCAL_SEARCH = "ls"
    EXACT = "exact"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        aliases = {
            "greedy": cls.GREEDY,
            "ls": cls.LOCAL_SEARCH,
            "local_search": cls.LOCAL_SEARCH,
            "greedy+ls": cls.LOCAL_SEARCH,
            "exact": cls.EXACT,
            "bruteforce": cls.EXACT,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown solver mode {value!r}") from None


@dataclass(frozen=True)
class ExactLimits:
    max_lsr_candidates: int = 10
    max_demands: int = 4
    max_k_paths: int = 3


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``local_search_budget`` counts evaluated moves.  ``time_limit`` is in
    seconds and ``None`` disables it; a time limit makes local search
    results depend on machine speed, so leave it unset when determinism
    matters.
    """

    mode: Mode = Mode.GREEDY
    local_search_budget: int = 200
    rng_seed: int = 0
    time_limit: Optional[float] = None
    limits: ExactLimits = ExactLimits()

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if self.local_search_budget < 0:
            raise ValueError("local_search_budget must be >= 0")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
