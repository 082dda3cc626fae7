"""scikit-learn style front end.

``MultilayerDesigner`` exposes the solver as an estimator: hyperparameters
go to ``__init__``, ``fit`` takes an instance (object, JSON text or file
path) and stores the fitted multilayer graph and design in trailing
underscore attributes.  ``get_params``/``set_params``/``clone`` come from
:class:`sklearn.base.BaseEstimator`.
"""

from __future__ import annotations

import os
from typing import Optional

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from mlgnet.config import ExactLimits, Mode, SolverConfig
from mlgnet.instance import Instance, check_instance
from mlgnet.io import emit_report, load_instance, parse_instance
from mlgnet.optimizer import design_load, solve
from mlgnet.routing import check_capacity
from mlgnet.synthesis import synthesize


def as_instance(X) -> Instance:
    """Coerce ``X`` to a validated :class:`Instance`.

    Accepts an ``Instance``, JSON ``bytes``/``str`` text, or a path to an
    instance file.
    """
    if isinstance(X, Instance):
        return check_instance(X)
    if isinstance(X, (bytes, bytearray)):
        return parse_instance(bytes(X))
    if isinstance(X, os.PathLike) or (isinstance(X, str) and not X.lstrip().startswith("{")):
        return load_instance(X)
    if isinstance(X, str):
        return parse_instance(X)
    raise TypeError(f"cannot interpret {type(X).__name__} as an instance")


class MultilayerDesigner(BaseEstimator):
    """Minimum-cost MPLS-over-transport design.

    Parameters
    ----------
    mode : {"greedy", "ls", "exact"}
        Greedy construction, greedy plus local search, or exhaustive search.
    budget : int
        Local search move evaluations.
    seed : int
        Seed for the local search move order.
    time_limit : float or None
        Wall-clock cap for local search, in seconds.
    max_lsr_candidates, max_demands, max_k_paths : int
        Size limits above which exact mode refuses to run.
    """

    def __init__(
        self,
        mode: str = "greedy",
        budget: int = 200,
        seed: int = 0,
        time_limit: Optional[float] = None,
        max_lsr_candidates: int = 10,
        max_demands: int = 4,
        max_k_paths: int = 3,
    ):
        self.mode = mode
        self.budget = budget
        self.seed = seed
        self.time_limit = time_limit
        self.max_lsr_candidates = max_lsr_candidates
        self.max_demands = max_demands
        self.max_k_paths = max_k_paths

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            Mode.parse(self.mode),
            self.budget,
            self.seed,
            self.time_limit,
            ExactLimits(self.max_lsr_candidates, self.max_demands, self.max_k_paths),
        )

    def fit(self, X, y=None):
        """Synthesize the multilayer graph of ``X`` and solve it.

        Raises InfeasibleError or LimitsExceededError like ``solve``.
        """
        instance = as_instance(X)
        cfg = self.solver_config()
        self.instance_ = instance
        self.mlg_ = synthesize(instance)
        self.design_ = solve(self.mlg_, instance, cfg)
        self.cost_ = self.design_.cost
        self.installed_lsrs_ = sorted(self.design_.installed)
        return self

    def _check_fitted(self):
        if not hasattr(self, "design_"):
            raise NotFittedError(
                f"This {type(self).__name__} instance is not fitted yet; call 'fit' first."
            )

    def predict(self, X=None):
        """The fitted design (``X`` must be the fitted instance or omitted)."""
        self._check_fitted()
        if X is not None and as_instance(X) != self.instance_:
            raise ValueError("predict only applies to the instance passed to fit")
        return self.design_

    def fit_predict(self, X, y=None):
        return self.fit(X).design_

    def transform(self, X=None):
        """Load of the fitted design (transport links, logical edges, LSRs)."""
        design = self.predict(X)
        return design_load(self.mlg_, self.instance_, design)

    def score(self, X=None, y=None) -> float:
        """Negated design cost, so that higher is better."""
        return -float(self.predict(X).cost)

    def capacity_report(self):
        self._check_fitted()
        return check_capacity(self.transform(), self.mlg_, self.design_.dimensioning)

    def report(self, format: str = "text", reference_cost=None) -> bytes:
        self._check_fitted()
        return emit_report(self.design_, self.instance_, self.mlg_, format, reference_cost)
