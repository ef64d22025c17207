"""Estimator-style facade over the alternating solver.

Wraps run_ao in the familiar fit/predict/score shape so the solver can
sit inside parameter searches or pipelines.  ``fit`` consumes a channel
set drawn elsewhere (for example by ``draw_scenario``); the learned
precoders and reflection are exposed as trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .config import ScenarioConfig
from .exceptions import ConfigError
from .manifold import ManifoldOptions
from .channel import effective_channels
from .solver import SolverOptions, run_ao
from .system_model import _per_user_rates
from .validation import check_channel_set, check_rng

__all__ = ["BdRisWmmse"]


class BdRisWmmse(BaseEstimator):
    """Joint beamforming and reflection design by alternating optimization.

    Parameters mirror SolverOptions and ManifoldOptions; they are stored
    verbatim so get_params/set_params round-trip, and validated at fit
    time.

    Attributes set by fit: beamformers_, reflection_, decoders_,
    weights_, rate_, trace_, n_iter_.
    """

    def __init__(self, scenario=None, max_iter=500, tol=1e-4,
                 bisection_tol=1e-10, max_bisection_iter=200,
                 manifold_max_iter=100, manifold_grad_tol=1e-6,
                 armijo_init_step=None, armijo_shrink=0.5, armijo_slope=1e-4,
                 armijo_max_backtracks=30, reunitarize_every=20,
                 reflection="full", optimize_reflection=True,
                 init="identity", random_state=None):
        self.scenario = scenario
        self.max_iter = max_iter
        self.tol = tol
        self.bisection_tol = bisection_tol
        self.max_bisection_iter = max_bisection_iter
        self.manifold_max_iter = manifold_max_iter
        self.manifold_grad_tol = manifold_grad_tol
        self.armijo_init_step = armijo_init_step
        self.armijo_shrink = armijo_shrink
        self.armijo_slope = armijo_slope
        self.armijo_max_backtracks = armijo_max_backtracks
        self.reunitarize_every = reunitarize_every
        self.reflection = reflection
        self.optimize_reflection = optimize_reflection
        self.init = init
        self.random_state = random_state

    def _config(self):
        if self.scenario is None:
            return ScenarioConfig()
        if not isinstance(self.scenario, ScenarioConfig):
            raise ConfigError("scenario must be a ScenarioConfig or None")
        return self.scenario

    def _options(self):
        manifold = ManifoldOptions(
            max_iters=self.manifold_max_iter,
            grad_tol=self.manifold_grad_tol,
            armijo_init_step=self.armijo_init_step,
            armijo_shrink=self.armijo_shrink,
            armijo_slope=self.armijo_slope,
            max_backtracks=self.armijo_max_backtracks,
            reunitarize_every=self.reunitarize_every,
        )
        return SolverOptions(
            max_ao_iters=self.max_iter,
            ao_rel_tol=self.tol,
            bisection_tol=self.bisection_tol,
            max_bisection_iters=self.max_bisection_iter,
            manifold=manifold,
            init_strategy=self.init,
            reflection_mode=self.reflection,
            optimize_reflection=self.optimize_reflection,
        )

    def fit(self, X, y=None):
        """Solve the joint design for one channel set X."""
        config = self._config()
        check_channel_set(X, config)
        seed = config.rng_seed if self.random_state is None else self.random_state
        rng = check_rng(seed)
        variables, trace = run_ao(X, config, self._options(), rng=rng)
        self.beamformers_ = variables.beamformers
        self.reflection_ = variables.reflection
        self.decoders_ = variables.decoders
        self.weights_ = variables.weights
        self.trace_ = trace
        self.rate_ = float(trace.weighted_sum_rate[-1])
        self.n_iter_ = trace.n_iterations
        return self

    def _rates_for(self, X):
        config = self._config()
        check_channel_set(X, config)
        effective = effective_channels(X, self.reflection_)
        return _per_user_rates(effective, self.beamformers_, config.noise_mw)

    def predict(self, X):
        """Per-user achievable rates on channel set X, shape (cells, users)."""
        check_is_fitted(self, "beamformers_")
        return self._rates_for(X)

    def score(self, X, y=None):
        """Weighted sum rate on channel set X with the fitted design."""
        check_is_fitted(self, "beamformers_")
        config = self._config()
        rates = self._rates_for(X)
        return float(np.sum(config.weights_array * rates))
