"""scikit-learn style front end.

A grid plays the role of the training data: ``fit`` takes a
:class:`~gridattack.grid.Grid` (or a prepared
:class:`~gridattack.attack_model.AttackContext`, whose capacities and costs
are then used as they are) and learned state lands in trailing-underscore
attributes. Hyperparameters go through ``get_params``/``set_params`` and
``clone`` like any other estimator.

>>> from gridattack import GreedyAttack, load_builtin
>>> grid = load_builtin("toy4").to_grid()
>>> attack = GreedyAttack(theta=0.2).fit(grid)
>>> attack.solution_.components.tolist(), attack.damage_
([0], 1.0)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .attack_model import GLOBAL, LOCAL, SCOPES, AttackContext
from .exceptions import ValidationError
from .greedy import SKIP, STOP, centrality_order, greedy_attack, random_attack
from .power_flow import GenerationSpec, network_state
from .pso import GC_OHA, LC_OHA, OHA, VARIANT_SCOPE, PsoParams, optimize
from .validation import (
    check_attack,
    check_attack_matrix,
    check_grid,
    check_non_negative,
    check_positive,
    check_random_state,
    check_theta,
)


class _GridModelMixin:
    """Electrical and cost hyperparameters shared by every estimator."""

    def _context(self, X) -> AttackContext:
        if isinstance(X, AttackContext):
            return X
        grid = check_grid(X)
        check_non_negative(self.alpha, "alpha")
        check_non_negative(self.beta, "beta")
        check_positive(self.gamma, "gamma")
        spec = GenerationSpec(self.generator_voltage, self.consumer_current)
        return AttackContext.build(
            grid, self.alpha, self.beta, self.gamma, spec,
            getattr(self, "capacity_floor", 0.0),
            getattr(self, "include_self", False),
        )


class CascadeSimulator(_GridModelMixin, BaseEstimator):
    """Fit capacities on an intact grid, then score attacks by cascade damage.

    ``predict`` takes a 0/1 matrix with one attack per row (columns follow
    the grid's component indexing) and returns the damage of each.
    """

    def __init__(self, alpha=0.2, beta=0.2, gamma=0.3, generator_voltage=1.0,
                 consumer_current=1.0, capacity_floor=0.0):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.generator_voltage = generator_voltage
        self.consumer_current = consumer_current
        self.capacity_floor = capacity_floor

    def fit(self, X, y=None):
        self.context_ = self._context(X)
        self.capacities_ = self.context_.capacities.capacity
        self.initial_state_ = network_state(self.context_.grid,
                                            self.context_.capacities.spec)
        self.n_components_ = self.context_.grid.size
        return self

    def simulate(self, attacked):
        """Full cascade trace for one attack (indices or a boolean mask)."""
        check_is_fitted(self)
        mask = check_attack(attacked, self.n_components_)
        return self.context_.cascade(mask)

    def predict(self, X):
        check_is_fitted(self)
        X = check_attack_matrix(X, self.n_components_)
        return np.array([self.context_.damage(row) for row in X])


class AttackCentrality(_GridModelMixin, TransformerMixin, BaseEstimator):
    """Per-component attack centrality.

    ``transform`` returns one value per component index; components already
    removed from the grid get NaN.
    """

    def __init__(self, scope=LOCAL, alpha=0.2, beta=0.2, gamma=0.3,
                 generator_voltage=1.0, consumer_current=1.0, include_self=False):
        self.scope = scope
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.generator_voltage = generator_voltage
        self.consumer_current = consumer_current
        self.include_self = include_self

    def fit(self, X, y=None):
        if self.scope not in SCOPES:
            raise ValidationError(f"scope must be one of {SCOPES}")
        self.context_ = self._context(X)
        self.psi_ = self.context_.centrality(self.scope).psi
        self.costs_ = self.context_.costs.cost
        return self

    def transform(self, X):
        check_is_fitted(self)
        if X is self.context_ or X is self.context_.grid:
            return np.array(self.psi_)
        return self.__class__(**self.get_params()).fit(X).psi_

    def ranking(self):
        """Component indices from most to least central (ties: cheaper, then lower index)."""
        check_is_fitted(self)
        return centrality_order(self.psi_, self.costs_)


class BaseAttack(_GridModelMixin, BaseEstimator):
    """Common ``fit`` for attackers: build the model, pick an attack, score it.

    Fitted attributes: ``budget_``, ``solution_`` (an AttackSolution),
    ``selected_`` (boolean mask), ``cascade_``, ``damage_``.
    """

    def fit(self, X, y=None):
        check_theta(self.theta)
        self.context_ = self._context(X)
        self.budget_ = self.context_.budget(self.theta)
        self.solution_ = self._search(self.context_, self.budget_)
        self.selected_ = np.array(self.solution_.selected)
        self.cascade_ = self.context_.cascade(self.selected_)
        if len(self.solution_) >= self.context_.grid.D:
            self.damage_ = float("nan")
        else:
            self.damage_ = self.cascade_.damage
        return self

    def predict(self, X=None):
        """The chosen attack as a boolean mask over components."""
        check_is_fitted(self)
        return np.array(self.selected_)

    def fit_predict(self, X, y=None):
        return self.fit(X).predict()

    def score(self, X=None, y=None):
        check_is_fitted(self)
        return self.damage_

    def _search(self, context, budget):
        raise NotImplementedError


class GreedyAttack(BaseAttack):
    """Rank components by attack centrality once, then fill the budget from the top.

    ``scope="local"`` gives LC-GHA, ``"global"`` GC-GHA. ``fill="stop"``
    ends the scan at the first unaffordable component instead of skipping it.
    """

    def __init__(self, theta=0.2, scope=LOCAL, fill=SKIP, alpha=0.2, beta=0.2,
                 gamma=0.3, generator_voltage=1.0, consumer_current=1.0,
                 include_self=False):
        self.theta = theta
        self.scope = scope
        self.fill = fill
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.generator_voltage = generator_voltage
        self.consumer_current = consumer_current
        self.include_self = include_self

    def _search(self, context, budget):
        if self.scope not in SCOPES:
            raise ValidationError(f"scope must be one of {SCOPES}")
        if self.fill not in (SKIP, STOP):
            raise ValidationError("fill must be 'skip' or 'stop'")
        self.centrality_ = context.centrality(self.scope).psi
        return greedy_attack(context.centrality(self.scope), context.costs,
                             budget, self.fill)


class RandomAttack(BaseAttack):
    """Random component order, budget filled greedily (RHA)."""

    def __init__(self, theta=0.2, random_state=None, alpha=0.2, beta=0.2,
                 gamma=0.3, generator_voltage=1.0, consumer_current=1.0):
        self.theta = theta
        self.random_state = random_state
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.generator_voltage = generator_voltage
        self.consumer_current = consumer_current

    def _search(self, context, budget):
        return random_attack(context.costs, budget,
                             check_random_state(self.random_state))


class PSOAttack(BaseAttack):
    """Particle swarm attack search (OHA, LC-OHA, GC-OHA).

    Extra fitted attributes: ``history_`` (best damage after each
    iteration), ``initial_damage_`` and ``n_cascades_`` (distinct attacks
    simulated).
    """

    def __init__(self, theta=0.2, variant=LC_OHA, n_particles=10, max_iter=200,
                 c1=2.0, c2=2.0, w_max=0.9, w_min=0.4, v_clamp=1.0,
                 per_dimension_random=True, random_state=None, alpha=0.2,
                 beta=0.2, gamma=0.3, generator_voltage=1.0, consumer_current=1.0,
                 include_self=False):
        self.theta = theta
        self.variant = variant
        self.n_particles = n_particles
        self.max_iter = max_iter
        self.c1 = c1
        self.c2 = c2
        self.w_max = w_max
        self.w_min = w_min
        self.v_clamp = v_clamp
        self.per_dimension_random = per_dimension_random
        self.random_state = random_state
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.generator_voltage = generator_voltage
        self.consumer_current = consumer_current
        self.include_self = include_self

    def pso_params(self) -> PsoParams:
        return PsoParams(self.n_particles, self.max_iter, self.c1, self.c2,
                         self.w_max, self.w_min, self.v_clamp,
                         self.per_dimension_random)

    def _search(self, context, budget):
        if self.variant not in VARIANT_SCOPE:
            raise ValidationError(f"variant must be one of {tuple(VARIANT_SCOPE)}")
        try:
            params = self.pso_params()
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        result = optimize(context, budget, self.variant, params,
                          check_random_state(self.random_state))
        self.history_ = result.history
        self.initial_damage_ = result.initial_fitness
        self.n_cascades_ = result.n_cascades
        return result.solution


ALGORITHMS = ("LC-GHA", "GC-GHA", "RHA", OHA, LC_OHA, GC_OHA)
PSO_VARIANTS = (OHA, LC_OHA, GC_OHA)


def make_attack(name: str, theta=0.2, random_state=None, pso: PsoParams = None,
                **model) -> BaseAttack:
    """Estimator for one of the named attack algorithms."""
    if name == "LC-GHA":
        return GreedyAttack(theta, scope=LOCAL, **model)
    if name == "GC-GHA":
        return GreedyAttack(theta, scope=GLOBAL, **model)
    if name == "RHA":
        model.pop("include_self", None)
        return RandomAttack(theta, random_state=random_state, **model)
    if name in PSO_VARIANTS:
        pso = pso or PsoParams()
        return PSOAttack(theta, variant=name, n_particles=pso.n, max_iter=pso.t_max,
                         c1=pso.c1, c2=pso.c2, w_max=pso.w_max, w_min=pso.w_min,
                         v_clamp=pso.v_clamp,
                         per_dimension_random=pso.per_dimension_random,
                         random_state=random_state, **model)
    raise ValidationError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
