"""
Domain-specific language for building ILP models.
Provides a fluent API for creating IlpModel instances in tests and examples.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ModelValidationError
from .model import IlpModel, LinearConstraint, Relation


class ModelBuilder:
    """Fluent API for building 0-1 ILP models"""

    def __init__(self):
        self._name = "model"
        self._var_names: List[str] = []
        self._costs: List[float] = []
        self._eq: List[LinearConstraint] = []
        self._ineq: List[LinearConstraint] = []

    def reset(self) -> 'ModelBuilder':
        """Reset the builder state.

        Example usage: builder.var("x", 1).reset().var("y", 2)
        """
        self.__init__()
        return self

    def named(self, name: str) -> 'ModelBuilder':
        """Set the model name.

        Example usage: ilp().named("knapsack").var("x", 1)
        """
        self._name = name
        return self

    def var(self, name: str, cost: float = 0.0) -> 'ModelBuilder':
        """Declare a binary variable with its objective coefficient.

        DSL usage: .var("x1", -3)   # min ... - 3 x1
        """
        if name in self._var_names:
            raise ModelValidationError(f"variable '{name}' declared twice")
        self._var_names.append(name)
        self._costs.append(float(cost))
        return self

    def vars(self, prefix: str, costs: Sequence[float]) -> 'ModelBuilder':
        """Declare prefix1..prefixN with the given costs.

        DSL usage: .vars("x", [1, -2, 3])   # x1, x2, x3
        """
        for k, cost in enumerate(costs, start=1):
            self.var(f"{prefix}{k}", cost)
        return self

    def _row(self, terms: Dict[str, float], relation: Relation, rhs: float,
             name: Optional[str]) -> LinearConstraint:
        unknown = [v for v in terms if v not in self._var_names]
        if unknown:
            raise ModelValidationError(f"constraint refers to undeclared variables: {unknown}")
        index = {v: j for j, v in enumerate(self._var_names)}
        if name is None:
            name = f"c{len(self._eq) + len(self._ineq) + 1}"
        return LinearConstraint(tuple((index[v], float(a)) for v, a in terms.items()), relation, rhs, name)

    def le(self, terms: Dict[str, float], rhs: float, name: Optional[str] = None) -> 'ModelBuilder':
        """Add sum(terms) <= rhs.

        DSL usage: .le({"x1": 1, "x2": 1}, 1)
        """
        self._ineq.append(self._row(terms, Relation.LE, rhs, name))
        return self

    def ge(self, terms: Dict[str, float], rhs: float, name: Optional[str] = None) -> 'ModelBuilder':
        """Add sum(terms) >= rhs."""
        self._ineq.append(self._row(terms, Relation.GE, rhs, name))
        return self

    def eq(self, terms: Dict[str, float], rhs: float, name: Optional[str] = None) -> 'ModelBuilder':
        """Add sum(terms) == rhs."""
        self._eq.append(self._row(terms, Relation.EQ, rhs, name))
        return self

    def build(self) -> IlpModel:
        """Return the built model.

        Example usage: model = ilp().vars("x", [1, 1]).le({"x1": 1, "x2": 1}, 1).build()
        """
        return IlpModel(tuple(self._var_names), tuple(self._costs), tuple(self._eq), tuple(self._ineq), name=self._name)


def random_instance(n: int, m: int, seed: int, feasible: bool = True,
                    eq_fraction: float = 0.2, density: float = 0.5,
                    coef_range: int = 5, cost_range: int = 10) -> IlpModel:
    """Seeded random 0-1 ILP with mixed EQ/LE/GE rows and integer data.

    With feasible=True every row is built around a planted binary point, so
    the instance has at least one feasible assignment.
    """
    rng = np.random.default_rng(seed)
    planted = rng.integers(0, 2, size=n)
    costs = rng.integers(-cost_range, cost_range + 1, size=n)
    builder = ilp().named(f"random-n{n}-m{m}-s{seed}").vars("x", costs.tolist())

    for i in range(m):
        support = np.flatnonzero(rng.random(n) < density)
        if support.size == 0:
            support = np.array([rng.integers(0, n)])
        coefs = rng.integers(-coef_range, coef_range + 1, size=support.size)
        coefs[coefs == 0] = 1
        terms = {f"x{j + 1}": int(a) for j, a in zip(support, coefs)}
        activity = int(np.dot(coefs, planted[support]))
        if not feasible:
            activity += int(rng.integers(-coef_range, coef_range + 1))

        draw = rng.random()
        if draw < eq_fraction:
            builder.eq(terms, activity, name=f"r{i + 1}")
        elif draw < (1.0 + eq_fraction) / 2.0:
            builder.le(terms, activity + int(rng.integers(0, 3)), name=f"r{i + 1}")
        else:
            builder.ge(terms, activity - int(rng.integers(0, 3)), name=f"r{i + 1}")
    return builder.build()


def planted_point(n: int, seed: int) -> Tuple[int, ...]:
    """The binary point random_instance(n, ..., seed, feasible=True) is built around"""
    rng = np.random.default_rng(seed)
    return tuple(int(v) for v in rng.integers(0, 2, size=n))


# Convenience function for quick model creation
def ilp() -> ModelBuilder:
    """Create a new model builder"""
    return ModelBuilder()
