# ehrelay/gp/convex.py
"""Log-space form of a geometric program.

With ``t = log z`` every posynomial ``sum_k d_k z^{a_k}`` becomes the convex
function ``log sum_k exp(a_k . t + log d_k)`` and every monomial equality becomes
the affine equation ``a . t = -log d``.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping

import numpy as np
from scipy.special import logsumexp, softmax

from .posynomial import Posynomial
from .problem import GpProblem

logger = logging.getLogger(__name__)


@dataclass
class LogSumExp:
    """``f(t) = log sum_k exp(A[k] . t + b[k])``."""
    A: np.ndarray
    b: np.ndarray

    @classmethod
    def from_posynomial(cls, p: Posynomial, index: Mapping[str, int]) -> 'LogSumExp':
        terms = [t for t in p.terms if t.coeff > 0]
        A = np.zeros((len(terms), len(index)))
        b = np.empty(len(terms))
        for k, term in enumerate(terms):
            b[k] = math.log(term.coeff)
            for name, power in term.exponents.items():
                A[k, index[name]] += power
        return cls(A, b)

    @property
    def is_affine(self) -> bool:
        return self.A.shape[0] == 1

    def value(self, t: np.ndarray) -> float:
        return float(logsumexp(self.A @ t + self.b))

    def gradient(self, t: np.ndarray) -> np.ndarray:
        return self.A.T @ softmax(self.A @ t + self.b)

    def hessian(self, t: np.ndarray) -> np.ndarray:
        if self.is_affine:
            return np.zeros((self.A.shape[1], self.A.shape[1]))
        p = softmax(self.A @ t + self.b)
        Ap = self.A.T @ p
        return (self.A.T * p) @ self.A - np.outer(Ap, Ap)


@dataclass
class ConvexProblem:
    """Convexified GP over ``t = log z``.

    The objective is the sum of ``objective`` blocks (one per factor of a product
    objective); ``constraints[i](t) <= 0`` and ``A_eq t == b_eq``. Constraints whose
    value does not depend on any variable are evaluated once and listed in
    ``constant_violations`` when they fail.
    """
    variables: List[str]
    objective: List[LogSumExp]
    objective_offset: float
    constraints: List[LogSumExp]
    labels: List[str]
    A_eq: np.ndarray
    b_eq: np.ndarray
    constant_violations: List[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return len(self.constraints)

    def objective_value(self, t: np.ndarray) -> float:
        return self.objective_offset + math.fsum(block.value(t) for block in self.objective)

    def objective_gradient(self, t: np.ndarray) -> np.ndarray:
        grad = np.zeros(self.n)
        for block in self.objective:
            grad += block.gradient(t)
        return grad

    def objective_hessian(self, t: np.ndarray) -> np.ndarray:
        hess = np.zeros((self.n, self.n))
        for block in self.objective:
            hess += block.hessian(t)
        return hess

    def constraint_values(self, t: np.ndarray) -> np.ndarray:
        return np.array([c.value(t) for c in self.constraints])

    def constraint_jacobian(self, t: np.ndarray) -> np.ndarray:
        if not self.constraints:
            return np.zeros((0, self.n))
        return np.vstack([c.gradient(t) for c in self.constraints])

    def to_log(self, z: Mapping[str, float], default: float = 1.0) -> np.ndarray:
        return np.log(np.array([z.get(name, default) for name in self.variables], dtype=float))

    def to_point(self, t: np.ndarray) -> Dict[str, float]:
        return {name: float(v) for name, v in zip(self.variables, np.exp(t))}


def _constant_value(p: Posynomial) -> float:
    return math.fsum(t.coeff for t in p.terms)


def to_convex_form(gp: GpProblem) -> ConvexProblem:
    """Convexify ``gp`` by the change of variables ``t = log z``.

    Zero-coefficient terms are dropped, constant inequality constraints are checked
    and removed, variable bounds join the inequality constraints.
    """
    variables = gp.variables
    index = {name: i for i, name in enumerate(variables)}

    objective, offset = [], 0.0
    for factor in gp.objective_factors():
        if factor.is_constant:
            value = _constant_value(factor)
            offset += math.log(value) if value > 0 else float('-inf')
        else:
            objective.append(LogSumExp.from_posynomial(factor, index))

    constraints, labels, constant_violations = [], [], []
    named = list(zip(gp.labels, gp.ineq_constraints))
    named += [(f"bound[{','.join(m.variables)}]", Posynomial((m,))) for m in gp.bounds]
    for label, c in named:
        if all(t.coeff == 0 for t in c.terms):
            continue
        if c.is_constant:
            if _constant_value(c) > 1.0 + 1e-12:
                constant_violations.append(label)
            continue
        constraints.append(LogSumExp.from_posynomial(c, index))
        labels.append(label)

    A_eq = np.zeros((len(gp.eq_constraints), len(variables)))
    b_eq = np.zeros(len(gp.eq_constraints))
    for k, m in enumerate(gp.eq_constraints):
        if m.coeff <= 0:
            constant_violations.append(f"e{k}")
            continue
        for name, power in m.exponents.items():
            A_eq[k, index[name]] += power
        b_eq[k] = -math.log(m.coeff)

    if constant_violations:
        logger.debug("constant constraints violated: %s", constant_violations)
    return ConvexProblem(variables, objective, offset, constraints, labels, A_eq, b_eq, constant_violations)
