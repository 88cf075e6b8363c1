from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from ..errors import DomainError
from .posynomial import Assignment, Monomial, Posynomial, PosynomialProduct, as_posynomial

Objective = Union[Monomial, Posynomial, PosynomialProduct]


@dataclass
class GpProblem:
    """Geometric program in standard form.

    minimize ``objective`` subject to ``c(z) <= 1`` for every ``ineq_constraints``
    entry, ``m(z) == 1`` for every ``eq_constraints`` entry, and the monomial
    ``bounds`` (``m(z) <= 1``, typically variable floors).

    ``labels`` names the inequality constraints in the same order; missing labels are
    generated.
    """
    objective: Objective
    ineq_constraints: List[Posynomial] = field(default_factory=list)
    eq_constraints: List[Monomial] = field(default_factory=list)
    bounds: List[Monomial] = field(default_factory=list)
    labels: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.ineq_constraints = [as_posynomial(c) for c in self.ineq_constraints]
        if len(self.labels) > len(self.ineq_constraints):
            raise DomainError("more labels than inequality constraints")
        self.labels = list(self.labels) + [f"c{k}" for k in range(len(self.labels), len(self.ineq_constraints))]

    @property
    def variables(self) -> List[str]:
        names = set(self.objective.variables)
        for c in self.ineq_constraints:
            names.update(c.variables)
        for m in list(self.eq_constraints) + list(self.bounds):
            names.update(m.variables)
        return sorted(names)

    def objective_factors(self) -> List[Posynomial]:
        if isinstance(self.objective, PosynomialProduct):
            return list(self.objective.factors)
        return [as_posynomial(self.objective)]

    def max_violation(self, z: Assignment) -> Dict[str, float]:
        """Largest ``c(z) - 1`` over the inequality constraints and its label."""
        worst, label = float('-inf'), None
        for name, c in zip(self.labels, self.ineq_constraints):
            v = c.evaluate(z) - 1.0
            if v > worst:
                worst, label = v, name
        return {'label': label, 'excess': worst}

    def first_violated(self, z: Assignment, tol: float = 1e-9) -> Optional[str]:
        for name, c in zip(self.labels, self.ineq_constraints):
            if c.evaluate(z) > 1.0 + tol:
                return name
        return None

    def dump(self) -> str:
        """Text form: one monomial per line as ``coeff var:exp var:exp``."""
        lines = ["minimize"]
        for k, factor in enumerate(self.objective_factors()):
            lines.append(f"  factor {k}")
            lines.extend("    " + _format_monomial(t) for t in factor.terms)
        for name, c in zip(self.labels, self.ineq_constraints):
            lines.append(f"subject to {name} <= 1")
            lines.extend("    " + _format_monomial(t) for t in c.terms)
        for k, m in enumerate(self.eq_constraints):
            lines.append(f"equality e{k} == 1")
            lines.append("    " + _format_monomial(m))
        for m in self.bounds:
            lines.append("bound <= 1")
            lines.append("    " + _format_monomial(m))
        return "\n".join(lines) + "\n"


def _format_monomial(m: Monomial) -> str:
    parts = [repr(m.coeff)]
    parts.extend(f"{name}:{power!r}" for name, power in sorted(m.exponents.items()))
    return " ".join(parts)
