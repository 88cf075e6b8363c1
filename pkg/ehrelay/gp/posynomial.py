# ehrelay/gp/posynomial.py
"""Monomial and posynomial function objects over named positive variables."""
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

from ..errors import DomainError

Assignment = Mapping[str, float]
Number = Union[int, float]


def _value(z: Assignment, name: str) -> float:
    try:
        v = z[name]
    except KeyError:
        raise DomainError(f"variable {name!r} is not assigned") from None
    if not v > 0:
        raise DomainError(f"variable {name!r} must be strictly positive, got {v}")
    return float(v)


@dataclass(frozen=True, eq=False)
class Monomial:
    """``coeff * prod_i z_i ** exponents[i]`` with ``coeff >= 0``."""
    coeff: float
    exponents: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        coeff = float(self.coeff)
        if not coeff >= 0 or math.isinf(coeff):
            raise DomainError(f"monomial coefficient must be finite and nonnegative, got {self.coeff}")
        exps = {str(k): float(v) for k, v in dict(self.exponents).items() if v != 0}
        object.__setattr__(self, 'coeff', coeff)
        object.__setattr__(self, 'exponents', MappingProxyType(exps))

    @classmethod
    def var(cls, name: str, power: float = 1.0, coeff: float = 1.0) -> 'Monomial':
        return cls(coeff, {name: power})

    @property
    def is_constant(self) -> bool:
        return not self.exponents

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(self.exponents)

    def evaluate(self, z: Assignment) -> float:
        out = self.coeff
        for name, power in self.exponents.items():
            out *= _value(z, name) ** power
        return out

    def __call__(self, z: Assignment) -> float:
        return self.evaluate(z)

    def __mul__(self, other):
        if isinstance(other, Monomial):
            exps = dict(self.exponents)
            for name, power in other.exponents.items():
                exps[name] = exps.get(name, 0.0) + power
            return Monomial(self.coeff * other.coeff, exps)
        if isinstance(other, Posynomial):
            return other * self
        return Monomial(self.coeff * float(other), self.exponents)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Monomial):
            return self * other ** -1
        return Monomial(self.coeff / float(other), self.exponents)

    def __rtruediv__(self, other):
        return float(other) * self ** -1

    def __pow__(self, power: Number) -> 'Monomial':
        if self.coeff == 0 and power < 0:
            raise DomainError("cannot raise a zero monomial to a negative power")
        return Monomial(self.coeff ** power, {k: v * power for k, v in self.exponents.items()})

    def __add__(self, other):
        return Posynomial([self]) + other

    __radd__ = __add__

    def __repr__(self):
        inner = ", ".join(f"{k}^{v:g}" for k, v in sorted(self.exponents.items()))
        return f"Monomial({self.coeff:g}{', ' if inner else ''}{inner})"


@dataclass(frozen=True, eq=False)
class Posynomial:
    """Nonempty sum of monomials."""
    terms: Tuple[Monomial, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise DomainError("a posynomial needs at least one term")
        if not all(isinstance(t, Monomial) for t in terms):
            raise DomainError("posynomial terms must be monomials")
        object.__setattr__(self, 'terms', terms)

    @classmethod
    def of(cls, terms: Iterable[Monomial]) -> 'Posynomial':
        """Build from ``terms`` after dropping zero coefficients and merging constants.

        Returns a zero constant posynomial when every term vanishes.
        """
        kept = []
        constant = 0.0
        for t in terms:
            if t.coeff == 0:
                continue
            if t.is_constant:
                constant += t.coeff
            else:
                kept.append(t)
        if constant > 0 or not kept:
            kept.insert(0, Monomial(constant))
        return cls(tuple(kept))

    @property
    def variables(self) -> Tuple[str, ...]:
        seen: Dict[str, None] = {}
        for t in self.terms:
            for name in t.exponents:
                seen.setdefault(name)
        return tuple(seen)

    @property
    def is_constant(self) -> bool:
        return all(t.is_constant for t in self.terms)

    def __len__(self):
        return len(self.terms)

    def evaluate(self, z: Assignment) -> float:
        return math.fsum(t.evaluate(z) for t in self.terms)

    def __call__(self, z: Assignment) -> float:
        return self.evaluate(z)

    def __add__(self, other):
        if isinstance(other, Posynomial):
            return Posynomial(self.terms + other.terms)
        if isinstance(other, Monomial):
            return Posynomial(self.terms + (other,))
        return Posynomial(self.terms + (Monomial(float(other)),))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, Posynomial):
            return Posynomial(tuple(a * b for a in self.terms for b in other.terms))
        return Posynomial(tuple(t * other for t in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Posynomial):
            raise DomainError("division by a posynomial is not a posynomial; condense the denominator first")
        return Posynomial(tuple(t / other for t in self.terms))

    def __repr__(self):
        return " + ".join(repr(t) for t in self.terms)


@dataclass(frozen=True, eq=False)
class PosynomialProduct:
    """Product of posynomials, kept factored so it never expands combinatorially."""
    factors: Tuple[Posynomial, ...]

    def __post_init__(self):
        factors = tuple(f if isinstance(f, Posynomial) else Posynomial((f,)) for f in self.factors)
        if not factors:
            factors = (Posynomial((Monomial(1.0),)),)
        object.__setattr__(self, 'factors', factors)

    @property
    def variables(self) -> Tuple[str, ...]:
        seen: Dict[str, None] = {}
        for f in self.factors:
            for name in f.variables:
                seen.setdefault(name)
        return tuple(seen)

    def evaluate(self, z: Assignment) -> float:
        return math.prod(f.evaluate(z) for f in self.factors)

    def log_evaluate(self, z: Assignment) -> float:
        return math.fsum(math.log(f.evaluate(z)) for f in self.factors)

    def __call__(self, z: Assignment) -> float:
        return self.evaluate(z)


Expression = Union[Monomial, Posynomial, PosynomialProduct]


def as_posynomial(expr: Union[Monomial, Posynomial]) -> Posynomial:
    return expr if isinstance(expr, Posynomial) else Posynomial((expr,))


def evaluate(p: Expression, z: Assignment) -> float:
    """Value of a monomial, posynomial or product at the positive assignment ``z``.

    Raises:
        DomainError: a variable of ``p`` is missing from ``z`` or not strictly positive.
    """
    return p.evaluate(z)


def condense(g: Union[Monomial, Posynomial], z0: Assignment) -> Monomial:
    """Arithmetic-geometric mean monomial lower bound of ``g``, tight at ``z0``.

    The term weights are the shares of each monomial in ``g(z0)``; terms that vanish
    at ``z0`` get weight zero and drop out.
    """
    g = as_posynomial(g)
    values = [t.evaluate(z0) for t in g.terms]
    total = math.fsum(values)
    if not total > 0:
        raise DomainError(f"cannot condense a posynomial whose value at the expansion point is {total}")

    log_coeff = 0.0
    exps: Dict[str, float] = {}
    for term, value in zip(g.terms, values):
        if value <= 0:
            continue
        weight = value / total
        log_coeff += weight * (math.log(term.coeff) - math.log(weight))
        for name, power in term.exponents.items():
            exps[name] = exps.get(name, 0.0) + weight * power
    return Monomial(math.exp(log_coeff), exps)


def monomial_sum_square(coeffs: Sequence[float], monomials: Sequence[Monomial]) -> Posynomial:
    """Expand ``(sum_k c_k m_k) ** 2`` into its squared and cross terms."""
    pairs = [(c, m) for c, m in zip(coeffs, monomials) if c > 0 and m.coeff > 0]
    terms = []
    for i, (ci, mi) in enumerate(pairs):
        terms.append(mi * mi * (ci * ci))
        for cj, mj in pairs[i + 1:]:
            terms.append(mi * mj * (2.0 * ci * cj))
    return Posynomial.of(terms)
