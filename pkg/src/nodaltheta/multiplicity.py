"""Multiplicity and order-of-vanishing computations.

Two independent routes are provided and cross-checked in the tests:

* the branch-sum on standard nodal models, where the multiplicity of a
  divisor is the sum of the orders of its 2^n branch projections, and
* a brute-force Hilbert-Samuel oracle for arbitrary power-series quotients,
  which reads the dimension and the normalized leading coefficient off the
  finite differences of H(t) = dim_k O / (ideal + m^(t+1)).

The closed form for the standard model itself is 2^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Tuple

from .errors import PreconditionError
from .linalg import rank_sparse
from .localmodel import BranchOrder, LocalModel, ModelElement, branch_orders
from .series import INFINITE, Order, PowerSeries


@dataclass(frozen=True)
class RingSpec:
    """A quotient of a power series ring, with an optional divisor equation."""

    variables: Tuple[str, ...]
    relations: Tuple[PowerSeries, ...] = ()
    divisor: Optional[PowerSeries] = None

    def __post_init__(self):
        for g in self.generators():
            if g.variables != self.variables:
                raise PreconditionError(
                    "variable-mismatch",
                    f"generator over {g.variables}, spec has {self.variables}",
                )
            if g.is_zero():
                raise PreconditionError("zero-series", "zero ideal generator")
            if g.constant_term() != 0:
                raise PreconditionError(
                    "unit-ideal", "ideal generator has a nonzero constant term"
                )

    def generators(self) -> Tuple[PowerSeries, ...]:
        if self.divisor is not None:
            return self.relations + (self.divisor,)
        return self.relations


def model_ringspec(model: LocalModel, divisor: Optional[PowerSeries] = None) -> RingSpec:
    """Present a standard model (plus optional divisor) to the oracle."""
    variables = model.variables
    truncation = divisor.truncation if divisor is not None else 16
    relations = []
    for u, v in model.node_pairs():
        exponent = tuple(1 if name in (u, v) else 0 for name in variables)
        relations.append(PowerSeries(variables, {exponent: 1}, truncation))
    return RingSpec(variables, tuple(relations), divisor)


def ord_at_origin(element: ModelElement) -> Order:
    """Order of vanishing at the closed point: the order of the normal form."""
    return element.series.order()


@dataclass(frozen=True)
class BranchSum:
    total: int
    per_branch: Tuple[BranchOrder, ...]


def mult_divisor_branchsum(element: ModelElement) -> BranchSum:
    """Multiplicity of the divisor as the sum of its branch orders.

    Each branch of the normalization is a power series ring, where the
    multiplicity of a divisor equals its order; the total is the sum over
    all 2^n branches.  Rejected when the divisor contains a branch or does
    not pass through the origin.
    """
    if element.is_zero():
        raise PreconditionError("zero-series", "divisor equation is zero")
    if element.series.constant_term() != 0:
        raise PreconditionError("unit", "divisor equation does not vanish at the origin")
    orders = branch_orders(element)
    if any(b.vanishing for b in orders):
        raise PreconditionError(
            "divisor-contains-branch",
            "divisor vanishes identically on a branch (to truncation); "
            "multiplicity is undefined",
        )
    return BranchSum(sum(b.order for b in orders), orders)


def mult_model(model: LocalModel) -> int:
    """Multiplicity of the standard model at the origin: 2^n."""
    return 2 ** model.n


@dataclass
class HilbertSamuelTable:
    values: List[int]
    differences: List[List[int]]
    dimension: Optional[int]
    multiplicity: Optional[int]
    stabilized: bool
    t_max: int = field(default=0)


def _monomials_up_to(nvars: int, degree: int) -> List[Tuple[int, ...]]:
    if nvars == 0:
        return [()]
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            exponent = [0] * nvars
            for i in combo:
                exponent[i] += 1
            out.append(tuple(exponent))
    return out


def _count_monomials(nvars: int, degree: int) -> int:
    total = 1
    count = 1
    for d in range(1, degree + 1):
        count = count * (d + nvars - 1) // d
        total += count
    return total


def _stable_tail(row: List[int]) -> Optional[int]:
    """Value of a row whose last >= 3 entries agree, else None."""
    if len(row) < 3:
        return None
    tail = row[-1]
    run = 0
    for value in reversed(row):
        if value == tail:
            run += 1
        else:
            break
    return tail if run >= 3 else None


def hilbert_samuel(spec: RingSpec, t_max: int = 10) -> HilbertSamuelTable:
    """Brute-force Hilbert-Samuel function of the quotient ring.

    H(t) is the number of monomials of total degree <= t minus the rank over
    Q of the span of all products (monomial) * (ideal generator) truncated at
    degree t; coefficients beyond degree t are irrelevant modulo m^(t+1).
    The dimension is the smallest d whose d-th finite differences stabilize
    to a nonzero constant (at least 3 consecutive agreements), and the
    multiplicity is that constant.
    """
    if t_max < 3:
        raise PreconditionError("t-max", "t_max must be at least 3")
    generators = spec.generators()
    for g in generators:
        if g.truncation < t_max:
            raise PreconditionError(
                "insufficient-truncation",
                f"generator known only to degree {g.truncation} < t_max {t_max}",
            )
    nvars = len(spec.variables)

    column: Dict[Tuple[int, ...], int] = {}

    def column_of(exponent: Tuple[int, ...]) -> int:
        index = column.get(exponent)
        if index is None:
            index = len(column)
            column[exponent] = index
        return index

    # Every spanning row, tagged with the smallest t at which it is active
    # and with per-entry degrees so truncation at each t is a filter.
    tagged_rows = []
    for g in generators:
        order = g.order()
        for mono in _monomials_up_to(nvars, t_max - order):
            mono_degree = sum(mono)
            entries = []
            for exponent, coefficient in g.coefficients.items():
                product = tuple(a + b for a, b in zip(mono, exponent))
                degree = mono_degree + sum(exponent)
                if degree <= t_max:
                    entries.append((degree, column_of(product), coefficient))
            tagged_rows.append((mono_degree + order, entries))

    values = []
    for t in range(t_max + 1):
        rows = []
        for active_at, entries in tagged_rows:
            if active_at > t:
                continue
            row = {col: c for degree, col, c in entries if degree <= t}
            if row:
                rows.append(row)
        values.append(_count_monomials(nvars, t) - rank_sparse(rows))

    differences = [values]
    while len(differences[-1]) > 1:
        prev = differences[-1]
        differences.append([b - a for a, b in zip(prev, prev[1:])])

    dimension = None
    multiplicity = None
    for d, row in enumerate(differences):
        tail = _stable_tail(row)
        if tail is not None and tail != 0:
            dimension = d
            multiplicity = tail
            break
        if tail == 0:
            break
    return HilbertSamuelTable(
        values=values,
        differences=differences[1:],
        dimension=dimension,
        multiplicity=multiplicity,
        stabilized=dimension is not None,
        t_max=t_max,
    )


@dataclass(frozen=True)
class InequalityReport:
    mult_divisor: int
    mult_model: int
    ord_divisor: int
    holds: bool
    equality: bool


def check_eqnmat(element: ModelElement) -> InequalityReport:
    """Check mult(D) >= mult(V) * ord(D) on a standard model.

    The inequality always holds; the equality flag records whether the
    divisor achieves the smooth-case bound.
    """
    branch = mult_divisor_branchsum(element)
    ambient = mult_model(element.model)
    order = ord_at_origin(element)
    assert order is not INFINITE
    return InequalityReport(
        mult_divisor=branch.total,
        mult_model=ambient,
        ord_divisor=order,
        holds=branch.total >= ambient * order,
        equality=branch.total == ambient * order,
    )
