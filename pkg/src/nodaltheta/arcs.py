"""Test arcs on standard models and on explicitly parametrized rings.

An arc is a ring map into k[[t]]/(t^(N+1)) centered at the origin.  On a
standard model the node relations force one of u_i, v_i to map to zero at
each node.  The contact order of a divisor along an arc is the t-order of
the pulled-back equation; an arc lying inside the divisor (zero pull-back to
truncation) is a distinguished outcome, not an exception, since sampling
must be able to skip it while direct queries report it.

Arbitrary rings get arcs only through user parametrizations: there is no
general arc-lifting solver here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

from .errors import PreconditionError, VerificationError
from .localmodel import (
    BranchIndex,
    LocalModel,
    ModelElement,
    branch_orders,
    branch_project,
    branch_variables,
)
from .multiplicity import RingSpec
from .series import INFINITE, Order, PowerSeries

COEFF_BOX = range(-9, 10)


@dataclass(frozen=True)
class ArcInsideDivisor:
    """The pull-back vanishes modulo t^(N+1): contact is at least N+1."""

    at_least: int


Contact = Union[int, ArcInsideDivisor]


@dataclass(frozen=True)
class Arc:
    model: LocalModel
    images: Mapping[str, PowerSeries]
    truncation: int

    def restricted(self, truncation: int) -> "Arc":
        if truncation > self.truncation:
            raise PreconditionError("truncation", "cannot extend an arc")
        images = {v: s.truncate(truncation) for v, s in self.images.items()}
        return Arc(self.model, images, truncation)


@dataclass(frozen=True)
class GeneralArc:
    spec: RingSpec
    images: Mapping[str, PowerSeries]
    truncation: int


def _validate_images(variables, images, truncation) -> Dict[str, PowerSeries]:
    unknown = set(images) - set(variables)
    if unknown:
        raise PreconditionError("arc", f"images for unknown variables {sorted(unknown)}")
    clean = {}
    for name in variables:
        if name not in images:
            raise PreconditionError("arc", f"missing image for variable {name!r}")
        image = images[name]
        if not image.is_univariate():
            raise PreconditionError("arc", f"image of {name!r} is not univariate")
        if image.constant_term() != 0:
            raise PreconditionError(
                "arc", f"image of {name!r} has a nonzero constant term"
            )
        if image.truncation < truncation:
            raise PreconditionError(
                "arc",
                f"image of {name!r} known only to degree {image.truncation} < {truncation}",
            )
        clean[name] = image.truncate(truncation)
    return clean


def make_arc(
    model: LocalModel, images: Mapping[str, PowerSeries], truncation: int
) -> Arc:
    """Validate arc data on a standard model.

    k[[t]] is a domain, so u_i(t) * v_i(t) = 0 forces one factor to vanish
    at every node.
    """
    clean = _validate_images(model.variables, images, truncation)
    for u, v in model.node_pairs():
        if not clean[u].is_zero() and not clean[v].is_zero():
            raise PreconditionError(
                "node-constraint",
                f"both {u} and {v} have nonzero images; their product must be 0",
            )
    return Arc(model, clean, truncation)


def make_general_arc(
    spec: RingSpec, images: Mapping[str, PowerSeries], truncation: int
) -> GeneralArc:
    """Validate arc data on an arbitrary ring: every relation must pull back to 0."""
    clean = _validate_images(spec.variables, images, truncation)
    for relation in spec.relations:
        pulled = relation.substitute(clean, truncation)
        if not pulled.is_zero():
            raise PreconditionError(
                "relation-violated",
                f"relation {relation} does not vanish along the arc",
            )
    return GeneralArc(spec, clean, truncation)


def arc_contact(arc: Arc, element: ModelElement) -> Contact:
    """t-order of the divisor equation pulled back along the arc."""
    if element.model != arc.model:
        raise PreconditionError("model-mismatch", "arc and element live on different models")
    if element.is_zero():
        raise PreconditionError("zero-series", "divisor equation is zero")
    pulled = element.series.substitute(arc.images, arc.truncation)
    order = pulled.order()
    if order is INFINITE:
        return ArcInsideDivisor(at_least=pulled.truncation + 1)
    return order


def general_arc_contact(arc: GeneralArc, divisor: PowerSeries) -> Contact:
    if divisor.is_zero():
        raise PreconditionError("zero-series", "divisor equation is zero")
    pulled = divisor.substitute(arc.images, arc.truncation)
    order = pulled.order()
    if order is INFINITE:
        return ArcInsideDivisor(at_least=pulled.truncation + 1)
    return order


@dataclass(frozen=True)
class MinimalArc:
    arc: Arc
    branch: BranchIndex
    contact: int


@dataclass(frozen=True)
class ZArcNotFound:
    """No arc through the locally trivial locus reaches the order of f."""

    best_contact: Order


def _evaluate(series: PowerSeries, point: Dict[str, Fraction]) -> Fraction:
    total = Fraction(0)
    for exponent, coefficient in series.coefficients.items():
        term = coefficient
        for name, e in zip(series.variables, exponent):
            if e:
                term *= point[name] ** e
        total += term
    return total


def _generic_linear_arc(
    form_series: PowerSeries,
    directions: Tuple[str, ...],
    rng: random.Random,
    budget: int = 400,
) -> Optional[Dict[str, Fraction]]:
    """Direction a with leading form nonvanishing at a; None if budget runs out.

    Over an infinite field a generic direction works, so failures indicate a
    degenerate input rather than bad luck.
    """
    leading = form_series.leading_form().form
    for _ in range(budget):
        point = {name: Fraction(rng.randint(-9, 9)) for name in directions}
        if _evaluate(leading, point) != 0:
            return point
    return None


def _linear_arc_images(
    model: LocalModel, branch: BranchIndex, point: Dict[str, Fraction], truncation: int
) -> Dict[str, PowerSeries]:
    images = {}
    for name in model.variables:
        value = point.get(name, Fraction(0))
        images[name] = PowerSeries.univariate({1: value}, truncation)
    return images


def minimal_arc(element: ModelElement, truncation: int, seed: int) -> MinimalArc:
    """An arc whose contact equals the order of vanishing.

    Selects a branch of minimal order and takes a generic linear arc on it:
    coordinates map to a_j * t with the branch leading form nonvanishing at
    the direction vector, so the contact is exactly the order.
    """
    order = element.order()
    if order is INFINITE:
        raise PreconditionError("zero-series", "element is zero to truncation")
    if order == 0:
        raise PreconditionError("unit", "element does not vanish at the origin")
    if truncation < order:
        raise PreconditionError(
            "truncation", f"arc truncation {truncation} below order {order}"
        )
    rng = random.Random(seed)
    best = min(branch_orders(element), key=lambda b: (b.order, b.branch))
    assert best.order == order
    branch = best.branch
    projected = branch_project(element, branch)
    direction = _generic_linear_arc(projected, branch_variables(element.model, branch), rng)
    if direction is None:
        raise PreconditionError(
            "arc-search",
            "no direction found with nonvanishing leading form; "
            "truncation too small or element vanishes on the branch",
        )
    arc = make_arc(
        element.model, _linear_arc_images(element.model, branch, direction, truncation),
        truncation,
    )
    contact = arc_contact(arc, element)
    if contact != order:
        raise VerificationError(
            f"minimal arc contact {contact} differs from order {order}"
        )
    return MinimalArc(arc=arc, branch=branch, contact=contact)


def minimal_arc_through_Z(
    element: ModelElement, truncation: int, seed: int
) -> Union[MinimalArc, ZArcNotFound]:
    """Minimal-contact arc constrained to the locally trivial locus.

    Arcs through Z send every u_i and v_i to zero, so the best achievable
    contact is the order of the restriction of f to Z.  If that restriction
    has higher order than f itself, no such arc attains ord(f) and the best
    contact is reported instead.
    """
    order = element.order()
    if order is INFINITE:
        raise PreconditionError("zero-series", "element is zero to truncation")
    if order == 0:
        raise PreconditionError("unit", "element does not vanish at the origin")
    model = element.model
    node_vars = [name for pair in model.node_pairs() for name in pair]
    restricted = element.series.zero_out(node_vars)
    z_order = restricted.order()
    if z_order is INFINITE or z_order > order:
        return ZArcNotFound(best_contact=z_order)
    rng = random.Random(seed)
    direction = _generic_linear_arc(restricted, model.smooth_variables(), rng)
    if direction is None:
        raise PreconditionError("arc-search", "no generic direction on Z found")
    images = {name: PowerSeries.univariate({}, truncation) for name in node_vars}
    for name in model.smooth_variables():
        images[name] = PowerSeries.univariate({1: direction[name]}, truncation)
    arc = make_arc(model, images, truncation)
    contact = arc_contact(arc, element)
    if contact != order:
        raise VerificationError(
            f"Z-arc contact {contact} differs from order {order}"
        )
    return MinimalArc(arc=arc, branch=(), contact=contact)


def _random_polynomial(rng: random.Random, truncation: int) -> PowerSeries:
    coefficients = {
        d: rng.choice(COEFF_BOX) for d in range(1, truncation + 1)
    }
    return PowerSeries.univariate(coefficients, truncation)


def random_arc(model: LocalModel, truncation: int, rng: random.Random) -> Arc:
    """A random valid arc: one side of each node vanishes, the rest is free."""
    images = {}
    for u, v in model.node_pairs():
        zero_side, free_side = (u, v) if rng.random() < 0.5 else (v, u)
        images[zero_side] = PowerSeries.univariate({}, truncation)
        images[free_side] = _random_polynomial(rng, truncation)
    for name in model.smooth_variables():
        images[name] = _random_polynomial(rng, truncation)
    return Arc(model, images, truncation)


@dataclass(frozen=True)
class ArcSampleReport:
    requested: int
    used: int
    skipped_inside: int
    min_contact: Optional[int]
    order: int
    seed: int


def sample_arcs_check(
    element: ModelElement, count: int, truncation: int, seed: int
) -> ArcSampleReport:
    """Draw random arcs and check contact >= ord(f) on every one.

    Arcs inside the divisor (to truncation) are skipped.  A contact below
    the order would contradict the lower bound and raises loudly.
    """
    order = element.order()
    if order is INFINITE:
        raise PreconditionError("zero-series", "element is zero to truncation")
    if order == 0:
        raise PreconditionError("unit", "element does not vanish at the origin")
    rng = random.Random(seed)
    used = 0
    skipped = 0
    minimum: Optional[int] = None
    for _ in range(count):
        arc = random_arc(element.model, truncation, rng)
        contact = arc_contact(arc, element)
        if isinstance(contact, ArcInsideDivisor):
            skipped += 1
            continue
        used += 1
        if contact < order:
            raise VerificationError(
                f"sampled arc has contact {contact} < order {order}"
            )
        if minimum is None or contact < minimum:
            minimum = contact
    return ArcSampleReport(
        requested=count,
        used=used,
        skipped_inside=skipped,
        min_contact=minimum,
        order=order,
        seed=seed,
    )


Parametrization = Callable[[random.Random, int], Dict[str, PowerSeries]]


def parametrization_from_powers(
    spec: RingSpec, powers: Mapping[str, PowerSeries]
) -> Parametrization:
    """Build a sampling hook from expressions in one auxiliary series s.

    Listed variables map to their expression evaluated at a random s with
    zero constant term; unlisted variables are drawn freely.  With the
    cuspidal pattern x = s^2, y = s^3 every draw satisfies y^2 = x^3.
    """
    for name in powers:
        if name not in spec.variables:
            raise PreconditionError("parametrize", f"unknown variable {name!r}")

    def draw(rng: random.Random, truncation: int) -> Dict[str, PowerSeries]:
        s = _random_polynomial(rng, truncation)
        images = {}
        for name in spec.variables:
            expr = powers.get(name)
            if expr is None:
                images[name] = _random_polynomial(rng, truncation)
            else:
                images[name] = expr.substitute({"s": s}, truncation)
        return images

    return draw


def sample_parametrized_arcs_check(
    spec: RingSpec,
    divisor: PowerSeries,
    parametrization: Parametrization,
    count: int,
    truncation: int,
    seed: int,
) -> ArcSampleReport:
    """Sampling check on an arbitrary ring through a parametrization hook."""
    order = divisor.order()
    if order is INFINITE:
        raise PreconditionError("zero-series", "divisor equation is zero")
    rng = random.Random(seed)
    used = 0
    skipped = 0
    minimum: Optional[int] = None
    for _ in range(count):
        images = parametrization(rng, truncation)
        arc = make_general_arc(spec, images, truncation)
        contact = general_arc_contact(arc, divisor)
        if isinstance(contact, ArcInsideDivisor):
            skipped += 1
            continue
        used += 1
        if contact < order:
            raise VerificationError(
                f"sampled arc has contact {contact} < order {order}"
            )
        if minimum is None or contact < minimum:
            minimum = contact
    return ArcSampleReport(
        requested=count,
        used=used,
        skipped_inside=skipped,
        min_contact=minimum,
        order=order,
        seed=seed,
    )
