import random

import pytest

from nodaltheta.arcs import (
    ArcInsideDivisor,
    ZArcNotFound,
    arc_contact,
    general_arc_contact,
    make_arc,
    make_general_arc,
    minimal_arc,
    minimal_arc_through_Z,
    parametrization_from_powers,
    sample_arcs_check,
    sample_parametrized_arcs_check,
)
from nodaltheta.errors import PreconditionError
from nodaltheta.localmodel import LocalModel
from nodaltheta.multiplicity import RingSpec
from nodaltheta.parsing import parse_series

from test_multiplicity import random_clean_element

XYZ = ("x", "y", "z")


def tser(text, truncation=16):
    return parse_series(text, ("t",), truncation)


def cusp_spec(truncation=16):
    return RingSpec(
        XYZ,
        (parse_series("y^2 - x^3", XYZ, truncation),),
        parse_series("x - z^3", XYZ, truncation),
    )


class TestMakeArc:
    def test_valid_arc(self):
        model = LocalModel(1, 1)
        arc = make_arc(
            model, {"u1": tser("0"), "v1": tser("t"), "w1": tser("0")}, 16
        )
        assert arc.truncation == 16

    def test_node_constraint(self):
        model = LocalModel(1, 0)
        with pytest.raises(PreconditionError) as info:
            make_arc(model, {"u1": tser("t"), "v1": tser("t")}, 16)
        assert info.value.name == "node-constraint"

    def test_nonzero_constant_rejected(self):
        model = LocalModel(1, 0)
        with pytest.raises(PreconditionError):
            make_arc(model, {"u1": tser("1+t"), "v1": tser("0")}, 16)

    def test_unknown_image_variable_rejected(self):
        model = LocalModel(1, 0)
        with pytest.raises(PreconditionError):
            make_arc(
                model, {"u1": tser("0"), "v1": tser("t"), "w1": tser("0")}, 16
            )

    def test_cusp_arc_satisfies_relation(self):
        arc = make_general_arc(
            cusp_spec(), {"x": tser("t^2"), "y": tser("t^3"), "z": tser("0")}, 16
        )
        assert arc.truncation == 16

    def test_relation_violation_rejected(self):
        with pytest.raises(PreconditionError) as info:
            make_general_arc(
                cusp_spec(), {"x": tser("t"), "y": tser("t"), "z": tser("0")}, 16
            )
        assert info.value.name == "relation-violated"

    def test_truncation_reduction_preserves_validity(self):
        model = LocalModel(1, 1)
        arc = make_arc(
            model, {"u1": tser("0"), "v1": tser("t + t^5"), "w1": tser("t^2")}, 16
        )
        shorter = arc.restricted(4)
        assert make_arc(model, shorter.images, 4).truncation == 4


class TestContact:
    def test_cusp_witness(self):
        spec = cusp_spec()
        arc = make_general_arc(
            spec, {"x": tser("t^2"), "y": tser("t^3"), "z": tser("0")}, 16
        )
        assert general_arc_contact(arc, spec.divisor) == 2

    def test_parabola_along_v_axis(self):
        model = LocalModel(1, 1)
        f = model.element("v1 - u1^2")
        arc = make_arc(model, {"u1": tser("0"), "v1": tser("t"), "w1": tser("0")}, 16)
        assert arc_contact(arc, f) == 1

    def test_arc_inside_divisor(self):
        model = LocalModel(1, 1)
        f = model.element("v1")
        arc = make_arc(model, {"u1": tser("t"), "v1": tser("0"), "w1": tser("0")}, 16)
        contact = arc_contact(arc, f)
        assert isinstance(contact, ArcInsideDivisor)
        assert contact.at_least == 17


class TestMinimalArc:
    def test_parabola_lands_on_v_branch(self):
        model = LocalModel(1, 1)
        found = minimal_arc(model.element("v1 - u1^2"), 16, seed=0)
        assert found.contact == 1
        assert found.branch == ("v",)
        assert found.arc.images["u1"].is_zero()

    def test_smooth_coordinate(self):
        model = LocalModel(1, 1)
        found = minimal_arc(model.element("w1"), 16, seed=0)
        assert found.contact == 1

    def test_branch_orders_two_and_three(self):
        model = LocalModel(1, 0)
        found = minimal_arc(model.element("u1^2 + v1^3"), 16, seed=0)
        assert found.contact == 2
        assert found.branch == ("u",)

    def test_contact_equals_order_on_random_divisors(self):
        rng = random.Random(31)
        for n, m in [(1, 0), (1, 1), (2, 1), (3, 0)]:
            model = LocalModel(n, m)
            for k in range(8):
                f = random_clean_element(rng, model, truncation=8)
                found = minimal_arc(f, 8, seed=k)
                assert found.contact == f.order()


class TestZArcs:
    def test_attained_when_restriction_keeps_order(self):
        model = LocalModel(1, 1)
        found = minimal_arc_through_Z(model.element("w1 + u1"), 16, seed=0)
        assert found.contact == 1
        assert found.arc.images["u1"].is_zero()
        assert found.arc.images["v1"].is_zero()

    def test_not_found_when_restriction_jumps(self):
        model = LocalModel(1, 1)
        result = minimal_arc_through_Z(model.element("u1 + w1^2"), 16, seed=0)
        assert isinstance(result, ZArcNotFound)
        assert result.best_contact == 2

    def test_smooth_equation(self):
        model = LocalModel(1, 1)
        found = minimal_arc_through_Z(model.element("w1"), 16, seed=0)
        assert found.contact == 1

    def test_no_smooth_directions_at_all(self):
        model = LocalModel(1, 0)
        result = minimal_arc_through_Z(model.element("u1 + v1"), 16, seed=0)
        assert isinstance(result, ZArcNotFound)
        assert result.best_contact > 16


class TestSampling:
    def test_parabola_bound_and_attainment(self):
        model = LocalModel(1, 1)
        report = sample_arcs_check(model.element("v1 - u1^2", 8), 100, 8, seed=0)
        assert report.min_contact == 1
        assert report.used + report.skipped_inside == 100

    def test_smooth_cube_equality(self):
        model = LocalModel(1, 1)
        report = sample_arcs_check(model.element("w1^3", 8), 100, 8, seed=0)
        assert report.min_contact == 3

    def test_lower_bound_on_random_divisors(self):
        rng = random.Random(32)
        for n, m in [(1, 1), (2, 0)]:
            model = LocalModel(n, m)
            for k in range(5):
                f = random_clean_element(rng, model, truncation=6)
                report = sample_arcs_check(f, 30, 6, seed=k)
                assert report.min_contact is None or report.min_contact >= f.order()

    def test_cusp_obstruction(self):
        # The transverse divisor on the cusp: order 1, yet no arc reaches
        # contact 1, and contact 2 is achieved.
        spec = cusp_spec(8)
        hook = parametrization_from_powers(
            spec, {"x": parse_series("s^2", ("s",), 8), "y": parse_series("s^3", ("s",), 8)}
        )
        report = sample_parametrized_arcs_check(
            spec, spec.divisor, hook, 1000, 8, seed=0
        )
        assert report.order == 1
        assert report.min_contact == 2
        assert report.used >= 900
