"""Posynomial algebra, condensation, log-space convexification and the GP solver."""
import math

import numpy as np
import pytest

from ehrelay.errors import DomainError, InfeasibleStartError
from ehrelay.gp import (
    OPTIMAL, GpProblem, Monomial, Posynomial, PosynomialProduct, ScaSettings, condense, evaluate,
    monomial_sum_square, run_sca, solve_convex, to_convex_form,
)

NAMES = ("z0", "z1", "z2")


def random_posynomial(rng, terms=None):
    terms = terms or int(rng.integers(1, 6))
    return Posynomial(tuple(
        Monomial(float(rng.uniform(0.1, 10.0)), {n: float(rng.uniform(-2.0, 2.0)) for n in NAMES})
        for _ in range(terms)
    ))


def random_point(rng):
    return {n: float(rng.uniform(0.1, 5.0)) for n in NAMES}


class TestEvaluate:

    def test_monomial(self):
        assert evaluate(Monomial(3.0, {"z1": 2}), {"z1": 2.0}) == 12.0

    def test_posynomial_at_identity_point(self):
        p = Monomial.var("z1") + Monomial(1.0, {"z1": -1})
        assert evaluate(p, {"z1": 1.0}) == 2.0

    def test_matches_naive_sum(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            p, z = random_posynomial(rng), random_point(rng)
            naive = sum(t.coeff * math.prod(z[n] ** a for n, a in t.exponents.items()) for t in p.terms)
            assert evaluate(p, z) == pytest.approx(naive, rel=1e-12)

    def test_missing_variable(self):
        with pytest.raises(DomainError):
            evaluate(Monomial.var("z1"), {"z2": 1.0})

    @pytest.mark.parametrize("value", [0.0, -1.0])
    def test_nonpositive_variable(self, value):
        with pytest.raises(DomainError):
            evaluate(Monomial.var("z1"), {"z1": value})

    def test_product_evaluates_factorwise(self):
        rng = np.random.default_rng(7)
        a, b, z = random_posynomial(rng), random_posynomial(rng), random_point(rng)
        product = PosynomialProduct((a, b))
        assert product.evaluate(z) == pytest.approx(a.evaluate(z) * b.evaluate(z), rel=1e-12)
        assert product.log_evaluate(z) == pytest.approx(math.log(a.evaluate(z) * b.evaluate(z)), rel=1e-12)

    def test_negative_coefficient_rejected(self):
        with pytest.raises(DomainError):
            Monomial(-1.0, {"z": 1})


class TestAlgebra:

    def test_of_merges_constants_and_drops_zeros(self):
        p = Posynomial.of([Monomial(1.0), Monomial(0.0, {"z": 1}), Monomial(2.0), Monomial.var("z")])
        assert len(p) == 2
        assert p.evaluate({"z": 3.0}) == 6.0

    def test_division_by_monomial(self):
        p = (Monomial.var("z") + 1.0) / Monomial.var("z")
        assert p.evaluate({"z": 2.0}) == pytest.approx(1.5)

    def test_sum_square_expansion(self):
        m = [Monomial.var("z1", 0.5), Monomial.var("z2", 0.5)]
        square = monomial_sum_square([2.0, 3.0], m)
        z = {"z1": 1.7, "z2": 0.3}
        assert square.evaluate(z) == pytest.approx((2 * math.sqrt(1.7) + 3 * math.sqrt(0.3)) ** 2, rel=1e-12)
        assert len(square) == 3

    def test_single_term_square_is_monomial(self):
        assert len(monomial_sum_square([2.0], [Monomial.var("z", 0.5)])) == 1


class TestCondense:

    def test_monomial_unchanged(self):
        m = Monomial(2.5, {"z0": 1.5, "z1": -0.5})
        c = condense(m, {"z0": 2.0, "z1": 3.0})
        assert c.coeff == pytest.approx(2.5, rel=1e-12)
        assert dict(c.exponents) == pytest.approx({"z0": 1.5, "z1": -0.5})

    def test_one_plus_z(self):
        c = condense(Monomial(1.0) + Monomial.var("z"), {"z": 1.0})
        assert c.coeff == pytest.approx(2.0)
        assert c.exponents["z"] == pytest.approx(0.5)
        assert c.evaluate({"z": 4.0}) == pytest.approx(4.0)

    def test_lower_bound_tight_at_expansion_point(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            g, z0, z = random_posynomial(rng), random_point(rng), random_point(rng)
            c = condense(g, z0)
            assert c.evaluate(z0) == pytest.approx(g.evaluate(z0), rel=1e-9)
            assert g.evaluate(z) >= c.evaluate(z) * (1 - 1e-12)

    def test_vanishing_term_is_dropped(self):
        g = Posynomial((Monomial(0.0, {"z": 2}), Monomial.var("z")))
        c = condense(g, {"z": 2.0})
        assert c.exponents["z"] == pytest.approx(1.0)

    def test_zero_posynomial_rejected(self):
        with pytest.raises(DomainError):
            condense(Posynomial((Monomial(0.0),)), {})


class TestConvexForm:

    def test_monomial_becomes_affine(self):
        cp = to_convex_form(GpProblem(Monomial(3.0, {"z0": 2.0, "z1": -1.0})))
        block = cp.objective[0]
        assert block.is_affine
        np.testing.assert_allclose(block.A, [[2.0, -1.0]])
        np.testing.assert_allclose(block.b, [math.log(3.0)])

    def test_values_round_trip(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            p = random_posynomial(rng)
            cons = random_posynomial(rng)
            cp = to_convex_form(GpProblem(p, [cons]))
            z = random_point(rng)
            t = cp.to_log(z)
            assert math.exp(cp.objective_value(t)) == pytest.approx(p.evaluate(z), rel=1e-12)
            assert math.exp(cp.constraint_values(t)[0]) == pytest.approx(cons.evaluate(z), rel=1e-12)
            assert cp.to_point(t) == pytest.approx(z, rel=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        h = 1e-6
        for _ in range(50):
            cp = to_convex_form(GpProblem(random_posynomial(rng, terms=4)))
            t = rng.uniform(-1.0, 1.0, cp.n)
            numeric = np.array([(cp.objective_value(t + h * e) - cp.objective_value(t - h * e)) / (2 * h)
                                for e in np.eye(cp.n)])
            np.testing.assert_allclose(cp.objective_gradient(t), numeric, rtol=1e-6, atol=1e-8)

    def test_constant_violation_recorded(self):
        cp = to_convex_form(GpProblem(Monomial.var("z"), [Posynomial((Monomial(2.0),))]))
        assert cp.constant_violations == ["c0"]
        assert cp.m == 0


class TestDump:

    def test_one_monomial_per_line(self):
        gp = GpProblem(
            Monomial(1.0, {"z": -1}),
            [Posynomial((Monomial(0.25, {"z": 1}), Monomial(0.5, {"y": 2, "z": -1})))],
            eq_constraints=[Monomial(2.0, {"y": 1})],
            bounds=[Monomial(1e-9, {"z": -1})],
            labels=["cap"],
        )
        assert gp.dump() == (
            "minimize\n"
            "  factor 0\n"
            "    1.0 z:-1.0\n"
            "subject to cap <= 1\n"
            "    0.25 z:1.0\n"
            "    0.5 y:2.0 z:-1.0\n"
            "equality e0 == 1\n"
            "    2.0 y:1.0\n"
            "bound <= 1\n"
            "    1e-09 z:-1.0\n"
        )

    def test_product_objective_lists_each_factor(self):
        gp = GpProblem(PosynomialProduct((Monomial.var("a"), Monomial.var("b"))))
        lines = gp.dump().splitlines()
        assert lines == ["minimize", "  factor 0", "    1.0 a:1.0", "  factor 1", "    1.0 b:1.0"]


class TestSolveConvex:

    def test_bound_active_optimum(self):
        gp = GpProblem(Monomial(1.0, {"z": -1}), [Posynomial((Monomial(0.25, {"z": 1}),))])
        sol = solve_convex(to_convex_form(gp), {"z": 1.0})
        assert sol.status == OPTIMAL
        assert sol.point["z"] == pytest.approx(4.0, rel=1e-6)
        assert sol.objective == pytest.approx(0.25, rel=1e-6)

    def test_unconstrained_stationary_point(self):
        gp = GpProblem(Monomial.var("z") + Monomial(1.0, {"z": -1}))
        sol = solve_convex(to_convex_form(gp), {"z": 3.0})
        assert sol.converged
        assert sol.point["z"] == pytest.approx(1.0, rel=1e-6)
        assert sol.objective == pytest.approx(2.0, rel=1e-6)

    def test_product_lower_bound(self):
        gp = GpProblem(Monomial(1.0, {"z1": 1, "z2": 1}), [Posynomial((Monomial(1.0, {"z1": -1, "z2": -1}),))])
        sol = solve_convex(to_convex_form(gp), {"z1": 2.0, "z2": 2.0})
        assert sol.feasible
        assert sol.objective == pytest.approx(1.0, rel=1e-6)

    def test_infeasible_problem(self):
        gp = GpProblem(Monomial.var("z"), [Posynomial((Monomial(2.0, {"z": 1}),)),
                                          Posynomial((Monomial(2.0, {"z": -1}),))])
        sol = solve_convex(to_convex_form(gp), {"z": 1.0})
        assert not sol.feasible


def _bound_problem(z):
    return GpProblem(Monomial(1.0, {"z": -1}), [Posynomial((Monomial(0.25, {"z": 1}),))])


class TestSca:

    def test_exact_gp_converges_after_one_step(self):
        result = run_sca(_bound_problem, ScaSettings(), initial_point={"z": 1.0})
        assert result.iterations == 1
        assert result.converged
        assert result.point["z"] == pytest.approx(4.0, rel=1e-6)

    def test_infinite_tolerance_returns_start(self):
        result = run_sca(_bound_problem, ScaSettings(tolerance=float("inf")), initial_point={"z": 1.5})
        assert result.point == {"z": 1.5}
        assert result.iterations == 0

    def test_infeasible_start_names_constraint(self):
        with pytest.raises(InfeasibleStartError) as info:
            run_sca(_bound_problem, ScaSettings(), initial_point={"z": 8.0})
        assert info.value.violation == "c0"

    def test_condensed_iterates_improve(self):
        def build(z_ref):
            return GpProblem(Monomial(1.0, {"z": -1}),
                             [Posynomial((Monomial(0.25), Monomial(0.25, {"z": 1})))])

        def build_condensed(z_ref):
            denominator = condense(Monomial(1.0) + Monomial.var("z"), z_ref)
            return GpProblem(Monomial(1.0) / denominator, [Posynomial((Monomial(0.25, {"z": 1}),))])

        for builder in (build, build_condensed):
            result = run_sca(builder, ScaSettings(tolerance=1e-9), initial_point={"z": 0.5})
            trace = result.objective_trace
            assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))
            assert result.iterations >= 1

    def test_settings_validation(self):
        with pytest.raises(DomainError):
            ScaSettings(tolerance=0.0)
