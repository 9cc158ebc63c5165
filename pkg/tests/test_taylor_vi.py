import numpy as np
import pytest

from genvi import (
    PhaseState,
    QuadratureRule,
    build_lagrangian_tvi,
    build_left_hamiltonian_tvi,
    build_right_hamiltonian_tvi,
    cubic_oscillator,
    euler_a,
    euler_b,
    gauss_legendre,
    h_tvi_trapezoid,
    newton_solve,
    rectangle_end,
    rectangle_initial,
    step_map,
    stormer_verlet,
    trapezoid,
)
from genvi.taylor_vi import explicit_euler, taylor_expansion

from conftest import random_states


def map_distance(f, g, states, h):
    return max(
        float(np.max(np.abs(f(s, h).as_array() - g(s, h).as_array()))) for s in states
    )


# hand-coded update formulas from the initial-point and end-point method tables

def table_map(system, rule, kind):
    minv = system.mass_inv
    grad = system.grad_potential

    def rect_initial_type1(s, h):
        # symplectic Euler-A
        p1 = s.p - h * grad(s.q)
        return PhaseState(s.q + h * (minv @ p1), p1)

    def rect_initial_type3(s, h):
        p1 = newton_solve(lambda p: p - s.p + h * grad(s.q + h * (minv @ p) - h * (minv @ s.p)), s.p)
        return PhaseState(s.q + h * (minv @ p1), p1)

    def rect_end_type1(s, h):
        # symplectic Euler-B
        q1 = s.q + h * (minv @ s.p)
        return PhaseState(q1, s.p - h * grad(q1))

    def rect_end_type2(s, h):
        # implicit kick through the drifted position; q update uses p0, which
        # makes this differ from Euler-B at O(h^2)
        p1 = newton_solve(lambda p: p - s.p + h * grad(s.q + h * (minv @ p)), s.p)
        return PhaseState(s.q + h * (minv @ s.p), p1)

    def trapezoid_type1(s, h):
        # Stormer-Verlet
        p_half = s.p - 0.5 * h * grad(s.q)
        q1 = s.q + h * (minv @ p_half)
        return PhaseState(q1, p_half - 0.5 * h * grad(q1))

    def trapezoid_type2(s, h):
        q1 = s.q + h * (minv @ s.p) - 0.5 * h * h * (minv @ grad(s.q))
        p1 = newton_solve(
            lambda p: p - s.p + 0.5 * h * (grad(s.q) + grad(s.q + h * (minv @ p))), s.p)
        return PhaseState(q1, p1)

    table = {
        ("rect_initial", "type1"): rect_initial_type1,
        ("rect_initial", "type2"): rect_initial_type1,  # same as Type I
        ("rect_initial", "type3"): rect_initial_type3,
        ("rect_end", "type1"): rect_end_type1,
        ("rect_end", "type2"): rect_end_type2,
        ("rect_end", "type3"): rect_end_type1,  # same as Type I
        ("trapezoid", "type1"): trapezoid_type1,
        ("trapezoid", "type2"): trapezoid_type2,
    }
    return table[(rule, kind)]


class TestQuadratureRules:
    @pytest.mark.parametrize("rule", [rectangle_initial(), rectangle_end(), trapezoid(),
                                      gauss_legendre(1), gauss_legendre(2), gauss_legendre(4)])
    def test_exact_on_stated_degrees(self, rule):
        for k in range(rule.order):
            exact = 1.0 / (k + 1)
            assert abs(rule.integrate(lambda t: t ** k) - exact) <= 1e-13

    def test_rectangle_rules_are_first_order_only(self):
        # both rectangle rules miss the linear monomial
        assert abs(rectangle_initial().integrate(lambda t: t) - 0.5) == 0.5
        assert abs(rectangle_end().integrate(lambda t: t) - 0.5) == 0.5

    def test_gauss_points_count(self):
        rule = gauss_legendre(4)
        assert len(rule.nodes) == 4
        assert rule.order == 8

    def test_invalid_rules_rejected(self):
        with pytest.raises(ValueError):
            QuadratureRule((0.5, 0.4), (0.0, 1.0), order=2)
        with pytest.raises(ValueError):
            QuadratureRule((1.0,), (1.5,), order=1)
        with pytest.raises(ValueError):
            gauss_legendre(0)


class TestTaylorExpansion:
    def test_zero_time_is_identity(self, cubic):
        q = np.array([0.7])
        v = np.array([-0.3])
        for order in (0, 1):
            exp = taylor_expansion(cubic, order)
            q1, v1 = exp.flow((q, v), 0.0)
            assert np.array_equal(q1, q)
            assert np.array_equal(v1, v)

    def test_order0_is_free_drift(self, cubic):
        exp = taylor_expansion(cubic, 0)
        q1, v1 = exp.flow((np.array([1.0]), np.array([0.5])), 0.2)
        assert q1[0] == pytest.approx(1.1, abs=1e-15)
        assert v1[0] == pytest.approx(0.5, abs=1e-15)

    def test_order1_adds_acceleration(self, cubic):
        q = np.array([1.0])
        v = np.array([0.0])
        a = -(cubic.mass_inv @ cubic.grad_potential(q))[0]
        exp = taylor_expansion(cubic, 1)
        q1, v1 = exp.flow((q, v), 0.2)
        assert q1[0] == pytest.approx(1.0 + 0.5 * 0.04 * a, abs=1e-15)
        assert v1[0] == pytest.approx(0.2 * a, abs=1e-15)

    def test_unsupported_order_rejected(self, cubic):
        with pytest.raises(ValueError):
            taylor_expansion(cubic, 2)


BUILDERS = {
    "type1": build_lagrangian_tvi,
    "type2": build_right_hamiltonian_tvi,
    "type3": build_left_hamiltonian_tvi,
}
RULES = {"rect_initial": rectangle_initial, "rect_end": rectangle_end, "trapezoid": trapezoid}


class TestBuilderTableEquivalence:
    @pytest.mark.parametrize("rule,kind", [
        ("rect_initial", "type1"),
        ("rect_initial", "type2"),
        ("rect_initial", "type3"),
        ("rect_end", "type1"),
        ("rect_end", "type2"),
        ("rect_end", "type3"),
        ("trapezoid", "type1"),
        ("trapezoid", "type2"),
    ])
    def test_built_map_matches_table(self, cubic, rule, kind):
        built = step_map(BUILDERS[kind](cubic, RULES[rule](), 0))
        ref = table_map(cubic, rule, kind)
        states = random_states(101, 10)
        for h in (0.05, 0.1):
            assert map_distance(built, ref, states, h) <= 1e-10

    def test_same_as_type1_pattern(self, cubic):
        # initial point: Type II collapses onto Type I, Type III does not;
        # end point: the roles swap
        states = random_states(103, 10)
        t1_init = step_map(build_lagrangian_tvi(cubic, rectangle_initial(), 0))
        t2_init = step_map(build_right_hamiltonian_tvi(cubic, rectangle_initial(), 0))
        t3_init = step_map(build_left_hamiltonian_tvi(cubic, rectangle_initial(), 0))
        assert map_distance(t2_init, t1_init, states, 0.1) <= 1e-10
        assert map_distance(t3_init, t1_init, states, 0.1) >= 1e-6

        t1_end = step_map(build_lagrangian_tvi(cubic, rectangle_end(), 0))
        t2_end = step_map(build_right_hamiltonian_tvi(cubic, rectangle_end(), 0))
        t3_end = step_map(build_left_hamiltonian_tvi(cubic, rectangle_end(), 0))
        assert map_distance(t3_end, t1_end, states, 0.1) <= 1e-10
        assert map_distance(t2_end, t1_end, states, 0.1) >= 1e-6

    def test_trapezoid_type1_is_stormer_verlet(self, cubic):
        built = step_map(build_lagrangian_tvi(cubic, trapezoid(), 0))
        assert map_distance(built, stormer_verlet(cubic), random_states(107, 10), 0.1) <= 1e-10

    def test_trapezoid_type2_is_not_stormer_verlet(self, cubic):
        built = step_map(build_right_hamiltonian_tvi(cubic, trapezoid(), 0))
        assert map_distance(built, stormer_verlet(cubic), random_states(109, 10), 0.1) > 1e-6

    def test_unsupported_taylor_order_rejected(self, cubic):
        for builder in BUILDERS.values():
            with pytest.raises(ValueError):
                builder(cubic, rectangle_initial(), 2)

    @pytest.mark.parametrize("kind", ["type1", "type2", "type3"])
    def test_first_order_expansion_supported(self, ho, kind):
        # r = 1 with the trapezoid rule: one step stays within the local
        # O(h^3) error of the exact flow
        built = step_map(BUILDERS[kind](ho, trapezoid(), 1))
        out = built(PhaseState(1.0, 0.0), 0.1)
        assert out.q[0] == pytest.approx(np.cos(0.1), abs=1e-3)
        assert out.p[0] == pytest.approx(-np.sin(0.1), abs=1e-3)


class TestCannedMethods:
    def test_euler_a_hand_value(self, ho):
        out = euler_a(ho)(PhaseState(1.0, 0.0), 0.1)
        assert out.q[0] == pytest.approx(0.99, abs=1e-15)
        assert out.p[0] == pytest.approx(-0.1, abs=1e-15)

    def test_euler_b_hand_value(self, ho):
        out = euler_b(ho)(PhaseState(1.0, 0.0), 0.1)
        assert out.q[0] == pytest.approx(1.0, abs=1e-15)
        assert out.p[0] == pytest.approx(-0.1, abs=1e-15)

    def test_stormer_verlet_hand_value(self, ho):
        out = stormer_verlet(ho)(PhaseState(1.0, 0.0), 0.1)
        assert out.q[0] == pytest.approx(0.995, abs=1e-15)
        assert out.p[0] == pytest.approx(-0.09975, abs=1e-15)

    def test_h_tvi_trapezoid_matches_builder(self, cubic):
        built = step_map(build_right_hamiltonian_tvi(cubic, trapezoid(), 0))
        assert map_distance(h_tvi_trapezoid(cubic), built, random_states(113, 10), 0.1) <= 1e-9

    def test_explicit_euler_grows_energy(self, ho):
        # control method: |z1| = sqrt(1 + h^2) |z0| on the oscillator
        out = explicit_euler(ho)(PhaseState(1.0, 0.0), 0.1)
        assert out.q[0] == pytest.approx(1.0, abs=1e-15)
        assert out.p[0] == pytest.approx(-0.1, abs=1e-15)
