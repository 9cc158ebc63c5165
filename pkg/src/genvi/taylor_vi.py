"""Variational integrators built from Taylor expansions and quadrature.

The construction has four ingredients: pick a quadrature rule (b_i, c_i) on
[0, 1], pick a Taylor order r, approximate the trajectory at the quadrature
nodes with the Taylor flow, and assemble the generating function from the
boundary term plus the weighted node sum.  The resulting method has order
min(r + 1, s) where s is the quadrature order.

Conventions for the Taylor flow with parameter r: the configuration is
expanded to order r + 1 and the velocity (or momentum) to order r, so that
the r = 0 flow is (q, v) -> (q + t v, v).  For a Type II function the flow
runs forward from (q0, ptilde0) where ptilde0 solves the momentum expansion
against p1; for Type III it runs backward from (q1, ptilde1) solved against
p0.  With -h in place of h the two constructions exchange roles, which is
what makes the adjoint identities in genfunc line up.

The module also ships the classic low-order methods in closed form
(symplectic Euler A/B, Stormer-Verlet, the trapezoidal Type II method) so the
built generating functions have something independent to be checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import rootfind
from .core import PhaseState, SeparableSystem
from .genfunc import (
    DiscreteLagrangian,
    DiscreteLeftHamiltonian,
    DiscreteRightHamiltonian,
    OneStepMap,
)
from .rootfind import SolveSettings

__all__ = [
    "QuadratureRule",
    "rectangle_initial",
    "rectangle_end",
    "trapezoid",
    "gauss_legendre",
    "TaylorExpansion",
    "taylor_expansion",
    "build_lagrangian_tvi",
    "build_right_hamiltonian_tvi",
    "build_left_hamiltonian_tvi",
    "euler_a",
    "euler_b",
    "stormer_verlet",
    "h_tvi_trapezoid",
    "explicit_euler",
    "euler_a_right_hamiltonian",
    "euler_b_left_hamiltonian",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Weights and nodes on [0, 1]; order s means exact on degree <= s - 1."""

    weights: tuple
    nodes: tuple
    order: int
    label: str = ""

    def __post_init__(self):
        if len(self.weights) != len(self.nodes):
            raise ValueError("weights and nodes must have equal length")
        if any(c < 0.0 or c > 1.0 for c in self.nodes):
            raise ValueError("nodes must lie in [0, 1]")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    def integrate(self, f: Callable[[float], float]) -> float:
        """Apply the rule to f on [0, 1]."""
        return sum(b * f(c) for b, c in zip(self.weights, self.nodes))


def rectangle_initial() -> QuadratureRule:
    return QuadratureRule((1.0,), (0.0,), order=1, label="rectangle-initial")


def rectangle_end() -> QuadratureRule:
    return QuadratureRule((1.0,), (1.0,), order=1, label="rectangle-end")


def trapezoid() -> QuadratureRule:
    return QuadratureRule((0.5, 0.5), (0.0, 1.0), order=2, label="trapezoid")


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped to [0, 1], order 2n."""
    if n < 1:
        raise ValueError("need n >= 1 nodes")
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(
        weights=tuple(0.5 * w),
        nodes=tuple(0.5 * (x + 1.0)),
        order=2 * n,
        label=f"gauss-{n}",
    )


@dataclass(frozen=True)
class TaylorExpansion:
    """Truncated free/forced flow on (q, v) pairs.

    order r expands the configuration to degree r + 1 in t and the velocity
    to degree r; flow((q, v), 0) is the identity.
    """

    order: int
    flow: Callable


def taylor_expansion(system: SeparableSystem, order: int) -> TaylorExpansion:
    if order == 0:
        def flow(qv, t):
            q, v = qv
            return q + t * v, v
    elif order == 1:
        def flow(qv, t):
            q, v = qv
            a = -(system.mass_inv @ system.grad_potential(q))
            return q + t * v + 0.5 * t * t * a, v + t * a
    else:
        raise ValueError(f"unsupported Taylor order {order!r} (expected 0 or 1)")
    return TaylorExpansion(order=order, flow=flow)


def _lagrangian(system: SeparableSystem, q: np.ndarray, v: np.ndarray) -> float:
    return 0.5 * float(v @ (system.mass @ v)) - float(system.potential(q))


def _check_order(order: int):
    if order not in (0, 1):
        raise ValueError(f"unsupported Taylor order {order!r} (expected 0 or 1)")


def _solve_initial_velocity(system, expansion, q0, q1, h, settings):
    """v0 with configuration expansion from (q0, v0) hitting q1 at time h."""
    if expansion.order == 0:
        return (q1 - q0) / h

    def residual(v0):
        return expansion.flow((q0, v0), h)[0] - q1

    return rootfind.newton_solve(residual, (q1 - q0) / h, settings)


def build_lagrangian_tvi(
    system: SeparableSystem,
    rule: QuadratureRule,
    order: int,
    settings: Optional[SolveSettings] = None,
) -> DiscreteLagrangian:
    """Discrete Lagrangian L_d(q0, q1; h) = h sum_i b_i L(flow((q0, v0), c_i h)).

    For order 0 the partials are assembled in closed form; order 1 falls back
    to finite differences of the value.
    """
    _check_order(order)
    expansion = taylor_expansion(system, order)
    b, c = rule.weights, rule.nodes

    def value(q0, q1, h):
        v0 = _solve_initial_velocity(system, expansion, q0, q1, h, settings)
        return h * sum(
            bi * _lagrangian(system, *expansion.flow((q0, v0), ci * h))
            for bi, ci in zip(b, c)
        )

    label = f"tvi-L[{rule.label},r={order}]"
    if order == 1:
        return DiscreteLagrangian(value=value, label=label)

    def node_forces(q0, q1, h):
        v0 = (q1 - q0) / h
        return v0, [system.grad_potential(q0 + (ci * h) * v0) for ci in c]

    def d1(q0, q1, h):
        v0, forces = node_forces(q0, q1, h)
        acc = -(system.mass @ v0)
        for bi, ci, g in zip(b, c, forces):
            acc = acc - h * bi * (1.0 - ci) * g
        return acc

    def d2(q0, q1, h):
        v0, forces = node_forces(q0, q1, h)
        acc = system.mass @ v0
        for bi, ci, g in zip(b, c, forces):
            acc = acc - h * bi * ci * g
        return acc

    return DiscreteLagrangian(value=value, d1=d1, d2=d2, label=label)


def build_right_hamiltonian_tvi(
    system: SeparableSystem,
    rule: QuadratureRule,
    order: int,
    settings: Optional[SolveSettings] = None,
) -> DiscreteRightHamiltonian:
    """H_d^+(q0, p1; h) from a forward expansion anchored at q0.

    ptilde0 solves the momentum expansion against p1; the value is
    p1 . qtilde1 - h sum_i b_i (P_i M^-1 P_i - H(Q_i, P_i)).
    """
    _check_order(order)
    b, c = rule.weights, rule.nodes
    minv = system.mass_inv

    def solve_p0(q0, p1, h):
        if order == 0:
            return p1

        def residual(pt0):
            return pt0 - h * system.grad_potential(q0) - p1

        return rootfind.newton_solve(residual, p1, settings)

    def nodes_and_boundary(q0, p1, h):
        pt0 = solve_p0(q0, p1, h)
        v0 = minv @ pt0
        if order == 0:
            qs = [q0 + (ci * h) * v0 for ci in c]
            ps = [pt0 for _ in c]
            q_end = q0 + h * v0
        else:
            g0 = system.grad_potential(q0)
            a0 = -(minv @ g0)
            qs = [q0 + (ci * h) * v0 + 0.5 * (ci * h) ** 2 * a0 for ci in c]
            ps = [pt0 - (ci * h) * g0 for ci in c]
            q_end = q0 + h * v0 + 0.5 * h * h * a0
        return qs, ps, q_end

    def value(q0, p1, h):
        qs, ps, q_end = nodes_and_boundary(q0, p1, h)
        acc = float(p1 @ q_end)
        for bi, qi, pi in zip(b, qs, ps):
            kinetic = float(pi @ (minv @ pi))
            ham = 0.5 * kinetic + float(system.potential(qi))
            acc -= h * bi * (kinetic - ham)
        return acc

    label = f"tvi-H+[{rule.label},r={order}]"
    if order == 1:
        return DiscreteRightHamiltonian(value=value, label=label)

    def d1(q0, p1, h):
        qs, _, _ = nodes_and_boundary(q0, p1, h)
        acc = p1.astype(float).copy()
        for bi, qi in zip(b, qs):
            acc = acc + h * bi * system.grad_potential(qi)
        return acc

    def d2(q0, p1, h):
        qs, _, q_end = nodes_and_boundary(q0, p1, h)
        acc = q_end.astype(float).copy()
        for bi, ci, qi in zip(b, c, qs):
            acc = acc + h * h * bi * ci * (minv @ system.grad_potential(qi))
        return acc

    return DiscreteRightHamiltonian(value=value, d1=d1, d2=d2, label=label)


def build_left_hamiltonian_tvi(
    system: SeparableSystem,
    rule: QuadratureRule,
    order: int,
    settings: Optional[SolveSettings] = None,
) -> DiscreteLeftHamiltonian:
    """H_d^-(p0, q1; h) from a backward expansion anchored at q1.

    Mirrors the Type II construction under time reflection: ptilde1 solves
    the momentum expansion against p0, the boundary term is -p0 . qtilde0.
    """
    _check_order(order)
    b, c = rule.weights, rule.nodes
    minv = system.mass_inv

    def solve_p1(p0, q1, h):
        if order == 0:
            return p0

        def residual(pt1):
            return pt1 + h * system.grad_potential(q1) - p0

        return rootfind.newton_solve(residual, p0, settings)

    def nodes_and_boundary(p0, q1, h):
        pt1 = solve_p1(p0, q1, h)
        v1 = minv @ pt1
        if order == 0:
            qs = [q1 - ((1.0 - ci) * h) * v1 for ci in c]
            ps = [pt1 for _ in c]
            q_start = q1 - h * v1
        else:
            g1 = system.grad_potential(q1)
            a1 = -(minv @ g1)
            qs = [
                q1 - ((1.0 - ci) * h) * v1 + 0.5 * ((1.0 - ci) * h) ** 2 * a1
                for ci in c
            ]
            ps = [pt1 + ((1.0 - ci) * h) * g1 for ci in c]
            q_start = q1 - h * v1 + 0.5 * h * h * a1
        return qs, ps, q_start

    def value(p0, q1, h):
        qs, ps, q_start = nodes_and_boundary(p0, q1, h)
        acc = -float(p0 @ q_start)
        for bi, qi, pi in zip(b, qs, ps):
            kinetic = float(pi @ (minv @ pi))
            ham = 0.5 * kinetic + float(system.potential(qi))
            acc -= h * bi * (kinetic - ham)
        return acc

    label = f"tvi-H-[{rule.label},r={order}]"
    if order == 1:
        return DiscreteLeftHamiltonian(value=value, label=label)

    def d1(p0, q1, h):
        qs, _, q_start = nodes_and_boundary(p0, q1, h)
        acc = -q_start.astype(float)
        for bi, ci, qi in zip(b, c, qs):
            acc = acc - h * h * bi * (1.0 - ci) * (minv @ system.grad_potential(qi))
        return acc

    def d2(p0, q1, h):
        qs, _, _ = nodes_and_boundary(p0, q1, h)
        acc = -p0.astype(float)
        for bi, qi in zip(b, qs):
            acc = acc + h * bi * system.grad_potential(qi)
        return acc

    return DiscreteLeftHamiltonian(value=value, d1=d1, d2=d2, label=label)


# -- closed-form methods -----------------------------------------------------

def euler_a(system: SeparableSystem) -> OneStepMap:
    """Symplectic Euler A: kick then drift."""

    def step(state, h):
        p1 = state.p - h * system.grad_potential(state.q)
        q1 = state.q + h * (system.mass_inv @ p1)
        return PhaseState(q1, p1)

    return OneStepMap(step, label="euler-a")


def euler_b(system: SeparableSystem) -> OneStepMap:
    """Symplectic Euler B: drift then kick."""

    def step(state, h):
        q1 = state.q + h * (system.mass_inv @ state.p)
        p1 = state.p - h * system.grad_potential(q1)
        return PhaseState(q1, p1)

    return OneStepMap(step, label="euler-b")


def stormer_verlet(system: SeparableSystem) -> OneStepMap:
    """Stormer-Verlet in its position-explicit one-step form."""

    def step(state, h):
        g0 = system.grad_potential(state.q)
        q1 = state.q + h * (system.mass_inv @ state.p) - 0.5 * h * h * (system.mass_inv @ g0)
        p1 = state.p - 0.5 * h * (g0 + system.grad_potential(q1))
        return PhaseState(q1, p1)

    return OneStepMap(step, label="stormer-verlet")


def h_tvi_trapezoid(system: SeparableSystem, settings: Optional[SolveSettings] = None) -> OneStepMap:
    """Trapezoidal Type II method.

    q1 = q0 + h M^-1 p0 - (h^2/2) M^-1 grad V(q0)
    p1 = p0 - (h/2) [grad V(q0) + grad V(q0 + h M^-1 p1)]

    Second order but not symmetric, and not the same map as Stormer-Verlet:
    the second force sits at q0 + h M^-1 p1 rather than at q1.
    """

    def step(state, h):
        q0, p0 = state.q, state.p
        g0 = system.grad_potential(q0)

        def residual(p1):
            qx = q0 + h * (system.mass_inv @ p1)
            return p1 - p0 + 0.5 * h * (g0 + system.grad_potential(qx))

        p1 = rootfind.newton_solve(residual, p0 - h * g0, settings)
        q1 = q0 + h * (system.mass_inv @ p0) - 0.5 * h * h * (system.mass_inv @ g0)
        return PhaseState(q1, p1)

    return OneStepMap(step, label="h-tvi-trapezoid")


def explicit_euler(system: SeparableSystem) -> OneStepMap:
    """Explicit Euler.  Not symplectic; kept as a negative control."""

    def step(state, h):
        q1 = state.q + h * (system.mass_inv @ state.p)
        p1 = state.p - h * system.grad_potential(state.q)
        return PhaseState(q1, p1)

    return OneStepMap(step, label="explicit-euler")


def euler_a_right_hamiltonian(system: SeparableSystem) -> DiscreteRightHamiltonian:
    """H_d^+(q0, p1; h) = p1 . q0 + h H(q0, p1); generates symplectic Euler A."""

    def ham(q, p):
        return 0.5 * float(p @ (system.mass_inv @ p)) + float(system.potential(q))

    return DiscreteRightHamiltonian(
        value=lambda q0, p1, h: float(p1 @ q0) + h * ham(q0, p1),
        d1=lambda q0, p1, h: p1 + h * system.grad_potential(q0),
        d2=lambda q0, p1, h: q0 + h * (system.mass_inv @ p1),
        label="euler-a-H+",
    )


def euler_b_left_hamiltonian(system: SeparableSystem) -> DiscreteLeftHamiltonian:
    """H_d^-(p0, q1; h) = -p0 . q1 + h H(q1, p0); generates symplectic Euler B."""

    def ham(q, p):
        return 0.5 * float(p @ (system.mass_inv @ p)) + float(system.potential(q))

    return DiscreteLeftHamiltonian(
        value=lambda p0, q1, h: -float(p0 @ q1) + h * ham(q1, p0),
        d1=lambda p0, q1, h: -q1 + h * (system.mass_inv @ p0),
        d2=lambda p0, q1, h: -p0 + h * system.grad_potential(q1),
        label="euler-b-H-",
    )
