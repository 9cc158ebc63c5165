"""Averaging integrators for H = H_A + eps V_B with an oscillator H_A.

The solvable part is fixed to the unit one-dimensional oscillator
H_A = (p^2 + q^2)/2, whose boundary-value flows have closed forms:

    q_A(t) = c1 cos t + c2 sin t,
    (q0, q1) data:  c1 = q0,  c2 = (q1 - q0 cos h) / sin h,
    (q0, p1) data:  c1 = q0,  c2 = (p1 + q0 sin h) / cos h.

The exact discrete Lagrangian / right Hamiltonian of H_A evaluate the exact
action on those flows; the averaged generating functions add the perturbation
integral eps * int_0^h V_B(q_A(t)) dt by quadrature, with the sign demanded
by each type.  Both averaged maps take one-step errors of size O(eps^2 h^3).

The position-boundary method is symmetric: its generating function equals its
own adjoint, so the defect of step-then-unstep is roundoff.  The
momentum-boundary method is not.  Its adjoint is the left-type construction
averaged over the (p0, q1) arc, a different map, because the (q0, p1) arc and
the (p0, q1) arc through the same step disagree once eps != 0.  The two form
an exact adjoint pair, and the symmetry defect of either one scales like
eps^2 h^4 (about 1.2e-5 at eps = 0.1, h = 0.3 on the cubic perturbation).

The position-boundary construction is singular where sin h = 0 and the
momentum-boundary ones where cos h = 0.  Construction refuses h within
singular_guard of those sets; the exact one-step formulas below are left
unguarded on purpose, since the blow-up near k pi (respectively odd k pi/2)
is part of what the resonance experiment measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import PhaseState, ScalarPotential
from .genfunc import (
    DiscreteLagrangian,
    DiscreteLeftHamiltonian,
    DiscreteRightHamiltonian,
    OneStepMap,
    step_type1,
    step_type2,
    step_type3,
)
from .rootfind import SolveSettings
from .taylor_vi import QuadratureRule, gauss_legendre

__all__ = [
    "SingularBvp",
    "HoBoundaryFlow",
    "AveragedConfig",
    "ho_exact_flow",
    "ho_flow_map",
    "exact_dl_ho_step",
    "exact_dh_ho_step",
    "exact_dl_ho_map",
    "exact_dh_ho_map",
    "ho_bvp",
    "eval_qA",
    "eval_qA_dot",
    "ho_exact_discrete_lagrangian",
    "ho_exact_discrete_right_hamiltonian",
    "averaged_lagrangian",
    "averaged_right_hamiltonian",
    "averaged_left_hamiltonian",
    "averaged_lagrangian_step",
    "averaged_hamiltonian_step",
    "averaged_lagrangian_map",
    "averaged_hamiltonian_map",
    "averaged_left_hamiltonian_map",
    "kick_drift_kick_step",
    "kick_drift_kick_map",
]

DEFAULT_SINGULAR_GUARD = 1e-8


class SingularBvp(ValueError):
    """Boundary data cannot determine the oscillator arc at this step size."""


def _scalar(x) -> float:
    a = np.atleast_1d(np.asarray(x, dtype=float))
    if a.size != 1:
        raise ValueError("averaging machinery is one-dimensional")
    return float(a[0])


# -- exact oscillator flows --------------------------------------------------

def ho_exact_flow(state: PhaseState, t: float) -> PhaseState:
    """Exact rotation flow of H_A = (p^2 + q^2)/2."""
    ct, st = math.cos(t), math.sin(t)
    return PhaseState(state.q * ct + state.p * st, state.p * ct - state.q * st)


def ho_flow_map() -> OneStepMap:
    return OneStepMap(ho_exact_flow, label="oscillator-flow")


def exact_dl_ho_step(state: PhaseState, h: float) -> PhaseState:
    """Step of the exact position-boundary generating function.

    q1 = q0 cos h + p0 sin h,  p1 = q1 cot h - q0 csc h.

    Equal to the exact flow in exact arithmetic, but evaluated through the
    cot/csc form, which loses all accuracy as h approaches a multiple of pi.
    Unguarded: near-singular h simply produces enormous values.
    """
    s = math.sin(h)
    q1 = state.q * math.cos(h) + state.p * s
    p1 = q1 * (math.cos(h) / s) - state.q * (1.0 / s)
    return PhaseState(q1, p1)


def exact_dh_ho_step(state: PhaseState, h: float) -> PhaseState:
    """Step of the exact momentum-boundary generating function.

    p1 = p0 cos h - q0 sin h,  q1 = p1 tan h + q0 sec h.

    Counterpart of exact_dl_ho_step with the singular set at odd multiples
    of pi/2; likewise unguarded.
    """
    c = math.cos(h)
    p1 = state.p * c - state.q * math.sin(h)
    q1 = p1 * (math.sin(h) / c) + state.q / c
    return PhaseState(q1, p1)


def exact_dl_ho_map() -> OneStepMap:
    return OneStepMap(exact_dl_ho_step, label="exact-dl")


def exact_dh_ho_map() -> OneStepMap:
    return OneStepMap(exact_dh_ho_step, label="exact-dh")


# -- oscillator boundary-value flows -----------------------------------------

@dataclass(frozen=True)
class HoBoundaryFlow:
    """Oscillator arc q_A(t) = c_cos cos t + c_sin sin t fitted to boundary data.

    variant records which data fixed the arc: "type1" for (q0, q1) over
    [0, h], "type2" for (q0, p1), "type3" for (p0, q1).
    """

    variant: str
    h: float
    c_cos: float
    c_sin: float


def ho_bvp(
    variant: str,
    a: float,
    b: float,
    h: float,
    singular_guard: float = DEFAULT_SINGULAR_GUARD,
) -> HoBoundaryFlow:
    """Fit the oscillator arc to boundary data.

    variant "type1": a = q0, b = q1; singular where |sin h| <= singular_guard.
    variant "type2": a = q0, b = p1; singular where |cos h| <= singular_guard.
    variant "type3": a = p0, b = q1; singular with type2.
    """
    a, b = _scalar(a), _scalar(b)
    if variant == "type1":
        s = math.sin(h)
        if abs(s) <= singular_guard:
            raise SingularBvp(f"position-boundary arc undefined near h = {h!r} (sin h ~ 0)")
        return HoBoundaryFlow("type1", h, a, (b - a * math.cos(h)) / s)
    if variant == "type2":
        c = math.cos(h)
        if abs(c) <= singular_guard:
            raise SingularBvp(f"momentum-boundary arc undefined near h = {h!r} (cos h ~ 0)")
        return HoBoundaryFlow("type2", h, a, (b + a * math.sin(h)) / c)
    if variant == "type3":
        c = math.cos(h)
        if abs(c) <= singular_guard:
            raise SingularBvp(f"momentum-boundary arc undefined near h = {h!r} (cos h ~ 0)")
        return HoBoundaryFlow("type3", h, (b - a * math.sin(h)) / c, a)
    raise ValueError(f"unknown variant {variant!r}")


def eval_qA(flow: HoBoundaryFlow, t: float) -> float:
    return flow.c_cos * math.cos(t) + flow.c_sin * math.sin(t)


def eval_qA_dot(flow: HoBoundaryFlow, t: float) -> float:
    return -flow.c_cos * math.sin(t) + flow.c_sin * math.cos(t)


# -- exact generating functions of the oscillator ----------------------------

def ho_exact_discrete_lagrangian() -> DiscreteLagrangian:
    """L_d^E(q0, q1; h) = ((q0^2 + q1^2) cos h - 2 q0 q1) / (2 sin h).

    Exact action of the oscillator arc through (q0, q1); its step map is the
    exact flow.  Singular at multiples of pi (unguarded).
    """

    def value(q0, q1, h):
        x, y = _scalar(q0), _scalar(q1)
        return ((x * x + y * y) * math.cos(h) - 2.0 * x * y) / (2.0 * math.sin(h))

    def d1(q0, q1, h):
        x, y = _scalar(q0), _scalar(q1)
        return np.array([(x * math.cos(h) - y) / math.sin(h)])

    def d2(q0, q1, h):
        x, y = _scalar(q0), _scalar(q1)
        return np.array([(y * math.cos(h) - x) / math.sin(h)])

    return DiscreteLagrangian(value=value, d1=d1, d2=d2, label="oscillator-exact-L")


def ho_exact_discrete_right_hamiltonian() -> DiscreteRightHamiltonian:
    """H_d^{+,E}(q0, p1; h) = q0 p1 sec h + (q0^2 + p1^2) tan h / 2.

    Exact momentum-boundary generating function of the oscillator; its step
    map is the exact flow.  Singular at odd multiples of pi/2 (unguarded).
    """

    def value(q0, p1, h):
        x, y = _scalar(q0), _scalar(p1)
        return x * y / math.cos(h) + 0.5 * (x * x + y * y) * math.tan(h)

    def d1(q0, p1, h):
        x, y = _scalar(q0), _scalar(p1)
        return np.array([y / math.cos(h) + x * math.tan(h)])

    def d2(q0, p1, h):
        x, y = _scalar(q0), _scalar(p1)
        return np.array([x / math.cos(h) + y * math.tan(h)])

    return DiscreteRightHamiltonian(value=value, d1=d1, d2=d2, label="oscillator-exact-H+")


# -- averaged generating functions -------------------------------------------

@dataclass(frozen=True)
class AveragedConfig:
    """Perturbation strength and integration controls for the averaged methods."""

    epsilon: float
    avg_quadrature: QuadratureRule = field(default_factory=lambda: gauss_legendre(4))
    singular_guard: float = DEFAULT_SINGULAR_GUARD

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0.0):
            raise ValueError("epsilon must be finite and >= 0")
        if self.singular_guard < 0.0:
            raise ValueError("singular_guard must be >= 0")


def averaged_lagrangian(cfg: AveragedConfig, v_b: ScalarPotential) -> DiscreteLagrangian:
    """L_d(q0, q1; h) = L_d^E(q0, q1; h) - eps int_0^h V_B(q_A(t)) dt.

    The integral runs over the oscillator arc through (q0, q1); it and the
    partials use cfg.avg_quadrature with the closed-form arc sensitivities
    (d q_A / d q1 = sin t / sin h and its q0 counterpart), so no solver sits
    inside the derivative evaluations.
    """
    exact = ho_exact_discrete_lagrangian()
    b, c = cfg.avg_quadrature.weights, cfg.avg_quadrature.nodes

    def arc(q0, q1, h):
        return ho_bvp("type1", q0, q1, h, cfg.singular_guard)

    def value(q0, q1, h):
        flow = arc(q0, q1, h)
        integral = h * sum(
            bi * float(v_b.value(np.array([eval_qA(flow, ci * h)])))
            for bi, ci in zip(b, c)
        )
        return float(exact.value(q0, q1, h)) - cfg.epsilon * integral

    def d1(q0, q1, h):
        flow = arc(q0, q1, h)
        s = math.sin(h)
        acc = 0.0
        for bi, ci in zip(b, c):
            t = ci * h
            gb = float(v_b.grad(np.array([eval_qA(flow, t)]))[0])
            acc += bi * gb * (math.cos(t) - math.cos(h) * math.sin(t) / s)
        return exact.deriv1(q0, q1, h) - cfg.epsilon * h * acc

    def d2(q0, q1, h):
        flow = arc(q0, q1, h)
        s = math.sin(h)
        acc = 0.0
        for bi, ci in zip(b, c):
            t = ci * h
            gb = float(v_b.grad(np.array([eval_qA(flow, t)]))[0])
            acc += bi * gb * (math.sin(t) / s)
        return exact.deriv2(q0, q1, h) - cfg.epsilon * h * acc

    return DiscreteLagrangian(value=value, d1=d1, d2=d2, label=f"averaged-L(eps={cfg.epsilon})")


def averaged_right_hamiltonian(cfg: AveragedConfig, v_b: ScalarPotential) -> DiscreteRightHamiltonian:
    """H_d^+(q0, p1; h) = H_d^{+,E}(q0, p1; h) + eps int_0^h V_B(q_A(t)) dt.

    Momentum-boundary counterpart of averaged_lagrangian; the arc sensitivity
    to p1 is sin t / cos h.
    """
    exact = ho_exact_discrete_right_hamiltonian()
    b, c = cfg.avg_quadrature.weights, cfg.avg_quadrature.nodes

    def arc(q0, p1, h):
        return ho_bvp("type2", q0, p1, h, cfg.singular_guard)

    def value(q0, p1, h):
        flow = arc(q0, p1, h)
        integral = h * sum(
            bi * float(v_b.value(np.array([eval_qA(flow, ci * h)])))
            for bi, ci in zip(b, c)
        )
        return float(exact.value(q0, p1, h)) + cfg.epsilon * integral

    def d1(q0, p1, h):
        flow = arc(q0, p1, h)
        cc = math.cos(h)
        acc = 0.0
        for bi, ci in zip(b, c):
            t = ci * h
            gb = float(v_b.grad(np.array([eval_qA(flow, t)]))[0])
            acc += bi * gb * (math.cos(t) + math.sin(h) * math.sin(t) / cc)
        return exact.deriv1(q0, p1, h) + cfg.epsilon * h * acc

    def d2(q0, p1, h):
        flow = arc(q0, p1, h)
        cc = math.cos(h)
        acc = 0.0
        for bi, ci in zip(b, c):
            t = ci * h
            gb = float(v_b.grad(np.array([eval_qA(flow, t)]))[0])
            acc += bi * gb * (math.sin(t) / cc)
        return exact.deriv2(q0, p1, h) + cfg.epsilon * h * acc

    return DiscreteRightHamiltonian(value=value, d1=d1, d2=d2, label=f"averaged-H+(eps={cfg.epsilon})")


def averaged_left_hamiltonian(cfg: AveragedConfig, v_b: ScalarPotential) -> DiscreteLeftHamiltonian:
    """H_d^-(p0, q1; h) = H_d^{-,E}(p0, q1; h) + eps int_0^h V_B(q_A(t)) dt.

    Adjoint partner of averaged_right_hamiltonian: stepping this with the
    left-type discrete equations inverts the right-averaged step at -h.  The
    arc is pinned by initial momentum and final position, so its sensitivities
    are sin t - tan h cos t (to p0) and cos t / cos h (to q1).
    """
    b, c = cfg.avg_quadrature.weights, cfg.avg_quadrature.nodes

    def arc(p0, q1, h):
        return ho_bvp("type3", p0, q1, h, cfg.singular_guard)

    def exact_value(p0, q1, h):
        x, y = _scalar(p0), _scalar(q1)
        return -x * y / math.cos(h) + 0.5 * (x * x + y * y) * math.tan(h)

    def value(p0, q1, h):
        flow = arc(p0, q1, h)
        integral = h * sum(
            bi * float(v_b.value(np.array([eval_qA(flow, ci * h)])))
            for bi, ci in zip(b, c)
        )
        return exact_value(p0, q1, h) + cfg.epsilon * integral

    def d1(p0, q1, h):
        flow = arc(p0, q1, h)
        th = math.tan(h)
        acc = 0.0
        for bi, ci in zip(b, c):
            t = ci * h
            gb = float(v_b.grad(np.array([eval_qA(flow, t)]))[0])
            acc += bi * gb * (math.sin(t) - th * math.cos(t))
        x, y = _scalar(p0), _scalar(q1)
        return np.array([-y / math.cos(h) + x * th]) + cfg.epsilon * h * acc

    def d2(p0, q1, h):
        flow = arc(p0, q1, h)
        acc = 0.0
        for bi, ci in zip(b, c):
            t = ci * h
            gb = float(v_b.grad(np.array([eval_qA(flow, t)]))[0])
            acc += bi * gb * (math.cos(t) / math.cos(h))
        x, y = _scalar(p0), _scalar(q1)
        return np.array([-x / math.cos(h) + y * math.tan(h)]) + cfg.epsilon * h * acc

    return DiscreteLeftHamiltonian(value=value, d1=d1, d2=d2, label=f"averaged-H-(eps={cfg.epsilon})")


# -- averaged step maps ------------------------------------------------------

def averaged_lagrangian_step(
    cfg: AveragedConfig,
    v_b: ScalarPotential,
    state: PhaseState,
    h: float,
    settings: Optional[SolveSettings] = None,
) -> PhaseState:
    """One step of the position-boundary averaged integrator."""
    return step_type1(averaged_lagrangian(cfg, v_b), state, h, settings)


def averaged_hamiltonian_step(
    cfg: AveragedConfig,
    v_b: ScalarPotential,
    state: PhaseState,
    h: float,
    settings: Optional[SolveSettings] = None,
) -> PhaseState:
    """One step of the momentum-boundary averaged integrator."""
    return step_type2(averaged_right_hamiltonian(cfg, v_b), state, h, settings)


def averaged_lagrangian_map(
    cfg: AveragedConfig, v_b: ScalarPotential, settings: Optional[SolveSettings] = None
) -> OneStepMap:
    genfn = averaged_lagrangian(cfg, v_b)
    return OneStepMap(
        step=lambda state, h: step_type1(genfn, state, h, settings),
        label=f"averaged-L(eps={cfg.epsilon})",
    )


def averaged_hamiltonian_map(
    cfg: AveragedConfig, v_b: ScalarPotential, settings: Optional[SolveSettings] = None
) -> OneStepMap:
    genfn = averaged_right_hamiltonian(cfg, v_b)
    return OneStepMap(
        step=lambda state, h: step_type2(genfn, state, h, settings),
        label=f"averaged-H(eps={cfg.epsilon})",
    )


def averaged_left_hamiltonian_map(
    cfg: AveragedConfig, v_b: ScalarPotential, settings: Optional[SolveSettings] = None
) -> OneStepMap:
    genfn = averaged_left_hamiltonian(cfg, v_b)
    return OneStepMap(
        step=lambda state, h: step_type3(genfn, state, h, settings),
        label=f"averaged-H-(eps={cfg.epsilon})",
    )


def kick_drift_kick_step(
    cfg: AveragedConfig, v_b: ScalarPotential, state: PhaseState, h: float
) -> PhaseState:
    """Strang split: half perturbation kick, exact rotation, half kick.

    Uses the exact initial-value flow of the oscillator, so unlike the
    boundary-value methods it has no singular step sizes.
    """
    half = 0.5 * cfg.epsilon
    p_in = state.p - (half * h) * v_b.grad(state.q)
    mid = ho_exact_flow(PhaseState(state.q, p_in), h)
    p_out = mid.p - (half * h) * v_b.grad(mid.q)
    return PhaseState(mid.q, p_out)


def kick_drift_kick_map(cfg: AveragedConfig, v_b: ScalarPotential) -> OneStepMap:
    return OneStepMap(
        step=lambda state, h: kick_drift_kick_step(cfg, v_b, state, h),
        label=f"kick-drift-kick(eps={cfg.epsilon})",
    )
