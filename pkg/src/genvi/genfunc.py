"""Generating functions of Types I/II/III and the step maps they induce.

A discrete Lagrangian L_d(q0, q1; h) generates a map through the implicit
discrete Euler-Lagrange conditions

    p0 = -D1 L_d(q0, q1),        p1 = D2 L_d(q0, q1),

a discrete right Hamiltonian H_d^+(q0, p1; h) through

    p0 = D1 H_d^+(q0, p1),       q1 = D2 H_d^+(q0, p1),

and a discrete left Hamiltonian H_d^-(p0, q1; h) through

    q0 = -D1 H_d^-(p0, q1),      p1 = -D2 H_d^-(p0, q1).

The same maps factor through discrete Legendre transforms as
F = legendre_plus o legendre_minus^-1; both routes are provided so they can
be checked against each other.  Adjoints act on the Hamiltonian functions by
argument swap and time reversal, and on maps by F*_h = F^-1_{-h}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import singledispatch
from typing import Callable, Optional, Sequence

import numpy as np

from . import rootfind
from .core import PhaseState
from .rootfind import SolveSettings

__all__ = [
    "DiscreteLagrangian",
    "DiscreteRightHamiltonian",
    "DiscreteLeftHamiltonian",
    "OneStepMap",
    "step_type1",
    "step_type2",
    "step_type3",
    "step_map",
    "legendre_plus",
    "legendre_minus",
    "legendre_step",
    "legendre_right_to_left",
    "adjoint_right",
    "adjoint_left",
    "adjoint_map",
    "compose",
    "symmetric_compose",
    "derivative_consistency",
]

FD_STEP = 1e-6


def _central_diff(f: Callable, a: np.ndarray, step: float) -> np.ndarray:
    """Gradient of scalar f with respect to the vector a by central differences."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    out = np.empty_like(a)
    for j in range(a.size):
        e = np.zeros_like(a)
        e[j] = step
        out[j] = (f(a + e) - f(a - e)) / (2.0 * step)
    return out


class _GeneratingFunction:
    """Shared derivative plumbing for the three generating-function types."""

    def __post_init__(self):
        if (self.d1 is None) != (self.d2 is None):
            raise ValueError("provide both d1 and d2 or neither")
        mode = "finite-difference" if self.d1 is None else "analytic"
        object.__setattr__(self, "derivative_mode", mode)

    def deriv1(self, a, b, h: float) -> np.ndarray:
        if self.d1 is not None:
            return np.atleast_1d(np.asarray(self.d1(a, b, h), dtype=float))
        return _central_diff(lambda x: float(self.value(x, b, h)), a, self.fd_step)

    def deriv2(self, a, b, h: float) -> np.ndarray:
        if self.d2 is not None:
            return np.atleast_1d(np.asarray(self.d2(a, b, h), dtype=float))
        return _central_diff(lambda x: float(self.value(a, x, h)), b, self.fd_step)


@dataclass(frozen=True, eq=False)
class DiscreteLagrangian(_GeneratingFunction):
    """L_d(q0, q1; h).  d1/d2 are the partials in q0/q1; omitted means FD."""

    value: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    label: str = ""
    fd_step: float = FD_STEP
    derivative_mode: str = field(init=False)


@dataclass(frozen=True, eq=False)
class DiscreteRightHamiltonian(_GeneratingFunction):
    """H_d^+(q0, p1; h).  d1/d2 are the partials in q0/p1; omitted means FD."""

    value: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    label: str = ""
    fd_step: float = FD_STEP
    derivative_mode: str = field(init=False)


@dataclass(frozen=True, eq=False)
class DiscreteLeftHamiltonian(_GeneratingFunction):
    """H_d^-(p0, q1; h).  d1/d2 are the partials in p0/q1; omitted means FD."""

    value: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    label: str = ""
    fd_step: float = FD_STEP
    derivative_mode: str = field(init=False)


@dataclass(frozen=True)
class OneStepMap:
    """A numerical flow map (state, h) -> state."""

    step: Callable[[PhaseState, float], PhaseState]
    label: str = ""

    def __call__(self, state: PhaseState, h: float) -> PhaseState:
        return self.step(state, h)


def _tag_and_reraise(err: rootfind.RootfindError, label: str, what: str):
    msg = err.args[0] if err.args else ""
    err.args = (f"{label or what}: {msg}",) + err.args[1:]
    raise err


def _require_nonzero_step(h: float):
    # generating functions define a map only for h != 0 (difference quotients
    # divide by h); h = 0 is a caller bug, not a solver failure
    if h == 0.0:
        raise ValueError("step size must be nonzero")


FD_MODE_TOL = 1e-9


def _step_settings(genfn, settings: Optional[SolveSettings]) -> Optional[SolveSettings]:
    # finite-difference derivatives carry rounding noise around 1e-11, so a
    # solve to the default 1e-12 would stall just above its tolerance
    if settings is None and genfn.derivative_mode == "finite-difference":
        return SolveSettings(tol=FD_MODE_TOL)
    return settings


def step_type1(
    lagrangian: DiscreteLagrangian,
    state: PhaseState,
    h: float,
    settings: Optional[SolveSettings] = None,
    full_output: bool = False,
):
    """Advance (q0, p0) by the map of a discrete Lagrangian.

    Solves p0 = -D1 L_d(q0, q1) for q1, then reads p1 = D2 L_d(q0, q1).
    """
    _require_nonzero_step(h)
    settings = _step_settings(lagrangian, settings)
    q0, p0 = state.q, state.p

    def residual(q1):
        return p0 + lagrangian.deriv1(q0, q1, h)

    try:
        q1, info = rootfind.newton_solve_full(residual, q0 + h * p0, settings)
    except rootfind.RootfindError as err:
        _tag_and_reraise(err, lagrangian.label, "type I step")
    p1 = lagrangian.deriv2(q0, q1, h)
    out = PhaseState(q1, p1)
    return (out, info) if full_output else out


def step_type2(
    right: DiscreteRightHamiltonian,
    state: PhaseState,
    h: float,
    settings: Optional[SolveSettings] = None,
    full_output: bool = False,
):
    """Advance (q0, p0) by the map of a discrete right Hamiltonian.

    Solves p0 = D1 H_d^+(q0, p1) for p1, then reads q1 = D2 H_d^+(q0, p1).
    """
    _require_nonzero_step(h)
    settings = _step_settings(right, settings)
    q0, p0 = state.q, state.p

    def residual(p1):
        return right.deriv1(q0, p1, h) - p0

    try:
        p1, info = rootfind.newton_solve_full(residual, p0, settings)
    except rootfind.RootfindError as err:
        _tag_and_reraise(err, right.label, "type II step")
    q1 = right.deriv2(q0, p1, h)
    out = PhaseState(q1, p1)
    return (out, info) if full_output else out


def step_type3(
    left: DiscreteLeftHamiltonian,
    state: PhaseState,
    h: float,
    settings: Optional[SolveSettings] = None,
    full_output: bool = False,
):
    """Advance (q0, p0) by the map of a discrete left Hamiltonian.

    Solves q0 = -D1 H_d^-(p0, q1) for q1, then reads p1 = -D2 H_d^-(p0, q1).
    """
    _require_nonzero_step(h)
    settings = _step_settings(left, settings)
    q0, p0 = state.q, state.p

    def residual(q1):
        return q0 + left.deriv1(p0, q1, h)

    try:
        q1, info = rootfind.newton_solve_full(residual, q0 + h * p0, settings)
    except rootfind.RootfindError as err:
        _tag_and_reraise(err, left.label, "type III step")
    p1 = -left.deriv2(p0, q1, h)
    out = PhaseState(q1, p1)
    return (out, info) if full_output else out


def step_map(genfn, settings: Optional[SolveSettings] = None) -> OneStepMap:
    """Wrap a generating function of any type as a OneStepMap."""
    if isinstance(genfn, DiscreteLagrangian):
        fn = step_type1
    elif isinstance(genfn, DiscreteRightHamiltonian):
        fn = step_type2
    elif isinstance(genfn, DiscreteLeftHamiltonian):
        fn = step_type3
    else:
        raise TypeError(f"not a generating function: {genfn!r}")
    return OneStepMap(
        step=lambda state, h: fn(genfn, state, h, settings),
        label=genfn.label or type(genfn).__name__,
    )


# -- discrete Legendre transforms -------------------------------------------

@singledispatch
def legendre_plus(genfn, a, b, h: float) -> PhaseState:
    """The (q1, p1) endpoint read off the generating function's natural arguments."""
    raise TypeError(f"not a generating function: {genfn!r}")


@singledispatch
def legendre_minus(genfn, a, b, h: float) -> PhaseState:
    """The (q0, p0) endpoint read off the generating function's natural arguments."""
    raise TypeError(f"not a generating function: {genfn!r}")


@legendre_plus.register
def _(genfn: DiscreteLagrangian, q0, q1, h: float) -> PhaseState:
    return PhaseState(q1, genfn.deriv2(q0, q1, h))


@legendre_minus.register
def _(genfn: DiscreteLagrangian, q0, q1, h: float) -> PhaseState:
    return PhaseState(q0, -genfn.deriv1(q0, q1, h))


@legendre_plus.register
def _(genfn: DiscreteRightHamiltonian, q0, p1, h: float) -> PhaseState:
    return PhaseState(genfn.deriv2(q0, p1, h), p1)


@legendre_minus.register
def _(genfn: DiscreteRightHamiltonian, q0, p1, h: float) -> PhaseState:
    return PhaseState(q0, genfn.deriv1(q0, p1, h))


@legendre_plus.register
def _(genfn: DiscreteLeftHamiltonian, p0, q1, h: float) -> PhaseState:
    return PhaseState(q1, -genfn.deriv2(p0, q1, h))


@legendre_minus.register
def _(genfn: DiscreteLeftHamiltonian, p0, q1, h: float) -> PhaseState:
    return PhaseState(-genfn.deriv1(p0, q1, h), p0)


def legendre_step(
    genfn, state: PhaseState, h: float, settings: Optional[SolveSettings] = None
) -> PhaseState:
    """One step computed as legendre_plus o legendre_minus^-1.

    Independent route to the same map as step_type{1,2,3}; kept separate so
    the two can be cross-checked.
    """
    settings = _step_settings(genfn, settings)
    q0, p0 = state.q, state.p
    if isinstance(genfn, DiscreteLagrangian):
        def residual(q1):
            return legendre_minus(genfn, q0, q1, h).p - p0

        u = rootfind.newton_solve(residual, q0 + h * p0, settings)
        return legendre_plus(genfn, q0, u, h)
    if isinstance(genfn, DiscreteRightHamiltonian):
        def residual(p1):
            return legendre_minus(genfn, q0, p1, h).p - p0

        u = rootfind.newton_solve(residual, p0, settings)
        return legendre_plus(genfn, q0, u, h)
    if isinstance(genfn, DiscreteLeftHamiltonian):
        def residual(q1):
            return legendre_minus(genfn, p0, q1, h).q - q0

        u = rootfind.newton_solve(residual, q0 + h * p0, settings)
        return legendre_plus(genfn, p0, u, h)
    raise TypeError(f"not a generating function: {genfn!r}")


# -- adjoints ----------------------------------------------------------------

def adjoint_right(right: DiscreteRightHamiltonian) -> DiscreteLeftHamiltonian:
    """(H_d^+)*(p0, q1; h) = -H_d^+(q1, p0; -h), a discrete left Hamiltonian."""
    return DiscreteLeftHamiltonian(
        value=lambda p0, q1, h: -right.value(q1, p0, -h),
        d1=lambda p0, q1, h: -right.deriv2(q1, p0, -h),
        d2=lambda p0, q1, h: -right.deriv1(q1, p0, -h),
        label=(right.label + "*") if right.label else "right-adjoint",
    )


def adjoint_left(left: DiscreteLeftHamiltonian) -> DiscreteRightHamiltonian:
    """(H_d^-)*(q0, p1; h) = -H_d^-(p1, q0; -h), a discrete right Hamiltonian."""
    return DiscreteRightHamiltonian(
        value=lambda q0, p1, h: -left.value(p1, q0, -h),
        d1=lambda q0, p1, h: -left.deriv2(p1, q0, -h),
        d2=lambda q0, p1, h: -left.deriv1(p1, q0, -h),
        label=(left.label + "*") if left.label else "left-adjoint",
    )


def adjoint_map(flow: OneStepMap, settings: Optional[SolveSettings] = None) -> OneStepMap:
    """F*_h = F^-1_{-h}, computed by solving F(y, -h) = x for y."""

    def stepper(state: PhaseState, h: float) -> PhaseState:
        target = state.as_array()

        def residual(z):
            return flow(PhaseState.from_array(z), -h).as_array() - target

        try:
            guess = flow(state, h).as_array()
        except Exception:
            guess = target
        y = rootfind.newton_solve(residual, guess, settings)
        return PhaseState.from_array(y)

    return OneStepMap(step=stepper, label=(flow.label + "*") if flow.label else "adjoint")


# -- Legendre transform between Types II and III -----------------------------

def legendre_right_to_left(
    right: DiscreteRightHamiltonian, settings: Optional[SolveSettings] = None
) -> DiscreteLeftHamiltonian:
    """Type II -> Type III by Legendre transform.

    H_d^-(p0, q1) = -p0.q0 - p1.q1 + H_d^+(q0, p1), where (q0, p1) solve
    D1 H_d^+(q0, p1) = p0 and D2 H_d^+(q0, p1) = q1.  The derivatives follow
    from the same inner solution (the correction terms vanish on it), which
    avoids differencing through the Newton iteration:

        D1 H_d^- = -q0,   D2 H_d^- = -p1.

    The generated map coincides with the Type II map of the input.
    """

    def inner(p0, q1, h):
        p0 = np.atleast_1d(np.asarray(p0, dtype=float))
        q1 = np.atleast_1d(np.asarray(q1, dtype=float))
        n = p0.size

        def residual(z):
            q0, p1 = z[:n], z[n:]
            return np.concatenate([
                right.deriv1(q0, p1, h) - p0,
                right.deriv2(q0, p1, h) - q1,
            ])

        guess = np.concatenate([q1 - h * p0, p0])
        z = rootfind.newton_solve(residual, guess, settings)
        return z[:n], z[n:]

    def value(p0, q1, h):
        q0, p1 = inner(p0, q1, h)
        p0 = np.atleast_1d(np.asarray(p0, dtype=float))
        q1 = np.atleast_1d(np.asarray(q1, dtype=float))
        return -float(p0 @ q0) - float(p1 @ q1) + float(right.value(q0, p1, h))

    return DiscreteLeftHamiltonian(
        value=value,
        d1=lambda p0, q1, h: -inner(p0, q1, h)[0],
        d2=lambda p0, q1, h: -inner(p0, q1, h)[1],
        label=(right.label + "->left") if right.label else "right->left",
    )


# -- composition -------------------------------------------------------------

def compose(stages: Sequence[tuple[OneStepMap, float]], label: str = "") -> OneStepMap:
    """Composite map running each stage over its fraction of the step.

    Stages are applied in sequence order; fractions must sum to 1 so the
    composite advances time by exactly h.
    """
    stages = list(stages)
    if not stages:
        raise ValueError("need at least one stage")
    total = sum(frac for _, frac in stages)
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"stage fractions must sum to 1, got {total!r}")

    def stepper(state: PhaseState, h: float) -> PhaseState:
        for flow, frac in stages:
            state = flow(state, frac * h)
        return state

    return OneStepMap(step=stepper, label=label or "composite")


def symmetric_compose(
    flow: OneStepMap,
    alphas: Optional[Sequence[float]] = None,
    betas: Optional[Sequence[float]] = None,
    settings: Optional[SolveSettings] = None,
) -> OneStepMap:
    """Symmetrized method built from a map and its adjoint.

    Default is the half-step form F_{h/2} o F*_{h/2} (adjoint applied first).
    With coefficients, builds the alternating composition

        F_{alpha_s h} o F*_{beta_s h} o ... o F_{alpha_1 h} o F*_{beta_1 h},

    which is symmetric iff alpha_{s+1-i} = beta_i; that palindrome condition
    is validated here along with consistency (all coefficients sum to 1).
    """
    adj = adjoint_map(flow, settings)
    if alphas is None and betas is None:
        alphas, betas = [0.5], [0.5]
    if alphas is None or betas is None or len(alphas) != len(betas):
        raise ValueError("alphas and betas must be given together, same length")
    s = len(alphas)
    for i in range(s):
        if abs(alphas[s - 1 - i] - betas[i]) > 1e-14:
            raise ValueError(
                f"not a symmetric composition: alpha[{s - i}] = {alphas[s - 1 - i]!r}"
                f" != beta[{i + 1}] = {betas[i]!r}"
            )
    stages = []
    for a, b in zip(alphas, betas):
        stages.append((adj, b))
        stages.append((flow, a))
    return compose(stages, label=f"symmetric({flow.label})" if flow.label else "symmetric")


# -- consistency checks ------------------------------------------------------

def derivative_consistency(genfn, points: Sequence[tuple], h: float, fd_step: float = FD_STEP) -> float:
    """Max relative deviation between declared derivatives and central FD of value.

    points is a sequence of (a, b) natural-argument pairs.
    """
    worst = 0.0
    for a, b in points:
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        fd1 = _central_diff(lambda x: float(genfn.value(x, b, h)), a, fd_step)
        fd2 = _central_diff(lambda x: float(genfn.value(a, x, h)), b, fd_step)
        g1 = genfn.deriv1(a, b, h)
        g2 = genfn.deriv2(a, b, h)
        for got, ref in ((g1, fd1), (g2, fd2)):
            scale = max(float(np.max(np.abs(ref))), 1.0)
            worst = max(worst, float(np.max(np.abs(got - ref))) / scale)
    return worst
