"""Empirical checks: convergence order, symplecticity, symmetry, adjoints,
and long-run energy-error sweeps.

These are measurements, not proofs; each returns a number to be compared
against a threshold chosen by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import rootfind
from .core import PhaseState
from .genfunc import (
    DiscreteRightHamiltonian,
    OneStepMap,
    adjoint_map,
    adjoint_right,
    step_map,
    step_type3,
)
from .rootfind import SolveSettings

__all__ = [
    "ConvergenceResult",
    "SweepResult",
    "convergence_order",
    "map_jacobian",
    "symplecticity_defect",
    "symmetry_defect",
    "adjoint_defect",
    "energy_error_sweep",
    "sv_reference",
]

DEGENERATE_ERROR = 1e-12
OVERFLOW_SUBSTITUTE = 1e6


@dataclass(frozen=True)
class ConvergenceResult:
    """Least-squares slope of log error against log h.

    degenerate flags the case where every error sits at rounding level, so
    the slope is meaningless (exact methods).
    """

    slope: float
    h_values: tuple
    errors: tuple
    degenerate: bool


def convergence_order(
    flow: OneStepMap,
    reference: Callable[[PhaseState, float], PhaseState],
    state: PhaseState,
    t_final: float,
    h_values: Sequence[float],
    degenerate_threshold: float = DEGENERATE_ERROR,
) -> ConvergenceResult:
    """Global error at t_final for each h, then the log-log slope.

    Every h must divide t_final so all runs land on the same endpoint.
    """
    h_values = list(h_values)
    if len(h_values) < 3:
        raise ValueError("need at least 3 step sizes")
    errors = []
    target = reference(state, t_final).as_array()
    for h in h_values:
        n = round(t_final / h)
        if n < 1 or abs(n * h - t_final) > 1e-9 * max(1.0, abs(t_final)):
            raise ValueError(f"step {h!r} does not divide t_final {t_final!r}")
        current = state
        for _ in range(n):
            current = flow(current, h)
        errors.append(float(np.max(np.abs(current.as_array() - target))))
    degenerate = all(e <= degenerate_threshold for e in errors)
    safe = np.maximum(errors, 1e-300)
    slope = float(np.polyfit(np.log(np.asarray(h_values)), np.log(safe), 1)[0])
    return ConvergenceResult(slope, tuple(h_values), tuple(errors), degenerate)


def map_jacobian(flow: OneStepMap, state: PhaseState, h: float, fd_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the flow in (q, p) coordinates."""
    z0 = state.as_array()
    n = z0.size
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = fd_step
        plus = flow(PhaseState.from_array(z0 + e), h).as_array()
        minus = flow(PhaseState.from_array(z0 - e), h).as_array()
        jac[:, j] = (plus - minus) / (2.0 * fd_step)
    if not np.all(np.isfinite(jac)):
        raise ValueError("non-finite Jacobian entries")
    return jac


def _canonical_j(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def symplecticity_defect(flow: OneStepMap, state: PhaseState, h: float, fd_step: float = 1e-6) -> float:
    """max |D^T J D - J| for the finite-difference Jacobian D of the step."""
    d = map_jacobian(flow, state, h, fd_step)
    j = _canonical_j(state.dim)
    return float(np.max(np.abs(d.T @ j @ d - j)))


def symmetry_defect(flow: OneStepMap, state: PhaseState, h: float) -> float:
    """max |F_h(F_{-h}(s)) - s|; zero for time-symmetric methods."""
    round_trip = flow(flow(state, -h), h)
    return float(np.max(np.abs(round_trip.as_array() - state.as_array())))


def adjoint_defect(
    right: DiscreteRightHamiltonian,
    state: PhaseState,
    h: float,
    settings: Optional[SolveSettings] = None,
) -> float:
    """Distance between two routes to the adjoint step.

    Function route: Type III step of (H_d^+)*.  Map route: inverse of the
    Type II step at -h.  Both equal the adjoint map in exact arithmetic.
    """
    via_function = step_type3(adjoint_right(right), state, h, settings)
    via_map = adjoint_map(step_map(right, settings), settings)(state, h)
    return float(np.max(np.abs(via_function.as_array() - via_map.as_array())))


@dataclass(frozen=True)
class SweepResult:
    """Max energy-error metric per step size; failed runs carry the substitute."""

    h_values: tuple
    metrics: tuple
    overflowed: tuple
    overflow_substitute: float

    def metric_at(self, h: float) -> float:
        return self.metrics[self.h_values.index(h)]


def energy_error_sweep(
    flow: OneStepMap,
    energy_fn: Callable[[PhaseState], float],
    state: PhaseState,
    t_final: float,
    h_values: Sequence[float],
    overflow_substitute: float = OVERFLOW_SUBSTITUTE,
) -> SweepResult:
    """max_k |E(s_k) - E(s_0)| over round(t_final / h) steps, for each h.

    Runs that leave the finite domain (overflow, non-finite coordinates,
    solver failure, singular boundary data) record overflow_substitute
    instead of a metric; that convention makes resonance spikes plottable.
    """
    metrics = []
    overflowed = []
    with np.errstate(all="ignore"):
        for h in h_values:
            n = max(1, round(t_final / h))
            e0 = energy_fn(state)
            worst = 0.0
            failed = False
            current = state
            for _ in range(n):
                try:
                    current = flow(current, h)
                    energy = energy_fn(current)
                except (rootfind.RootfindError, ValueError, ZeroDivisionError,
                        OverflowError, FloatingPointError):
                    failed = True
                    break
                if not np.isfinite(energy):
                    failed = True
                    break
                worst = max(worst, abs(energy - e0))
            if failed or not np.isfinite(worst):
                metrics.append(overflow_substitute)
                overflowed.append(True)
            else:
                metrics.append(worst)
                overflowed.append(False)
    return SweepResult(tuple(h_values), tuple(metrics), tuple(overflowed), overflow_substitute)


def sv_reference(flow_sv: OneStepMap, h_ref: float) -> Callable[[PhaseState, float], PhaseState]:
    """Reference flow built from fine Stormer-Verlet substeps.

    For systems without a closed-form flow: reference(s, t) integrates with
    ceil(t / h_ref) equal substeps.
    """

    def reference(state: PhaseState, t: float) -> PhaseState:
        if t == 0.0:
            return state
        n = max(1, int(np.ceil(abs(t) / h_ref)))
        h = t / n
        for _ in range(n):
            state = flow_sv(state, h)
        return state

    return reference
