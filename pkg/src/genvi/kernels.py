"""Backend selection and typed wrappers for the experiment loop kernels.

genvi._speedups (compiled) and genvi._pykernels (pure Python) implement the
same four drivers with identical arithmetic; this module picks one at import
time and exposes it behind stable wrappers.  Setting GENVI_NO_SPEEDUPS in
the environment forces the pure backend, e.g. for timing comparisons.

The wrappers own every decision the kernels must not make themselves: step
counts from a final time, quadrature data, solver settings, the midpoint
matrices for the semi-implicit chain stepper.  Kernels receive primitives
only, so both backends stay trivially comparable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .fpu import FpuSystem, _midpoint_matrices, initial_state
from .rootfind import SolveSettings
from .taylor_vi import QuadratureRule, gauss_legendre

__all__ = [
    "BACKEND",
    "HAVE_SPEEDUPS",
    "RESONANCE_METHODS",
    "CHAIN_METHODS",
    "ChainTrajectory",
    "step_count",
    "resonance_energy_errors",
    "chain_trajectory",
]

if os.environ.get("GENVI_NO_SPEEDUPS"):
    from . import _pykernels as _impl

    HAVE_SPEEDUPS = False
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        HAVE_SPEEDUPS = True
    except ImportError:
        from . import _pykernels as _impl  # type: ignore[no-redef]

        HAVE_SPEEDUPS = False

BACKEND = "compiled" if HAVE_SPEEDUPS else "pure"

# method name -> kernel variant id
RESONANCE_METHODS = {
    "exact_dl": _impl.VARIANT_EXACT_DL,
    "exact_dh": _impl.VARIANT_EXACT_DH,
    "avg_l": _impl.VARIANT_AVG_L,
    "avg_h": _impl.VARIANT_AVG_H,
}

CHAIN_METHODS = ("sv", "htvi", "imex")

# Energy reported for a step size whose run blew up or hit a resonance guard;
# large and finite so log plots stay drawable.
FAILURE_SUBSTITUTE = 1e6


def step_count(t_final: float, h: float) -> int:
    """Number of steps covering [0, t_final]; the single rounding rule."""
    return max(1, round(t_final / h))


def resonance_energy_errors(
    method: str,
    eps: float,
    h_values: Sequence[float],
    t_final: float,
    q0: float = 1.0,
    p0: float = 0.0,
    substitute: float = FAILURE_SUBSTITUTE,
    quadrature: Optional[QuadratureRule] = None,
    settings: Optional[SolveSettings] = None,
    singular_guard: float = 1e-8,
) -> np.ndarray:
    """Max |H - H(0)| over each run of the cubic 1-dof benchmark.

    method is a RESONANCE_METHODS key.  The exact oscillator methods ignore
    eps in the dynamics but not in the reported energy; the averaged methods
    integrate the cubic term along the oscillator arc.  A failed run, or a
    step size within singular_guard of the method's singular set, reports
    substitute.
    """
    variant = RESONANCE_METHODS.get(method)
    if variant is None:
        raise ValueError(f"unknown resonance method {method!r}")
    rule = quadrature if quadrature is not None else gauss_legendre(4)
    st = settings if settings is not None else SolveSettings()
    hs = [float(h) for h in h_values]
    n_steps = [step_count(t_final, h) for h in hs]
    out = _impl.resonance_sweep(
        variant,
        float(eps),
        float(q0),
        float(p0),
        hs,
        n_steps,
        float(substitute),
        list(rule.weights),
        list(rule.nodes),
        st.tol,
        st.max_iter,
        st.fd_step,
        float(singular_guard),
    )
    return np.asarray(out, dtype=float)


@dataclass(frozen=True)
class ChainTrajectory:
    """Recorded rows of a chain run: times, per-spring stiff energies (one
    row per record), their totals, and the full Hamiltonian."""

    times: np.ndarray
    mode_energies: np.ndarray
    mode_totals: np.ndarray
    energies: np.ndarray


def chain_trajectory(
    method: str,
    system: FpuSystem,
    h: float,
    t_final: float,
    stride: int = 1,
    q0: Optional[Sequence[float]] = None,
    p0: Optional[Sequence[float]] = None,
    settings: Optional[SolveSettings] = None,
) -> ChainTrajectory:
    """Run one chain integrator and return its recorded trajectory.

    method: "sv" (leapfrog), "htvi" (trapezoidal Type II, implicit in p),
    or "imex" (soft kicks around an implicit midpoint on the stiff part).
    Records at step 0, every stride steps, and the final step.
    """
    if method not in CHAIN_METHODS:
        raise ValueError(f"unknown chain method {method!r}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if q0 is None or p0 is None:
        base = initial_state(system)
        q_in = base.q if q0 is None else np.asarray(q0, dtype=float)
        p_in = base.p if p0 is None else np.asarray(p0, dtype=float)
    else:
        q_in = np.asarray(q0, dtype=float)
        p_in = np.asarray(p0, dtype=float)
    n = step_count(t_final, h)
    omega = system.omega
    m = system.m
    quartic = system.quartic_strength
    if method == "sv":
        rows = _impl.fpu_sv_trajectory(omega, m, quartic, q_in, p_in, float(h), n, int(stride))
    elif method == "imex":
        _, a_inv, b_mat = _midpoint_matrices(system, float(h))
        rows = _impl.fpu_imex_trajectory(
            omega, m, quartic, q_in, p_in, float(h), n, int(stride), a_inv, b_mat
        )
    else:
        st = settings if settings is not None else SolveSettings()
        rows = _impl.fpu_htvi_trajectory(
            omega, m, quartic, q_in, p_in, float(h), n, int(stride),
            st.tol, st.max_iter, st.fd_step,
        )
    times, modes, totals, energies = rows
    return ChainTrajectory(
        times=np.asarray(times, dtype=float),
        mode_energies=np.asarray(modes, dtype=float),
        mode_totals=np.asarray(totals, dtype=float),
        energies=np.asarray(energies, dtype=float),
    )
