"""Experiment drivers behind the CLI.

Each run_* function takes a validated ExperimentConfig, produces its files
or report lines, and returns what the CLI needs to print.  Sweeps fan out
over a process pool when cfg.workers > 1; every job is one (method, h)
trajectory, and results merge by that key, so worker count never changes
the output bytes.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from . import kernels
from .averaged import (
    AveragedConfig,
    averaged_hamiltonian_map,
    averaged_lagrangian_map,
    averaged_left_hamiltonian_map,
    averaged_right_hamiltonian,
    ho_exact_discrete_right_hamiltonian,
    ho_exact_flow,
)
from .config import ExperimentConfig, RESONANCE_METHOD_ORDER
from .core import PhaseState, cubic_perturbation, harmonic_oscillator
from .fpu import FpuSystem
from .genfunc import OneStepMap, symmetric_compose
from .output import line_plot_svg, parse_csv, write_csv
from .taylor_vi import euler_a, euler_b, h_tvi_trapezoid, stormer_verlet
from .verify import adjoint_defect, convergence_order, symmetry_defect

__all__ = [
    "RESONANCE_COLUMNS",
    "EXPECTED_ORDERS",
    "OrderReport",
    "run_resonance",
    "run_fpu",
    "run_order",
    "run_adjoint_demo",
    "svg_path_for",
]

RESONANCE_COLUMNS = ("h", "err_avgL", "err_avgH", "err_exactDL", "err_exactDH", "err_min")

EXPECTED_ORDERS = {
    "euler_a": 1.0,
    "euler_b": 1.0,
    "sv": 2.0,
    "htvi": 2.0,
    "euler_a_composed": 2.0,
}

ORDER_H_VALUES = (0.1, 0.05, 0.025, 0.0125)
ORDER_T_FINAL = 1.0


def svg_path_for(csv_path: str) -> str:
    if csv_path.endswith(".csv"):
        return csv_path[: -len(".csv")] + ".svg"
    return csv_path + ".svg"


def _one_resonance_metric(method: str, eps: float, h: float, t_final: float) -> float:
    return float(kernels.resonance_energy_errors(method, eps, [h], t_final)[0])


def _resonance_table(cfg: ExperimentConfig) -> dict:
    """method -> metrics array over cfg's h grid, pool-dispatched per (method, h)."""
    hs = [float(h) for h in cfg.h_grid()]
    t_final = cfg.resolved_t_final()
    if cfg.workers == 1:
        return {
            method: kernels.resonance_energy_errors(method, cfg.eps, hs, t_final)
            for method in RESONANCE_METHOD_ORDER
        }
    results = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        futures = {
            (method, i): pool.submit(_one_resonance_metric, method, cfg.eps, h, t_final)
            for method in RESONANCE_METHOD_ORDER
            for i, h in enumerate(hs)
        }
        for key, fut in futures.items():
            results[key] = fut.result()
    return {
        method: np.array([results[(method, i)] for i in range(len(hs))])
        for method in RESONANCE_METHOD_ORDER
    }


def run_resonance(cfg: ExperimentConfig) -> tuple[str, str]:
    """Energy-error sweep of the four 1-dof methods; writes CSV and SVG."""
    hs = [float(h) for h in cfg.h_grid()]
    table = _resonance_table(cfg)
    rows = []
    for i, h in enumerate(hs):
        avg_l = float(table["avg_l"][i])
        avg_h = float(table["avg_h"][i])
        rows.append([
            h,
            avg_l,
            avg_h,
            float(table["exact_dl"][i]),
            float(table["exact_dh"][i]),
            min(avg_l, avg_h),
        ])
    out = cfg.out if cfg.out is not None else "resonance.csv"
    write_csv(out, RESONANCE_COLUMNS, rows, cfg.summary())
    svg_out = svg_path_for(out)
    with open(out) as fh:
        columns, _, parsed = parse_csv(fh.read())
    svg = line_plot_svg(
        x=[r[0] for r in parsed],
        series=[[r[j] for r in parsed] for j in range(1, len(columns))],
        labels=list(columns[1:]),
        title="max |H - H(0)| per step size",
        x_label=columns[0],
        y_label="max |H - H(0)|",
        log_y=True,
    )
    with open(svg_out, "w", newline="\n") as fh:
        fh.write(svg)
    return out, svg_out


def run_fpu(cfg: ExperimentConfig) -> tuple[str, str]:
    """One chain run; CSV rows t, I_1..I_m, I_total, H at the output stride."""
    system = FpuSystem(omega=cfg.omega, m=cfg.m)
    traj = kernels.chain_trajectory(
        cfg.method, system, cfg.h, cfg.resolved_t_final(), stride=cfg.stride
    )
    columns = ["t"] + [f"I{j + 1}" for j in range(cfg.m)] + ["I_total", "H"]
    rows = []
    for i in range(traj.times.size):
        rows.append(
            [float(traj.times[i])]
            + [float(v) for v in traj.mode_energies[i]]
            + [float(traj.mode_totals[i]), float(traj.energies[i])]
        )
    out = cfg.out if cfg.out is not None else "fpu.csv"
    write_csv(out, columns, rows, cfg.summary())
    svg_out = svg_path_for(out)
    with open(out) as fh:
        parsed_cols, _, parsed = parse_csv(fh.read())
    svg = line_plot_svg(
        x=[r[0] for r in parsed],
        series=[[r[j] for r in parsed] for j in range(1, len(parsed_cols))],
        labels=list(parsed_cols[1:]),
        title="stiff-spring energies and Hamiltonian",
        x_label=parsed_cols[0],
        y_label="energy",
        log_y=False,
    )
    with open(svg_out, "w", newline="\n") as fh:
        fh.write(svg)
    return out, svg_out


def order_study_map(name: str):
    """Step map for an order study on the unit oscillator."""
    system = harmonic_oscillator()
    if name == "euler_a":
        return euler_a(system)
    if name == "euler_b":
        return euler_b(system)
    if name == "sv":
        return stormer_verlet(system)
    if name == "htvi":
        return h_tvi_trapezoid(system)
    if name == "euler_a_composed":
        return symmetric_compose(euler_a(system))
    raise ValueError(f"unknown order method {name!r}")


@dataclass(frozen=True)
class OrderReport:
    method: str
    measured: float
    expected: float
    h_values: tuple
    errors: tuple


def run_order(cfg: ExperimentConfig) -> OrderReport:
    """Global-error slope of one method against the exact oscillator flow."""
    flow = order_study_map(cfg.method)
    state = PhaseState(np.array([1.0]), np.array([0.5]))
    result = convergence_order(flow, ho_exact_flow, state, ORDER_T_FINAL, ORDER_H_VALUES)
    return OrderReport(
        method=cfg.method,
        measured=result.slope,
        expected=EXPECTED_ORDERS[cfg.method],
        h_values=result.h_values,
        errors=result.errors,
    )


def run_adjoint_demo(cfg: ExperimentConfig) -> list[tuple[str, float]]:
    """Measured adjoint and symmetry defects around the averaged methods.

    The numbers tell one story: the exact right-Hamiltonian step is its own
    adjoint up to solver tolerance, the averaged right-Hamiltonian's adjoint
    is the left-type averaged map rather than itself, and composing the pair
    over half steps restores symmetry to roundoff.
    """
    eps = cfg.eps
    h = 0.3
    state = PhaseState(np.array([1.0]), np.array([0.0]))
    v_b = cubic_perturbation()
    acfg = AveragedConfig(epsilon=eps)
    avg_l = averaged_lagrangian_map(acfg, v_b)
    avg_h = averaged_hamiltonian_map(acfg, v_b)
    avg_left = averaged_left_hamiltonian_map(acfg, v_b)

    def pair_step(s, hh):
        return avg_left(avg_h(s, 0.5 * hh), 0.5 * hh)

    lines = [
        ("adjoint_defect exact right-hamiltonian", adjoint_defect(
            ho_exact_discrete_right_hamiltonian(), state, h)),
        ("adjoint_defect averaged right-hamiltonian", adjoint_defect(
            averaged_right_hamiltonian(acfg, v_b), state, h)),
        ("symmetry_defect averaged lagrangian", symmetry_defect(avg_l, state, h)),
        ("symmetry_defect averaged right-hamiltonian", symmetry_defect(avg_h, state, h)),
        ("symmetry_defect averaged left-hamiltonian", symmetry_defect(avg_left, state, h)),
        ("symmetry_defect right-then-left half steps", symmetry_defect(
            OneStepMap(pair_step, label="paired"), state, h)),
    ]
    return lines
