"""Stiff-spring oscillator chain with quartic soft coupling.

m stiff springs alternate with quartic soft springs on a line with fixed
ends; coordinates are the 2m displacements of the stiff-spring endpoints.
With q_0 = q_{2m+1} = 0 implied,

    H(q, p) = 1/2 sum p_i^2 + (omega^2/4) sum_j (q_{2j} - q_{2j-1})^2
              + sum_{i=0}^{m} (q_{2i+1} - q_{2i})^4.

The interesting observable is the energy of each stiff mode,

    x_j = (q_{2j} - q_{2j-1})/sqrt2,  y_j = (p_{2j} - p_{2j-1})/sqrt2,
    I_j = (y_j^2 + omega^2 x_j^2)/2,

whose sum is an adiabatic invariant: good integrators hold sum_j I_j to a
slow drift over long times even at step sizes with omega h = O(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PhaseState, SeparableSystem
from .genfunc import OneStepMap

__all__ = [
    "FpuSystem",
    "OscillatoryEnergy",
    "fpu_energy",
    "oscillatory_energy",
    "initial_state",
    "imex_step",
    "imex_map",
]


@dataclass(frozen=True)
class FpuSystem:
    """Chain parameters: stiff frequency omega and number of stiff springs m.

    quartic_strength scales the soft coupling; 1.0 is the model, 0.0 leaves
    the pure linear stiff system (used to validate the implicit-midpoint
    substep of the IMEX scheme).
    """

    omega: float
    m: int
    quartic_strength: float = 1.0

    def __post_init__(self):
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise ValueError("omega must be positive and finite")
        if self.m < 1:
            raise ValueError("need at least one stiff spring")

    @property
    def dim(self) -> int:
        return 2 * self.m

    def stiffness(self) -> np.ndarray:
        """K with grad of the stiff potential = K q."""
        k = np.zeros((self.dim, self.dim))
        w = 0.5 * self.omega**2
        for j in range(self.m):
            lo, hi = 2 * j, 2 * j + 1
            k[lo, lo] += w
            k[hi, hi] += w
            k[lo, hi] -= w
            k[hi, lo] -= w
        return k

    def _soft_diffs(self, q: np.ndarray) -> np.ndarray:
        """Elongations of the m + 1 quartic springs, fixed ends implied."""
        d = np.empty(self.m + 1)
        for i in range(self.m + 1):
            upper = q[2 * i] if i < self.m else 0.0
            lower = q[2 * i - 1] if i >= 1 else 0.0
            d[i] = upper - lower
        return d

    def stiff_potential(self, q: np.ndarray) -> float:
        diffs = q[1::2] - q[0::2]
        return 0.25 * self.omega**2 * float(diffs @ diffs)

    def soft_potential(self, q: np.ndarray) -> float:
        d = self._soft_diffs(q)
        return self.quartic_strength * float(np.sum(d**4))

    def soft_grad(self, q: np.ndarray) -> np.ndarray:
        g = np.zeros_like(q)
        d = self._soft_diffs(q)
        f = 4.0 * self.quartic_strength * d**3
        for i in range(self.m + 1):
            if i < self.m:
                g[2 * i] += f[i]
            if i >= 1:
                g[2 * i - 1] -= f[i]
        return g

    def potential(self, q: np.ndarray) -> float:
        return self.stiff_potential(q) + self.soft_potential(q)

    def grad_potential(self, q: np.ndarray) -> np.ndarray:
        return self.stiffness() @ q + self.soft_grad(q)

    def as_separable(self) -> SeparableSystem:
        """View as a unit-mass separable system, for the generic integrators."""
        return SeparableSystem(
            mass=np.eye(self.dim),
            potential=self.potential,
            grad_potential=self.grad_potential,
            label=f"fpu(omega={self.omega},m={self.m})",
        )


def fpu_energy(system: FpuSystem, state: PhaseState) -> float:
    return 0.5 * float(state.p @ state.p) + system.potential(state.q)


@dataclass(frozen=True)
class OscillatoryEnergy:
    """Stiff-mode energies I_1..I_m and their sum."""

    per_spring: np.ndarray
    total: float


def oscillatory_energy(system: FpuSystem, state: PhaseState) -> OscillatoryEnergy:
    root_half = 1.0 / math.sqrt(2.0)
    x = (state.q[1::2] - state.q[0::2]) * root_half
    y = (state.p[1::2] - state.p[0::2]) * root_half
    per = 0.5 * (y * y + system.omega**2 * x * x)
    return OscillatoryEnergy(per_spring=per, total=float(np.sum(per)))


def initial_state(system: FpuSystem) -> PhaseState:
    """First stiff spring excited: in mean/difference coordinates the slow
    mode gets displacement 1 and velocity 1, the fast mode displacement
    1/omega and velocity 1; everything else starts at rest."""
    q = np.zeros(system.dim)
    p = np.zeros(system.dim)
    root_half = 1.0 / math.sqrt(2.0)
    mean_q, diff_q = 1.0, 1.0 / system.omega
    mean_p, diff_p = 1.0, 1.0
    q[0] = (mean_q - diff_q) * root_half
    q[1] = (mean_q + diff_q) * root_half
    p[0] = (mean_p - diff_p) * root_half
    p[1] = (mean_p + diff_p) * root_half
    return PhaseState(q, p)


def _midpoint_matrices(system: FpuSystem, h: float):
    k = system.stiffness()
    eye = np.eye(system.dim)
    a = eye + 0.25 * h * h * k
    return k, np.linalg.inv(a), eye - 0.25 * h * h * k


def imex_step(system: FpuSystem, state: PhaseState, h: float) -> PhaseState:
    """One IMEX step: half soft kick, implicit midpoint on the stiff linear
    part, half soft kick.

    The midpoint substep solves (I + h^2 K / 4) q1 = (I - h^2 K / 4) q0 + h p,
    a constant SPD system for fixed h.  Symmetric and symplectic: both
    substeps are, and the composition is palindromic.
    """
    k, a_inv, b_mat = _midpoint_matrices(system, h)
    p_in = state.p - 0.5 * h * system.soft_grad(state.q)
    q1 = a_inv @ (b_mat @ state.q + h * p_in)
    p_out = p_in - 0.5 * h * (k @ (state.q + q1))
    p1 = p_out - 0.5 * h * system.soft_grad(q1)
    return PhaseState(q1, p1)


def imex_map(system: FpuSystem) -> OneStepMap:
    """IMEX stepper that factors the midpoint matrix once per step size."""
    cache: dict[float, tuple] = {}

    def step(state, h):
        mats = cache.get(h)
        if mats is None:
            mats = _midpoint_matrices(system, h)
            cache[h] = mats
        k, a_inv, b_mat = mats
        p_in = state.p - 0.5 * h * system.soft_grad(state.q)
        q1 = a_inv @ (b_mat @ state.q + h * p_in)
        p_out = p_in - 0.5 * h * (k @ (state.q + q1))
        p1 = p_out - 0.5 * h * system.soft_grad(q1)
        return PhaseState(q1, p1)

    return OneStepMap(step, label="imex")
