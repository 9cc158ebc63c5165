"""Phase-space states and separable mechanical systems.

Everything downstream works on systems of the form H(q, p) = p^T M^-1 p / 2 + V(q)
with a constant symmetric positive definite mass matrix, plus the perturbed
variant H = H_A + eps * V_B used by the averaging integrators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "PhaseState",
    "SeparableSystem",
    "ScalarPotential",
    "PerturbedSystem",
    "energy",
    "total_energy",
    "velocity_to_momentum",
    "momentum_to_velocity",
    "check_gradient",
    "harmonic_oscillator",
    "cubic_oscillator",
    "cubic_perturbation",
]


def _as_coord_array(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False)
class PhaseState:
    """A point (q, p) in phase space.

    Coordinates are stored as float arrays; scalars are promoted to length-1
    arrays so 1-dof systems can be written as PhaseState(1.0, 0.0).
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _as_coord_array(self.q)
        p = _as_coord_array(self.p)
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError(f"q and p must be 1-d arrays of equal length, got {q.shape} and {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("non-finite phase-space coordinates")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return self.q.size

    def as_array(self) -> np.ndarray:
        """Flatten to (q_1..q_n, p_1..p_n), the layout the solvers use."""
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_array(cls, z: np.ndarray) -> "PhaseState":
        z = np.asarray(z, dtype=float)
        n = z.size // 2
        return cls(z[:n], z[n:])

    def __repr__(self):
        return f"PhaseState(q={self.q!r}, p={self.p!r})"


@dataclass(frozen=True, eq=False)
class SeparableSystem:
    """Mechanical system H(q, p) = p^T M^-1 p / 2 + V(q).

    mass may be given as a scalar, a diagonal, or a full matrix; it must be
    symmetric positive definite.  grad_potential must return dV/dq.
    """

    mass: np.ndarray
    potential: Callable[[np.ndarray], float]
    grad_potential: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    mass_chol: np.ndarray = field(init=False, repr=False)
    mass_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        elif m.ndim == 1:
            m = np.diag(m)
        if m.shape[0] != m.shape[1]:
            raise ValueError("mass matrix must be square")
        if not np.allclose(m, m.T, atol=1e-12, rtol=0.0):
            raise ValueError("mass matrix must be symmetric")
        try:
            chol = np.linalg.cholesky(m)
        except np.linalg.LinAlgError as err:
            raise ValueError("mass matrix must be positive definite") from err
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "mass_chol", chol)
        object.__setattr__(self, "mass_inv", np.linalg.inv(m))

    @property
    def dim(self) -> int:
        return self.mass.shape[0]


@dataclass(frozen=True)
class ScalarPotential:
    """A potential with its gradient, used for perturbation terms."""

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PerturbedSystem:
    """H = H_A + eps * V_B(q), with H_A an exactly solvable separable part."""

    base: SeparableSystem
    perturbation: ScalarPotential
    epsilon: float

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0.0):
            raise ValueError("epsilon must be finite and >= 0")


def energy(system: SeparableSystem, state: PhaseState) -> float:
    """H(q, p) = p^T M^-1 p / 2 + V(q)."""
    kinetic = 0.5 * float(state.p @ (system.mass_inv @ state.p))
    return kinetic + float(system.potential(state.q))


def total_energy(system: PerturbedSystem, state: PhaseState) -> float:
    """Energy of the perturbed system; reduces exactly to the base at eps = 0."""
    return energy(system.base, state) + system.epsilon * float(system.perturbation.value(state.q))


def velocity_to_momentum(system: SeparableSystem, q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """p = M v.  q is accepted for signature symmetry but unused here."""
    return system.mass @ _as_coord_array(v)


def momentum_to_velocity(system: SeparableSystem, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """v = M^-1 p."""
    return system.mass_inv @ _as_coord_array(p)


def check_gradient(system: SeparableSystem, q: np.ndarray, delta: float = 1e-5) -> float:
    """Max relative deviation of grad_potential from a central difference of potential."""
    q = _as_coord_array(q)
    g = _as_coord_array(system.grad_potential(q))
    worst = 0.0
    for i in range(q.size):
        e = np.zeros_like(q)
        e[i] = delta
        fd = (float(system.potential(q + e)) - float(system.potential(q - e))) / (2.0 * delta)
        scale = max(abs(g[i]), abs(fd), 1.0)
        worst = max(worst, abs(g[i] - fd) / scale)
    return worst


def harmonic_oscillator() -> SeparableSystem:
    """Unit-mass, unit-frequency oscillator: H = (p^2 + q^2) / 2."""
    return SeparableSystem(
        mass=1.0,
        potential=lambda q: 0.5 * float(q @ q),
        grad_potential=lambda q: q.copy(),
        label="harmonic-oscillator",
    )


def cubic_oscillator(eps: float) -> SeparableSystem:
    """Oscillator with a cubic term: V(q) = q^2 / 2 + eps * q^3 / 3."""
    return SeparableSystem(
        mass=1.0,
        potential=lambda q: 0.5 * float(q @ q) + eps * float(q @ (q * q)) / 3.0,
        grad_potential=lambda q: q + eps * q * q,
        label=f"cubic-oscillator(eps={eps})",
    )


def cubic_perturbation() -> ScalarPotential:
    """V_B(q) = q^3 / 3, the perturbation used throughout the resonance study."""
    return ScalarPotential(
        value=lambda q: float(q @ (q * q)) / 3.0,
        grad=lambda q: q * q,
    )
