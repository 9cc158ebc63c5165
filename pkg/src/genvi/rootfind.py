"""Damped Newton iteration with finite-difference Jacobians.

All implicit relations in the package (implicit step maps, Legendre-transform
inversions, adjoint maps) funnel through newton_solve, so its defaults pin
the numerical behaviour of everything above it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "SolveSettings",
    "NewtonInfo",
    "RootfindError",
    "NonFiniteResidual",
    "SingularJacobian",
    "MaxIterExceeded",
    "newton_solve",
    "newton_solve_full",
]

DAMPING_FLOOR = 1e-10


@dataclass(frozen=True)
class SolveSettings:
    tol: float = 1e-12
    max_iter: int = 50
    fd_step: float = 1e-7


@dataclass(frozen=True)
class NewtonInfo:
    iterations: int
    residual_norm: float
    converged: bool


class RootfindError(Exception):
    """Base class for solver failures."""


class NonFiniteResidual(RootfindError):
    def __init__(self, message: str, point: np.ndarray):
        super().__init__(message)
        self.point = point


class SingularJacobian(RootfindError):
    def __init__(self, message: str, point: np.ndarray):
        super().__init__(message)
        self.point = point


class MaxIterExceeded(RootfindError):
    def __init__(self, message: str, last_iterate: np.ndarray, residual_norm: float):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual_norm = residual_norm


def _eval(residual: Callable, x: np.ndarray) -> np.ndarray:
    r = np.atleast_1d(np.asarray(residual(x), dtype=float))
    if not np.all(np.isfinite(r)):
        raise NonFiniteResidual(f"residual non-finite at {x!r}", x)
    return r


def _fd_jacobian(residual: Callable, x: np.ndarray, r0: np.ndarray, step: float) -> np.ndarray:
    n = x.size
    jac = np.empty((r0.size, n))
    for j in range(n):
        xj = x.copy()
        xj[j] += step
        jac[:, j] = (_eval(residual, xj) - r0) / step
    return jac


def newton_solve_full(
    residual: Callable[[np.ndarray], np.ndarray],
    guess,
    settings: Optional[SolveSettings] = None,
) -> tuple[np.ndarray, NewtonInfo]:
    """Solve residual(x) = 0; returns (x, NewtonInfo).

    Forward-difference Jacobian, Newton steps damped by halving until the
    residual norm decreases (floor DAMPING_FLOOR on the damping factor).
    Raises MaxIterExceeded / SingularJacobian / NonFiniteResidual on failure.
    """
    st = settings or SolveSettings()
    x = np.atleast_1d(np.asarray(guess, dtype=float)).astype(float).copy()
    r = _eval(residual, x)
    rnorm = float(np.max(np.abs(r)))
    for it in range(st.max_iter):
        if rnorm <= st.tol:
            return x, NewtonInfo(iterations=it, residual_norm=rnorm, converged=True)
        jac = _fd_jacobian(residual, x, r, st.fd_step)
        try:
            delta = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as err:
            raise SingularJacobian(f"Jacobian singular at {x!r}", x) from err
        if not np.all(np.isfinite(delta)):
            raise SingularJacobian(f"Jacobian effectively singular at {x!r}", x)
        lam = 1.0
        while True:
            x_try = x - lam * delta
            try:
                r_try = _eval(residual, x_try)
            except NonFiniteResidual:
                r_try = None
            if r_try is not None and float(np.max(np.abs(r_try))) < rnorm:
                break
            if lam <= DAMPING_FLOOR:
                break
            lam *= 0.5
        if r_try is None:
            raise NonFiniteResidual(f"residual non-finite along Newton step from {x!r}", x)
        x = x_try
        r = r_try
        rnorm = float(np.max(np.abs(r)))
    if rnorm <= st.tol:
        return x, NewtonInfo(iterations=st.max_iter, residual_norm=rnorm, converged=True)
    raise MaxIterExceeded(
        f"no convergence in {st.max_iter} iterations (residual {rnorm:.3e})", x, rnorm
    )


def newton_solve(
    residual: Callable[[np.ndarray], np.ndarray],
    guess,
    settings: Optional[SolveSettings] = None,
) -> np.ndarray:
    """newton_solve_full without the diagnostics."""
    x, _ = newton_solve_full(residual, guess, settings)
    return x
