"""Pure-Python experiment drivers: resonance sweeps and oscillator-chain runs.

Fallback twin of the compiled module genvi._speedups; genvi.kernels picks one
at import time.  Both implement the same arithmetic in the same order, down
to the Newton damping schedule, so backends agree to the last bit and the
CSV outputs stay deterministic either way.

Only the 1-dof cubic perturbation V_B = q^3/3 is wired in here; the general
callback-driven machinery stays in the library modules.  Scalars are plain
floats on purpose: these loops dominate the experiment runtimes.
"""

from __future__ import annotations

import math

__all__ = [
    "resonance_sweep",
    "fpu_sv_trajectory",
    "fpu_imex_trajectory",
    "fpu_htvi_trajectory",
]

_DAMPING_FLOOR = 1e-10

# resonance_sweep variants
VARIANT_EXACT_DL = 0
VARIANT_EXACT_DH = 1
VARIANT_AVG_L = 2
VARIANT_AVG_H = 3


# -- one-dimensional resonance sweeps ----------------------------------------

def _avg_l_d1(q0, q1, h, eps, weights, nodes):
    ch, sh = math.cos(h), math.sin(h)
    c1 = q0
    c2 = (q1 - q0 * ch) / sh
    acc = 0.0
    for bi, ci in zip(weights, nodes):
        t = ci * h
        qa = c1 * math.cos(t) + c2 * math.sin(t)
        acc += bi * (qa * qa) * (math.cos(t) - ch * math.sin(t) / sh)
    return (q0 * ch - q1) / sh - eps * h * acc


def _avg_l_d2(q0, q1, h, eps, weights, nodes):
    ch, sh = math.cos(h), math.sin(h)
    c1 = q0
    c2 = (q1 - q0 * ch) / sh
    acc = 0.0
    for bi, ci in zip(weights, nodes):
        t = ci * h
        qa = c1 * math.cos(t) + c2 * math.sin(t)
        acc += bi * (qa * qa) * (math.sin(t) / sh)
    return (q1 * ch - q0) / sh - eps * h * acc


def _avg_h_d1(q0, p1, h, eps, weights, nodes):
    ch, sh, th = math.cos(h), math.sin(h), math.tan(h)
    c1 = q0
    c2 = (p1 + q0 * sh) / ch
    acc = 0.0
    for bi, ci in zip(weights, nodes):
        t = ci * h
        qa = c1 * math.cos(t) + c2 * math.sin(t)
        acc += bi * (qa * qa) * (math.cos(t) + sh * math.sin(t) / ch)
    return p1 / ch + q0 * th + eps * h * acc


def _avg_h_d2(q0, p1, h, eps, weights, nodes):
    ch, sh, th = math.cos(h), math.sin(h), math.tan(h)
    c1 = q0
    c2 = (p1 + q0 * sh) / ch
    acc = 0.0
    for bi, ci in zip(weights, nodes):
        t = ci * h
        qa = c1 * math.cos(t) + c2 * math.sin(t)
        acc += bi * (qa * qa) * (math.sin(t) / ch)
    return q0 / ch + p1 * th + eps * h * acc


def _newton_scalar(kind, q0, p0, h, eps, weights, nodes, tol, max_iter, fd_step):
    """Damped Newton on the implicit half of an averaged step.

    kind 2: unknown q1, residual p0 + D1 L_d; kind 3: unknown p1, residual
    D1 H_d+ - p0.  Returns (ok, root).  Mirrors rootfind.newton_solve_full
    restricted to one unknown: forward-difference derivative, halving line
    search with floor, no decrease demanded at the floor.
    """
    if kind == VARIANT_AVG_L:
        x = q0 + h * p0

        def res(y):
            return p0 + _avg_l_d1(q0, y, h, eps, weights, nodes)
    else:
        x = p0

        def res(y):
            return _avg_h_d1(q0, y, h, eps, weights, nodes) - p0

    r = res(x)
    if not math.isfinite(r):
        return False, x
    rnorm = abs(r)
    for _ in range(max_iter):
        if rnorm <= tol:
            return True, x
        r_step = res(x + fd_step)
        if not math.isfinite(r_step):
            return False, x
        jac = (r_step - r) / fd_step
        if jac == 0.0 or not math.isfinite(jac):
            return False, x
        delta = r / jac
        if not math.isfinite(delta):
            return False, x
        lam = 1.0
        x_try = x
        r_try = r
        finite_try = True
        while True:
            x_try = x - lam * delta
            r_try = res(x_try)
            finite_try = math.isfinite(r_try)
            if finite_try and abs(r_try) < rnorm:
                break
            if lam <= _DAMPING_FLOOR:
                break
            lam *= 0.5
        if not finite_try:
            return False, x
        x = x_try
        r = r_try
        rnorm = abs(r)
    return rnorm <= tol, x


def resonance_sweep(
    variant,
    eps,
    q0,
    p0,
    h_values,
    n_steps,
    substitute,
    weights,
    nodes,
    tol,
    max_iter,
    fd_step,
    guard,
):
    """Max |H - H0| per step size for one method of the resonance experiment.

    variant 0/1 run the exact closed-form oscillator steps (eps enters only
    the energy), 2/3 the averaged methods with V_B = q^3/3.  Any non-finite
    state or failed solve reports substitute for that h, and so does a step
    size within guard of the variant's singular set (sin h = 0 for the
    position-boundary methods, cos h = 0 for the momentum-boundary ones):
    there the generating function defines no method, even though the float
    formulas can evaluate to something finite.
    """
    metrics = []
    for h, n in zip(h_values, n_steps):
        if variant in (VARIANT_EXACT_DL, VARIANT_AVG_L) and abs(math.sin(h)) <= guard:
            metrics.append(substitute)
            continue
        if variant in (VARIANT_EXACT_DH, VARIANT_AVG_H) and abs(math.cos(h)) <= guard:
            metrics.append(substitute)
            continue
        q, p = q0, p0
        e0 = 0.5 * (q * q + p * p) + eps * q * q * q / 3.0
        worst = 0.0
        failed = False
        for _ in range(n):
            if variant == VARIANT_EXACT_DL:
                sh = math.sin(h)
                q1 = q * math.cos(h) + p * sh
                p1 = q1 * (math.cos(h) / sh) - q * (1.0 / sh)
            elif variant == VARIANT_EXACT_DH:
                ch = math.cos(h)
                p1 = p * ch - q * math.sin(h)
                q1 = p1 * (math.sin(h) / ch) + q / ch
            elif variant == VARIANT_AVG_L:
                ok, q1 = _newton_scalar(
                    VARIANT_AVG_L, q, p, h, eps, weights, nodes, tol, max_iter, fd_step
                )
                if not ok:
                    failed = True
                    break
                p1 = _avg_l_d2(q, q1, h, eps, weights, nodes)
            else:
                ok, p1 = _newton_scalar(
                    VARIANT_AVG_H, q, p, h, eps, weights, nodes, tol, max_iter, fd_step
                )
                if not ok:
                    failed = True
                    break
                q1 = _avg_h_d2(q, p1, h, eps, weights, nodes)
            q, p = q1, p1
            energy = 0.5 * (q * q + p * p) + eps * q * q * q / 3.0
            if not math.isfinite(energy):
                failed = True
                break
            diff = abs(energy - e0)
            if diff > worst:
                worst = diff
        if failed or not math.isfinite(worst):
            metrics.append(substitute)
        else:
            metrics.append(worst)
    return metrics


# -- oscillator-chain trajectories -------------------------------------------

def _chain_grad(omega, m, quartic, q, out):
    """grad of (omega^2/4) sum (q_hi - q_lo)^2 + quartic * sum d^4 into out."""
    w = 0.5 * omega * omega
    for j in range(m):
        lo = 2 * j
        hi = lo + 1
        out[lo] = w * (q[lo] - q[hi])
        out[hi] = w * (q[hi] - q[lo])
    for i in range(m + 1):
        upper = q[2 * i] if i < m else 0.0
        lower = q[2 * i - 1] if i >= 1 else 0.0
        d = upper - lower
        f = 4.0 * quartic * d * d * d
        if i < m:
            out[2 * i] += f
        if i >= 1:
            out[2 * i - 1] -= f
    return out


def _chain_energy(omega, m, quartic, q, p):
    kinetic = 0.0
    for i in range(2 * m):
        kinetic += p[i] * p[i]
    stiff = 0.0
    for j in range(m):
        d = q[2 * j + 1] - q[2 * j]
        stiff += d * d
    soft = 0.0
    for i in range(m + 1):
        upper = q[2 * i] if i < m else 0.0
        lower = q[2 * i - 1] if i >= 1 else 0.0
        d = upper - lower
        soft += d * d * d * d
    return 0.5 * kinetic + 0.25 * omega * omega * stiff + quartic * soft


def _mode_energies(omega, m, q, p):
    root_half = 1.0 / math.sqrt(2.0)
    modes = []
    for j in range(m):
        x = (q[2 * j + 1] - q[2 * j]) * root_half
        y = (p[2 * j + 1] - p[2 * j]) * root_half
        modes.append(0.5 * (y * y + omega * omega * x * x))
    return modes


def _record(times, modes_out, total_out, energy_out, omega, m, quartic, q, p, t):
    modes = _mode_energies(omega, m, q, p)
    total = 0.0
    for v in modes:
        total += v
    times.append(t)
    modes_out.append(modes)
    total_out.append(total)
    energy_out.append(_chain_energy(omega, m, quartic, q, p))


def fpu_sv_trajectory(omega, m, quartic, q0, p0, h, n_steps, stride):
    """Position-explicit leapfrog run; rows at step 0, every stride, and the end."""
    n = 2 * m
    q = [float(v) for v in q0]
    p = [float(v) for v in p0]
    g0 = [0.0] * n
    g1 = [0.0] * n
    times, modes_out, total_out, energy_out = [], [], [], []
    _record(times, modes_out, total_out, energy_out, omega, m, quartic, q, p, 0.0)
    for k in range(1, n_steps + 1):
        _chain_grad(omega, m, quartic, q, g0)
        for i in range(n):
            q[i] = q[i] + h * p[i] - 0.5 * h * h * g0[i]
        _chain_grad(omega, m, quartic, q, g1)
        for i in range(n):
            p[i] = p[i] - 0.5 * h * (g0[i] + g1[i])
        if k % stride == 0 or k == n_steps:
            _record(times, modes_out, total_out, energy_out, omega, m, quartic, q, p, k * h)
    return times, modes_out, total_out, energy_out


def _soft_grad_only(omega, m, quartic, q, out):
    for i in range(2 * m):
        out[i] = 0.0
    for i in range(m + 1):
        upper = q[2 * i] if i < m else 0.0
        lower = q[2 * i - 1] if i >= 1 else 0.0
        d = upper - lower
        f = 4.0 * quartic * d * d * d
        if i < m:
            out[2 * i] += f
        if i >= 1:
            out[2 * i - 1] -= f
    return out


def _stiff_grad_only(omega, m, q, out):
    w = 0.5 * omega * omega
    for j in range(m):
        lo = 2 * j
        hi = lo + 1
        out[lo] = w * (q[lo] - q[hi])
        out[hi] = w * (q[hi] - q[lo])
    return out


def fpu_imex_trajectory(omega, m, quartic, q0, p0, h, n_steps, stride, a_inv, b_mat):
    """Half soft kick, implicit midpoint on the stiff part, half soft kick.

    a_inv and b_mat are the precomputed midpoint matrices for this h
    (inverse of I + h^2 K / 4, and I - h^2 K / 4), row-major nested
    sequences; the kernel only does the matvecs.
    """
    n = 2 * m
    q = [float(v) for v in q0]
    p = [float(v) for v in p0]
    ai = [[float(a_inv[i][j]) for j in range(n)] for i in range(n)]
    bm = [[float(b_mat[i][j]) for j in range(n)] for i in range(n)]
    soft = [0.0] * n
    rhs = [0.0] * n
    q1 = [0.0] * n
    mid = [0.0] * n
    kg = [0.0] * n
    times, modes_out, total_out, energy_out = [], [], [], []
    _record(times, modes_out, total_out, energy_out, omega, m, quartic, q, p, 0.0)
    for k in range(1, n_steps + 1):
        _soft_grad_only(omega, m, quartic, q, soft)
        for i in range(n):
            p[i] = p[i] - 0.5 * h * soft[i]
        for i in range(n):
            acc = 0.0
            row = bm[i]
            for j in range(n):
                acc += row[j] * q[j]
            rhs[i] = acc + h * p[i]
        for i in range(n):
            acc = 0.0
            row = ai[i]
            for j in range(n):
                acc += row[j] * rhs[j]
            q1[i] = acc
        for i in range(n):
            mid[i] = q[i] + q1[i]
        _stiff_grad_only(omega, m, mid, kg)
        for i in range(n):
            p[i] = p[i] - 0.5 * h * kg[i]
        for i in range(n):
            q[i] = q1[i]
        _soft_grad_only(omega, m, quartic, q, soft)
        for i in range(n):
            p[i] = p[i] - 0.5 * h * soft[i]
        if k % stride == 0 or k == n_steps:
            _record(times, modes_out, total_out, energy_out, omega, m, quartic, q, p, k * h)
    return times, modes_out, total_out, energy_out


def _solve_dense(a, b, n):
    """In-place Gaussian elimination with partial pivoting; returns None if singular."""
    for col in range(n):
        piv = col
        best = abs(a[col][col])
        for r in range(col + 1, n):
            mag = abs(a[r][col])
            if mag > best:
                best = mag
                piv = r
        if best == 0.0 or not math.isfinite(best):
            return None
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
        inv = 1.0 / a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] * inv
            if factor != 0.0:
                arow = a[r]
                acol = a[col]
                for cc in range(col, n):
                    arow[cc] -= factor * acol[cc]
                b[r] -= factor * b[col]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        acc = b[r]
        arow = a[r]
        for cc in range(r + 1, n):
            acc -= arow[cc] * x[cc]
        x[r] = acc / arow[r]
        if not math.isfinite(x[r]):
            return None
    return x


def fpu_htvi_trajectory(omega, m, quartic, q0, p0, h, n_steps, stride, tol, max_iter, fd_step):
    """Trapezoidal Type II run: explicit position, momentum by damped Newton.

    Residual r(p1) = p1 - p0 + (h/2)(g(q0) + g(q0 + h p1)); forward-difference
    Jacobian, same damping schedule as the scalar solver.  Raises RuntimeError
    on solver failure; the chain runs have no substitution convention.
    """
    n = 2 * m
    q = [float(v) for v in q0]
    p = [float(v) for v in p0]
    g0 = [0.0] * n
    gx = [0.0] * n
    qx = [0.0] * n
    times, modes_out, total_out, energy_out = [], [], [], []
    _record(times, modes_out, total_out, energy_out, omega, m, quartic, q, p, 0.0)

    def residual(p1, out):
        for i in range(n):
            qx[i] = q[i] + h * p1[i]
        _chain_grad(omega, m, quartic, qx, gx)
        finite = True
        for i in range(n):
            out[i] = p1[i] - p[i] + 0.5 * h * (g0[i] + gx[i])
            if not math.isfinite(out[i]):
                finite = False
        return finite

    for k in range(1, n_steps + 1):
        _chain_grad(omega, m, quartic, q, g0)
        x = [p[i] - h * g0[i] for i in range(n)]
        r = [0.0] * n
        if not residual(x, r):
            raise RuntimeError(f"non-finite residual at step {k}")
        rnorm = max(abs(v) for v in r)
        converged = rnorm <= tol
        for _ in range(max_iter):
            if rnorm <= tol:
                converged = True
                break
            jac = [[0.0] * n for _ in range(n)]
            r_step = [0.0] * n
            ok = True
            for col in range(n):
                saved = x[col]
                x[col] = saved + fd_step
                if not residual(x, r_step):
                    ok = False
                x[col] = saved
                if not ok:
                    break
                for row in range(n):
                    jac[row][col] = (r_step[row] - r[row]) / fd_step
            if not ok:
                raise RuntimeError(f"non-finite Jacobian at step {k}")
            delta = _solve_dense(jac, list(r), n)
            if delta is None:
                raise RuntimeError(f"singular Jacobian at step {k}")
            lam = 1.0
            x_try = x
            r_try = list(r)
            finite_try = True
            while True:
                x_try = [x[i] - lam * delta[i] for i in range(n)]
                finite_try = residual(x_try, r_try)
                if finite_try and max(abs(v) for v in r_try) < rnorm:
                    break
                if lam <= _DAMPING_FLOOR:
                    break
                lam *= 0.5
            if not finite_try:
                raise RuntimeError(f"non-finite residual along Newton step at {k}")
            x = x_try
            r = list(r_try)
            rnorm = max(abs(v) for v in r)
        else:
            converged = rnorm <= tol
        if not converged:
            raise RuntimeError(f"no Newton convergence at step {k} (residual {rnorm:.3e})")
        for i in range(n):
            p1i = x[i]
            q[i] = q[i] + h * p[i] - 0.5 * h * h * g0[i]
            p[i] = p1i
        if k % stride == 0 or k == n_steps:
            _record(times, modes_out, total_out, energy_out, omega, m, quartic, q, p, k * h)
    return times, modes_out, total_out, energy_out
