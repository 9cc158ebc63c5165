# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of genvi._pykernels; same functions, same arithmetic order.

Keep every numeric expression textually parallel with the pure module: the
backend parity tests compare outputs bit for bit.
"""

import numpy as np

from libc.math cimport cos, sin, tan, fabs, sqrt, isfinite

__all__ = [
    "resonance_sweep",
    "fpu_sv_trajectory",
    "fpu_imex_trajectory",
    "fpu_htvi_trajectory",
]

cdef double _DAMPING_FLOOR = 1e-10

VARIANT_EXACT_DL = 0
VARIANT_EXACT_DH = 1
VARIANT_AVG_L = 2
VARIANT_AVG_H = 3


# -- one-dimensional resonance sweeps ----------------------------------------

cdef double _avg_l_d1(double q0, double q1, double h, double eps,
                      double[::1] weights, double[::1] nodes):
    cdef double ch = cos(h)
    cdef double sh = sin(h)
    cdef double c1 = q0
    cdef double c2 = (q1 - q0 * ch) / sh
    cdef double acc = 0.0
    cdef double t, qa
    cdef Py_ssize_t i
    for i in range(weights.shape[0]):
        t = nodes[i] * h
        qa = c1 * cos(t) + c2 * sin(t)
        acc += weights[i] * (qa * qa) * (cos(t) - ch * sin(t) / sh)
    return (q0 * ch - q1) / sh - eps * h * acc


cdef double _avg_l_d2(double q0, double q1, double h, double eps,
                      double[::1] weights, double[::1] nodes):
    cdef double ch = cos(h)
    cdef double sh = sin(h)
    cdef double c1 = q0
    cdef double c2 = (q1 - q0 * ch) / sh
    cdef double acc = 0.0
    cdef double t, qa
    cdef Py_ssize_t i
    for i in range(weights.shape[0]):
        t = nodes[i] * h
        qa = c1 * cos(t) + c2 * sin(t)
        acc += weights[i] * (qa * qa) * (sin(t) / sh)
    return (q1 * ch - q0) / sh - eps * h * acc


cdef double _avg_h_d1(double q0, double p1, double h, double eps,
                      double[::1] weights, double[::1] nodes):
    cdef double ch = cos(h)
    cdef double sh = sin(h)
    cdef double th = tan(h)
    cdef double c1 = q0
    cdef double c2 = (p1 + q0 * sh) / ch
    cdef double acc = 0.0
    cdef double t, qa
    cdef Py_ssize_t i
    for i in range(weights.shape[0]):
        t = nodes[i] * h
        qa = c1 * cos(t) + c2 * sin(t)
        acc += weights[i] * (qa * qa) * (cos(t) + sh * sin(t) / ch)
    return p1 / ch + q0 * th + eps * h * acc


cdef double _avg_h_d2(double q0, double p1, double h, double eps,
                      double[::1] weights, double[::1] nodes):
    cdef double ch = cos(h)
    cdef double sh = sin(h)
    cdef double th = tan(h)
    cdef double c1 = q0
    cdef double c2 = (p1 + q0 * sh) / ch
    cdef double acc = 0.0
    cdef double t, qa
    cdef Py_ssize_t i
    for i in range(weights.shape[0]):
        t = nodes[i] * h
        qa = c1 * cos(t) + c2 * sin(t)
        acc += weights[i] * (qa * qa) * (sin(t) / ch)
    return q0 / ch + p1 * th + eps * h * acc


cdef int _newton_scalar(int kind, double q0, double p0, double h, double eps,
                        double[::1] weights, double[::1] nodes,
                        double tol, int max_iter, double fd_step,
                        double* root):
    cdef double x, r, rnorm, r_step, jac, delta, lam, x_try, r_try
    cdef bint finite_try
    cdef int it
    if kind == 2:
        x = q0 + h * p0
        r = p0 + _avg_l_d1(q0, x, h, eps, weights, nodes)
    else:
        x = p0
        r = _avg_h_d1(q0, x, h, eps, weights, nodes) - p0
    if not isfinite(r):
        root[0] = x
        return 0
    rnorm = fabs(r)
    for it in range(max_iter):
        if rnorm <= tol:
            root[0] = x
            return 1
        if kind == 2:
            r_step = p0 + _avg_l_d1(q0, x + fd_step, h, eps, weights, nodes)
        else:
            r_step = _avg_h_d1(q0, x + fd_step, h, eps, weights, nodes) - p0
        if not isfinite(r_step):
            root[0] = x
            return 0
        jac = (r_step - r) / fd_step
        if jac == 0.0 or not isfinite(jac):
            root[0] = x
            return 0
        delta = r / jac
        if not isfinite(delta):
            root[0] = x
            return 0
        lam = 1.0
        x_try = x
        r_try = r
        finite_try = True
        while True:
            x_try = x - lam * delta
            if kind == 2:
                r_try = p0 + _avg_l_d1(q0, x_try, h, eps, weights, nodes)
            else:
                r_try = _avg_h_d1(q0, x_try, h, eps, weights, nodes) - p0
            finite_try = isfinite(r_try)
            if finite_try and fabs(r_try) < rnorm:
                break
            if lam <= _DAMPING_FLOOR:
                break
            lam *= 0.5
        if not finite_try:
            root[0] = x
            return 0
        x = x_try
        r = r_try
        rnorm = fabs(r)
    root[0] = x
    return 1 if rnorm <= tol else 0


def resonance_sweep(variant, eps, q0, p0, h_values, n_steps, substitute,
                    weights, nodes, tol, max_iter, fd_step, guard):
    """Compiled twin of _pykernels.resonance_sweep."""
    cdef int var = variant
    cdef double ceps = eps
    cdef double cq0 = q0
    cdef double cp0 = p0
    cdef double csub = substitute
    cdef double ctol = tol
    cdef int cmax = max_iter
    cdef double cfd = fd_step
    cdef double cguard = guard
    hv_arr = np.ascontiguousarray(h_values, dtype=np.float64)
    ns_arr = np.ascontiguousarray(n_steps, dtype=np.int64)
    w_arr = np.ascontiguousarray(weights, dtype=np.float64)
    nd_arr = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef double[::1] hv = hv_arr
    cdef long long[::1] ns = ns_arr
    cdef double[::1] w = w_arr
    cdef double[::1] nd = nd_arr
    cdef Py_ssize_t idx
    cdef long long n, k
    cdef double h, q, p, e0, worst, energy, diff, q1, p1, sh, ch
    cdef bint failed
    cdef int ok
    metrics = []
    for idx in range(hv.shape[0]):
        h = hv[idx]
        n = ns[idx]
        if (var == 0 or var == 2) and fabs(sin(h)) <= cguard:
            metrics.append(csub)
            continue
        if (var == 1 or var == 3) and fabs(cos(h)) <= cguard:
            metrics.append(csub)
            continue
        q = cq0
        p = cp0
        e0 = 0.5 * (q * q + p * p) + ceps * q * q * q / 3.0
        worst = 0.0
        failed = False
        for k in range(n):
            if var == 0:
                sh = sin(h)
                q1 = q * cos(h) + p * sh
                p1 = q1 * (cos(h) / sh) - q * (1.0 / sh)
            elif var == 1:
                ch = cos(h)
                p1 = p * ch - q * sin(h)
                q1 = p1 * (sin(h) / ch) + q / ch
            elif var == 2:
                ok = _newton_scalar(2, q, p, h, ceps, w, nd, ctol, cmax, cfd, &q1)
                if not ok:
                    failed = True
                    break
                p1 = _avg_l_d2(q, q1, h, ceps, w, nd)
            else:
                ok = _newton_scalar(3, q, p, h, ceps, w, nd, ctol, cmax, cfd, &p1)
                if not ok:
                    failed = True
                    break
                q1 = _avg_h_d2(q, p1, h, ceps, w, nd)
            q = q1
            p = p1
            energy = 0.5 * (q * q + p * p) + ceps * q * q * q / 3.0
            if not isfinite(energy):
                failed = True
                break
            diff = fabs(energy - e0)
            if diff > worst:
                worst = diff
        if failed or not isfinite(worst):
            metrics.append(csub)
        else:
            metrics.append(worst)
    return metrics


# -- oscillator-chain trajectories -------------------------------------------

cdef void _chain_grad(double omega, int m, double quartic,
                      double[::1] q, double[::1] out):
    cdef double w = 0.5 * omega * omega
    cdef int j, i, lo, hi
    cdef double upper, lower, d, f
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


cdef double _chain_energy(double omega, int m, double quartic,
                          double[::1] q, double[::1] p):
    cdef double kinetic = 0.0
    cdef double stiff = 0.0
    cdef double soft = 0.0
    cdef double upper, lower, d
    cdef int i, j
    for i in range(2 * m):
        kinetic += p[i] * p[i]
    for j in range(m):
        d = q[2 * j + 1] - q[2 * j]
        stiff += d * d
    for i in range(m + 1):
        upper = q[2 * i] if i < m else 0.0
        lower = q[2 * i - 1] if i >= 1 else 0.0
        d = upper - lower
        soft += d * d * d * d
    return 0.5 * kinetic + 0.25 * omega * omega * stiff + quartic * soft


cdef _record(list times, list modes_out, list total_out, list energy_out,
             double omega, int m, double quartic,
             double[::1] q, double[::1] p, double t):
    cdef double root_half = 1.0 / sqrt(2.0)
    cdef double x, y, e, total
    cdef int j
    modes = []
    total = 0.0
    for j in range(m):
        x = (q[2 * j + 1] - q[2 * j]) * root_half
        y = (p[2 * j + 1] - p[2 * j]) * root_half
        e = 0.5 * (y * y + omega * omega * x * x)
        modes.append(e)
        total += e
    times.append(t)
    modes_out.append(modes)
    total_out.append(total)
    energy_out.append(_chain_energy(omega, m, quartic, q, p))


def fpu_sv_trajectory(omega, m, quartic, q0, p0, h, n_steps, stride):
    """Compiled twin of _pykernels.fpu_sv_trajectory."""
    cdef double comega = omega
    cdef int cm = m
    cdef double cquartic = quartic
    cdef double ch = h
    cdef long long cn = n_steps
    cdef long long cstride = stride
    cdef int n = 2 * cm
    q_arr = np.array(q0, dtype=np.float64)
    p_arr = np.array(p0, dtype=np.float64)
    g0_arr = np.zeros(n, dtype=np.float64)
    g1_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] q = q_arr
    cdef double[::1] p = p_arr
    cdef double[::1] g0 = g0_arr
    cdef double[::1] g1 = g1_arr
    cdef long long k
    cdef int i
    times = []
    modes_out = []
    total_out = []
    energy_out = []
    _record(times, modes_out, total_out, energy_out, comega, cm, cquartic, q, p, 0.0)
    for k in range(1, cn + 1):
        _chain_grad(comega, cm, cquartic, q, g0)
        for i in range(n):
            q[i] = q[i] + ch * p[i] - 0.5 * ch * ch * g0[i]
        _chain_grad(comega, cm, cquartic, q, g1)
        for i in range(n):
            p[i] = p[i] - 0.5 * ch * (g0[i] + g1[i])
        if k % cstride == 0 or k == cn:
            _record(times, modes_out, total_out, energy_out, comega, cm, cquartic, q, p, k * ch)
    return times, modes_out, total_out, energy_out


cdef void _soft_grad_only(double omega, int m, double quartic,
                          double[::1] q, double[::1] out):
    cdef int i
    cdef double upper, lower, d, f
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


cdef void _stiff_grad_only(double omega, int m, double[::1] q, double[::1] out):
    cdef double w = 0.5 * omega * omega
    cdef int j, lo, hi
    for j in range(m):
        lo = 2 * j
        hi = lo + 1
        out[lo] = w * (q[lo] - q[hi])
        out[hi] = w * (q[hi] - q[lo])


def fpu_imex_trajectory(omega, m, quartic, q0, p0, h, n_steps, stride, a_inv, b_mat):
    """Compiled twin of _pykernels.fpu_imex_trajectory."""
    cdef double comega = omega
    cdef int cm = m
    cdef double cquartic = quartic
    cdef double ch = h
    cdef long long cn = n_steps
    cdef long long cstride = stride
    cdef int n = 2 * cm
    q_arr = np.array(q0, dtype=np.float64)
    p_arr = np.array(p0, dtype=np.float64)
    ai_arr = np.ascontiguousarray(a_inv, dtype=np.float64)
    bm_arr = np.ascontiguousarray(b_mat, dtype=np.float64)
    cdef double[::1] q = q_arr
    cdef double[::1] p = p_arr
    cdef double[:, ::1] ai = ai_arr
    cdef double[:, ::1] bm = bm_arr
    soft_arr = np.zeros(n, dtype=np.float64)
    rhs_arr = np.zeros(n, dtype=np.float64)
    q1_arr = np.zeros(n, dtype=np.float64)
    mid_arr = np.zeros(n, dtype=np.float64)
    kg_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] soft = soft_arr
    cdef double[::1] rhs = rhs_arr
    cdef double[::1] q1 = q1_arr
    cdef double[::1] mid = mid_arr
    cdef double[::1] kg = kg_arr
    cdef long long k
    cdef int i, j
    cdef double acc
    times = []
    modes_out = []
    total_out = []
    energy_out = []
    _record(times, modes_out, total_out, energy_out, comega, cm, cquartic, q, p, 0.0)
    for k in range(1, cn + 1):
        _soft_grad_only(comega, cm, cquartic, q, soft)
        for i in range(n):
            p[i] = p[i] - 0.5 * ch * soft[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += bm[i, j] * q[j]
            rhs[i] = acc + ch * p[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += ai[i, j] * rhs[j]
            q1[i] = acc
        for i in range(n):
            mid[i] = q[i] + q1[i]
        _stiff_grad_only(comega, cm, mid, kg)
        for i in range(n):
            p[i] = p[i] - 0.5 * ch * kg[i]
        for i in range(n):
            q[i] = q1[i]
        _soft_grad_only(comega, cm, cquartic, q, soft)
        for i in range(n):
            p[i] = p[i] - 0.5 * ch * soft[i]
        if k % cstride == 0 or k == cn:
            _record(times, modes_out, total_out, energy_out, comega, cm, cquartic, q, p, k * ch)
    return times, modes_out, total_out, energy_out


cdef int _solve_dense(double[:, ::1] a, double[::1] b, int n, double[::1] x):
    """Gaussian elimination with partial pivoting; returns 0 if singular."""
    cdef int col, r, cc, piv
    cdef double best, mag, inv, factor, acc, tmp
    for col in range(n):
        piv = col
        best = fabs(a[col, col])
        for r in range(col + 1, n):
            mag = fabs(a[r, col])
            if mag > best:
                best = mag
                piv = r
        if best == 0.0 or not isfinite(best):
            return 0
        if piv != col:
            for cc in range(n):
                tmp = a[col, cc]
                a[col, cc] = a[piv, cc]
                a[piv, cc] = tmp
            tmp = b[col]
            b[col] = b[piv]
            b[piv] = tmp
        inv = 1.0 / a[col, col]
        for r in range(col + 1, n):
            factor = a[r, col] * inv
            if factor != 0.0:
                for cc in range(col, n):
                    a[r, cc] -= factor * a[col, cc]
                b[r] -= factor * b[col]
    for r in range(n - 1, -1, -1):
        acc = b[r]
        for cc in range(r + 1, n):
            acc -= a[r, cc] * x[cc]
        x[r] = acc / a[r, r]
        if not isfinite(x[r]):
            return 0
    return 1


cdef bint _htvi_residual(double omega, int m, double quartic, double h,
                         double[::1] q, double[::1] p, double[::1] g0,
                         double[::1] p1, double[::1] qx, double[::1] gx,
                         double[::1] out):
    cdef int n = 2 * m
    cdef int i
    cdef bint finite = True
    for i in range(n):
        qx[i] = q[i] + h * p1[i]
    _chain_grad(omega, m, quartic, qx, gx)
    for i in range(n):
        out[i] = p1[i] - p[i] + 0.5 * h * (g0[i] + gx[i])
        if not isfinite(out[i]):
            finite = False
    return finite


def fpu_htvi_trajectory(omega, m, quartic, q0, p0, h, n_steps, stride,
                        tol, max_iter, fd_step):
    """Compiled twin of _pykernels.fpu_htvi_trajectory."""
    cdef double comega = omega
    cdef int cm = m
    cdef double cquartic = quartic
    cdef double ch = h
    cdef long long cn = n_steps
    cdef long long cstride = stride
    cdef double ctol = tol
    cdef int cmax = max_iter
    cdef double cfd = fd_step
    cdef int n = 2 * cm
    q_arr = np.array(q0, dtype=np.float64)
    p_arr = np.array(p0, dtype=np.float64)
    cdef double[::1] q = q_arr
    cdef double[::1] p = p_arr
    work = [np.zeros(n, dtype=np.float64) for _ in range(8)]
    cdef double[::1] g0 = work[0]
    cdef double[::1] gx = work[1]
    cdef double[::1] qx = work[2]
    cdef double[::1] x = work[3]
    cdef double[::1] r = work[4]
    cdef double[::1] r_step = work[5]
    cdef double[::1] x_try = work[6]
    cdef double[::1] r_try = work[7]
    jac_arr = np.zeros((n, n), dtype=np.float64)
    jtmp_arr = np.zeros((n, n), dtype=np.float64)
    btmp_arr = np.zeros(n, dtype=np.float64)
    delta_arr = np.zeros(n, dtype=np.float64)
    cdef double[:, ::1] jac = jac_arr
    cdef double[:, ::1] jtmp = jtmp_arr
    cdef double[::1] btmp = btmp_arr
    cdef double[::1] delta = delta_arr
    cdef long long k
    cdef int i, col, row, it
    cdef double rnorm, saved, lam, trynorm, p1i
    cdef bint converged, ok, finite_try
    times = []
    modes_out = []
    total_out = []
    energy_out = []
    _record(times, modes_out, total_out, energy_out, comega, cm, cquartic, q, p, 0.0)
    for k in range(1, cn + 1):
        _chain_grad(comega, cm, cquartic, q, g0)
        for i in range(n):
            x[i] = p[i] - ch * g0[i]
        if not _htvi_residual(comega, cm, cquartic, ch, q, p, g0, x, qx, gx, r):
            raise RuntimeError(f"non-finite residual at step {k}")
        rnorm = 0.0
        for i in range(n):
            if fabs(r[i]) > rnorm:
                rnorm = fabs(r[i])
        for it in range(cmax):
            if rnorm <= ctol:
                break
            ok = True
            for col in range(n):
                saved = x[col]
                x[col] = saved + cfd
                if not _htvi_residual(comega, cm, cquartic, ch, q, p, g0, x, qx, gx, r_step):
                    ok = False
                x[col] = saved
                if not ok:
                    break
                for row in range(n):
                    jac[row, col] = (r_step[row] - r[row]) / cfd
            if not ok:
                raise RuntimeError(f"non-finite Jacobian at step {k}")
            for row in range(n):
                for col in range(n):
                    jtmp[row, col] = jac[row, col]
                btmp[row] = r[row]
            if not _solve_dense(jtmp, btmp, n, delta):
                raise RuntimeError(f"singular Jacobian at step {k}")
            lam = 1.0
            finite_try = True
            while True:
                for i in range(n):
                    x_try[i] = x[i] - lam * delta[i]
                finite_try = _htvi_residual(comega, cm, cquartic, ch, q, p, g0, x_try, qx, gx, r_try)
                if finite_try:
                    trynorm = 0.0
                    for i in range(n):
                        if fabs(r_try[i]) > trynorm:
                            trynorm = fabs(r_try[i])
                    if trynorm < rnorm:
                        break
                if lam <= _DAMPING_FLOOR:
                    break
                lam *= 0.5
            if not finite_try:
                raise RuntimeError(f"non-finite residual along Newton step at {k}")
            for i in range(n):
                x[i] = x_try[i]
                r[i] = r_try[i]
            rnorm = 0.0
            for i in range(n):
                if fabs(r[i]) > rnorm:
                    rnorm = fabs(r[i])
        converged = rnorm <= ctol
        if not converged:
            raise RuntimeError(f"no Newton convergence at step {k} (residual {rnorm:.3e})")
        for i in range(n):
            p1i = x[i]
            q[i] = q[i] + ch * p[i] - 0.5 * ch * ch * g0[i]
            p[i] = p1i
        if k % cstride == 0 or k == cn:
            _record(times, modes_out, total_out, energy_out, comega, cm, cquartic, q, p, k * ch)
    return times, modes_out, total_out, energy_out
