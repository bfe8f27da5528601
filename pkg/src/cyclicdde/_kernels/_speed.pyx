# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels; semantics identical to _ref.py."""

from libc.math cimport fabs, floor, pow, tanh

DEF BLOWUP = 1e150

cdef inline double _hill(double y, double nu) noexcept nogil:
    cdef double a = pow(fabs(y), nu)
    cdef double v = a / (1.0 + a)
    return v if y >= 0.0 else -v


cdef inline double _nl_value(int code, double g, double k, double nu,
                             double s, double base, double x) noexcept nogil:
    if code == 0:
        return g * k * x
    if code == 1:
        return g * tanh(k * x)
    if code == 2:
        return g * _hill(k * x, nu)
    if code == 3:
        return g * (1.0 - _hill(k * x, nu))
    return g * (_hill(k * x + s, nu) - base)


cdef inline double _hermite_mid(double h, double v0, double d0,
                                double v1, double d1) noexcept nogil:
    return 0.5 * (v0 + v1) + 0.125 * h * (d0 - d1)


cdef inline void _loop_rhs(double* x, double x0d,
                           double[::1] mu, int[:, ::1] codes,
                           double[:, :, ::1] pars, double* out, int n) noexcept nogil:
    cdef int i
    cdef double arg, acc
    for i in range(n):
        arg = x[i + 1] if i < n - 1 else x0d
        acc = -mu[i] * x[i] + _nl_value(
            codes[0, i], pars[0, i, 0], pars[0, i, 1], pars[0, i, 2],
            pars[0, i, 3], pars[0, i, 4], arg)
        if codes[1, i] >= 0:
            acc += _nl_value(
                codes[1, i], pars[1, i, 0], pars[1, i, 1], pars[1, i, 2],
                pars[1, i, 3], pars[1, i, 4], x[i - 1])
        out[i] = acc


def run_loop_rk4(double[:, ::1] vals, double[:, ::1] ders, double[::1] mu,
                 int[:, ::1] codes, double[:, :, ::1] pars,
                 double h, int m, int k_from, int k_to):
    cdef int n = vals.shape[1]
    cdef double half = 0.5 * h
    cdef double sixth = h / 6.0
    cdef int k, i, j
    cdef int bad = -1
    cdef double d0, dmid, dend
    cdef double y[64]
    cdef double y1[64]
    cdef double k1[64]
    cdef double k2[64]
    cdef double k3[64]
    cdef double k4[64]
    if n > 64:
        raise ValueError("compiled kernel supports up to 64 components")
    for i in range(n):
        y[i] = vals[k_from, i]
    with nogil:
        for k in range(k_from, k_to):
            j = k - m
            d0 = vals[j, 0]
            dmid = _hermite_mid(h, vals[j, 0], ders[j, 0], vals[j + 1, 0], ders[j + 1, 0])
            dend = vals[j + 1, 0]

            _loop_rhs(y, d0, mu, codes, pars, k1, n)
            for i in range(n):
                ders[k, i] = k1[i]
                y1[i] = y[i] + half * k1[i]
            _loop_rhs(y1, dmid, mu, codes, pars, k2, n)
            for i in range(n):
                y1[i] = y[i] + half * k2[i]
            _loop_rhs(y1, dmid, mu, codes, pars, k3, n)
            for i in range(n):
                y1[i] = y[i] + h * k3[i]
            _loop_rhs(y1, dend, mu, codes, pars, k4, n)
            for i in range(n):
                y[i] = y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                vals[k + 1, i] = y[i]
            for i in range(n):
                if fabs(y[i]) > BLOWUP:
                    bad = k + 1
                    break
            if bad >= 0:
                break
        if bad < 0:
            j = k_to - m
            _loop_rhs(y, vals[j, 0], mu, codes, pars, k1, n)
            for i in range(n):
                ders[k_to, i] = k1[i]
    return bad


cdef inline double _hermite_at(double[:, ::1] vals, double[:, ::1] ders,
                               int comp, double pos, double h) noexcept nogil:
    cdef int seg = <int>floor(pos)
    cdef int last = vals.shape[0] - 2
    if seg > last:
        seg = last
    if seg < 0:
        seg = 0
    cdef double t = pos - seg
    cdef double v0 = vals[seg, comp]
    cdef double v1 = vals[seg + 1, comp]
    cdef double d0 = ders[seg, comp]
    cdef double d1 = ders[seg + 1, comp]
    cdef double t2 = t * t
    cdef double t3 = t2 * t
    return ((2.0 * t3 - 3.0 * t2 + 1.0) * v0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * v1
            + (t3 - t2) * h * d1)


cdef inline void _gene_rhs(double[:, ::1] vals, double[:, ::1] ders,
                           double* x, int k, double off,
                           double[::1] a, double[::1] b, double[::1] beta,
                           double[::1] c, double[::1] nu, int[::1] fdec,
                           double[::1] dp_nodes, double[::1] dr_nodes,
                           double h, double* out, int n) noexcept nogil:
    cdef int i, ip
    cdef double dl, parg, rarg, yv, f
    for i in range(n):
        ip = i - 1 if i > 0 else n - 1
        dl = dp_nodes[ip]
        if dl == 0.0:
            parg = x[n + ip]
        else:
            parg = _hermite_at(vals, ders, n + ip, k + off - dl, h)
        yv = pow(fabs(parg), nu[i])
        f = yv / (1.0 + yv)
        if parg < 0.0:
            f = -f
        if fdec[i]:
            f = 1.0 - f
        out[i] = -a[i] * x[i] + beta[i] * f
        dl = dr_nodes[i]
        if dl == 0.0:
            rarg = x[i]
        else:
            rarg = _hermite_at(vals, ders, i, k + off - dl, h)
        out[n + i] = -b[i] * x[n + i] + c[i] * rarg


def run_gene_rk4(double[:, ::1] vals, double[:, ::1] ders,
                 double[::1] a, double[::1] b, double[::1] beta, double[::1] c,
                 double[::1] nu, int[::1] fdec,
                 double[::1] dp_nodes, double[::1] dr_nodes,
                 double h, int k_from, int k_to):
    cdef int n = a.shape[0]
    cdef int n2 = 2 * n
    cdef double half = 0.5 * h
    cdef double sixth = h / 6.0
    cdef int k, i
    cdef int bad = -1
    cdef double y[64]
    cdef double y1[64]
    cdef double k1[64]
    cdef double k2[64]
    cdef double k3[64]
    cdef double k4[64]
    if n2 > 64:
        raise ValueError("compiled kernel supports up to 32 genes")
    for i in range(n2):
        y[i] = vals[k_from, i]
    with nogil:
        for k in range(k_from, k_to):
            _gene_rhs(vals, ders, y, k, 0.0, a, b, beta, c, nu, fdec,
                      dp_nodes, dr_nodes, h, k1, n)
            for i in range(n2):
                ders[k, i] = k1[i]
                y1[i] = y[i] + half * k1[i]
            _gene_rhs(vals, ders, y1, k, 0.5, a, b, beta, c, nu, fdec,
                      dp_nodes, dr_nodes, h, k2, n)
            for i in range(n2):
                y1[i] = y[i] + half * k2[i]
            _gene_rhs(vals, ders, y1, k, 0.5, a, b, beta, c, nu, fdec,
                      dp_nodes, dr_nodes, h, k3, n)
            for i in range(n2):
                y1[i] = y[i] + h * k3[i]
            _gene_rhs(vals, ders, y1, k, 1.0, a, b, beta, c, nu, fdec,
                      dp_nodes, dr_nodes, h, k4, n)
            for i in range(n2):
                y[i] = y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                vals[k + 1, i] = y[i]
            for i in range(n2):
                if fabs(y[i]) > BLOWUP:
                    bad = k + 1
                    break
            if bad >= 0:
                break
        if bad < 0:
            _gene_rhs(vals, ders, y, k_to, 0.0, a, b, beta, c, nu, fdec,
                      dp_nodes, dr_nodes, h, k1, n)
            for i in range(n2):
                ders[k_to, i] = k1[i]
    return bad
