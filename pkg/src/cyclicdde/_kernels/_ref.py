"""Pure-Python stepping kernels (reference semantics for the compiled core).

Both kernels advance a classical 4-stage Runge-Kutta recurrence over a
uniform node grid, reading delayed values from the already-computed part of
the arrays via cubic Hermite interpolation.  The compiled module in
``_speed.pyx`` mirrors these functions statement for statement; the test
suite asserts bitwise-comparable agreement.
"""

import math

BLOWUP = 1e150

# nonlinearity codes, in sync with cyclicdde.nonlinearity.CODE
_LINEAR, _TANH, _HILL_INC, _HILL_DEC, _SHIFTED = 0, 1, 2, 3, 4


def _hill(y, nu):
    a = abs(y) ** nu
    v = a / (1.0 + a)
    return v if y >= 0 else -v


def _nl_value(code, g, k, nu, s, base, x):
    if code == _LINEAR:
        return g * k * x
    if code == _TANH:
        return g * math.tanh(k * x)
    if code == _HILL_INC:
        return g * _hill(k * x, nu)
    if code == _HILL_DEC:
        return g * (1.0 - _hill(k * x, nu))
    return g * (_hill(k * x + s, nu) - base)


def _hermite_mid(h, v0, d0, v1, d1):
    # cubic Hermite at the segment midpoint
    return 0.5 * (v0 + v1) + 0.125 * h * (d0 - d1)


def run_loop_rk4(vals, ders, mu, codes, pars, h, m, k_from, k_to):
    """Step a loop system over nodes [k_from, k_to).

    vals, ders : (M+1, n) arrays; rows <= k_from already filled (row k_from
    may lack its derivative; it is recomputed).  Component 0 rows k_from-m..
    k_from hold the delayed history.  codes is the (2, n) int array and pars
    the (2, n, 5) float array from LoopSystem.kernel_arrays() (row 0: next
    coupling, row 1: previous coupling).

    Returns -1 on success, otherwise the node index where |x| exceeded the
    blow-up threshold.
    """
    n = vals.shape[1]
    half = 0.5 * h
    sixth = h / 6.0

    def rhs(x, x0d):
        out = [0.0] * n
        for i in range(n):
            arg = x[i + 1] if i < n - 1 else x0d
            acc = -mu[i] * x[i] + _nl_value(
                codes[0, i], pars[0, i, 0], pars[0, i, 1], pars[0, i, 2],
                pars[0, i, 3], pars[0, i, 4], arg,
            )
            if codes[1, i] >= 0:
                acc += _nl_value(
                    codes[1, i], pars[1, i, 0], pars[1, i, 1], pars[1, i, 2],
                    pars[1, i, 3], pars[1, i, 4], x[i - 1],
                )
            out[i] = acc
        return out

    y = [float(v) for v in vals[k_from]]
    for k in range(k_from, k_to):
        j = k - m
        d0 = float(vals[j, 0])
        dmid = _hermite_mid(h, vals[j, 0], ders[j, 0], vals[j + 1, 0], ders[j + 1, 0])
        dend = float(vals[j + 1, 0])

        k1 = rhs(y, d0)
        for i in range(n):
            ders[k, i] = k1[i]
        y1 = [y[i] + half * k1[i] for i in range(n)]
        k2 = rhs(y1, dmid)
        y2 = [y[i] + half * k2[i] for i in range(n)]
        k3 = rhs(y2, dmid)
        y3 = [y[i] + h * k3[i] for i in range(n)]
        k4 = rhs(y3, dend)

        y = [y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(n)]
        for i in range(n):
            vals[k + 1, i] = y[i]
            if abs(y[i]) > BLOWUP:
                return k + 1
    # derivative at the final node
    j = k_to - m
    kf = rhs(y, float(vals[j, 0]))
    for i in range(n):
        ders[k_to, i] = kf[i]
    return -1


def _hermite_at(vals, ders, comp, pos, h):
    """Cubic Hermite lookup of one component at fractional node position."""
    seg = int(math.floor(pos))
    if seg >= vals.shape[0] - 1:
        seg = vals.shape[0] - 2
    if seg < 0:
        seg = 0
    t = pos - seg
    v0 = vals[seg, comp]
    v1 = vals[seg + 1, comp]
    d0 = ders[seg, comp]
    d1 = ders[seg + 1, comp]
    t2 = t * t
    t3 = t2 * t
    return (
        (2.0 * t3 - 3.0 * t2 + 1.0) * v0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * v1
        + (t3 - t2) * h * d1
    )


def run_gene_rk4(vals, ders, a, b, beta, c, nu, fdec, dp_nodes, dr_nodes, h, k_from, k_to):
    """Step a gene loop over nodes [k_from, k_to).

    Component layout: r_0..r_{n-1}, p_0..p_{n-1}.  dp_nodes[i] / dr_nodes[i]
    are the delays (in node units) of the protein/mRNA inputs; a zero delay
    reads the current stage value instead of history.  Returns -1 or the
    blow-up node index.
    """
    n = len(a)
    half = 0.5 * h
    sixth = h / 6.0

    def rhs(x, k, off):
        # k + off is the fractional node position of the stage time
        out = [0.0] * (2 * n)
        for i in range(n):
            ip = i - 1 if i > 0 else n - 1
            dl = dp_nodes[ip]
            if dl == 0.0:
                parg = x[n + ip]
            else:
                parg = _hermite_at(vals, ders, n + ip, k + off - dl, h)
            y = abs(parg) ** nu[i]
            f = y / (1.0 + y) if parg >= 0 else -y / (1.0 + y)
            if fdec[i]:
                f = 1.0 - f
            out[i] = -a[i] * x[i] + beta[i] * f
            dlr = dr_nodes[i]
            if dlr == 0.0:
                rarg = x[i]
            else:
                rarg = _hermite_at(vals, ders, i, k + off - dlr, h)
            out[n + i] = -b[i] * x[n + i] + c[i] * rarg
        return out

    y = [float(v) for v in vals[k_from]]
    for k in range(k_from, k_to):
        k1 = rhs(y, k, 0.0)
        for i in range(2 * n):
            ders[k, i] = k1[i]
        y1 = [y[i] + half * k1[i] for i in range(2 * n)]
        k2 = rhs(y1, k, 0.5)
        y2 = [y[i] + half * k2[i] for i in range(2 * n)]
        k3 = rhs(y2, k, 0.5)
        y3 = [y[i] + h * k3[i] for i in range(2 * n)]
        k4 = rhs(y3, k, 1.0)
        y = [y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(2 * n)]
        for i in range(2 * n):
            vals[k + 1, i] = y[i]
            if abs(y[i]) > BLOWUP:
                return k + 1
    kf = rhs(y, k_to, 0.0)
    for i in range(2 * n):
        ders[k_to, i] = kf[i]
    return -1
