# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels.

Mirrors ``_pyk`` operation-for-operation; the parity tests assert that both
implementations produce bit-identical traces.
"""

from libc.math cimport floor, fabs, sqrt, NAN

DEF GAP_REL = 1e-8
DEF DEGENERATE_GAP_REL = 1e-6
DEF DUMIQE_ZERO_INIT = 1e-6


cdef inline double _fmax1(double v) noexcept nogil:
    return 1.0 if v < 1.0 else v


cdef double _empirical_quantile(double* s, Py_ssize_t m, double q) noexcept nogil:
    cdef double pos = q * (m - 1)
    cdef Py_ssize_t i = <Py_ssize_t>floor(pos)
    cdef double f
    if i >= m - 1:
        return s[m - 1]
    f = pos - i
    return s[i] + f * (s[i + 1] - s[i])


cdef void _insort(double* s, Py_ssize_t m, double x) noexcept nogil:
    # insert x into sorted s[0:m], keeping order (insertion after equals)
    cdef Py_ssize_t j = m
    while j > 0 and s[j - 1] > x:
        s[j] = s[j - 1]
        j -= 1
    s[j] = x


cdef void _init_from_buffer(double* s, Py_ssize_t m, double q,
                            double* out_q, double* out_p, double* out_m) noexcept nogil:
    cdef double q_hat = _empirical_quantile(s, m, q)
    cdef double sum_above = 0.0, sum_below = 0.0
    cdef Py_ssize_t n_above = 0, n_below = 0
    cdef Py_ssize_t i
    cdef double v, total, mean, ss, d, sd, thresh, fallback_gap
    cdef double mu_plus, mu_minus, eps

    for i in range(m):
        v = s[i]
        if v > q_hat:
            sum_above += v
            n_above += 1
        elif v < q_hat:
            sum_below += v
            n_below += 1

    if m > 1:
        total = 0.0
        for i in range(m):
            total += s[i]
        mean = total / m
        ss = 0.0
        for i in range(m):
            d = s[i] - mean
            ss += d * d
        sd = sqrt(ss / (m - 1))
    else:
        sd = 0.0
    thresh = DEGENERATE_GAP_REL * _fmax1(fabs(q_hat))
    fallback_gap = sd if sd > thresh else thresh

    mu_plus = sum_above / n_above if n_above > 0 else q_hat + fallback_gap
    mu_minus = sum_below / n_below if n_below > 0 else q_hat - fallback_gap

    eps = GAP_REL * _fmax1(fabs(q_hat))
    if mu_plus < q_hat + eps:
        mu_plus = q_hat + eps
    if mu_minus > q_hat - eps:
        mu_minus = q_hat - eps

    out_q[0] = q_hat
    out_p[0] = mu_plus
    out_m[0] = mu_minus


def qewa_path(double[::1] xs, double q, double lam, double gamma, int warmup,
              double[::1] trace, bint check=False):
    """Compiled counterpart of ``_pyk.qewa_path``; same contract."""
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i
    cdef Py_ssize_t nbuf = 0
    cdef double q_hat = NAN, mu_plus = NAN, mu_minus = NAN
    cdef double x, gap_p, gap_m, wp, wm, a, b, q_new, dd, eps
    cdef bint above
    cdef long viol_a = 0, viol_b = 0, viol_order = 0
    import numpy as _np
    cdef double[::1] buf_mv = _np.empty(max(warmup, 1), dtype=_np.float64)
    cdef double* buf = &buf_mv[0]

    with nogil:
        for i in range(n):
            x = xs[i]
            if nbuf < warmup:
                _insort(buf, nbuf, x)
                nbuf += 1
                if nbuf == warmup:
                    _init_from_buffer(buf, nbuf, q, &q_hat, &mu_plus, &mu_minus)
                    trace[i] = q_hat
                    if check and not (mu_minus < q_hat < mu_plus):
                        viol_order += 1
                else:
                    trace[i] = _empirical_quantile(buf, nbuf, q)
                continue

            gap_p = mu_plus - q_hat
            gap_m = q_hat - mu_minus
            wp = q / gap_p
            wm = (1.0 - q) / gap_m
            a = wp / (wp + wm)
            above = x > q_hat
            b = lam * a if above else lam * (1.0 - a)

            q_new = (1.0 - b) * q_hat + b * x
            dd = q_new - q_hat
            if above:
                mu_plus = dd + (1.0 - gamma) * mu_plus + gamma * x
                mu_minus = dd + mu_minus
            else:
                mu_plus = dd + mu_plus
                mu_minus = dd + (1.0 - gamma) * mu_minus + gamma * x

            eps = GAP_REL * _fmax1(fabs(q_new))
            if mu_plus < q_new + eps:
                mu_plus = q_new + eps
            if mu_minus > q_new - eps:
                mu_minus = q_new - eps
            q_hat = q_new
            trace[i] = q_hat

            if check:
                if not (0.0 < a < 1.0):
                    viol_a += 1
                if not (0.0 < b < lam):
                    viol_b += 1
                if not (mu_minus < q_hat < mu_plus):
                    viol_order += 1

    return q_hat, mu_plus, mu_minus, viol_a, viol_b, viol_order


def dumiqe_path(double[::1] xs, double q, double lam, double[::1] trace):
    """Compiled counterpart of ``_pyk.dumiqe_path``; same contract."""
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i
    cdef double q_hat = NAN
    cdef double x
    with nogil:
        for i in range(n):
            x = xs[i]
            if i == 0:
                q_hat = x if x != 0.0 else DUMIQE_ZERO_INIT
            elif x > q_hat:
                q_hat = q_hat + lam * q * q_hat
            else:
                q_hat = q_hat - lam * (1.0 - q) * q_hat
            trace[i] = q_hat
    return q_hat


def frugal_path(double[::1] xs, double q, double step, double[::1] trace,
                initial=None):
    """Compiled counterpart of ``_pyk.frugal_path``; same contract."""
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i, start
    cdef double q_hat = NAN
    cdef double x
    if initial is None:
        start = 1
        if n > 0:
            q_hat = xs[0]
            trace[0] = q_hat
    else:
        q_hat = float(initial)
        start = 0
    with nogil:
        for i in range(start, n):
            x = xs[i]
            if x > q_hat:
                q_hat = q_hat + step * q
            else:
                q_hat = q_hat - step * (1.0 - q)
            trace[i] = q_hat
    return q_hat


def ewa_path(double[::1] xs, double alpha, double[::1] trace):
    """Compiled counterpart of ``_pyk.ewa_path``; same contract."""
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i
    cdef double mu = NAN
    cdef double x
    with nogil:
        for i in range(n):
            x = xs[i]
            if i == 0:
                mu = x
            else:
                mu = (1.0 - alpha) * mu + alpha * x
            trace[i] = mu
    return mu
