"""Pure-Python batch kernels (fallback and semantic reference).

Each ``*_path`` function consumes a float64 array, writes the per-sample
estimate into ``trace`` and returns summary state. The arithmetic mirrors
the scalar functions in :mod:`qewa.estimators` exactly; the Cython kernels
in ``_ck.pyx`` mirror this module operation-for-operation.
"""

import math
from bisect import insort

from ..estimators import (
    DUMIQE_ZERO_INIT,
    empirical_quantile,
    qewa_init_from_buffer,
    qewa_step,
)


def qewa_path(xs, q, lam, gamma, warmup, trace, check=False):
    """Run the adaptive quantile tracker over ``xs``.

    ``trace[i]`` receives the estimate after consuming ``xs[i]`` (during
    warmup: the empirical quantile of the buffer so far). With ``check``
    the per-step weight-bound and ordering diagnostics are counted.

    Returns ``(q_hat, mu_plus, mu_minus, viol_a, viol_b, viol_order)``.
    """
    n = len(xs)
    buf: list[float] = []
    q_hat = math.nan
    mu_plus = math.nan
    mu_minus = math.nan
    viol_a = 0
    viol_b = 0
    viol_order = 0

    for i in range(n):
        x = xs[i]
        if len(buf) < warmup:
            insort(buf, x)
            if len(buf) == warmup:
                q_hat, mu_plus, mu_minus = qewa_init_from_buffer(buf, q)
                trace[i] = q_hat
                if check and not (mu_minus < q_hat < mu_plus):
                    viol_order += 1
            else:
                trace[i] = empirical_quantile(buf, q)
            continue
        q_hat, mu_plus, mu_minus, a, b = qewa_step(
            q, lam, gamma, q_hat, mu_plus, mu_minus, x
        )
        trace[i] = q_hat
        if check:
            if not (0.0 < a < 1.0):
                viol_a += 1
            if not (0.0 < b < lam):
                viol_b += 1
            if not (mu_minus < q_hat < mu_plus):
                viol_order += 1

    return q_hat, mu_plus, mu_minus, viol_a, viol_b, viol_order


def dumiqe_path(xs, q, lam, trace):
    """Run the multiplicative tracker over ``xs``; returns the final estimate."""
    n = len(xs)
    q_hat = math.nan
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


def frugal_path(xs, q, step, trace, initial=None):
    """Run the additive tracker over ``xs``; returns the final estimate."""
    n = len(xs)
    if initial is None:
        q_hat = math.nan
        start = 1
        if n > 0:
            q_hat = xs[0]
            trace[0] = q_hat
    else:
        q_hat = float(initial)
        start = 0
    for i in range(start, n):
        x = xs[i]
        if x > q_hat:
            q_hat = q_hat + step * q
        else:
            q_hat = q_hat - step * (1.0 - q)
        trace[i] = q_hat
    return q_hat


def ewa_path(xs, alpha, trace):
    """Run the EWA mean tracker over ``xs``; returns the final estimate."""
    n = len(xs)
    mu = math.nan
    for i in range(n):
        x = xs[i]
        if i == 0:
            mu = x
        else:
            mu = (1.0 - alpha) * mu + alpha * x
        trace[i] = mu
    return mu
