"""One-pass, constant-memory streaming estimators.

All estimators share the same shape: ``observe(x)`` consumes one sample,
``estimate()`` returns the current value. States are small plain values;
nothing here spawns threads or shares mutable internals.

The scalar update functions (`qewa_step`, `qewa_init_from_buffer`, ...) are
the reference semantics. The batch kernels in :mod:`qewa._kernels` mirror
their arithmetic operation-for-operation so that compiled and pure paths
produce bit-identical traces.
"""

import math
from bisect import insort
from dataclasses import dataclass, field

from .errors import NotReadyError

# Relative floor on the gap between the quantile estimate and each
# conditional-mean estimate. The adaptive weight divides by these gaps, so
# they must stay strictly positive under floating-point drift.
GAP_REL = 1e-8

# Relative fallback gap used when a warmup buffer has no sample strictly
# above (or below) the initial quantile estimate.
DEGENERATE_GAP_REL = 1e-6

# Replacement for a first observation of exactly zero in the multiplicative
# estimator, which would otherwise be a fixed point the update can never
# leave (the step is proportional to the current estimate).
DUMIQE_ZERO_INIT = 1e-6


def _check_rate(name, value):
    if not (0.0 < value < 1.0):
        raise ValueError(f"{name} must be in (0, 1), got {value!r}")


def _check_finite(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"observation must be finite, got {x!r}")
    return x


def empirical_quantile(sorted_values, q):
    """Linear-interpolation empirical quantile of an already sorted sequence."""
    m = len(sorted_values)
    if m == 0:
        raise ValueError("empty sample")
    pos = q * (m - 1)
    i = int(math.floor(pos))
    if i >= m - 1:
        return float(sorted_values[m - 1])
    f = pos - i
    return sorted_values[i] + f * (sorted_values[i + 1] - sorted_values[i])


def qewa_init_from_buffer(sorted_buf, q):
    """Seed (q_hat, mu_plus, mu_minus) from a sorted warmup buffer.

    q_hat is the empirical q-quantile; the conditional means are averages of
    buffer values strictly above / below it. If either side is empty (for
    example a constant buffer) it falls back to q_hat +/- a gap derived from
    the buffer's sample standard deviation.
    """
    m = len(sorted_buf)
    q_hat = empirical_quantile(sorted_buf, q)

    sum_above = 0.0
    n_above = 0
    sum_below = 0.0
    n_below = 0
    for v in sorted_buf:
        if v > q_hat:
            sum_above += v
            n_above += 1
        elif v < q_hat:
            sum_below += v
            n_below += 1

    if m > 1:
        total = 0.0
        for v in sorted_buf:
            total += v
        mean = total / m
        ss = 0.0
        for v in sorted_buf:
            d = v - mean
            ss += d * d
        sd = math.sqrt(ss / (m - 1))
    else:
        sd = 0.0
    fallback_gap = sd if sd > DEGENERATE_GAP_REL * max(1.0, abs(q_hat)) else (
        DEGENERATE_GAP_REL * max(1.0, abs(q_hat))
    )

    mu_plus = sum_above / n_above if n_above > 0 else q_hat + fallback_gap
    mu_minus = sum_below / n_below if n_below > 0 else q_hat - fallback_gap

    eps = GAP_REL * max(1.0, abs(q_hat))
    if mu_plus < q_hat + eps:
        mu_plus = q_hat + eps
    if mu_minus > q_hat - eps:
        mu_minus = q_hat - eps
    return q_hat, mu_plus, mu_minus


def qewa_step(q, lam, gamma, q_hat, mu_plus, mu_minus, x):
    """One adaptive-weight quantile update.

    Returns ``(q_hat', mu_plus', mu_minus', a, b)`` where ``a`` is the
    asymmetry weight and ``b`` the effective convex-combination weight
    actually applied (``b = lam*a`` above the estimate, ``lam*(1-a)`` at or
    below it). Callers needing the weight-bound diagnostics read ``a``/``b``.
    """
    gap_p = mu_plus - q_hat
    gap_m = q_hat - mu_minus
    wp = q / gap_p
    wm = (1.0 - q) / gap_m
    a = wp / (wp + wm)
    above = x > q_hat
    b = lam * a if above else lam * (1.0 - a)

    q_new = (1.0 - b) * q_hat + b * x
    d = q_new - q_hat
    if above:
        mu_plus = d + (1.0 - gamma) * mu_plus + gamma * x
        mu_minus = d + mu_minus
    else:
        mu_plus = d + mu_plus
        mu_minus = d + (1.0 - gamma) * mu_minus + gamma * x

    eps = GAP_REL * max(1.0, abs(q_new))
    if mu_plus < q_new + eps:
        mu_plus = q_new + eps
    if mu_minus > q_new - eps:
        mu_minus = q_new - eps
    return q_new, mu_plus, mu_minus, a, b


@dataclass
class QewaEstimator:
    """Quantile tracker whose step size adapts to how far off-track it is.

    The estimate moves as a convex combination of itself and each new
    observation; the combination weight is rescaled every step using running
    estimates of the mean of the stream above and below the current
    estimate, which makes the fixed point the q-quantile rather than the
    mean and makes recovery steps proportional to the tracking error.

    Parameters: ``q`` target quantile level, ``lam`` step-size rate for the
    quantile update, ``gamma`` EWA rate for the conditional-mean estimates
    (usually lam/100), ``warmup`` number of buffered samples used to seed
    the state.
    """

    q: float
    lam: float = 0.01
    gamma: float | None = None
    warmup: int = 10

    q_hat: float = field(default=math.nan, init=False)
    mu_plus: float = field(default=math.nan, init=False)
    mu_minus: float = field(default=math.nan, init=False)
    n_seen: int = field(default=0, init=False)
    last_a: float = field(default=math.nan, init=False)
    last_b: float = field(default=math.nan, init=False)

    def __post_init__(self):
        _check_rate("q", self.q)
        _check_rate("lam", self.lam)
        if self.gamma is None:
            self.gamma = self.lam / 100.0
        _check_rate("gamma", self.gamma)
        if self.warmup < 1:
            raise ValueError(f"warmup must be >= 1, got {self.warmup}")
        self._buffer: list[float] = []

    @property
    def ready(self) -> bool:
        return self.n_seen >= self.warmup

    def observe(self, x) -> None:
        x = _check_finite(x)
        if not self.ready:
            insort(self._buffer, x)
            self.n_seen += 1
            if self.n_seen == self.warmup:
                self.q_hat, self.mu_plus, self.mu_minus = qewa_init_from_buffer(
                    self._buffer, self.q
                )
                self._buffer = []
            return
        self.q_hat, self.mu_plus, self.mu_minus, self.last_a, self.last_b = qewa_step(
            self.q, self.lam, self.gamma, self.q_hat, self.mu_plus, self.mu_minus, x
        )
        self.n_seen += 1

    def estimate(self) -> float:
        if not self.ready:
            raise NotReadyError(
                f"estimator warming up ({self.n_seen}/{self.warmup} samples)"
            )
        return self.q_hat

    def provisional_estimate(self) -> float:
        """Best current guess: the estimate, or during warmup the empirical
        quantile of the samples buffered so far."""
        if self.ready:
            return self.q_hat
        if not self._buffer:
            raise NotReadyError("no samples observed yet")
        return empirical_quantile(self._buffer, self.q)


@dataclass
class DumiqeEstimator:
    """Multiplicative incremental quantile tracker (baseline).

    Steps are proportional to the current estimate: up by ``lam*q*q_hat``
    when the sample is above the estimate, down by ``lam*(1-q)*q_hat``
    otherwise. An estimate of exactly zero is a fixed point; a first
    observation of zero is therefore nudged to DUMIQE_ZERO_INIT. Streams
    whose quantile crosses zero will stall near it - a documented property
    of the multiplicative rule, not a bug.
    """

    q: float
    lam: float = 0.01

    q_hat: float = field(default=math.nan, init=False)
    n_seen: int = field(default=0, init=False)

    def __post_init__(self):
        _check_rate("q", self.q)
        _check_rate("lam", self.lam)

    @property
    def ready(self) -> bool:
        return self.n_seen >= 1

    def observe(self, x) -> None:
        x = _check_finite(x)
        if self.n_seen == 0:
            self.q_hat = x if x != 0.0 else DUMIQE_ZERO_INIT
        elif x > self.q_hat:
            self.q_hat = self.q_hat + self.lam * self.q * self.q_hat
        else:
            self.q_hat = self.q_hat - self.lam * (1.0 - self.q) * self.q_hat
        self.n_seen += 1

    def estimate(self) -> float:
        if not self.ready:
            raise NotReadyError("no samples observed yet")
        return self.q_hat


@dataclass
class FrugalEstimator:
    """Additive fixed-step quantile tracker (baseline).

    Moves up by ``step*q`` when the sample is above the estimate, down by
    ``step*(1-q)`` otherwise. ``initial`` seeds the estimate; when None the
    first observation is used.
    """

    q: float
    step: float = 0.1
    initial: float | None = None

    q_hat: float = field(default=math.nan, init=False)
    n_seen: int = field(default=0, init=False)

    def __post_init__(self):
        _check_rate("q", self.q)
        if self.step <= 0.0:
            raise ValueError(f"step must be > 0, got {self.step!r}")
        if self.initial is not None:
            self.q_hat = float(self.initial)

    @property
    def ready(self) -> bool:
        return self.n_seen >= 1 or self.initial is not None

    def observe(self, x) -> None:
        x = _check_finite(x)
        if self.n_seen == 0 and self.initial is None:
            self.q_hat = x
        elif x > self.q_hat:
            self.q_hat = self.q_hat + self.step * self.q
        else:
            self.q_hat = self.q_hat - self.step * (1.0 - self.q)
        self.n_seen += 1

    def estimate(self) -> float:
        if not self.ready:
            raise NotReadyError("no samples observed yet")
        return self.q_hat


@dataclass
class EwaMean:
    """Exponentially weighted average of observations (mean tracker).

    First observation initializes the estimate, thereafter
    ``mu <- (1-alpha)*mu + alpha*x``.
    """

    alpha: float

    mu_hat: float = field(default=math.nan, init=False)
    n_seen: int = field(default=0, init=False)

    def __post_init__(self):
        _check_rate("alpha", self.alpha)

    @property
    def ready(self) -> bool:
        return self.n_seen >= 1

    def observe(self, x) -> None:
        x = _check_finite(x)
        if self.n_seen == 0:
            self.mu_hat = x
        else:
            self.mu_hat = (1.0 - self.alpha) * self.mu_hat + self.alpha * x
        self.n_seen += 1

    def estimate(self) -> float:
        if not self.ready:
            raise NotReadyError("no samples observed yet")
        return self.mu_hat
