"""Synthetic dynamic streams and their analytic quantile oracles.

Two families (normal with unit variance and time-varying mean; chi-squared
with time-varying degrees of freedom), three dynamics (sinusoidal periodic,
hard switch, stationary). Sample paths are a pure function of the seed;
the RNG is numpy's seeded PCG64 (``RNG_ALGORITHM``).
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import chi2_quantile, normal_quantile

RNG_ALGORITHM = "numpy-pcg64"

FAMILIES = ("normal", "chi_squared")
DYNAMICS = ("periodic", "switch", "stationary")


@dataclass(frozen=True)
class StreamSpec:
    """Declarative description of one synthetic stream.

    ``a`` is the oscillation amplitude, ``b`` the offset of the chi-squared
    degrees of freedom (must exceed ``|a|`` so the dof stays positive),
    ``period`` the dynamics period in samples, ``length`` the number of
    samples, ``seed`` the RNG seed.
    """

    family: str
    dynamics: str
    a: float = 2.0
    b: float = 6.0
    period: int = 100
    length: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.dynamics not in DYNAMICS:
            raise ValueError(f"dynamics must be one of {DYNAMICS}, got {self.dynamics!r}")
        if self.period < 2:
            raise ValueError(f"period must be >= 2, got {self.period}")
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")
        if self.family == "chi_squared" and not (self.b > abs(self.a)):
            raise ValueError(
                f"chi_squared requires b > |a| so the dof stays positive "
                f"(got a={self.a}, b={self.b})"
            )

    def label(self) -> str:
        return (
            f"{self.family}-{self.dynamics}-T{self.period}"
            f"-a{self.a:g}-b{self.b:g}-N{self.length}-seed{self.seed}"
        )


def param_at(spec: StreamSpec, n: int) -> float:
    """Distribution parameter at sample index n (1-based): the normal mean
    or the chi-squared degrees of freedom."""
    if spec.dynamics == "periodic":
        # phase from the residue so the parameter is exactly periodic in n
        base = spec.a * math.sin(2.0 * math.pi * ((n % spec.period) / spec.period))
    elif spec.dynamics == "switch":
        base = spec.a if (n % spec.period) <= spec.period / 2 else -spec.a
    else:
        base = spec.a if spec.family == "normal" else 0.0
    if spec.family == "chi_squared":
        if spec.dynamics == "stationary":
            return spec.b
        return base + spec.b
    return base


def params(spec: StreamSpec) -> np.ndarray:
    """Vector of the distribution parameter over the whole stream."""
    n = np.arange(1, spec.length + 1)
    if spec.dynamics == "periodic":
        base = spec.a * np.sin(2.0 * np.pi * ((n % spec.period) / spec.period))
    elif spec.dynamics == "switch":
        base = np.where((n % spec.period) <= spec.period / 2, spec.a, -spec.a)
    else:
        base = np.full(spec.length, spec.a if spec.family == "normal" else 0.0)
    if spec.family == "chi_squared":
        if spec.dynamics == "stationary":
            return np.full(spec.length, float(spec.b))
        return base + spec.b
    return base.astype(float)


def sample_at(spec: StreamSpec, n: int, rng: np.random.Generator) -> float:
    """One draw for sample index n using the caller's RNG state.

    Drawing indices 1..N in order from a fresh ``default_rng(spec.seed)``
    reproduces ``generate(spec)`` exactly.
    """
    p = param_at(spec, n)
    if spec.family == "normal":
        return float(rng.normal(p, 1.0))
    # gamma(shape=nu/2, scale=2) is chi-squared with nu dof, valid for any nu > 0
    return float(rng.gamma(p / 2.0, 2.0))


def generate(spec: StreamSpec) -> np.ndarray:
    """Full sample path, a pure function of the spec (including seed)."""
    rng = np.random.default_rng(spec.seed)
    p = params(spec)
    if spec.family == "normal":
        return rng.normal(p, 1.0)
    return rng.gamma(p / 2.0, 2.0)


@dataclass(frozen=True)
class OracleQuantile:
    """Analytic time-varying true quantile of a stream, used for scoring."""

    spec: StreamSpec
    q: float

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must be in (0, 1), got {self.q!r}")


def true_quantile_at(oracle: OracleQuantile, n: int) -> float:
    p = param_at(oracle.spec, n)
    if oracle.spec.family == "normal":
        return p + normal_quantile(oracle.q)
    return chi2_quantile(oracle.q, p)


def true_quantiles(oracle: OracleQuantile) -> np.ndarray:
    """Vector of the true quantile over the whole stream.

    Chi-squared quantiles are root-found once per distinct dof value (at
    most one period's worth) and broadcast.
    """
    p = params(oracle.spec)
    if oracle.spec.family == "normal":
        return p + normal_quantile(oracle.q)
    uniq, inverse = np.unique(p, return_inverse=True)
    qs = np.array([chi2_quantile(oracle.q, nu) for nu in uniq])
    return qs[inverse]
