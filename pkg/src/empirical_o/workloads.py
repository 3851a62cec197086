"""Seeded input generators for the three workload families.

All generators draw from numpy's PCG64 bit generator (128-bit state) keyed by
a 64-bit integer seed, so a (spec, seed) pair always yields the same array.
Bounded integers come from ``Generator.integers``, which uses Lemire's
rejection method and therefore has no modulo bias.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

log = logging.getLogger(__name__)

SEED_MAX = 2**64 - 1
HEAVY_TAIL_K_CAP = 1000


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for a labelled sub-stream (e.g. ``(n, trial)``).

    Derivation goes through ``SeedSequence`` spawn keys, so children of one
    parent are statistically independent of each other.
    """
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class UniformKSpec:
    n: int
    K: int

    def __post_init__(self):
        if self.n < 0:
            raise InvalidParameterError(f"n must be >= 0, got {self.n}")
        if self.K < 1:
            raise InvalidParameterError(f"K must be >= 1, got {self.K}")


@dataclass(frozen=True)
class TieDensitySpec:
    """Uniform integers with on average ``t_d`` copies of each value."""

    n: int
    t_d: float
    exact: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f"n must be >= 1 for a tie-density sample, got {self.n}")
        if not 1 <= self.t_d <= self.n:
            raise InvalidParameterError(f"tie density must satisfy 1 <= t_d <= n, got t_d={self.t_d}, n={self.n}")

    @property
    def K(self) -> int:
        # round half to even, like Python's round()
        return max(1, round(self.n / self.t_d))


@dataclass(frozen=True)
class HeavyTailSpec:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise InvalidParameterError(f"n must be >= 0, got {self.n}")


def gen_uniform(spec: UniformKSpec, seed: int) -> np.ndarray:
    """i.i.d. integers uniform on ``{1, ..., K}`` as an int64 array."""
    rng = make_rng(seed)
    return rng.integers(1, spec.K, size=spec.n, dtype=np.int64, endpoint=True)


def gen_tied(spec: TieDensitySpec, seed: int) -> np.ndarray:
    """Tie-density sample; i.i.d. uniform with ``K = round(n / t_d)``.

    With ``spec.exact`` the values ``1..K`` each appear ``floor(n/K)`` or
    ``ceil(n/K)`` times, in a random order.
    """
    K = spec.K
    if not spec.exact:
        return gen_uniform(UniformKSpec(spec.n, K), seed)
    values = np.arange(spec.n, dtype=np.int64) % K + 1
    make_rng(seed).shuffle(values)
    return values


def realized_tie_density(values) -> float:
    """Mean copies per distinct value actually present (``n / K'``)."""
    values = np.asarray(values)
    if values.size == 0:
        return 0.0
    return values.size / np.unique(values).size


def heavy_tail_k(u) -> tuple[np.ndarray, int]:
    """Inverse-CDF index for ``P(k) = 2**-k``.

    Returns the smallest ``k >= 1`` with ``1 - 2**-k >= u`` for each entry and
    the number of entries clipped at ``HEAVY_TAIL_K_CAP``.
    """
    u = np.asarray(u, dtype=np.float64)
    if np.any((u < 0) | (u >= 1)):
        raise InvalidParameterError("uniform variates must lie in [0, 1)")
    # 1 - u = m * 2**e with m in [0.5, 1) gives ceil(-log2(1 - u)) == 1 - e exactly
    _, e = np.frexp(1.0 - u)
    k = np.maximum(1 - e.astype(np.int64), 1)
    capped = int(np.count_nonzero(k > HEAVY_TAIL_K_CAP))
    return np.minimum(k, HEAVY_TAIL_K_CAP), capped


def heavy_tail_value(k) -> np.ndarray:
    """``(-1)**k * 2**k / k`` for integer ``k >= 1``."""
    k = np.asarray(k, dtype=np.int64)
    sign = np.where(k % 2 == 1, -1.0, 1.0)
    return sign * np.ldexp(1.0, k) / k


def gen_heavy_tail(spec: HeavyTailSpec, seed: int) -> np.ndarray:
    u = make_rng(seed).random(spec.n)
    k, capped = heavy_tail_k(u)
    if capped:
        log.warning("heavy-tail draw hit k cap %d in %d of %d samples", HEAVY_TAIL_K_CAP, capped, spec.n)
    return heavy_tail_value(k)


def format_sample(value) -> str:
    """Decimal text for one sample: plain integers, shortest round-trip floats."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))
