"""Monte Carlo estimate of the waiting time for an increasing run.

Every draw is a pure function of (seed, trial index, draw index), computed
with a SplitMix64-style counter hash.  Trials can therefore be split across
threads in any way without changing a single bit of the result.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from dicerun.errors import DomainError

CONTINUOUS = "inf"

RNG_DESCRIPTION = (
    "splitmix64-counter: key_t = mix64(mix64(seed ^ 0x6a09e667f3bcc909) + (t+1)*G), "
    "u64 = mix64(key_t + (d+1)*G), G = 0x9e3779b97f4a7c15; "
    "uniform = (u64 >> 11) * 2^-53; die face = 1 + floor(uniform * sides)"
)

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SEED_SALT = 0x6A09E667F3BCC909
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))


def _mix64_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix64(z: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps modulo 2^64
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def trial_keys(seed: int, trials: np.ndarray) -> np.ndarray:
    base = np.uint64(_mix64_int(seed ^ _SEED_SALT))
    t = trials.astype(np.uint64) + np.uint64(1)
    return _mix64(base + t * np.uint64(_GOLDEN))


def uniforms(keys: np.ndarray, draw: int) -> np.ndarray:
    """Uniform doubles in [0, 1) for the given trial keys at one draw index."""
    offset = np.uint64(((draw + 1) * _GOLDEN) & _MASK)
    bits = _mix64(keys + offset)
    return (bits >> _S11).astype(np.float64) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class SimConfig:
    sides: Union[int, str]
    run_length: int
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if self.run_length not in (2, 3):
            raise DomainError(f"run_length must be 2 or 3, got {self.run_length}")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not 0 <= self.seed <= _MASK:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.sides != CONTINUOUS:
            if not isinstance(self.sides, int) or isinstance(self.sides, bool):
                raise DomainError(f"sides must be a positive integer or {CONTINUOUS!r}")
            if self.sides < self.run_length:
                # an increasing run of length k needs at least k distinct faces
                raise DomainError(
                    f"a {self.sides}-sided die never shows {self.run_length} increasing values"
                )

    @property
    def continuous(self) -> bool:
        return self.sides == CONTINUOUS


@dataclass(frozen=True)
class SimResult:
    trials: int
    mean: float
    sample_variance: float
    std_error: float
    min_rolls: int
    max_rolls: int
    rng: str = RNG_DESCRIPTION


def roll_counts(cfg: SimConfig, start: int, stop: int) -> np.ndarray:
    """Number of draws used by each trial in [start, stop)."""
    ids = np.arange(start, stop, dtype=np.int64)
    counts = np.zeros(stop - start, dtype=np.int64)
    keys = trial_keys(cfg.seed, ids)
    local = np.arange(stop - start, dtype=np.int64)
    prev = np.full(local.size, -np.inf)
    run = np.zeros(local.size, dtype=np.int64)
    draw = 0
    while local.size:
        u = uniforms(keys, draw)
        value = u if cfg.continuous else np.floor(u * cfg.sides)
        # ties break the run
        run = np.where(value > prev, run + 1, 1)
        prev = value
        draw += 1
        done = run >= cfg.run_length
        if done.any():
            counts[local[done]] = draw
            keep = ~done
            local, keys, prev, run = local[keep], keys[keep], prev[keep], run[keep]
    return counts


def simulate(cfg: SimConfig, workers: int = 1, chunk: Optional[int] = None) -> SimResult:
    """Run ``cfg.trials`` independent episodes and summarise their lengths.

    ``workers`` and ``chunk`` only affect scheduling; the result is a
    function of ``cfg`` alone.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if chunk is None:
        chunk = max(1, -(-cfg.trials // workers))
    bounds = [(s, min(s + chunk, cfg.trials)) for s in range(0, cfg.trials, chunk)]
    if workers == 1:
        parts = [roll_counts(cfg, s, e) for s, e in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: roll_counts(cfg, *b), bounds))
    counts = np.concatenate(parts)
    return summarize(counts)


def summarize(counts: np.ndarray) -> SimResult:
    trials = int(counts.size)
    s1 = int(counts.sum())
    s2 = int(np.dot(counts, counts))
    mean = Fraction(s1, trials)
    if trials > 1:
        var = (Fraction(s2) - Fraction(s1 * s1, trials)) / (trials - 1)
    else:
        var = Fraction(0)
    return SimResult(
        trials=trials,
        mean=float(mean),
        sample_variance=float(var),
        std_error=math.sqrt(var / trials),
        min_rolls=int(counts.min()),
        max_rolls=int(counts.max()),
    )
