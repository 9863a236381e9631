"""Seeded Monte-Carlo estimates of first-passage and stationary quantities.

Trajectory ``k`` draws its letters from a PCG64 stream seeded with ``seed ^ k``,
so results do not depend on how trajectories are batched.  The seed itself is
the spawn key: on its own, ``seed ^ k`` for ``k < N`` gives the same set of
streams for any two seeds that agree above the low bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .absorption import SemaphoreAutomaton, tv_distance


@dataclass(frozen=True)
class SimConfig:
    seed: int = 20240601
    num_trajectories: int = 100_000
    t_max: int = 64

    def __post_init__(self):
        if self.num_trajectories < 1:
            raise ValueError("num_trajectories must be >= 1")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def stream(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed ^ k, spawn_key=(seed,))))


def _letter_draws(cfg: SimConfig, probs: Sequence[float], length: int) -> np.ndarray:
    """Row ``k`` holds ``length`` letter indices of trajectory ``k``."""
    cum = np.cumsum(np.asarray(probs, dtype=float))
    cum[-1] = 1.0
    out = np.empty((cfg.num_trajectories, length), dtype=np.int64)
    for k in range(cfg.num_trajectories):
        u = stream(cfg.seed, k).random(length)
        out[k] = np.searchsorted(cum, u, side="right")
    return out


@dataclass
class FirstPassageEstimate:
    survival: list[float]
    stderr: list[float]
    mean_tau: float
    mean_tau_stderr: float
    censored: int

    @property
    def mean_is_lower_bound(self) -> bool:
        return self.censored > 0


def simulate_first_passage(aut: SemaphoreAutomaton, x, cfg: SimConfig) -> FirstPassageEstimate:
    """Empirical ``Pr(tau > t)`` for ``t = 0..t_max`` and ``E[tau]``, with standard errors.

    Trajectories still transient at ``t_max`` are censored and counted with
    ``tau = t_max``, so the mean is then a lower bound.
    """
    probs = [float(Fraction(p)) for p in (x.require_stochastic() if hasattr(x, "require_stochastic") else x)]
    n = aut.n_transient
    step = np.asarray(aut.step, dtype=np.int64)
    letters = _letter_draws(cfg, probs, cfg.t_max)
    state = np.zeros(cfg.num_trajectories, dtype=np.int64)
    tau = np.full(cfg.num_trajectories, cfg.t_max, dtype=np.int64)
    alive = np.ones(cfg.num_trajectories, dtype=bool)
    counts = [cfg.num_trajectories]
    for t in range(cfg.t_max):
        idx = np.flatnonzero(alive)
        nxt = step[state[idx], letters[idx, t]]
        hit = nxt >= n
        tau[idx[hit]] = t + 1
        alive[idx[hit]] = False
        state[idx[~hit]] = nxt[~hit]
        counts.append(int(alive.sum()))
    N = cfg.num_trajectories
    surv = [c / N for c in counts]
    se = [math.sqrt(p * (1 - p) / N) for p in surv]
    mean = float(tau.mean())
    mean_se = float(tau.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return FirstPassageEstimate(surv, se, mean, mean_se, int(alive.sum()))


def exact_stderr(p, n: int) -> float:
    """Binomial standard error at the exact probability ``p``."""
    p = float(p)
    return math.sqrt(p * (1 - p) / n)


@dataclass
class StationaryEstimate:
    frequencies: list[float]
    tv_to_exact: float | None


def simulate_stationary(
    tables: Sequence[Sequence[int]],
    x,
    cfg: SimConfig,
    start: int = 0,
    exact: Sequence | None = None,
) -> StationaryEstimate:
    """Occupation frequencies of the random left action after a burn-in of ``t_max // 2``.

    Each of the ``num_trajectories`` runs has length ``t_max`` and its own
    stream; counts are pooled.  ``tables[a][s]`` is the image of ``s`` under letter ``a``.
    """
    probs = [float(Fraction(p)) for p in (x.require_stochastic() if hasattr(x, "require_stochastic") else x)]
    T = [list(map(int, row)) for row in tables]
    n = len(T[0])
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    burn = cfg.t_max // 2
    counts = [0] * n
    for k in range(cfg.num_trajectories):
        draws = np.searchsorted(cum, stream(cfg.seed, k).random(cfg.t_max), side="right").tolist()
        s = start
        for a in draws[:burn]:
            s = T[a][s]
        for a in draws[burn:]:
            s = T[a][s]
            counts[s] += 1
    total = sum(counts)
    freq = [c / total for c in counts]
    tv = float(tv_distance(freq, [float(v) for v in exact])) if exact is not None else None
    return StationaryEstimate(freq, tv)
