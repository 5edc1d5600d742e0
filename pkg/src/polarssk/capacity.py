"""Monte-Carlo ergodic capacities of SSK bit levels under multistage decoding.

For each trial a fresh channel ``H``, a uniform antenna ``k`` and ``y = h_k + n``
are drawn. For every level ``i`` the integrand

    log2( 2^i * sum_{k' in X(b^i)} exp(-||y - h_k'||^2 / s2) / sum_{k'} exp(...) )

is accumulated, where ``X(b^i)`` holds the antennas sharing the low ``i`` label
bits of ``k``; the average is the subset capacity ``C_i^0``. Level ``m`` uses
the singleton subset and gives the total capacity ``C(X)``. The per-level
capacities are the successive differences, so they sum to ``C(X)`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ._parallel import map_blocks
from ._rng import Purpose, complex_normal, stream
from .errors import InvalidArgumentError, NumericalError, OutOfRangeError
from .ssk import SskConfig, log_metrics

BLOCK = 10_000
MIN_FRAMES = 10_000
DEFAULT_FRAMES = 200_000
LN2 = math.log(2.0)


@dataclass
class CapacityReport:
    """Capacities in bits per channel use, with standard errors.

    ``subset_capacity[i-1]`` is ``C_i^0`` for ``i = 1..m-1``;
    ``level_capacity[i-1]`` is ``C^i`` for ``i = 1..m``;
    ``per_label[i-1][j]`` is ``C_{i,j}``, the mean integrand conditioned on the
    low ``i`` label bits being ``j`` (``i = m`` gives the per-antenna terms).
    """

    config: SskConfig
    frames: int
    seed: int
    total_capacity: float
    subset_capacity: np.ndarray
    level_capacity: np.ndarray
    per_label: list = field(repr=False)
    total_std_error: float = 0.0
    subset_std_error: np.ndarray = None
    level_std_error: np.ndarray = None

    @property
    def m(self) -> int:
        return self.config.m

    def to_dict(self) -> dict:
        return {
            "nt": self.config.nt,
            "nr": self.config.nr,
            "es_n0_db": self.config.es_n0_db,
            "noise_scale": self.config.noise_scale,
            "frames": self.frames,
            "seed": self.seed,
            "total_capacity": self.total_capacity,
            "total_std_error": self.total_std_error,
            "subset_capacity": self.subset_capacity.tolist(),
            "subset_std_error": self.subset_std_error.tolist(),
            "level_capacity": self.level_capacity.tolist(),
            "level_std_error": self.level_std_error.tolist(),
            "per_label": [row.tolist() for row in self.per_label],
        }


def level_integrands(metrics, k) -> np.ndarray:
    """Per-trial integrands ``g_i``, shape ``(m, n)``, from antenna metrics.

    ``metrics`` is ``(n, nt)`` (see :func:`~polarssk.ssk.log_metrics`) and
    ``k`` holds the 0-based transmitted labels. Row ``i-1`` averages to
    ``C_i^0`` for ``i < m``; the last row averages to ``C(X)``.
    """
    metrics = np.asarray(metrics, dtype=np.float64)
    k = np.asarray(k, dtype=np.intp)
    n, nt = metrics.shape
    m = nt.bit_length() - 1
    rows = np.arange(n)
    total = logsumexp(metrics, axis=-1)
    g = np.empty((m, n))
    for i in range(1, m):
        sub = 1 << i
        sel = metrics.reshape(n, nt // sub, sub)[rows, :, k & (sub - 1)]
        g[i - 1] = (i * LN2 + logsumexp(sel, axis=-1) - total) / LN2
    g[m - 1] = (m * LN2 + metrics[rows, k] - total) / LN2
    return g


def _block_sums(nt, nr, noise_var, seed, block, n):
    m = nt.bit_length() - 1
    rng = stream(seed, Purpose.CAPACITY, block)
    H = complex_normal(rng, (n, nr, nt))
    k = rng.integers(0, nt, size=n)
    y = H[np.arange(n), :, k] + complex_normal(rng, (n, nr), noise_var)
    g = level_integrands(log_metrics(y, H, noise_var), k)
    diff = np.diff(g, axis=0, prepend=0.0)
    label_sums = [np.bincount(k & ((1 << i) - 1), weights=g[i - 1], minlength=1 << i) for i in range(1, m + 1)]
    label_counts = [np.bincount(k & ((1 << i) - 1), minlength=1 << i) for i in range(1, m + 1)]
    return (
        g.sum(axis=1),
        (g * g).sum(axis=1),
        (diff * diff).sum(axis=1),
        label_sums,
        label_counts,
    )


def _std_error(s1, s2, n):
    mean = s1 / n
    var = np.maximum(s2 / n - mean * mean, 0.0) * n / (n - 1)
    return np.sqrt(var / n)


def estimate_capacities(
    config: SskConfig,
    frames: int = DEFAULT_FRAMES,
    seed: int = 0,
    workers: int = 1,
) -> CapacityReport:
    """Estimate ``C(X)``, the subset capacities and the bit-level capacities.

    All levels share the same trials. Blocks of 10 000 trials draw from their
    own counter-based streams, so the result depends only on
    ``(config, frames, seed)``.
    """
    if frames < MIN_FRAMES:
        raise InvalidArgumentError(f"frames must be >= {MIN_FRAMES}, got {frames}")
    m = config.m
    tasks = [
        (config.nt, config.nr, config.noise_var, seed, b, min(BLOCK, frames - b * BLOCK))
        for b in range(math.ceil(frames / BLOCK))
    ]
    s1 = np.zeros(m)
    s2 = np.zeros(m)
    d2 = np.zeros(m)
    lsum = [np.zeros(1 << i) for i in range(1, m + 1)]
    lcnt = [np.zeros(1 << i, dtype=np.int64) for i in range(1, m + 1)]
    for a, b, c, ls, lc in map_blocks(_block_sums, tasks, workers):
        s1 += a
        s2 += b
        d2 += c
        for i in range(m):
            lsum[i] += ls[i]
            lcnt[i] += lc[i]
    if not (np.all(np.isfinite(s1)) and np.all(np.isfinite(s2))):
        raise NumericalError("non-finite capacity accumulator")

    subset = s1 / frames
    se_subset = _std_error(s1, s2, frames)
    total = float(subset[m - 1])
    level = np.diff(subset, prepend=0.0)
    se_level = np.sqrt(np.maximum(d2 / frames - level**2, 0.0) / (frames - 1))
    with np.errstate(invalid="ignore", divide="ignore"):
        per_label = [np.where(c > 0, s / np.maximum(c, 1), np.nan) for s, c in zip(lsum, lcnt)]
    return CapacityReport(
        config=config,
        frames=frames,
        seed=seed,
        total_capacity=total,
        subset_capacity=subset[: m - 1].copy(),
        level_capacity=level,
        per_label=per_label,
        total_std_error=float(se_subset[m - 1]),
        subset_std_error=se_subset[: m - 1].copy(),
        level_std_error=se_level,
    )


def find_design_snr(
    config: SskConfig,
    target_bpcu: float,
    tol_db: float = 0.01,
    frames: int = DEFAULT_FRAMES,
    seed: int = 0,
    bracket: tuple[float, float] = (-30.0, 30.0),
    workers: int = 1,
) -> float:
    """Bisect ``es_n0_db`` until ``C(X)`` meets ``target_bpcu``.

    The result approximates the smallest SNR in ``bracket`` at which the
    estimated ``C(X)`` reaches the target. A target already met at the lower
    end returns the lower end; a target not met at the upper end raises
    :class:`OutOfRangeError`. Every evaluation reuses the same random streams,
    so the estimated capacity is a smooth deterministic function of the SNR.
    Otherwise the midpoint of the final bracket is returned, whose width is
    at most ``tol_db``.
    """
    if not 0 < target_bpcu < config.m:
        raise InvalidArgumentError(f"target must lie in (0, {config.m}), got {target_bpcu}")
    if tol_db <= 0:
        raise InvalidArgumentError("tol_db must be positive")
    lo, hi = bracket

    def total(db):
        return estimate_capacities(config.at(db), frames, seed, workers).total_capacity

    if total(hi) < target_bpcu:
        raise OutOfRangeError(
            f"{target_bpcu} bpcu is not reachable for SNR in [{lo}, {hi}] dB"
        )
    if total(lo) >= target_bpcu:
        return float(lo)
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if total(mid) < target_bpcu:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
