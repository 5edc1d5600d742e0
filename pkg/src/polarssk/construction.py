"""Design-SNR construction of the mother polar code and its split into levels.

Synthesized-channel reliabilities are estimated by genie-aided SC over a SISO
Rayleigh channel with BPSK and perfect receiver CSI: the all-zero codeword is
sent, ``y = h + n``, the channel LLR is ``4 Re(conj(h) y) / s2``, and every
index is decided with all earlier bits known.

Two estimates of each index's error probability are kept. The counted one is
the fraction of wrong decisions. The ranking one averages ``1 / (1 + e^|L|)``
over the genie node LLRs ``L``; it is unbiased for the same probability
because the genie LLR is the exact posterior, and it stays informative for
indices that never err in the sample, which counting cannot rank.

Far below ``1/samples`` even the ranking estimate is carried by a handful of
rare samples and orders indices essentially at random. Indices in that
region are ordered by their mean genie LLR instead, a stable statistic that
grows with reliability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from ._parallel import map_blocks
from ._rng import Purpose, complex_normal, stream
from .capacity import CapacityReport
from .errors import EstimationError, InvalidArgumentError
from .polar import LLR_CLAMP, PolarCodeSpec, is_power_of_two

BLOCK = 2048
MIN_SAMPLES = 10_000
DEFAULT_SAMPLES = 200_000


@dataclass(frozen=True)
class ReliabilityProfile:
    """Per-index genie-aided SC error probability of a length-``L`` polar code.

    ``error_prob`` is the posterior-averaged estimate used for ranking;
    ``counted_error_prob`` is the plain decision-error frequency and
    ``mean_llr`` the average genie node LLR, which orders the indices whose
    ``error_prob`` is below the Monte-Carlo resolution ``1/samples``.
    """

    error_prob: np.ndarray
    design_snr_db: float
    samples: int
    seed: int
    noise_scale: float = 0.5
    counted_error_prob: np.ndarray | None = None
    mean_llr: np.ndarray | None = None

    @property
    def length(self) -> int:
        return int(self.error_prob.size)

    def order(self, indices=None) -> np.ndarray:
        """Positions (within ``indices``, default all) from most to least reliable.

        Indices are sorted by ``error_prob``; those below ``1/samples`` are
        tied at zero and sorted by decreasing ``mean_llr`` when it is known.
        Remaining ties go to the smaller index.
        """
        sel = slice(None) if indices is None else indices
        p = np.asarray(self.error_prob)[sel]
        if self.mean_llr is None:
            return np.argsort(p, kind="stable")
        resolved = np.where(p < 1.0 / self.samples, 0.0, p)
        return np.lexsort((-np.asarray(self.mean_llr)[sel], resolved))


@dataclass(frozen=True)
class RateAllocation:
    K: tuple[int, ...]
    N: int

    @property
    def rates(self) -> tuple[float, ...]:
        return tuple(k / self.N for k in self.K)

    @property
    def total(self) -> int:
        return sum(self.K)

    @property
    def rate(self) -> float:
        return self.total / (len(self.K) * self.N)


def _genie_block(length, noise_var, seed, block, n, minsum):
    rng = stream(seed, Purpose.CONSTRUCTION, block)
    h = complex_normal(rng, (n, length))
    y = h + complex_normal(rng, (n, length), noise_var) if noise_var > 0 else h
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = 4.0 * np.real(np.conj(h) * y) / noise_var
    llr = np.clip(np.nan_to_num(llr, nan=0.0), -LLR_CLAMP, LLR_CLAMP)
    return kernels.genie_stats(llr, minsum)


def estimate_reliabilities(
    total_length: int,
    design_snr_db: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    noise_scale: float = 0.5,
    workers: int = 1,
    minsum: bool = False,
) -> ReliabilityProfile:
    """Monte-Carlo genie-aided SC error probability of every synthesized channel.

    Parameters
    ----------
    total_length : int
        Mother code length (power of two, at least 2).
    design_snr_db : float
        ``Es/N0`` in dB; the complex noise variance is ``noise_scale * 10**(-dB/10)``.
    samples : int
        Number of transmitted codewords (at least 10 000).
    """
    if samples <= 0:
        raise InvalidArgumentError("samples must be positive")
    if samples < MIN_SAMPLES:
        raise InvalidArgumentError(f"samples must be >= {MIN_SAMPLES}, got {samples}")
    if not is_power_of_two(total_length) or total_length < 2:
        raise InvalidArgumentError(f"total_length must be a power of two >= 2, got {total_length}")
    noise_var = noise_scale * 10.0 ** (-design_snr_db / 10.0)
    tasks = [
        (total_length, noise_var, seed, b, min(BLOCK, samples - b * BLOCK), minsum)
        for b in range(math.ceil(samples / BLOCK))
    ]
    counts = np.zeros(total_length, dtype=np.int64)
    soft = np.zeros(total_length)
    llr_sum = np.zeros(total_length)
    for c, p, t in map_blocks(_genie_block, tasks, workers):
        counts += c
        soft += p
        llr_sum += t
    return ReliabilityProfile(
        error_prob=soft / samples,
        counted_error_prob=counts / (2.0 * samples),
        mean_llr=llr_sum / samples,
        design_snr_db=float(design_snr_db),
        samples=samples,
        seed=seed,
        noise_scale=noise_scale,
    )


def allocate_rates(report, N: int, std_errors: Sequence[float] | None = None) -> RateAllocation:
    """Capacity rule: ``K_i = round_half_up(C^i N)`` clamped to ``[0, N]``.

    ``report`` is a :class:`CapacityReport` or a sequence of level capacities.
    A capacity below ``-3`` standard errors is rejected.
    """
    if isinstance(report, CapacityReport):
        caps = np.asarray(report.level_capacity, dtype=float)
        se = np.asarray(report.level_std_error, dtype=float)
    else:
        caps = np.asarray(report, dtype=float).reshape(-1)
        se = np.zeros_like(caps) if std_errors is None else np.asarray(std_errors, dtype=float)
    if N < 1:
        raise InvalidArgumentError("N must be positive")
    if not np.all(np.isfinite(caps)):
        raise EstimationError("level capacities must be finite")
    bad = caps < -3.0 * se
    if np.any(bad):
        raise EstimationError(f"negative capacity estimate at level(s) {np.flatnonzero(bad) + 1}")
    K = np.clip(np.floor(caps * N + 0.5), 0, N).astype(int)
    return RateAllocation(tuple(int(k) for k in K), N)


def segregate(profile: ReliabilityProfile, alloc: RateAllocation) -> list[PolarCodeSpec]:
    """Split the mother code into ``m`` component codes.

    Level ``i`` owns mother indices ``(i-1)N .. iN-1`` and takes its ``K_i``
    most reliable ones (see :meth:`ReliabilityProfile.order`), re-indexed to
    ``0..N-1``.
    """
    N = alloc.N
    m = len(alloc.K)
    if profile.length != m * N:
        raise InvalidArgumentError(f"profile length {profile.length} != m*N = {m * N}")
    specs = []
    for i, k in enumerate(alloc.K):
        if not 0 <= k <= N:
            raise InvalidArgumentError(f"K_{i + 1}={k} outside [0, {N}]")
        best = profile.order(slice(i * N, (i + 1) * N))[:k]
        specs.append(PolarCodeSpec(N, tuple(sorted(best.tolist()))))
    return specs


def most_reliable(profile: ReliabilityProfile, K: int) -> PolarCodeSpec:
    """Single code over the whole profile with the ``K`` most reliable indices."""
    if not 0 <= K <= profile.length:
        raise InvalidArgumentError(f"K={K} outside [0, {profile.length}]")
    return PolarCodeSpec(profile.length, tuple(sorted(profile.order()[:K].tolist())))
