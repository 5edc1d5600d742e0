"""Space-shift keying over i.i.d. Rayleigh MIMO channels, with soft demappers.

Labels are LSB-first: a label is the integer ``l = sum_j b^j 2^j`` and the bit
``b^j`` of a label is carried by coding level ``j + 1``. Antenna indices in the
public API are 1-based (``k = l + 1``); batch helpers work on 0-based labels.

Every demapper evaluates ratios of exponential sums in the log domain and
clamps its output to ``[-40, 40]``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from ._rng import complex_normal
from .errors import InvalidArgumentError
from .polar import LLR_CLAMP, is_power_of_two


@dataclass(frozen=True)
class SskConfig:
    """SSK system parameters.

    Parameters
    ----------
    nt, nr : int
        Transmit antennas (a power of two, at least 2) and receive antennas.
    es_n0_db : float
        Symbol SNR in dB, with unit average received energy per antenna.
    noise_scale : float
        Complex noise variance per receive antenna divided by ``N0``. The
        default 0.5 is the SNR labelling under which the published 16-SSK
        capacity tables are reproduced; 1.0 is the literal ``CN(0, N0)`` model.
    """

    nt: int
    nr: int
    es_n0_db: float = 0.0
    noise_scale: float = 0.5

    def __post_init__(self):
        if not is_power_of_two(self.nt) or self.nt < 2:
            raise InvalidArgumentError(f"nt must be a power of two >= 2, got {self.nt}")
        if self.nr < 1:
            raise InvalidArgumentError(f"nr must be >= 1, got {self.nr}")
        if not self.noise_scale > 0:
            raise InvalidArgumentError("noise_scale must be positive")

    @property
    def m(self) -> int:
        """Bits per SSK symbol, ``log2(nt)``."""
        return self.nt.bit_length() - 1

    @property
    def n0(self) -> float:
        return 10.0 ** (-self.es_n0_db / 10.0)

    @property
    def noise_var(self) -> float:
        """Variance of each complex noise sample."""
        return self.noise_scale * self.n0

    def at(self, es_n0_db: float) -> "SskConfig":
        return replace(self, es_n0_db=float(es_n0_db))


def label_bits(m: int) -> np.ndarray:
    """Table of shape ``(2**m, m)``; row ``l`` holds ``(b^0, ..., b^{m-1})`` of label ``l``."""
    labels = np.arange(1 << m)
    return ((labels[:, None] >> np.arange(m)) & 1).astype(np.uint8)


def map_bits(bits) -> int:
    """Map label bits ``(b^0, b^1, ..., b^{m-1})`` to a 1-based antenna index."""
    b = np.asarray(bits).reshape(-1)
    if b.size == 0 or np.any((b != 0) & (b != 1)):
        raise InvalidArgumentError("bits must be a non-empty 0/1 sequence")
    return 1 + int(np.dot(b.astype(np.int64), 1 << np.arange(b.size)))


def unmap_bits(k: int, m: int) -> np.ndarray:
    """Inverse of :func:`map_bits`."""
    if not 1 <= k <= (1 << m):
        raise InvalidArgumentError(f"antenna index {k} outside [1, {1 << m}]")
    return label_bits(m)[k - 1].copy()


def bits_to_labels(bits) -> np.ndarray:
    """Vectorised label formation; ``bits[..., j]`` is ``b^j``."""
    b = np.asarray(bits, dtype=np.int64)
    return np.tensordot(b, 1 << np.arange(b.shape[-1]), axes=(-1, 0))


def draw_channel(rng: np.random.Generator, nr: int, nt: int, size=()) -> np.ndarray:
    """Draw ``H`` with i.i.d. CN(0, 1) entries, shape ``(*size, nr, nt)``."""
    size = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
    return complex_normal(rng, (*size, nr, nt))


def transmit(k: int, H, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    """Return ``y = h_k + n`` with ``n ~ CN(0, noise_var I)``; ``k`` is 1-based."""
    H = np.asarray(H)
    nt = H.shape[-1]
    if not 1 <= k <= nt:
        raise InvalidArgumentError(f"antenna index {k} outside [1, {nt}]")
    if noise_var < 0:
        raise InvalidArgumentError("noise_var must be non-negative")
    y = H[:, k - 1].astype(np.complex128, copy=True)
    if noise_var > 0:
        y += complex_normal(rng, y.shape, noise_var)
    return y


def sq_distances(y, H) -> np.ndarray:
    """``||y - h_k||^2`` for every column; ``y`` is (..., nr), ``H`` is (..., nr, nt)."""
    d = np.asarray(y)[..., :, None] - np.asarray(H)
    return np.einsum("...rk,...rk->...k", d.real, d.real) + np.einsum("...rk,...rk->...k", d.imag, d.imag)


def log_metrics(y, H, noise_var: float) -> np.ndarray:
    """Log-likelihoods ``-||y - h_k||^2 / noise_var`` up to a common constant.

    ``noise_var == 0`` is treated as the noiseless limit: the metric is 0 for an
    exact match and ``-inf`` otherwise.
    """
    dist = sq_distances(y, H)
    if noise_var == 0:
        return np.where(dist == 0, 0.0, -np.inf)
    return -dist / noise_var


def _reduce(x, axis, maxlog):
    if maxlog:
        return np.max(x, axis=axis)
    with np.errstate(divide="ignore", invalid="ignore"):
        return logsumexp(x, axis=axis)


def _finish(l0, l1) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        llr = l0 - l1
    return np.clip(np.nan_to_num(llr, nan=0.0), -LLR_CLAMP, LLR_CLAMP)


def msd_llr_from_metrics(metrics, level: int, prior_labels=0, maxlog: bool = False) -> np.ndarray:
    """Multi-stage demapper on precomputed metrics.

    Parameters
    ----------
    metrics : ndarray, shape (..., nt)
        Log-likelihood of each antenna (see :func:`log_metrics`).
    level : int
        Coding level ``i`` in ``1..m``; the LLR is for bit ``b^{i-1}``.
    prior_labels : int or ndarray of int, shape (...)
        Integer value of the already decided bits ``b^0 .. b^{i-2}``.
    """
    metrics = np.asarray(metrics, dtype=np.float64)
    nt = metrics.shape[-1]
    m = nt.bit_length() - 1
    if not 1 <= level <= m:
        raise InvalidArgumentError(f"level must be in [1, {m}], got {level}")
    low = 1 << (level - 1)
    # label = low_bits + low * bit + 2 * low * high  ->  axes (high, bit, low_bits)
    r = metrics.reshape(*metrics.shape[:-1], nt // (2 * low), 2, low)
    idx = np.asarray(prior_labels, dtype=np.intp)
    if np.any((idx < 0) | (idx >= low)):
        raise InvalidArgumentError("prior bits do not fit the level")
    idx = np.broadcast_to(idx, metrics.shape[:-1])[..., None, None, None]
    sel = np.take_along_axis(r, idx, axis=-1)[..., 0]
    both = _reduce(sel, -2, maxlog)
    return _finish(both[..., 0], both[..., 1])


def bicm_llr_from_metrics(metrics, maxlog: bool = False) -> np.ndarray:
    """Prior-free bit LLRs for every label bit; returns shape (..., m)."""
    metrics = np.asarray(metrics, dtype=np.float64)
    nt = metrics.shape[-1]
    m = nt.bit_length() - 1
    out = np.empty((*metrics.shape[:-1], m))
    lead = metrics.shape[:-1]
    for j in range(m):
        r = metrics.reshape(*lead, nt >> (j + 1), 2, 1 << j)
        if maxlog:
            both = np.max(r, axis=(-3, -1))
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                both = logsumexp(r, axis=(-3, -1))
        out[..., j] = _finish(both[..., 0], both[..., 1])
    return out


def msd_llr(y, H, noise_var: float, level: int, prior_bits=(), maxlog: bool = False) -> float:
    """LLR of bit ``b^{level-1}`` given the decided bits ``b^0 .. b^{level-2}``.

    The two hypotheses sum the likelihoods of every antenna whose label agrees
    with ``prior_bits`` on the low bits and has the given value of the current
    bit; the upper bits are free.
    """
    prior = np.asarray(prior_bits, dtype=np.int64).reshape(-1)
    if prior.size != level - 1:
        raise InvalidArgumentError(f"level {level} needs {level - 1} prior bits, got {prior.size}")
    p = int(bits_to_labels(prior)) if prior.size else 0
    return float(msd_llr_from_metrics(log_metrics(y, H, noise_var), level, p, maxlog))


def bicm_llr(y, H, noise_var: float, maxlog: bool = False) -> np.ndarray:
    """Prior-free LLRs of all ``m`` label bits of one received vector."""
    return bicm_llr_from_metrics(log_metrics(y, H, noise_var), maxlog)

