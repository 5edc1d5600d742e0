"""Binary polar codes in natural (Kronecker) order.

Encoding is ``x = u F^{(x)n}`` with ``F = [[1, 0], [1, 1]]`` and no bit-reversal
permutation. Decoding is plain successive cancellation with the exact
check-node rule by default. Index sets are 0-based throughout the Python API.

All functions accept either a single vector of length ``N`` or a batch of
shape ``(B, N)``; batches are decoded frame-independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidArgumentError

LLR_CLAMP = 40.0


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PolarCodeSpec:
    """A length ``N = 2**n`` polar code with information set ``info_set``.

    Parameters
    ----------
    N : int
        Block length, a power of two (``N >= 2``).
    info_set : sequence of int
        0-based positions of the ``K`` information bits.
    frozen_values : sequence of int, optional
        Length-``N`` vector whose entries on the frozen positions give the
        frozen bit values. Defaults to all zeros.
    """

    N: int
    info_set: tuple[int, ...]
    frozen_values: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not is_power_of_two(self.N) or self.N < 2:
            raise InvalidArgumentError(f"N must be a power of two >= 2, got {self.N}")
        info = tuple(sorted(int(i) for i in self.info_set))
        if len(set(info)) != len(info):
            raise InvalidArgumentError("info_set contains duplicate indices")
        if info and (info[0] < 0 or info[-1] >= self.N):
            raise InvalidArgumentError(f"info_set indices must lie in [0, {self.N})")
        object.__setattr__(self, "info_set", info)
        if self.frozen_values is None:
            fv = np.zeros(self.N, dtype=np.uint8)
        else:
            fv = np.array(self.frozen_values, dtype=np.uint8).reshape(-1)
            if fv.shape != (self.N,) or np.any(fv > 1):
                raise InvalidArgumentError("frozen_values must be N bits")
        fv[list(info)] = 0
        fv.setflags(write=False)
        object.__setattr__(self, "frozen_values", fv)

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def K(self) -> int:
        return len(self.info_set)

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        mask[list(self.info_set)] = True
        return mask

    @property
    def frozen_mask(self) -> np.ndarray:
        return ~self.info_mask

    @classmethod
    def rate_one(cls, N: int) -> "PolarCodeSpec":
        return cls(N, tuple(range(N)))


def _as_batch(a, dtype) -> tuple[np.ndarray, bool]:
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim == 1:
        return arr[None, :], True
    if arr.ndim != 2:
        raise InvalidArgumentError(f"expected a vector or a (B, N) batch, got shape {arr.shape}")
    return arr, False


def polar_transform(u) -> np.ndarray:
    """Return ``u F^{(x)n}`` over GF(2) for a bit vector or a batch of them."""
    batch, single = _as_batch(u, np.uint8)
    if not is_power_of_two(batch.shape[1]):
        raise InvalidArgumentError(f"length must be a power of two, got {batch.shape[1]}")
    if np.any(batch > 1):
        raise InvalidArgumentError("input must contain only bits")
    x = kernels.polar_transform(batch)
    return x[0] if single else x


def encode(message, spec: PolarCodeSpec) -> np.ndarray:
    """Scatter ``message`` onto ``spec.info_set``, fill frozen values, transform."""
    batch, single = _as_batch(message, np.uint8)
    if batch.shape[1] != spec.K:
        raise InvalidArgumentError(f"message length {batch.shape[1]} != K={spec.K}")
    u = np.broadcast_to(spec.frozen_values, (batch.shape[0], spec.N)).copy()
    u[:, list(spec.info_set)] = batch
    x = kernels.polar_transform(u)
    return x[0] if single else x


def sc_decode(llr, spec: PolarCodeSpec, minsum: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Successive-cancellation decoding.

    Parameters
    ----------
    llr : array_like
        Channel LLRs ``ln P(0)/P(1)``, shape ``(N,)`` or ``(B, N)``. Values are
        clamped to ``[-40, 40]`` before decoding.
    spec : PolarCodeSpec
    minsum : bool
        Use the min-sum check-node approximation instead of the exact rule.

    Returns
    -------
    message : ndarray of uint8
        Decided information bits, shape ``(K,)`` or ``(B, K)``.
    codeword : ndarray of uint8
        Re-encoded codeword estimate; always equal to ``encode(message, spec)``.
    """
    batch, single = _as_batch(llr, np.float64)
    if batch.shape[1] != spec.N:
        raise InvalidArgumentError(f"LLR length {batch.shape[1]} != N={spec.N}")
    batch = np.clip(np.nan_to_num(batch, nan=0.0), -LLR_CLAMP, LLR_CLAMP)
    u, x = kernels.sc_decode(batch, spec.frozen_mask.astype(np.uint8), spec.frozen_values, minsum)
    msg = u[:, list(spec.info_set)]
    if single:
        return msg[0], x[0]
    return msg, x


def hard_llr(codeword, magnitude: float = 20.0) -> np.ndarray:
    """Noiseless LLRs ``magnitude * (1 - 2 c)`` for a codeword (or batch)."""
    return magnitude * (1.0 - 2.0 * np.asarray(codeword, dtype=np.float64))

