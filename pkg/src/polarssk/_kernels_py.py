"""Pure NumPy implementations of the polar-code hot loops.

These mirror :mod:`polarssk._kernels` (Cython) function for function and are
selected automatically when the compiled module is unavailable. All kernels
work on a batch of frames stacked along axis 0.
"""

import numpy as np


# magnitude below which the tanh form is used (keeps relative accuracy)
SWITCH = 10.0


def boxplus(a, b, minsum=False):
    """Check-node combination of two LLR arrays.

    The sign is taken from the inputs. With ``x = e^-|a|`` and ``y = e^-|b|``
    the magnitude is ``log1p((1 - x)(1 - y) / (x + y))`` while
    ``min(|a|, |b|) < 10``, with ``1 - x`` taken from ``expm1`` for small
    ``|a|`` so that tiny outputs keep full relative precision. Above that it is
    ``lo + ln((1 + e^-(|a|+|b|)) / (1 + e^-(hi-lo)))``, which never overflows.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    aa = np.abs(a)
    ab = np.abs(b)
    lo = np.minimum(aa, ab)
    hi = np.maximum(aa, ab)
    if minsum:
        m = lo
    else:
        x = np.exp(-aa)
        y = np.exp(-ab)
        p = np.where(aa < 0.7, -np.expm1(-aa), 1.0 - x)
        q = np.where(ab < 0.7, -np.expm1(-ab), 1.0 - y)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            small = np.log1p(p * q / (x + y))
        large = lo + np.log((1.0 + np.exp(-(aa + ab))) / (1.0 + np.exp(lo - hi)))
        m = np.where(lo < SWITCH, small, large)
        m = np.where(lo == 0.0, 0.0, m)
    return np.where((a < 0) != (b < 0), -m, m)


def polar_transform(u):
    """Batch ``x = u F^{(x)n}`` over GF(2) on a (B, N) uint8 array."""
    x = np.array(u, dtype=np.uint8, copy=True, order="C")
    B, N = x.shape
    h = 1
    while h < N:
        v = x.reshape(B, N // (2 * h), 2, h)
        v[:, :, 0, :] ^= v[:, :, 1, :]
        h *= 2
    return x


def _sc_node(L, frozen, fval, csum, minsum):
    B, n = L.shape
    if csum[n] == csum[0]:
        u = np.broadcast_to(fval, (B, n)).copy()
        return u, polar_transform(u)
    if n == 1:
        u = (L < 0).astype(np.uint8)
        return u, u.copy()
    h = n // 2
    a = L[:, :h]
    b = L[:, h:]
    ua, va = _sc_node(boxplus(a, b, minsum), frozen[:h], fval[:h], csum[: h + 1], minsum)
    ub, vb = _sc_node(b + (1.0 - 2.0 * va) * a, frozen[h:], fval[h:], csum[h:], minsum)
    return np.concatenate([ua, ub], axis=1), np.concatenate([va ^ vb, vb], axis=1)


def sc_decode(llr, frozen, fval, minsum=False):
    """Successive-cancellation decoding of a (B, N) LLR batch.

    Returns the decided input vectors ``u`` and their re-encoded codewords
    ``x``, both (B, N) uint8. LLRs equal to zero decide bit 0.
    """
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    frozen = np.asarray(frozen, dtype=np.uint8)
    fval = np.asarray(fval, dtype=np.uint8)
    csum = np.concatenate([[0], np.cumsum(frozen == 0)])
    return _sc_node(llr, frozen, fval, csum, minsum)


def genie_stats(llr, minsum=False):
    """Genie-aided SC statistics of every synthesized channel.

    ``llr`` holds (S, N) channel LLRs of the all-zero codeword. With every
    earlier decision fixed to its true value 0, the partial sums vanish and
    the whole decision tree collapses into ``log2 N`` butterfly stages.

    Returns
    -------
    counts : ndarray of int64
        Decision errors in half units: a negative node LLR adds 2, an exact
        zero (a coin-flip decision) adds 1.
    soft : ndarray of float64
        Sum over samples of ``1 / (1 + exp(|L|))``, the posterior probability
        that the MAP decision on node LLR ``L`` is wrong.
    total : ndarray of float64
        Sum over samples of the node LLR itself.
    """
    L = np.array(llr, dtype=np.float64, copy=True, order="C")
    S, N = L.shape
    h = N // 2
    while h >= 1:
        v = L.reshape(S, N // (2 * h), 2, h)
        a = v[:, :, 0, :].copy()
        b = v[:, :, 1, :]
        v[:, :, 0, :] = boxplus(a, b, minsum)
        b += a
        h //= 2
    counts = 2 * np.count_nonzero(L < 0, axis=0) + np.count_nonzero(L == 0, axis=0)
    e = np.exp(-np.abs(L))
    return counts.astype(np.int64), np.sum(e / (1.0 + e), axis=0), np.sum(L, axis=0)
