"""Multilevel (MLC/MSD) and bit-interleaved (BICM) polar-coded SSK links.

Frames are arrays: a batch of ``B`` frames carries messages of shape
``(B, K)``, ``N`` SSK symbols each, channels of shape ``(B, N, nr, nt)``.
Single-frame wrappers return :class:`FrameResult`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ._rng import Purpose, complex_normal, stream
from .errors import InvalidArgumentError
from .polar import PolarCodeSpec, encode, sc_decode
from .ssk import SskConfig, bicm_llr_from_metrics, bits_to_labels, log_metrics, msd_llr_from_metrics


@dataclass(frozen=True)
class MlcSystemSpec:
    """One component polar code per SSK label bit; level ``i`` carries ``b^{i-1}``."""

    ssk: SskConfig
    levels: tuple[PolarCodeSpec, ...]

    def __post_init__(self):
        levels = tuple(self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) != self.ssk.m:
            raise InvalidArgumentError(f"need {self.ssk.m} levels, got {len(levels)}")
        if len({c.N for c in levels}) != 1:
            raise InvalidArgumentError("all levels must share N")

    @property
    def N(self) -> int:
        return self.levels[0].N

    @property
    def K(self) -> int:
        return sum(c.K for c in self.levels)

    def split(self, messages: np.ndarray) -> list[np.ndarray]:
        bounds = np.cumsum([0] + [c.K for c in self.levels])
        return [messages[..., bounds[i] : bounds[i + 1]] for i in range(len(self.levels))]


@dataclass(frozen=True)
class BicmSystemSpec:
    """A single length ``m N`` polar code, a fixed interleaver and ``m``-bit grouping."""

    ssk: SskConfig
    code: PolarCodeSpec
    interleaver: np.ndarray = field(repr=False, compare=False)
    interleaver_seed: int | None = None

    def __post_init__(self):
        perm = np.asarray(self.interleaver, dtype=np.intp)
        if self.code.N % self.ssk.m:
            raise InvalidArgumentError("code length must be a multiple of m")
        if perm.shape != (self.code.N,) or not np.array_equal(np.sort(perm), np.arange(self.code.N)):
            raise InvalidArgumentError("interleaver must be a permutation of the code length")
        perm.setflags(write=False)
        object.__setattr__(self, "interleaver", perm)

    @classmethod
    def seeded(cls, ssk: SskConfig, code: PolarCodeSpec, interleaver_seed: int) -> "BicmSystemSpec":
        perm = stream(interleaver_seed, Purpose.INTERLEAVER).permutation(code.N)
        return cls(ssk, code, perm, interleaver_seed)

    @property
    def N(self) -> int:
        return self.code.N // self.ssk.m

    @property
    def K(self) -> int:
        return self.code.K


@dataclass
class FrameResult:
    bit_errors: int
    frame_error: bool
    decoded_message: np.ndarray


def _batch(messages, K):
    msg = np.asarray(messages, dtype=np.uint8)
    single = msg.ndim == 1
    msg = msg[None, :] if single else msg
    if msg.ndim != 2 or msg.shape[1] != K:
        raise InvalidArgumentError(f"message length must be K={K}")
    return msg, single


def mlc_labels(messages, spec: MlcSystemSpec) -> np.ndarray:
    """0-based SSK labels, shape (B, N): symbol ``t`` carries ``c_i[t]`` as bit ``b^{i-1}``."""
    msg, _ = _batch(messages, spec.K)
    codewords = [encode(chunk, code) for chunk, code in zip(spec.split(msg), spec.levels)]
    return bits_to_labels(np.stack(codewords, axis=-1))


def mlc_encode(message, spec: MlcSystemSpec) -> np.ndarray:
    """1-based antenna index per symbol for one message (or a batch)."""
    msg, single = _batch(message, spec.K)
    k = mlc_labels(msg, spec) + 1
    return k[0] if single else k


def msd_decode(
    metrics,
    spec: MlcSystemSpec,
    maxlog: bool = False,
    minsum: bool = False,
    hook: Callable[[int, list], None] | None = None,
    override: Mapping[int, np.ndarray] | None = None,
) -> np.ndarray:
    """Multi-stage demapping and SC decoding of a (B, N, nt) metric batch.

    Level ``i`` is demapped with the re-encoded codeword estimates of levels
    ``1..i-1`` as prior bits. ``hook(i, estimates)`` is called just before
    level ``i`` is demapped; ``override[i]`` replaces the codeword estimate of
    level ``i`` once it has been decoded.
    """
    metrics = np.asarray(metrics, dtype=np.float64)
    B = metrics.shape[0]
    estimates = []
    prior = np.zeros(metrics.shape[:-1], dtype=np.intp)
    messages = []
    for i, code in enumerate(spec.levels, start=1):
        if hook is not None:
            hook(i, list(estimates))
        llr = msd_llr_from_metrics(metrics, i, prior, maxlog)
        msg, cw = sc_decode(llr.reshape(B, spec.N), code, minsum)
        if override is not None and i in override:
            cw = np.broadcast_to(np.asarray(override[i], dtype=np.uint8), cw.shape).copy()
        estimates.append(cw)
        prior = prior + (cw.astype(np.intp) << (i - 1))
        messages.append(msg)
    return np.concatenate(messages, axis=1)


def _check_frame(y_seq, H_seq, N, nr, nt):
    y = np.asarray(y_seq)
    H = np.asarray(H_seq)
    if y.shape != (N, nr) or H.shape != (N, nr, nt):
        raise InvalidArgumentError(
            f"expected y {(N, nr)} and H {(N, nr, nt)}, got {y.shape} and {H.shape}"
        )
    return y, H


def _result(decoded, message) -> FrameResult:
    errors = int(np.count_nonzero(decoded != np.asarray(message, dtype=np.uint8)))
    return FrameResult(errors, errors > 0, decoded)


def msd_receive(y_seq, H_seq, spec: MlcSystemSpec, message, noise_var: float | None = None, **kwargs) -> FrameResult:
    """Decode one frame with the multi-stage receiver and count errors against ``message``."""
    ssk = spec.ssk
    y, H = _check_frame(y_seq, H_seq, spec.N, ssk.nr, ssk.nt)
    nv = ssk.noise_var if noise_var is None else noise_var
    decoded = msd_decode(log_metrics(y, H, nv)[None], spec, **kwargs)[0]
    return _result(decoded, message)


def bicm_labels(messages, spec: BicmSystemSpec) -> np.ndarray:
    """Encode, interleave (``v = c[perm]``) and read groups of ``m`` bits as labels."""
    msg, _ = _batch(messages, spec.K)
    v = encode(msg, spec.code)[:, spec.interleaver]
    return bits_to_labels(v.reshape(msg.shape[0], spec.N, spec.ssk.m))


def bicm_encode(message, spec: BicmSystemSpec) -> np.ndarray:
    """1-based antenna index per symbol for one message (or a batch)."""
    msg, single = _batch(message, spec.K)
    k = bicm_labels(msg, spec) + 1
    return k[0] if single else k


def deinterleave(values, perm) -> np.ndarray:
    """Inverse of ``v = c[perm]`` along the last axis."""
    values = np.asarray(values)
    out = np.empty_like(values)
    out[..., perm] = values
    return out


def bicm_decoder_llrs(metrics, spec: BicmSystemSpec, maxlog: bool = False) -> np.ndarray:
    """Code-order LLRs handed to the BICM decoder, shape (B, m N)."""
    metrics = np.asarray(metrics, dtype=np.float64)
    lv = bicm_llr_from_metrics(metrics, maxlog).reshape(metrics.shape[0], -1)
    return deinterleave(lv, spec.interleaver)


def bicm_decode(metrics, spec: BicmSystemSpec, maxlog: bool = False, minsum: bool = False) -> np.ndarray:
    msg, _ = sc_decode(bicm_decoder_llrs(metrics, spec, maxlog), spec.code, minsum)
    return msg


def bicm_receive(y_seq, H_seq, spec: BicmSystemSpec, message, noise_var: float | None = None, **kwargs) -> FrameResult:
    """Decode one frame with the BICM receiver and count errors against ``message``."""
    ssk = spec.ssk
    y, H = _check_frame(y_seq, H_seq, spec.N, ssk.nr, ssk.nt)
    nv = ssk.noise_var if noise_var is None else noise_var
    decoded = bicm_decode(log_metrics(y, H, nv)[None], spec, **kwargs)[0]
    return _result(decoded, message)


def simulate_block(
    rng: np.random.Generator,
    n_frames: int,
    noise_var: float,
    mlc: MlcSystemSpec | None = None,
    bicm: BicmSystemSpec | None = None,
    fading: str = "fast",
    maxlog: bool = False,
) -> dict[str, np.ndarray]:
    """Run ``n_frames`` frames through each given arm on shared randomness.

    Messages, channels and noise are drawn once and reused by both arms, so
    an A/B comparison sees identical realizations. ``fading="fast"`` draws a
    new ``H`` for every symbol; ``"block"`` keeps one ``H`` per frame.
    Returns per-frame bit-error counts keyed by ``"mlc"`` / ``"bicm"``.
    """
    systems = {name: s for name, s in (("mlc", mlc), ("bicm", bicm)) if s is not None}
    if not systems:
        raise InvalidArgumentError("no arm to simulate")
    ref = next(iter(systems.values()))
    if len({(s.K, s.N, s.ssk.nt, s.ssk.nr) for s in systems.values()}) != 1:
        raise InvalidArgumentError("arms must share K, N and antenna configuration")
    K, N, nr, nt = ref.K, ref.N, ref.ssk.nr, ref.ssk.nt
    msg = rng.integers(0, 2, size=(n_frames, K), dtype=np.uint8)
    if fading == "fast":
        H = complex_normal(rng, (n_frames, N, nr, nt))
    elif fading == "block":
        H = np.broadcast_to(complex_normal(rng, (n_frames, 1, nr, nt)), (n_frames, N, nr, nt))
    else:
        raise InvalidArgumentError(f"unknown fading mode {fading!r}")
    noise = complex_normal(rng, (n_frames, N, nr), noise_var) if noise_var > 0 else 0.0
    out = {}
    for name, system in systems.items():
        labels = mlc_labels(msg, system) if name == "mlc" else bicm_labels(msg, system)
        y = np.take_along_axis(H, labels[:, :, None, None], axis=-1)[..., 0] + noise
        metrics = log_metrics(y, H, noise_var)
        if name == "mlc":
            decoded = msd_decode(metrics, system, maxlog)
        else:
            decoded = bicm_decode(metrics, system, maxlog)
        out[name] = np.count_nonzero(decoded != msg, axis=1)
    return out
