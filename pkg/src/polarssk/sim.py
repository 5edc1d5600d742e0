"""Experiment orchestration: capacity sweeps, code design and BER sweeps.

Each runner takes an :class:`ExperimentConfig`, writes its output file
incrementally and returns the in-memory records. Every random draw comes from
a counter-based stream keyed by the seed and a block index. The block index
does not depend on the SNR point, so all points see the same messages,
channels and unit noise (common random numbers). Outputs are therefore
byte-identical for any worker count.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from itertools import count
from pathlib import Path
from typing import IO, Any, Iterable

import numpy as np

from . import __version__
from ._parallel import map_blocks
from ._rng import Purpose, stream
from .capacity import DEFAULT_FRAMES, estimate_capacities, find_design_snr
from .construction import DEFAULT_SAMPLES, allocate_rates, estimate_reliabilities, most_reliable, segregate
from .errors import InvalidArgumentError
from .link import BicmSystemSpec, MlcSystemSpec, simulate_block
from .polar import PolarCodeSpec, is_power_of_two
from .ssk import SskConfig

DESIGN_VERSION = 1
CAPACITY_SCHEMA = "capacity-v1"
BER_SCHEMA = "ber-v1"
ARMS = ("mlc", "bicm")


@dataclass
class ExperimentConfig:
    """Everything a run needs; every field is also a CLI flag.

    ``n`` is the component block length ``N`` (a power of two). The SNR grid
    runs from ``snr_start`` to ``snr_stop`` inclusive. ``noiseless`` forces a
    zero noise variance at every point and exists for debugging.
    """

    mode: str = "ber"
    nt: int = 16
    nr: int = 1
    n: int = 256
    bpcu: float | None = None
    snr_start: float = 0.0
    snr_stop: float = 0.0
    snr_step: float = 0.5
    frames_max: int = 5_000_000
    fe_limit: int = 100
    seed: int = 0
    design: str | None = None
    out: str | None = None
    arm: str = "both"
    workers: int = 1
    noise_scale: float = 0.5
    noiseless: bool = False
    capacity_frames: int = DEFAULT_FRAMES
    samples: int = DEFAULT_SAMPLES
    block_frames: int = 64
    fading: str = "fast"

    def __post_init__(self):
        if self.mode not in ("capacity", "design", "ber"):
            raise InvalidArgumentError(f"mode must be capacity, design or ber, got {self.mode!r}")
        if self.arm not in ("mlc", "bicm", "both"):
            raise InvalidArgumentError(f"arm must be mlc, bicm or both, got {self.arm!r}")
        if self.fading not in ("fast", "block"):
            raise InvalidArgumentError(f"fading must be fast or block, got {self.fading!r}")
        if not is_power_of_two(self.n) or self.n < 2:
            raise InvalidArgumentError(f"n (component length) must be a power of two >= 2, got {self.n}")
        for name in ("frames_max", "fe_limit", "workers", "block_frames"):
            if getattr(self, name) < 1:
                raise InvalidArgumentError(f"{name} must be >= 1")
        if not self.snr_step > 0:
            raise InvalidArgumentError("snr_step must be positive")
        if self.mode in ("capacity", "ber") and self.snr_stop < self.snr_start:
            raise InvalidArgumentError(
                f"empty SNR grid: stop {self.snr_stop} is below start {self.snr_start}"
            )
        if self.mode == "design" and self.bpcu is None:
            raise InvalidArgumentError("design mode needs a target bpcu")
        if self.mode == "ber" and not self.design:
            raise InvalidArgumentError("ber mode needs a design file")
        self.ssk  # validates nt, nr and noise_scale

    @property
    def ssk(self) -> SskConfig:
        return SskConfig(self.nt, self.nr, noise_scale=self.noise_scale)

    @property
    def arms(self) -> tuple[str, ...]:
        return ARMS if self.arm == "both" else (self.arm,)

    def snr_grid(self) -> np.ndarray:
        """Grid points ``start, start + step, ...`` up to and including ``stop``."""
        steps = math.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)
        return np.round(self.snr_start + self.snr_step * np.arange(steps + 1), 10)

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidArgumentError("config file must hold a JSON object")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(data)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class BerRecord:
    arm: str
    es_n0_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    K: int

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.K) if self.frames and self.K else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    def row(self) -> list[str]:
        return [
            self.arm,
            _fmt(self.es_n0_db),
            str(self.frames),
            str(self.bit_errors),
            str(self.frame_errors),
            _fmt(self.ber),
            _fmt(self.fer),
        ]


def _fmt(x: float) -> str:
    return repr(float(x))


def _open_out(path: str | Path | None) -> IO[str] | None:
    if path is None:
        return None
    p = Path(path)
    if p.parent != Path("") and not p.parent.exists():
        raise OSError(f"output directory {p.parent} does not exist")
    return open(p, "w", newline="")


def _emit(fh: IO[str] | None, cells: Iterable[str]) -> None:
    if fh is not None:
        fh.write(",".join(cells) + "\n")


# capacity ------------------------------------------------------------------


def run_capacity(config: ExperimentConfig) -> list:
    """Sweep the SNR grid and write one capacity row per point.

    Columns are ``es_n0_db, c_total, c1..cm, se_total, se1..sem``. A JSON
    report with the full :class:`CapacityReport` of every point is written
    next to the CSV (same name, ``.json`` suffix).
    """
    grid = config.snr_grid()
    m = config.ssk.m
    reports = []
    fh = _open_out(config.out)
    try:
        _emit(fh, [f"# polarssk {__version__} {CAPACITY_SCHEMA}"])
        _emit(
            fh,
            ["es_n0_db", "c_total", *[f"c{i}" for i in range(1, m + 1)],
             "se_total", *[f"se{i}" for i in range(1, m + 1)]],
        )
        for db in grid:
            rep = estimate_capacities(config.ssk.at(db), config.capacity_frames, config.seed, config.workers)
            reports.append(rep)
            _emit(
                fh,
                [_fmt(db), _fmt(rep.total_capacity), *map(_fmt, rep.level_capacity),
                 _fmt(rep.total_std_error), *map(_fmt, rep.level_std_error)],
            )
            if fh is not None:
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    if config.out is not None:
        Path(config.out).with_suffix(".json").write_text(
            json.dumps({"schema": CAPACITY_SCHEMA, "points": [r.to_dict() for r in reports]}, indent=2)
        )
    return reports


# design --------------------------------------------------------------------


def run_design(config: ExperimentConfig) -> dict:
    """Design-SNR search, capacity-rule rates and block-wise segregation.

    Returns the design document; it is also written to ``config.out`` as
    JSON. Information sets in the document are 1-based.
    """
    ssk = config.ssk
    target = float(config.bpcu)
    if target <= 0:
        raise InvalidArgumentError("target bpcu must be positive; an all-frozen design carries no data")
    dsnr = find_design_snr(ssk, target, frames=config.capacity_frames, seed=config.seed, workers=config.workers)
    report = estimate_capacities(ssk.at(dsnr), config.capacity_frames, config.seed, config.workers)
    alloc = allocate_rates(report, config.n)
    if alloc.total == 0:
        raise InvalidArgumentError("capacity rule allocated no information bits")
    profile = estimate_reliabilities(
        ssk.m * config.n, dsnr, config.samples, config.seed, ssk.noise_scale, config.workers
    )
    levels = segregate(profile, alloc)
    bicm = most_reliable(profile, alloc.total)
    doc = {
        "version": DESIGN_VERSION,
        "ssk": {"nt": ssk.nt, "nr": ssk.nr, "noise_scale": ssk.noise_scale},
        "target_bpcu": target,
        "dsnr_db": dsnr,
        "seed": config.seed,
        "samples": config.samples,
        "capacity_frames": config.capacity_frames,
        "level_capacity": report.level_capacity.tolist(),
        "levels": [
            {"n_exp": c.n, "N": c.N, "K": c.K, "info_set": [i + 1 for i in c.info_set]}
            for c in levels
        ],
        "bicm": {
            "N": bicm.N,
            "K": bicm.K,
            "info_set": [i + 1 for i in bicm.info_set],
            "interleaver_seed": config.seed,
        },
    }
    if config.out is not None:
        Path(config.out).write_text(json.dumps(doc, indent=1))
    return doc


def _code_from_doc(entry: dict, N: int) -> PolarCodeSpec:
    info = [int(i) - 1 for i in entry["info_set"]]
    if len(info) != int(entry["K"]):
        raise InvalidArgumentError("design file: K does not match the information set size")
    return PolarCodeSpec(N, tuple(info))


def systems_from_design(doc: dict, config: ExperimentConfig | None = None) -> tuple[MlcSystemSpec, BicmSystemSpec]:
    """Rebuild both transceivers from a design document, checking it against ``config``."""
    try:
        if doc.get("version") != DESIGN_VERSION:
            raise InvalidArgumentError(f"unsupported design version {doc.get('version')!r}")
        ssk = SskConfig(int(doc["ssk"]["nt"]), int(doc["ssk"]["nr"]),
                        noise_scale=float(doc["ssk"].get("noise_scale", 0.5)))
        levels = doc["levels"]
        N = 1 << int(levels[0]["n_exp"])
        if any(int(lv["n_exp"]) != levels[0]["n_exp"] for lv in levels):
            raise InvalidArgumentError("design file: levels have different lengths")
        mlc = MlcSystemSpec(ssk, tuple(_code_from_doc(lv, N) for lv in levels))
        b = doc["bicm"]
        bicm = BicmSystemSpec.seeded(ssk, _code_from_doc(b, ssk.m * N), int(b["interleaver_seed"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidArgumentError(f"malformed design file: {exc!r}") from exc
    if mlc.K != bicm.K:
        raise InvalidArgumentError(f"design file: MLC carries {mlc.K} bits but BICM carries {bicm.K}")
    if config is not None:
        mine = (config.nt, config.nr, config.n, config.noise_scale)
        theirs = (ssk.nt, ssk.nr, N, ssk.noise_scale)
        if mine != theirs:
            raise InvalidArgumentError(
                f"design (nt, nr, N, noise_scale) = {theirs} does not match config {mine}"
            )
    return mlc, bicm


def load_design(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"design file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidArgumentError("design file must hold a JSON object")
    return doc


# BER -----------------------------------------------------------------------


def _ber_block(mlc, bicm, seed, block, n_frames, noise_var, fading):
    rng = stream(seed, Purpose.FRAMES, block)
    out = simulate_block(rng, n_frames, noise_var, mlc, bicm, fading)
    return {arm: (int(e.sum()), int(np.count_nonzero(e))) for arm, e in out.items()}


def simulate_point(
    mlc: MlcSystemSpec | None,
    bicm: BicmSystemSpec | None,
    es_n0_db: float,
    config: ExperimentConfig,
) -> list[BerRecord]:
    """Simulate one SNR point for the given arms with the stopping rule.

    Frames run in blocks of ``config.block_frames``; each arm stops after the
    first block that brings it to ``fe_limit`` frame errors or to
    ``frames_max`` frames. While both arms run they decode the very same
    blocks.
    """
    systems = {"mlc": mlc, "bicm": bicm}
    active = [a for a in ARMS if systems[a] is not None]
    if not active:
        raise InvalidArgumentError("no arm to simulate")
    K = systems[active[0]].K
    noise_var = 0.0 if config.noiseless else config.ssk.at(es_n0_db).noise_var
    tally = {a: [0, 0, 0] for a in active}  # frames, bit errors, frame errors
    bf = config.block_frames
    n_blocks = math.ceil(config.frames_max / bf)
    running = list(active)

    def tasks():
        for b in range(n_blocks):
            if not running:
                return
            n = min(bf, config.frames_max - b * bf)
            yield (
                mlc if "mlc" in running else None,
                bicm if "bicm" in running else None,
                config.seed, b, n, noise_var, config.fading,
            )

    gen = map_blocks(_ber_block, tasks(), config.workers)
    try:
        for b, result in zip(count(), gen):
            n = min(bf, config.frames_max - b * bf)
            for arm in list(running):
                bits, frames_in_error = result[arm]
                t = tally[arm]
                t[0] += n
                t[1] += bits
                t[2] += frames_in_error
                if t[2] >= config.fe_limit or t[0] >= config.frames_max:
                    running.remove(arm)
            if not running:
                break
    finally:
        gen.close()
    return [BerRecord(a, float(es_n0_db), *tally[a], K) for a in active]


def run_ber(config: ExperimentConfig) -> list[BerRecord]:
    """Sweep the SNR grid for the selected arms; rows are flushed per point."""
    doc = load_design(config.design)
    mlc, bicm = systems_from_design(doc, config)
    arms = config.arms
    mlc = mlc if "mlc" in arms else None
    bicm = bicm if "bicm" in arms else None
    records = []
    fh = _open_out(config.out)
    try:
        _emit(fh, [f"# polarssk {__version__} {BER_SCHEMA}"])
        _emit(fh, ["arm", "es_n0_db", "frames", "bit_errors", "frame_errors", "ber", "fer"])
        for db in config.snr_grid():
            point = simulate_point(mlc, bicm, float(db), config)
            records.extend(point)
            for rec in point:
                _emit(fh, rec.row())
            if fh is not None:
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return records


def run(config: ExperimentConfig):
    """Dispatch on ``config.mode``."""
    return {"capacity": run_capacity, "design": run_design, "ber": run_ber}[config.mode](config)
