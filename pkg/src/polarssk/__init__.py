"""Multilevel polar-coded space-shift keying: capacity-rule design and BER simulation."""

__version__ = "0.1.0"

from .capacity import CapacityReport, estimate_capacities, find_design_snr
from .construction import (
    RateAllocation,
    ReliabilityProfile,
    allocate_rates,
    estimate_reliabilities,
    most_reliable,
    segregate,
)
from .errors import (
    EstimationError,
    InvalidArgumentError,
    NumericalError,
    OutOfRangeError,
    PolarSskError,
)
from .kernels import BACKEND
from .link import (
    BicmSystemSpec,
    FrameResult,
    MlcSystemSpec,
    bicm_encode,
    bicm_receive,
    mlc_encode,
    msd_decode,
    msd_receive,
    simulate_block,
)
from .polar import PolarCodeSpec, encode, polar_transform, sc_decode
from .sim import BerRecord, ExperimentConfig, run_ber, run_capacity, run_design
from .ssk import SskConfig, bicm_llr, map_bits, msd_llr, transmit, unmap_bits

__all__ = [
    "BACKEND",
    "BerRecord",
    "BicmSystemSpec",
    "CapacityReport",
    "EstimationError",
    "ExperimentConfig",
    "FrameResult",
    "InvalidArgumentError",
    "MlcSystemSpec",
    "NumericalError",
    "OutOfRangeError",
    "PolarCodeSpec",
    "PolarSskError",
    "RateAllocation",
    "ReliabilityProfile",
    "SskConfig",
    "allocate_rates",
    "bicm_encode",
    "bicm_llr",
    "bicm_receive",
    "encode",
    "estimate_capacities",
    "estimate_reliabilities",
    "find_design_snr",
    "map_bits",
    "mlc_encode",
    "most_reliable",
    "msd_decode",
    "msd_llr",
    "msd_receive",
    "polar_transform",
    "run_ber",
    "run_capacity",
    "run_design",
    "sc_decode",
    "segregate",
    "simulate_block",
    "transmit",
    "unmap_bits",
]
