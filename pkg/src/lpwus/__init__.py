"""DFT-s-OFDM based OOK wake-up signals and a low-power envelope receiver.

Generation (:func:`generate_wus_symbol`, :func:`fast_coefficients`), the LS
rectangular waveform, an OFDM link with TDL-C fading, an envelope-detection
receiver and a reproducible Monte Carlo BER harness.
"""

__version__ = "0.1.0"

from .bits import bcal_table, dft_coded_bits, dft_info_bits_manchester, manchester_encode  # noqa: E402
from .config import ConfigError, FdssSpec, SpreadingSpec, WaveformConfig  # noqa: E402
from .fastpath import build_profile, fast_coefficients  # noqa: E402
from .harness import guard_sweep, run_ber  # noqa: E402
from .precoder import generate_wus_symbol  # noqa: E402
from .scenario import Scenario, load_preset, load_scenario, parse_scenario  # noqa: E402

__all__ = [
    "ConfigError",
    "FdssSpec",
    "Scenario",
    "SpreadingSpec",
    "WaveformConfig",
    "__version__",
    "bcal_table",
    "build_profile",
    "dft_coded_bits",
    "dft_info_bits_manchester",
    "fast_coefficients",
    "generate_wus_symbol",
    "guard_sweep",
    "load_preset",
    "load_scenario",
    "manchester_encode",
    "parse_scenario",
    "run_ber",
]
