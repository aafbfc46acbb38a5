import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Dict
from dotenv import load_dotenv

from veech.errors import ConfigError

# Configuration
CONFIG_FILE = "config_file.env"
if os.path.exists(CONFIG_FILE):
    load_dotenv(CONFIG_FILE)

ENV_PREFIX = "VEECH_"
TOOL_VERSION = "1.0.0"
FORMATS = ("json", "csv", "text")

# Run defaults, every one overridable with VEECH_<FLAG>
Q_MAX = int(os.getenv("VEECH_Q_MAX", 64))
PREC_BITS = int(os.getenv("VEECH_PREC_BITS", 64))
WORKERS = int(os.getenv("VEECH_WORKERS", os.cpu_count() or 1))
TOLERANCE = os.getenv("VEECH_TOLERANCE", "1e-6")
OUT = os.getenv("VEECH_OUT", "")
FORMAT = os.getenv("VEECH_FORMAT", "json").lower()

# Development mode - controls whether debug messages are printed
DEV_MODE = os.getenv("DEV_MODE", "False").lower() == "true"


def debug_print(*args, **kwargs):
    """Print debug messages only when DEV_MODE is enabled"""
    if DEV_MODE:
        kwargs.setdefault("file", sys.stderr)
        print(*args, **kwargs)


@dataclass(frozen=True)
class RunConfig:
    q_max: int = Q_MAX
    precision_start_bits: int = PREC_BITS
    workers: int = WORKERS
    prefilter_tolerance: str = TOLERANCE
    output_path: str = OUT
    format: str = FORMAT

    def __post_init__(self):
        if self.q_max < 1:
            raise ConfigError(f"q_max must be >= 1, got {self.q_max}")
        if self.precision_start_bits < 32:
            raise ConfigError(f"precision_start_bits must be >= 32, got {self.precision_start_bits}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        try:
            tolerance = Fraction(self.prefilter_tolerance)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"tolerance {self.prefilter_tolerance!r} is not a number") from None
        if tolerance <= 0:
            raise ConfigError(f"tolerance must be positive, got {self.prefilter_tolerance}")

    @property
    def tolerance(self) -> float:
        return float(Fraction(self.prefilter_tolerance))

    @classmethod
    def from_env(cls) -> "RunConfig":
        """Read the VEECH_* variables at call time, so tests can monkeypatch the environment"""
        try:
            return cls(
                q_max=int(os.getenv("VEECH_Q_MAX", Q_MAX)),
                precision_start_bits=int(os.getenv("VEECH_PREC_BITS", PREC_BITS)),
                workers=int(os.getenv("VEECH_WORKERS", WORKERS)),
                prefilter_tolerance=os.getenv("VEECH_TOLERANCE", TOLERANCE),
                output_path=os.getenv("VEECH_OUT", OUT),
                format=os.getenv("VEECH_FORMAT", FORMAT).lower(),
            )
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"bad {ENV_PREFIX}* value: {e}") from None

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Apply command-line values; None means the flag was not given"""
        given = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **given)

    def echo(self) -> Dict[str, Any]:
        # workers and output_path are left out so reports stay byte-identical
        return {
            "q_max": self.q_max,
            "precision_start_bits": self.precision_start_bits,
            "prefilter_tolerance": self.prefilter_tolerance,
            "format": self.format,
        }
