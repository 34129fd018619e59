import os

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Config:
    """Configuration management for the Poisson normal form engine."""

    # Truncation and search bounds
    DEFAULT_ORDER = int(os.getenv("PNF_ORDER", "6"))
    KMAX = int(os.getenv("PNF_KMAX", "3"))
    DEGREE_BOUND = int(os.getenv("PNF_DEGREE_BOUND", "6"))
    NONRES_BOUND = int(os.getenv("PNF_NONRES_BOUND", "6"))

    # Enumerations larger than this log a warning
    ENUMERATION_WARN = int(os.getenv("ENUMERATION_WARN", "50000"))

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "pnf_log.json")

    # Reports
    REPORT_TIMINGS = os.getenv("REPORT_TIMINGS", "0") == "1"

    @classmethod
    def validate(cls) -> bool:
        """Validate configuration values."""
        if cls.DEFAULT_ORDER < 2:
            raise ValueError(f"PNF_ORDER must be at least 2, got {cls.DEFAULT_ORDER}")

        if cls.KMAX < 1:
            raise ValueError(f"PNF_KMAX must be at least 1, got {cls.KMAX}")

        bad_bounds = [
            name for name in ("DEGREE_BOUND", "NONRES_BOUND")
            if getattr(cls, name) < 1
        ]
        if bad_bounds:
            raise ValueError(f"Search bounds must be positive: {', '.join(bad_bounds)}")

        if cls.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Invalid LOG_LEVEL: {cls.LOG_LEVEL}")

        return True

    @classmethod
    def get_analysis_config(cls) -> dict:
        """Get defaults for the spectrum analysis."""
        return {
            "order": cls.DEFAULT_ORDER,
            "kmax": cls.KMAX,
            "degree_bound": cls.DEGREE_BOUND,
            "nonres_bound": cls.NONRES_BOUND,
        }

    @classmethod
    def get_logging_config(cls) -> dict:
        """Get logging configuration dictionary."""
        return {
            "level": cls.LOG_LEVEL.upper(),
            "log_file": cls.LOG_FILE,
        }
