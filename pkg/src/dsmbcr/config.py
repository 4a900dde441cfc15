from functools import lru_cache

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Engine settings loaded from environment variables."""

    model_config = {"env_prefix": "DSMBCR_", "env_file": ".env"}

    # Mass validation
    mass_tolerance: float = 1e-6  # accepted |sum - 1| before renormalizing

    # Hyper-power set enumeration guard
    max_atoms: int = 6

    # Output
    mass_digits: int = 12  # significant digits in bba documents
    report_digits: int = 6  # decimals in reports and CSV tables
    fraction_max_denominator: int = 100_000
    fraction_tolerance: float = 1e-9

    log_level: str = "WARNING"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()
