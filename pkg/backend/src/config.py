import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv(os.path.join(os.path.dirname(os.path.dirname(__file__)), ".env"))


@dataclass(frozen=True)
class Settings:
    max_size: int
    quadric_max_n: int
    log_level: str
    default_seed: int
    default_samples: int


def get_settings() -> Settings:
    """Snapshot of the environment; read on every call so tests can monkeypatch."""
    return Settings(
        max_size=int(os.getenv("ROOFTOP_MAX_SIZE", "5")),
        quadric_max_n=int(os.getenv("QUADRIC_MAX_N", "8")),
        log_level=os.getenv("ROOFTOP_LOG_LEVEL", "WARNING").upper(),
        default_seed=int(os.getenv("ROOFTOP_DEFAULT_SEED", "0")),
        default_samples=int(os.getenv("ROOFTOP_DEFAULT_SAMPLES", "100")),
    )


def configure_logging(level: str = None) -> None:
    level = (level or get_settings().log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
