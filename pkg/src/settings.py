"""Toolkit settings using Pydantic BaseSettings."""
import os

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Toolkit configuration (environment variables use the LENSKIT_ prefix)."""

    # Parallelism for the pair scans: 1 = sequential, 0 = one worker per CPU
    THREADS: int = 1

    # Census: ignore third-circle tangencies on a digon boundary (lenient reading)
    LENIENT_TANGENCY_FACES: bool = False

    # Float-mode arrangement oracle
    # Tolerances are applied after rescaling the family to a bounding box of diameter 2
    FLOAT_EPS: float = 1e-9
    FLOAT_AMBIGUITY_FACTOR: float = 10.0

    # Extremal search (simulated annealing)
    SEARCH_COOLING: float = 0.995
    SEARCH_RESTART_EVERY: int = 5000
    SEARCH_SNAP_DENOMINATOR: int = 10 ** 6
    SEARCH_INITIAL_TEMPERATURE: float = 1.0
    SEARCH_MOVE_SCALE: float = 0.25
    SEARCH_TANGENCY_RATE: float = 0.2  # share of moves that push two circles to near tangency
    SEARCH_JUMP_RATE: float = 0.05  # share of moves that draw a fresh wedge-shaped family
    SEARCH_TRACE_EVERY: int = 1  # keep one trace record per this many iterations

    # Generators
    REJECTION_BUDGET: int = 100_000
    PERTURB_BUDGET: int = 64
    PERTURB_SHIFT_EXPONENT: int = 16  # displacement < min distance / 2**exponent

    # SVG rendering
    SVG_MARGIN: float = 0.10
    SVG_DIGITS: int = 6

    # Logging
    LOG_LEVEL: str = "WARNING"

    # Output root for the local storage adapter
    STORAGE_BASE_PATH: str = "."

    class Config:
        env_file = ".env"
        env_prefix = "LENSKIT_"
        case_sensitive = True

    def effective_threads(self) -> int:
        """Resolve THREADS, mapping 0 to the CPU count."""
        if self.THREADS <= 0:
            return os.cpu_count() or 1
        return self.THREADS


settings = Settings()
