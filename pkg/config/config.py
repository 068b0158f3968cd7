"""
Configuration settings for the anisotropic percolation laboratory.
"""
from typing import Dict, Any
import os
from dotenv import load_dotenv
from pydantic import BaseSettings

# Load environment variables from .env file
load_dotenv()

class Settings(BaseSettings):
    # Application Settings
    APP_NAME: str = "percolation-lab"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = os.getenv("PERCOLAB_LOG_LEVEL", "INFO")

    # Exact engine caps
    BRUTE_FORCE_EDGE_CAP: int = 28        # 2^28 configurations
    RATIONAL_EDGE_CAP: int = 16           # exact-fraction brute force
    PARTITION_IDENTITY_EDGE_CAP: int = 24
    BRUTE_FORCE_CHUNK_BITS: int = 16      # configurations per vectorised chunk = 2^bits
    FRONTIER_CAP: int = 14                # vertices per transfer-matrix column
    TRANSFER_STATE_BUDGET: int = 5_000_000

    # Contour enumeration
    ENUMERATION_BUDGET: int = 10 ** 8     # search nodes

    # Monte Carlo
    MC_BLOCK_SIZE: int = 4096             # samples per RNG stream block
    MC_SMALL_COUNT: int = 30              # Wilson interval below this many successes

    # Execution
    THREADS: int = 0                      # 0 -> available cores
    DEFAULT_FORMAT: str = "json"

    class Config:
        env_file = ".env"
        env_prefix = "PERCOLAB_"
        case_sensitive = True

# Create settings instance
settings = Settings()


def get_config(section: str = "all") -> Dict[str, Any]:
    """
    Get the engine configuration for a section.

    Args:
        section: One of 'exact', 'contours', 'mc', 'runtime' or 'all'

    Returns:
        Dictionary of settings for the requested section
    """
    sections = {
        "exact": {
            "brute_force_edge_cap": settings.BRUTE_FORCE_EDGE_CAP,
            "rational_edge_cap": settings.RATIONAL_EDGE_CAP,
            "partition_identity_edge_cap": settings.PARTITION_IDENTITY_EDGE_CAP,
            "chunk_bits": settings.BRUTE_FORCE_CHUNK_BITS,
            "frontier_cap": settings.FRONTIER_CAP,
            "state_budget": settings.TRANSFER_STATE_BUDGET,
        },
        "contours": {
            "enumeration_budget": settings.ENUMERATION_BUDGET,
        },
        "mc": {
            "block_size": settings.MC_BLOCK_SIZE,
            "small_count": settings.MC_SMALL_COUNT,
        },
        "runtime": {
            "threads": resolve_threads(settings.THREADS),
            "format": settings.DEFAULT_FORMAT,
            "log_level": settings.LOG_LEVEL,
        },
    }

    if section == "all":
        return sections
    if section not in sections:
        raise ValueError(f"Unknown config section: {section}")
    return sections[section]


def resolve_threads(threads: int) -> int:
    """Map a thread request to a worker count (0 or negative means all cores)."""
    if threads and threads > 0:
        return threads
    return os.cpu_count() or 1
