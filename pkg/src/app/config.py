"""Application configuration with structured settings groups."""
import logging
from functools import lru_cache

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


# =============================================================================
# Nested Settings Models
# =============================================================================


class SweepSettings(BaseModel):
    """
    Exact pairwise sweep settings.

    workers: Process count for the Gram-matrix sweep (1 = in-process).
    chunk_rows: Rows of the Gram matrix evaluated per work item.
    exhaustive_max_level: Highest level for which verify_theorem sweeps all
        pairs by default; above it the transitivity certificate is used.
    angle_all_pairs_max_level: Principal-angle cases are checked on every pair
        up to this level and on a deterministic sample above it.
    """

    workers: int = Field(default=1, ge=1)
    chunk_rows: int = Field(default=64, ge=1)
    exhaustive_max_level: int = 5
    angle_all_pairs_max_level: int = 3
    angle_sample_size: int = Field(default=200, ge=1)
    sample_seed: int = 20240601
    float_tolerance: float = 1e-10


class OrbitSettings(BaseModel):
    """
    Orbit enumeration settings.

    transitivity_max_level: Highest level the transitivity certificate is
        computed for unless the caller passes allow_large.
    """

    default_limit: int = Field(default=200_000, ge=1)
    transitivity_max_level: int = Field(default=5, ge=1)


class OrderSettings(BaseModel):
    """
    Group order settings.

    Stabilizer-chain orders are computed up to max_level; level 5 needs
    allow_level_5. Chain membership of every affine permutation is checked up
    to affine_membership_max_level. The brute-force matrix closure is an
    oracle for small levels only.
    """

    max_level: int = 4
    allow_level_5: bool = False
    affine_membership_max_level: int = 3
    brute_force_max_level: int = 2
    brute_force_limit: int = 100_000


class FamilySettings(BaseModel):
    """
    Orbit family settings.

    full_sweep_max_members: Above this size an orbit family is summarized from
        the distance profile of its seed instead of all pairs.
    *_max_level: Highest level verified by default for each family.
    """

    full_sweep_max_members: int = 500
    lines_max_level: int = 4
    planes2_max_level: int = 3
    quarter_max_level: int = 4


# =============================================================================
# Main Settings Class
# =============================================================================


class Settings(BaseSettings):
    """
    Application settings with nested configuration groups.

    Environment variables carry the GRASSPACK_ prefix and use double underscore
    as delimiter for nested values.
    Example: GRASSPACK_MAX_LEVEL=6, GRASSPACK_SWEEP__WORKERS=4
    """

    app_name: str = "grasspack"
    app_version: str = "0.1.0"

    # Cap on the level every command accepts
    max_level: int = Field(default=5, ge=1)

    sweep: SweepSettings = SweepSettings()
    orbit: OrbitSettings = OrbitSettings()
    order: OrderSettings = OrderSettings()
    families: FamilySettings = FamilySettings()

    model_config = SettingsConfigDict(
        env_prefix="GRASSPACK_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
