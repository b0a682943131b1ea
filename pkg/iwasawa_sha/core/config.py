"""Application configuration"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="ISHA_", env_file=".env", extra="ignore")

    # Precision policy
    precision_margin: int = 8
    max_precision_doublings: int = 3

    # Formal group engine
    series_headroom_per_degree: int = 4
    newton_max_iterations: int = 64

    # Campaign defaults
    default_seed: int = 42
    default_trials: int = 10
    default_jobs: int = 1

    log_level: str = "INFO"


settings = Settings()
