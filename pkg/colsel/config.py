import os
from dataclasses import dataclass
from functools import lru_cache
from dotenv import load_dotenv
from .errors import ConfigError


load_dotenv()

LOG_LEVELS = ('CRITICAL', 'FATAL', 'ERROR', 'WARNING', 'WARN', 'INFO', 'DEBUG', 'NOTSET')


def _env_float(name: str, default: str) -> float:
    raw = os.getenv(name, default)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{name} must be a number, got {raw!r}") from None


def _env_int(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class Settings:
    """Numerical tolerances and runtime knobs for colsel."""

    dead_tol: float
    rank_tol: float
    tie_rtol: float
    gaussian_constant: float
    pcps_constant: float
    max_workers: int
    brute_force_limit: int
    pca_dim_limit: int
    log_level: str = "INFO"

    @classmethod
    def load(cls):
        """Load settings from environment variables."""
        settings = cls(
            dead_tol=_env_float('COLSEL_DEAD_TOL', '1e-12'),
            rank_tol=_env_float('COLSEL_RANK_TOL', '1e-10'),
            tie_rtol=_env_float('COLSEL_TIE_RTOL', '1e-12'),
            gaussian_constant=_env_float('COLSEL_GAUSSIAN_CONSTANT', '1.0'),
            pcps_constant=_env_float('COLSEL_PCPS_CONSTANT', '1.0'),
            max_workers=_env_int('COLSEL_MAX_WORKERS', '4'),
            brute_force_limit=_env_int('COLSEL_BRUTE_FORCE_LIMIT', '1000000'),
            pca_dim_limit=_env_int('COLSEL_PCA_DIM_LIMIT', '500'),
            log_level=os.getenv('COLSEL_LOG_LEVEL', 'INFO').upper(),
        )
        if settings.max_workers < 1:
            raise ConfigError('COLSEL_MAX_WORKERS must be >= 1')
        if settings.gaussian_constant <= 0 or settings.pcps_constant <= 0:
            raise ConfigError('sketch dimension constants must be positive')
        for name in ('dead_tol', 'rank_tol', 'tie_rtol'):
            if not 0 <= getattr(settings, name) < 1:
                raise ConfigError(f'{name} must lie in [0, 1)')
        if settings.log_level not in LOG_LEVELS:
            raise ConfigError(f"COLSEL_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {settings.log_level!r}")
        return settings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide settings; call ``get_settings.cache_clear()`` after changing the environment."""
    return Settings.load()


if __name__ == '__main__':
    print(Settings.load())
