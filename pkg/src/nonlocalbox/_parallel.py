import os

from .errors import ConfigError

ENV_VAR = "NONLOCALBOX_THREADS"


def worker_count() -> int:
    """Thread cap from ``NONLOCALBOX_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        requested = 0
    else:
        try:
            requested = int(raw)
        except ValueError:
            raise ConfigError(f"{ENV_VAR} must be a non-negative integer, got {raw!r}") from None
        if requested < 0:
            raise ConfigError(f"{ENV_VAR} must be a non-negative integer, got {raw!r}")
    if requested == 0:
        return max(1, os.cpu_count() or 1)
    return requested
