"""Optional numba acceleration.

Set ``FRACSTAB_DISABLE_NUMBA=1`` to force the pure-numpy code paths. When
numba is not importable the same fallback is used silently.
"""

import os

_disabled = os.environ.get("FRACSTAB_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

HAVE_NUMBA = _numba is not None and not _disabled


def njit(*args, **kwargs):
    """``numba.njit`` when acceleration is enabled, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def is_jitted(fn):
    return HAVE_NUMBA and isinstance(fn, _numba.core.registry.CPUDispatcher)
