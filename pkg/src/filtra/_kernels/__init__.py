"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the numpy
fallback is always available. Set FILTRA_PURE_PYTHON=1 to force the
fallback (useful for benchmarking and debugging).
"""

import os

from . import pure

if os.environ.get("FILTRA_PURE_PYTHON"):
    _impl = pure
else:
    try:
        from . import _native as _impl
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND

path_rewards = _impl.path_rewards
walk_cone_violations = _impl.walk_cone_violations
walk_prices_at = _impl.walk_prices_at
count_in_pieces = _impl.count_in_pieces


def have_native() -> bool:
    """True if the compiled backend was importable (regardless of override)."""
    try:
        from . import _native  # noqa: F401
    except ImportError:
        return False
    return True
