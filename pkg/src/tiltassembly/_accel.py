"""Optional numba acceleration.

Kernels are written in the numba-compatible subset of Python and decorated
with :func:`njit`.  Setting ``TILT_DISABLE_NUMBA=1`` (or running without
numba installed) leaves them as plain Python functions over numpy arrays.
"""

import logging
import os

logger = logging.getLogger(__name__)

_disabled = os.environ.get("TILT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

NUMBA_ENABLED = False
if not _disabled:
    try:
        import numba

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        logger.warning("numba not importable, using pure-Python kernels")


def njit(pyfunc=None, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if NUMBA_ENABLED:
        kwargs.setdefault("cache", True)
        return numba.njit(**kwargs)(pyfunc) if pyfunc is not None else numba.njit(**kwargs)

    def wrap(func):
        return func

    return wrap if pyfunc is None else wrap(pyfunc)


__all__ = ["njit", "NUMBA_ENABLED"]
