"""Kernel dispatch: compiled extension when built, NumPy fallback otherwise.

Set ``TICKCORR_PURE=1`` in the environment to force the fallback (used by
the benchmark and by tests that exercise both paths).
"""

import os

from . import _fallback

if os.environ.get("TICKCORR_PURE"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND
mm_coeffs = _impl.mm_coeffs
hy_pair = _impl.hy_pair
garch_variance_scan = _impl.garch_variance_scan

__all__ = ["BACKEND", "mm_coeffs", "hy_pair", "garch_variance_scan"]
