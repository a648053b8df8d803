"""Numerical kernels with backend selection at import time.

Two interchangeable backends provide the hot inner loops (per-draw class
posteriors and posterior-weighted KL scores):

* ``_speedups`` -- a compiled Cython extension, used when importable;
* ``_fallback`` -- pure NumPy, always available.

Set ``VAQ_DISABLE_EXT=1`` before import to force the NumPy backend (used by
the benchmark and by tests that compare the two). ``BACKEND`` names the
selected implementation.
"""

from __future__ import annotations

import os

from vaq._kernels import _fallback

if os.environ.get("VAQ_DISABLE_EXT"):
    _impl = _fallback
else:
    try:
        from vaq._kernels import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

class_posteriors = _impl.class_posteriors
pwkl_scores = _impl.pwkl_scores
BACKEND: str = "numpy" if _impl is _fallback else "compiled"

__all__ = ["class_posteriors", "pwkl_scores", "BACKEND"]
