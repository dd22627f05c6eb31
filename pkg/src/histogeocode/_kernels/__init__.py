"""Backend selection for the trigram matching kernel.

The compiled extension is used when it imported cleanly; otherwise the
NumPy implementation takes over. HISTOGEOCODE_PURE=1 forces the fallback
(used by the benchmark to compare both paths).
"""

import os

from . import _trgm_py

if os.environ.get("HISTOGEOCODE_PURE") == "1":
    _impl = _trgm_py
    BACKEND = "python"
else:
    try:
        from . import _trgm_cy as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _trgm_py
        BACKEND = "python"

match_candidates = _impl.match_candidates
