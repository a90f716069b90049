"""Hot-kernel backend selection.

Prefers the compiled Cython core; falls back to the numpy implementation.
Set LIEMECH_PURE_PYTHON=1 to force the fallback (useful for benchmarking).
"""

import os

from . import _numpy_core

BACKEND = "numpy"
_impl = _numpy_core

if not os.environ.get("LIEMECH_PURE_PYTHON"):
    try:
        from . import _core as _compiled

        _impl = _compiled
        BACKEND = "cython"
    except ImportError:
        pass

sc_bracket = _impl.sc_bracket
sc_ad = _impl.sc_ad
sc_ad_star = _impl.sc_ad_star
so3_hat = _impl.so3_hat
so3_exp = _impl.so3_exp
so3_log = _impl.so3_log
so3_exp_batch = _impl.so3_exp_batch
so3_log_batch = _impl.so3_log_batch
se3_exp = _impl.se3_exp
se3_log = _impl.se3_log
