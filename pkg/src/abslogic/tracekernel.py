"""Picks the compiled trace kernel when available.

Set ``ABSLOG_PURE=1`` to force the pure-Python implementation.
"""
import os

BACKEND = "python"
if os.environ.get("ABSLOG_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _tracekernel as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _tracekernel_py as _impl
else:
    from . import _tracekernel_py as _impl

from . import _tracekernel_py as pure  # noqa: E402

TERM, ERROR, PARTIAL, UB = pure.TERM, pure.ERROR, pure.PARTIAL, pure.UB
normalize = _impl.normalize
union = _impl.union
intersect = _impl.intersect
included = _impl.included
prefix_all = _impl.prefix_all
is_prefix = _impl.is_prefix
lcp = _impl.lcp
