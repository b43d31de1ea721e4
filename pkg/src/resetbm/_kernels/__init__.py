"""Hot-kernel backend selection.

``_ckern`` is a compiled extension built at install time; ``_numpy`` is the
pure-Python fallback with identical semantics.  The compiled backend is
preferred when importable; ``RESETBM_FORCE_NUMPY=1`` forces the fallback
(useful for the cross-backend benchmark and tests).
"""

import os

from . import _numpy

try:
    from . import _ckern
except ImportError:  # extension not built on this platform
    _ckern = None

if _ckern is not None and os.environ.get("RESETBM_FORCE_NUMPY", "") != "1":
    _impl = _ckern
else:
    _impl = _numpy

BACKEND = _impl.BACKEND_NAME

drifted_sup_cdf = _impl.drifted_sup_cdf
drifted_sup_sf = _impl.drifted_sup_sf
table_product_stats = _impl.table_product_stats
segment_sup_quantile = _impl.segment_sup_quantile


def available_backends():
    """Mapping of backend name -> module, for benchmarks and tests."""
    found = {_numpy.BACKEND_NAME: _numpy}
    if _ckern is not None:
        found[_ckern.BACKEND_NAME] = _ckern
    return found
