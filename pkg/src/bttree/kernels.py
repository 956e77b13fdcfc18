"""Select the split-statistics backend at import time.

The compiled ``_ckernels`` extension is used when it was built; otherwise,
or when ``BTTREE_PURE_PYTHON`` is set to a non-empty value, the pure-Python
``_pykernels`` module is used. Both expose the same three functions.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("BTTREE_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

outcome_counts = _impl.outcome_counts
entropy_from_counts = _impl.entropy_from_counts
split_gains = _impl.split_gains


def available_backends():
    """Map backend name to kernel module for every backend importable here."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
