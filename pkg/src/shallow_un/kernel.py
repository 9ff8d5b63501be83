"""Backend selection for the pair-relation kernel.

The compiled ``_pairs`` extension is used when it was built; otherwise the
pure-Python module provides the same class.  Setting the environment variable
``SHALLOW_UN_BACKEND=python`` forces the fallback.
"""

import os

from . import _pairs_py

_forced = os.environ.get("SHALLOW_UN_BACKEND", "").strip().lower()

PythonPairKernel = _pairs_py.PairKernel

try:  # pragma: no cover - depends on the build
    from ._pairs import PairKernel as CompiledPairKernel
except ImportError:  # pragma: no cover
    CompiledPairKernel = None

if CompiledPairKernel is not None and _forced != "python":
    PairKernel = CompiledPairKernel
else:
    PairKernel = PythonPairKernel

BACKEND = PairKernel.backend


def available_backends():
    names = {"python": PythonPairKernel}
    if CompiledPairKernel is not None:
        names["compiled"] = CompiledPairKernel
    return names


def kernel_class(name=None):
    """The kernel class for ``name`` (``python``/``compiled``), or the default."""
    if name is None:
        return PairKernel
    table = available_backends()
    if name not in table:
        raise ValueError(f"kernel backend {name!r} is not available (have: {', '.join(sorted(table))})")
    return table[name]
