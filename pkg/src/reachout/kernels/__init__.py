"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the fallback
when the extension was not built.  Set REACHOUT_BACKEND=pure to force the
fallback (the benchmark and the cross-backend tests do).  Both backends
produce bit-identical results, so the choice only affects speed.
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("REACHOUT_BACKEND", "").lower() == "pure":
    _impl = pure
else:
    try:
        from . import _ccascade as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND_NAME

edge_inclusion_mask = _impl.edge_inclusion_mask
build_csr = _impl.build_csr
build_ensemble = _impl.build_ensemble
cascade_once = _impl.cascade_once
accumulate_counts = _impl.accumulate_counts


def available_backends() -> list[str]:
    names = ["pure"]
    try:
        from . import _ccascade  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Explicit backend module lookup, for benchmarks and parity tests."""
    if name == "pure":
        return pure
    if name == "cython":
        from . import _ccascade

        return _ccascade
    raise ValueError(f"unknown backend {name!r}")
