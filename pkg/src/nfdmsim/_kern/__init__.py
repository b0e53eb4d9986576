"""Kernel backend selection: compiled extension when available, vectorized
numpy otherwise. NFDM_BACKEND=numpy|cython forces a choice (cython raises if
the extension is missing)."""

import os

from . import _zs_numpy

SCHEME_AL = _zs_numpy.SCHEME_AL
SCHEME_BO = _zs_numpy.SCHEME_BO

_FORCED = os.environ.get("NFDM_BACKEND", "auto").lower()

_compiled = None
if _FORCED in ("auto", "cython"):
    try:
        from . import _zs_cython as _compiled
    except ImportError:
        _compiled = None
        if _FORCED == "cython":
            raise

if _FORCED == "numpy":
    _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"


def zs_scan(q, dt, t0, lam, scheme=SCHEME_AL):
    """Run the Zakharov-Shabat transfer-matrix scan on the active backend.
    Returns (a(lam), b(lam))."""
    if _compiled is not None:
        import numpy as np

        return _compiled.zs_scan(
            np.ascontiguousarray(q, dtype=np.complex128),
            float(dt),
            float(t0),
            np.ascontiguousarray(lam, dtype=np.float64),
            int(scheme),
        )
    return _zs_numpy.zs_scan(q, dt, t0, lam, scheme)


def zs_scan_with(backend, q, dt, t0, lam, scheme=SCHEME_AL):
    """Explicit-backend variant for benchmarks and equivalence tests."""
    if backend == "numpy":
        return _zs_numpy.zs_scan(q, dt, t0, lam, scheme)
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel not available")
        import numpy as np

        return _compiled.zs_scan(
            np.ascontiguousarray(q, dtype=np.complex128),
            float(dt),
            float(t0),
            np.ascontiguousarray(lam, dtype=np.float64),
            int(scheme),
        )
    raise ValueError(f"unknown backend {backend!r}")
