"""Select the compiled kernels when available, else the pure-Python ones.

Set ``HYPERWALK_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("HYPERWALK_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

prepare = _impl.prepare
hit_walk = _impl.hit_walk
cover_walk = _impl.cover_walk
fixed_walk = _impl.fixed_walk
deconvolve = _impl.deconvolve


def backends():
    """Every importable kernel module, keyed by name (for tests and benchmarks)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out


def use_backend(name):
    """Rebind the module-level kernels to backend ``name``; returns the previous name."""
    global BACKEND, _impl, prepare, hit_walk, cover_walk, fixed_walk, deconvolve
    available = backends()
    if name not in available:
        raise ValueError(f"kernel backend {name!r} is not available")
    previous = BACKEND
    BACKEND, _impl = name, available[name]
    prepare = _impl.prepare
    hit_walk = _impl.hit_walk
    cover_walk = _impl.cover_walk
    fixed_walk = _impl.fixed_walk
    deconvolve = _impl.deconvolve
    return previous
