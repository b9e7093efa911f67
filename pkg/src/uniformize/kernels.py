"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy
fallback.  Set ``UNIFORMIZE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("UNIFORMIZE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _fallback

_threads = 1


def set_threads(n: int) -> None:
    """Cap the number of OpenMP threads used by compiled scans."""
    global _threads
    _threads = max(1, int(n))


def get_threads() -> int:
    return _threads


def apsp(indptr, indices, weights, n):
    return _impl.apsp(indptr, indices, weights, n, _threads)


def delta_base(D, p):
    return _impl.delta_base(D, p, _threads)


def delta_global(D):
    return _impl.delta_global(D, _threads)


def chain_closure(W):
    return _impl.chain_closure(W, _threads)


def triangle_violation(T):
    return _impl.triangle_violation(T, _threads)
