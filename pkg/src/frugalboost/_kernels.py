"""Pick the split-search backend at import time.

The compiled ``_splitter`` extension is preferred; set
``FRUGALBOOST_BACKEND=python`` to force the numpy implementation.
"""

import os

from . import _split_py


def load_backend(name: str):
    if name == "python":
        return _split_py
    if name == "cython":
        from . import _splitter

        return _splitter
    raise ValueError(f"unknown backend {name!r}")


def _select():
    wanted = os.environ.get("FRUGALBOOST_BACKEND", "").strip().lower()
    if wanted == "python":
        return "python", _split_py
    try:
        return "cython", load_backend("cython")
    except ImportError:
        if wanted == "cython":
            raise
        return "python", _split_py


BACKEND_NAME, backend = _select()


def available_backends() -> list[str]:
    names = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        return names
    return names + ["cython"]


def default_threads() -> int:
    """Thread count from ``FRUGALBOOST_NUM_THREADS``; 1 when unset."""
    raw = os.environ.get("FRUGALBOOST_NUM_THREADS", "").strip()
    if not raw:
        return 1
    if raw in ("max", "0"):
        return os.cpu_count() or 1
    return max(1, int(raw))
