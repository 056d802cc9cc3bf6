"""Backend selection for the orbit kernels.

The compiled extension is used when it imports; setting the environment
variable ``MARKEDROT_PURE=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _fallback


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("MARKEDROT_PURE", "") not in ("", "0"):
        return _fallback, "python"
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return _fallback, "python"
    return _kernels, "cython"


_impl, BACKEND = _load()


def backend_module(name: str | None = None) -> ModuleType:
    """The kernel module for ``name`` ('cython' or 'python'), default the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    from . import _kernels  # type: ignore[attr-defined]

    return _kernels


def orbit_labels(x0: int, alpha: int, cuts: np.ndarray, n: int, tol0: int, tol_step: int,
                 impl: ModuleType | None = None) -> tuple[np.ndarray, np.ndarray, int]:
    """Interval labels of x0 + k*alpha for k < n, with near-boundary flags."""
    labels = np.empty(n, dtype=np.int32)
    flags = np.empty(n, dtype=np.uint8)
    cuts = np.ascontiguousarray(cuts, dtype=np.uint64)
    nflag = (impl or _impl).orbit_labels(x0, alpha, cuts, tol0, tol_step, labels, flags)
    return labels, flags, int(nflag)


def prefix_perm_index(labels: np.ndarray, table: np.ndarray, start: int,
                      impl: ModuleType | None = None) -> np.ndarray:
    out = np.empty(labels.shape[0] + 1, dtype=np.int32)
    (impl or _impl).prefix_perm_index(
        np.ascontiguousarray(labels, dtype=np.int32),
        np.ascontiguousarray(table, dtype=np.int32), int(start), out)
    return out


def shift_mismatch(labels: np.ndarray, pidx: np.ndarray, images: np.ndarray, q: int, N: int,
                   impl: ModuleType | None = None) -> np.ndarray:
    if labels.shape[0] < N + q or pidx.shape[0] < N + q:
        raise ValueError("orbit too short for the requested shift")
    out = np.zeros(images.shape[1], dtype=np.int64)
    (impl or _impl).shift_mismatch(
        np.ascontiguousarray(labels, dtype=np.int32),
        np.ascontiguousarray(pidx, dtype=np.int32),
        np.ascontiguousarray(images, dtype=np.int32), int(q), int(N), out)
    return out


def first_hit(g: int, alpha: int, z: int, k0: int, kmax: int, tol0: int, tol_step: int,
              impl: ModuleType | None = None) -> tuple[int, int]:
    k, status = (impl or _impl).first_hit(g, alpha, z, k0, kmax, tol0, tol_step)
    return int(k), int(status)
