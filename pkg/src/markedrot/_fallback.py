"""Pure numpy implementations of the orbit kernels.

Positions on the circle are 64-bit fixed point numbers, so adding alpha
is an unsigned add with wrap-around.  Every function fills caller-owned
output arrays and mirrors the compiled module signature for signature.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 16


def _positions(x0: int, alpha: int, k0: int, n: int) -> np.ndarray:
    ks = np.arange(k0, k0 + n, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return np.uint64(x0) + ks * np.uint64(alpha)


def orbit_labels(x0, alpha, cuts, tol0, tol_step, labels, flags) -> int:
    n = labels.shape[0]
    cuts = np.asarray(cuts, dtype=np.uint64)
    ext = np.append(cuts, np.uint64(0))
    nflag = 0
    for k0 in range(0, n, _CHUNK):
        m = min(_CHUNK, n - k0)
        pos = _positions(x0, alpha, k0, m)
        idx = np.searchsorted(cuts, pos, side="right") - 1
        with np.errstate(over="ignore"):
            d_left = pos - cuts[idx]
            d_right = ext[idx + 1] - pos
        tol = np.uint64(tol0) + np.arange(k0, k0 + m, dtype=np.uint64) * np.uint64(tol_step)
        near = (d_left <= tol) | (d_right <= tol)
        labels[k0:k0 + m] = idx
        flags[k0:k0 + m] = near
        nflag += int(near.sum())
    return nflag


def prefix_perm_index(labels, table, start, out) -> None:
    rows = [list(r) for r in table.tolist()]
    cur = int(start)
    out[0] = cur
    res = [cur]
    for lab in labels.tolist():
        cur = rows[lab][cur]
        res.append(cur)
    out[:] = res


def shift_mismatch(labels, pidx, images, q, N, out) -> None:
    lab = np.asarray(labels)
    diff = lab[:N] != lab[q:q + N]
    a = np.asarray(pidx)[:N]
    b = np.asarray(pidx)[q:q + N]
    imgs = np.asarray(images)
    for s in range(imgs.shape[1]):
        col = imgs[:, s]
        out[s] = int(np.count_nonzero(diff | (col[a] != col[b])))


def first_hit(g, alpha, z, k0, kmax, tol0, tol_step):
    """First k in [k0, kmax) with (g - k*alpha) mod 2**64 < z.

    Returns (k, 0) for a certain hit, (k, 1) when step k is too close to
    call and (kmax, -1) when nothing was found.
    """
    k = k0
    while k < kmax:
        m = min(_CHUNK, kmax - k)
        ks = np.arange(k, k + m, dtype=np.uint64)
        with np.errstate(over="ignore"):
            u = np.uint64(g) - ks * np.uint64(alpha)
            tol = np.uint64(tol0) + ks * np.uint64(tol_step)
            dz = np.where(u >= np.uint64(z), u - np.uint64(z), np.uint64(z) - u)
            d0 = np.minimum(u, np.uint64(0) - u)
        unsure = (dz <= tol) | (d0 <= tol)
        hit = (u < np.uint64(z)) | unsure
        if hit.any():
            j = int(np.argmax(hit))
            return k + j, 1 if bool(unsure[j]) else 0
        k += m
    return kmax, -1
