"""Exact truncated convolution for the advection term.

``convolve(u, v, N)[:, k] = sum_{j + l = k} i (u_hat(j) . l) v_hat(l)`` with
j, l and k all inside the max-norm cube of half-width N.  Arrays use the
full-cube layout of :mod:`gevrey_nse.spectral` (index = wavevector + N).

Cost is O((2N+1)^6); this is the correctness oracle, meant for N <= 8.
"""

import numpy as np

from ._accel import njit, use_numba


@njit
def _convolve_loops(u, v, N):
    n = 2 * N + 1
    out = np.zeros((3, n, n, n), dtype=np.complex128)
    for j0 in range(n):
        for j1 in range(n):
            for j2 in range(n):
                a0 = u[0, j0, j1, j2]
                a1 = u[1, j0, j1, j2]
                a2 = u[2, j0, j1, j2]
                if a0 == 0 and a1 == 0 and a2 == 0:
                    continue
                for k0 in range(max(0, j0 - N), min(n, j0 + N + 1)):
                    l0 = k0 - j0 + N
                    for k1 in range(max(0, j1 - N), min(n, j1 + N + 1)):
                        l1 = k1 - j1 + N
                        for k2 in range(max(0, j2 - N), min(n, j2 + N + 1)):
                            l2 = k2 - j2 + N
                            dot = 1j * (a0 * (l0 - N) + a1 * (l1 - N) + a2 * (l2 - N))
                            out[0, k0, k1, k2] += dot * v[0, l0, l1, l2]
                            out[1, k0, k1, k2] += dot * v[1, l0, l1, l2]
                            out[2, k0, k1, k2] += dot * v[2, l0, l1, l2]
    return out


def _convolve_numpy(u, v, N):
    n = 2 * N + 1
    r = np.arange(-N, N + 1, dtype=float)
    out = np.zeros((3, n, n, n), dtype=complex)
    nz = np.argwhere(np.any(u != 0, axis=0))
    for j0, j1, j2 in nz:
        a = u[:, j0, j1, j2]
        ks, ls = [], []
        for jj in (j0, j1, j2):
            lo, hi = max(0, jj - N), min(n, jj + N + 1)
            ks.append(slice(lo, hi))
            ls.append(slice(lo - jj + N, hi - jj + N))
        ks, ls = tuple(ks), tuple(ls)
        dot = 1j * (
            a[0] * r[ls[0]][:, None, None] + a[1] * r[ls[1]][None, :, None] + a[2] * r[ls[2]][None, None, :]
        )
        out[(slice(None),) + ks] += dot * v[(slice(None),) + ls]
    return out


def convolve(u: np.ndarray, v: np.ndarray, N: int, backend: str | None = None) -> np.ndarray:
    """Truncated convolution; ``backend`` is 'numba', 'numpy' or None (auto)."""
    if backend is None:
        backend = "numba" if use_numba() else "numpy"
    u = np.ascontiguousarray(u, dtype=np.complex128)
    v = np.ascontiguousarray(v, dtype=np.complex128)
    if backend == "numba":
        return _convolve_loops(u, v, int(N))
    if backend == "numpy":
        return _convolve_numpy(u, v, int(N))
    raise ValueError(f"unknown kernel backend {backend!r}")
