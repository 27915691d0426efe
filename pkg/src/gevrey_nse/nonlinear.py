"""The bilinear term B(u, v) = Pi[(u . grad) v] on the truncated cube.

Two independent evaluations:

* ``direct``: the exact truncated convolution (:mod:`gevrey_nse.kernels`),
  the correctness oracle.
* ``fast``: pseudo-spectral.  Products are formed in physical space on an
  M^3 grid and the divergence form ``d_m (u_m v_n)`` is differentiated back in
  Fourier space.  With dealiasing on, M >= 3N + 1 (the 3/2 padding rule, the
  same thing as keeping the lower 2/3 of a 3N-grid), so every retained
  coefficient is exact.  With dealiasing off, M = 2N + 2 and products alias.

The divergence form equals the advective form only when ``u`` is solenoidal;
``v`` may be anything.
"""

from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .kernels import convolve
from .spectral import GridMismatchError, SpectralField, project_leray


@lru_cache(maxsize=None)
def transform_size(N: int, dealias: bool = True) -> int:
    if dealias:
        return sfft.next_fast_len(3 * N + 1, real=True)
    return 2 * N + 2


@lru_cache(maxsize=None)
def _layout(N: int, M: int):
    idx = np.arange(-N, N + 1) % M
    kz = np.arange(0, N + 1, dtype=float)
    kr = np.arange(-N, N + 1, dtype=float)
    return idx[:, None], idx[None, :], kr, kz


def to_grid(c: np.ndarray, N: int, M: int) -> np.ndarray:
    """Cube coefficients (m, 2N+1, 2N+1, 2N+1) -> real samples (m, M, M, M)."""
    I, J, _, _ = _layout(N, M)
    X = np.zeros((c.shape[0], M, M, M // 2 + 1), dtype=complex)
    X[:, I, J, : N + 1] = c[:, :, :, N:]
    return sfft.irfftn(X, s=(M, M, M), axes=(1, 2, 3), norm="forward")


def from_grid(f: np.ndarray, N: int, M: int) -> np.ndarray:
    """Real samples -> cube coefficients, restoring the k3 < 0 half by symmetry."""
    I, J, _, _ = _layout(N, M)
    F = sfft.rfftn(f, axes=(1, 2, 3), norm="forward")
    n = 2 * N + 1
    out = np.empty((f.shape[0], n, n, n), dtype=complex)
    out[:, :, :, N:] = F[:, I, J, : N + 1]
    out[:, :, :, :N] = np.conj(out[:, ::-1, ::-1, ::-1][:, :, :, :N])
    return out


def advect_fast(u: np.ndarray, v: np.ndarray | None, N: int, dealias: bool = True) -> np.ndarray:
    """Unprojected sum_{j+l=k} i (u_hat(j) . l) v_hat(l) via transforms.

    ``v=None`` means v = u and uses the 6 symmetric products.
    """
    M = transform_size(N, dealias)
    _, _, kr, _ = _layout(N, M)
    k = (kr[:, None, None], kr[None, :, None], kr[None, None, :])
    ur = to_grid(u, N, M)
    if v is None:
        pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
        prods = np.stack([ur[a] * ur[b] for a, b in pairs])
        P = from_grid(prods, N, M)
        T = {}
        for q, (a, b) in enumerate(pairs):
            T[a, b] = T[b, a] = P[q]
    else:
        vr = to_grid(v, N, M)
        prods = np.stack([ur[m] * vr[n] for m in range(3) for n in range(3)])
        P = from_grid(prods, N, M)
        T = {(m, n): P[3 * m + n] for m in range(3) for n in range(3)}
    out = np.empty_like(u)
    for n in range(3):
        out[n] = 1j * (k[0] * T[0, n] + k[1] * T[1, n] + k[2] * T[2, n])
    return out


def advect_direct(u: np.ndarray, v: np.ndarray | None, N: int, backend: str | None = None) -> np.ndarray:
    return convolve(u, u if v is None else v, N, backend=backend)


def leray(c: np.ndarray, k: np.ndarray, k2_safe: np.ndarray) -> np.ndarray:
    kdot = np.einsum("i...,i...->...", k, c)
    return c - k * (kdot / k2_safe)


def bilinear(u: SpectralField, v: SpectralField | None = None, method: str = "fast", dealias: bool = True) -> SpectralField:
    """B(u, v); ``method`` is 'fast' or 'direct'."""
    if v is not None and v.grid.N != u.grid.N:
        raise GridMismatchError(f"grid N={u.grid.N} vs N={v.grid.N}")
    N = u.grid.N
    vc = None if v is None else v.coeff
    if method == "fast":
        raw = advect_fast(u.coeff, vc, N, dealias)
    elif method == "direct":
        raw = advect_direct(u.coeff, vc, N)
    else:
        raise ValueError(f"unknown method {method!r}")
    return project_leray(SpectralField(u.grid, raw))


def nonlinear_term_direct(u: SpectralField) -> SpectralField:
    """B(u, u) by exact convolution."""
    return bilinear(u, None, method="direct")


def nonlinear_term_fast(u: SpectralField, dealias: bool = True) -> SpectralField:
    """B(u, u) pseudo-spectrally."""
    return bilinear(u, None, method="fast", dealias=dealias)
