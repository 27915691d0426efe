"""Fourier-side arithmetic on the periodic box [0, 2*pi]^3.

A field is stored as the full cube of coefficients ``coeff[c, i, j, l]`` for
wavevectors ``k = (i - N, j - N, l - N)``, so ``k`` and ``-k`` are both present
and the reality condition ``u_hat(-k) = conj(u_hat(k))`` is restored by
symmetrisation whenever a field is built.  The ``k = 0`` slot is kept at zero
(mean-free fields).

Volume convention: ``(u, v) = Re sum_k u_hat(k) . conj(v_hat(k))``, i.e. the
(2*pi)^3 factor of the integral is dropped everywhere, so that
``||u||_{L2}^2 = sum_k |u_hat(k)|^2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

MAX_N = 64
# exp() overflows just above 709.78; stay clear of it before switching to logs
_LOG_BUDGET = 600.0
_LOG_DBL_MAX = math.log(np.finfo(float).max)


class GevreyOverflowError(OverflowError):
    """A Gevrey weight or norm exceeds the double range."""


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class WavevectorGrid:
    """All nonzero integer wavevectors with ``max_i |k_i| <= N``."""

    N: int

    @property
    def shape(self) -> tuple[int, int, int]:
        n = 2 * self.N + 1
        return (n, n, n)

    @cached_property
    def k(self) -> np.ndarray:
        r = np.arange(-self.N, self.N + 1)
        kk = np.stack(np.meshgrid(r, r, r, indexing="ij"))
        kk.flags.writeable = False
        return kk

    @cached_property
    def k2(self) -> np.ndarray:
        k2 = np.sum(self.k.astype(float) ** 2, axis=0)
        k2.flags.writeable = False
        return k2

    @cached_property
    def kabs(self) -> np.ndarray:
        ka = np.sqrt(self.k2)
        ka.flags.writeable = False
        return ka

    @cached_property
    def mask(self) -> np.ndarray:
        """True on stored modes (everything except k = 0)."""
        m = self.k2 > 0
        m.flags.writeable = False
        return m

    @cached_property
    def k2_safe(self) -> np.ndarray:
        """|k|^2 with the k = 0 slot set to 1, for divisions."""
        k2 = np.where(self.mask, self.k2, 1.0)
        k2.flags.writeable = False
        return k2

    @property
    def n_modes(self) -> int:
        return (2 * self.N + 1) ** 3 - 1

    def index(self, k) -> tuple[int, int, int]:
        k = tuple(int(c) for c in k)
        if any(abs(c) > self.N for c in k):
            raise IndexError(f"wavevector {k} outside grid N={self.N}")
        return tuple(c + self.N for c in k)

    def modes(self) -> np.ndarray:
        """(n_modes, 3) integer array of the stored wavevectors."""
        return self.k.reshape(3, -1).T[self.mask.ravel()]


@lru_cache(maxsize=None)
def make_grid(N: int) -> WavevectorGrid:
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise TypeError("N must be an integer")
    if not 1 <= N <= MAX_N:
        raise ValueError(f"grid cutoff N={N} outside [1, {MAX_N}]")
    return WavevectorGrid(int(N))


def _symmetrize(coeff: np.ndarray, N: int) -> np.ndarray:
    c = 0.5 * (coeff + np.conj(coeff[:, ::-1, ::-1, ::-1]))
    c[:, N, N, N] = 0.0
    return c


class SpectralField:
    """Truncated Fourier coefficients of a real, mean-free vector field.

    Instances are immutable; every operation returns a new field.  The
    constructor restores exact Hermitian symmetry and zeroes the mean, so the
    reality invariant holds for every field in circulation.
    """

    __slots__ = ("grid", "coeff", "solenoidal")

    def __init__(self, grid: WavevectorGrid, coeff: np.ndarray, solenoidal: bool = False):
        coeff = np.asarray(coeff, dtype=complex)
        if coeff.shape != (3,) + grid.shape:
            raise ValueError(f"coefficient array has shape {coeff.shape}, expected {(3,) + grid.shape}")
        c = _symmetrize(coeff, grid.N)
        c.flags.writeable = False
        self.grid = grid
        self.coeff = c
        self.solenoidal = bool(solenoidal)

    @classmethod
    def zeros(cls, grid: WavevectorGrid) -> "SpectralField":
        return cls(grid, np.zeros((3,) + grid.shape, complex), solenoidal=True)

    @classmethod
    def from_modes(cls, grid: WavevectorGrid, modes: dict, solenoidal: bool | None = None) -> "SpectralField":
        """Build from ``{k: u_hat(k)}``; conjugate partners are filled in.

        If both ``k`` and ``-k`` are given they must be conjugate.
        """
        c = np.zeros((3,) + grid.shape, complex)
        for k, v in modes.items():
            if not any(k):
                raise ValueError("k = 0 is not a stored mode (fields are mean free)")
            idx = grid.index(k)
            nidx = grid.index(tuple(-x for x in k))
            v = np.asarray(v, dtype=complex)
            if tuple(-x for x in k) in modes:
                other = np.asarray(modes[tuple(-x for x in k)], dtype=complex)
                if not np.allclose(other, np.conj(v), rtol=1e-12, atol=1e-14):
                    raise ValueError(f"modes at {k} and its negative are not conjugate")
            c[(slice(None),) + idx] = v
            c[(slice(None),) + nidx] = np.conj(v)
        f = cls(grid, c)
        if solenoidal is None:
            solenoidal = f.divergence_residual() <= 1e-14 * max(f.l2(), 1e-300)
        f.solenoidal = bool(solenoidal)
        return f

    # -- invariants -------------------------------------------------------
    def divergence_residual(self) -> float:
        """max_k |k . u_hat(k)|."""
        d = np.einsum("i...,i...->...", self.grid.k, self.coeff)
        return float(np.max(np.abs(d)))

    def reality_residual(self) -> float:
        c = self.coeff
        return float(np.max(np.abs(c - np.conj(c[:, ::-1, ::-1, ::-1]))))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "SpectralField"):
        if other.grid.N != self.grid.N:
            raise GridMismatchError(f"grid N={self.grid.N} vs N={other.grid.N}")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeff + other.coeff, self.solenoidal and other.solenoidal)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeff - other.coeff, self.solenoidal and other.solenoidal)

    def __mul__(self, a):
        if not np.isscalar(a) or np.iscomplexobj(a):
            raise TypeError("fields scale by real scalars only")
        return SpectralField(self.grid, self.coeff * float(a), self.solenoidal)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.coeff, self.solenoidal)

    def l2(self) -> float:
        return math.sqrt(max(inner_product(self, self), 0.0))

    def __repr__(self):
        return f"SpectralField(N={self.grid.N}, L2={self.l2():.6g}, solenoidal={self.solenoidal})"


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class GevreyWeight:
    """Weight |k|^s exp(alpha |k|^theta) defining ||A^{s/2} e^{alpha A^{theta/2}} u||."""

    s: float
    alpha: float = 0.0
    theta: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")

    def log_multiplier(self, kabs: np.ndarray) -> np.ndarray:
        return self.s * np.log(kabs) + self.alpha * kabs ** self.theta


@dataclass(frozen=True)
class TimeVaryingWeight:
    """Analytic weight with radius alpha(t) = beta0 + beta * t."""

    s: float
    beta0: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.beta0 < 0:
            raise ValueError("beta0 must be >= 0")
        if not 0 <= self.beta <= 0.5:
            raise ValueError("beta must lie in [0, 1/2]")

    def alpha(self, t: float) -> float:
        return self.beta0 + self.beta * t

    def at(self, t: float) -> GevreyWeight:
        return GevreyWeight(self.s, self.alpha(t), 1.0)


# ---------------------------------------------------------------------------
# operations


def project_leray(u: SpectralField) -> SpectralField:
    g = u.grid
    kdotu = np.einsum("i...,i...->...", g.k, u.coeff)
    c = u.coeff - g.k * (kdotu / g.k2_safe)
    return SpectralField(g, c, solenoidal=True)


def apply_multiplier(u: SpectralField, m: Callable[[np.ndarray], np.ndarray]) -> SpectralField:
    """Scale each coefficient by ``m(|k|)``.

    ``m`` receives the array of |k| over the stored modes.  Non-finite
    values raise :class:`GevreyOverflowError` rather than saturating.
    """
    g = u.grid
    vals = np.ones(g.shape)
    with np.errstate(over="ignore", invalid="ignore"):
        vals[g.mask] = np.asarray(m(g.kabs[g.mask]), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise GevreyOverflowError("multiplier is not finite on every shell")
    return SpectralField(g, u.coeff * vals, u.solenoidal)


def weight_multiplier(u: SpectralField, w: GevreyWeight) -> SpectralField:
    """A^{s/2} e^{alpha A^{theta/2}} u."""
    kmax = math.sqrt(3) * u.grid.N
    if w.alpha * kmax ** w.theta > _LOG_BUDGET:
        raise GevreyOverflowError(f"alpha={w.alpha} overflows the weight on N={u.grid.N}")
    return apply_multiplier(u, lambda ka: np.exp(w.log_multiplier(ka)))


def _mode_power(u: SpectralField) -> np.ndarray:
    """|u_hat(k)|^2 per wavevector (k = 0 slot is zero)."""
    c = u.coeff
    return (c.real ** 2 + c.imag ** 2).sum(axis=0)


def _fsum(a: np.ndarray) -> float:
    return math.fsum(np.ravel(a).tolist())


def gevrey_norm(u: SpectralField, w: GevreyWeight) -> float:
    """(sum_k |k|^{2s} e^{2 alpha |k|^theta} |u_hat(k)|^2)^{1/2}."""
    g = u.grid
    p = _mode_power(u)[g.mask]
    logw = 2.0 * w.log_multiplier(g.kabs[g.mask])
    if w.alpha == 0.0 or float(np.max(logw)) < _LOG_BUDGET:
        return math.sqrt(_fsum(np.exp(logw) * p))
    nz = p > 0
    if not np.any(nz):
        return 0.0
    logt = logw[nz] + np.log(p[nz])
    m = float(np.max(logt))
    total = m + math.log(_fsum(np.exp(logt - m)))
    if 0.5 * total > _LOG_DBL_MAX:
        raise GevreyOverflowError(f"Gevrey norm exceeds double range (log-norm {0.5 * total:.1f})")
    return math.exp(0.5 * total)


def sobolev_norm(u: SpectralField, s: float) -> float:
    """Homogeneous H^s norm; the alpha = 0 case of :func:`gevrey_norm`."""
    return gevrey_norm(u, GevreyWeight(s, 0.0, 1.0))


def wiener_norm(u: SpectralField, r: float, alpha: float = 0.0) -> float:
    """||e^{alpha A^{1/2}} u||_{F^r} = sum_k |k|^r e^{alpha |k|} |u_hat(k)|."""
    g = u.grid
    a = np.sqrt(_mode_power(u)[g.mask])
    ka = g.kabs[g.mask]
    if alpha * ka.max() > _LOG_BUDGET:
        raise GevreyOverflowError("Wiener weight overflows")
    return _fsum(ka ** r * np.exp(alpha * ka) * a)


_SPLIT = 134217729.0  # 2^27 + 1


def _two_prod(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dekker's product: a * b == p + e exactly (barring overflow)."""
    p = a * b
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def inner_product(u: SpectralField, v: SpectralField) -> float:
    """Re sum_k u_hat(k) . conj(v_hat(k)), correctly rounded.

    Products are split exactly before the compensated sum, so nearly
    orthogonal pairs keep full relative accuracy.
    """
    if u.grid.N != v.grid.N:
        raise GridMismatchError(f"grid N={u.grid.N} vs N={v.grid.N}")
    a, b = u.coeff, v.coeff
    parts = [*_two_prod(a.real, b.real), *_two_prod(a.imag, b.imag)]
    return math.fsum(np.concatenate([x.ravel() for x in parts]).tolist())


def curl(u: SpectralField) -> SpectralField:
    k = u.grid.k
    c = u.coeff
    out = 1j * np.stack(
        [
            k[1] * c[2] - k[2] * c[1],
            k[2] * c[0] - k[0] * c[2],
            k[0] * c[1] - k[1] * c[0],
        ]
    )
    return SpectralField(u.grid, out, solenoidal=True)


def stokes(u: SpectralField, power: float = 1.0) -> SpectralField:
    """A^power u, i.e. multiplication by |k|^{2 power}."""
    return apply_multiplier(u, lambda ka: ka ** (2.0 * power))


# ---------------------------------------------------------------------------
# construction helpers


def from_physical(grid: WavevectorGrid, func, solenoidal: bool | None = None) -> SpectralField:
    """Sample ``func(x, y, z) -> (u1, u2, u3)`` and keep the modes of the cube.

    Exact for trigonometric polynomials of degree <= N in each variable.
    """
    M = 2 * grid.N + 2
    x = 2 * np.pi * np.arange(M) / M
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    vals = np.stack([np.broadcast_to(np.asarray(c, float), X.shape) for c in func(X, Y, Z)])
    hat = np.fft.fftn(vals, axes=(1, 2, 3), norm="forward")
    idx = np.arange(-grid.N, grid.N + 1) % M
    c = hat[:, idx[:, None, None], idx[None, :, None], idx[None, None, :]]
    f = SpectralField(grid, c)
    if solenoidal is None:
        solenoidal = f.divergence_residual() <= 1e-12 * max(f.l2(), 1e-300)
    f.solenoidal = bool(solenoidal)
    return f


def to_physical(u: SpectralField, M: int | None = None) -> np.ndarray:
    """Values on an M^3 uniform grid (M >= 2N+1)."""
    N = u.grid.N
    M = M or 2 * N + 2
    if M < 2 * N + 1:
        raise ValueError("physical grid too coarse for the stored modes")
    X = np.zeros((3, M, M, M), complex)
    idx = np.arange(-N, N + 1) % M
    X[:, idx[:, None, None], idx[None, :, None], idx[None, None, :]] = u.coeff
    return np.fft.ifftn(X, axes=(1, 2, 3), norm="forward").real


def shear_flow(grid: WavevectorGrid, amplitude: float = 1.0, k1: int = 1) -> SpectralField:
    """u = (0, amplitude cos(k1 x1), 0); every term of (u . grad) u vanishes."""
    return SpectralField.from_modes(grid, {(k1, 0, 0): (0.0, amplitude / 2, 0.0)}, solenoidal=True)


def taylor_green(grid: WavevectorGrid, amplitude: float = 1.0) -> SpectralField:
    """2D Taylor-Green cell u = a (cos x1 sin x2, -sin x1 cos x2, 0)."""
    f = from_physical(
        grid,
        lambda x, y, z: (amplitude * np.cos(x) * np.sin(y), -amplitude * np.sin(x) * np.cos(y), 0 * z),
    )
    return project_leray(f)


def random_band(
    grid: WavevectorGrid,
    n1: float,
    n2: float,
    seed: int = 0,
    amplitude: float = 1.0,
    envelope: Callable[[np.ndarray], np.ndarray] | None = None,
) -> SpectralField:
    """Gaussian coefficients on the shells n1 <= |k| <= n2, projected by Pi.

    The result is rescaled to ``||u||_{L2} = amplitude``.  ``envelope`` (a
    function of |k|) shapes the spectrum before normalisation.
    """
    rng = np.random.default_rng(seed)
    shape = (3,) + grid.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    band = (grid.kabs >= n1) & (grid.kabs <= n2) & grid.mask
    if not np.any(band):
        raise ValueError(f"no lattice modes with {n1} <= |k| <= {n2} on N={grid.N}")
    c = c * band
    if envelope is not None:
        env = np.zeros(grid.shape)
        env[band] = envelope(grid.kabs[band])
        c = c * env
    u = project_leray(SpectralField(grid, c))
    n = u.l2()
    if n == 0:
        raise ValueError("random band field vanished after projection")
    return u * (amplitude / n)


def resample(u: SpectralField, N: int) -> SpectralField:
    """Copy onto a grid with a different cutoff (truncating or zero-padding)."""
    g = make_grid(N)
    c = np.zeros((3,) + g.shape, complex)
    m = min(N, u.grid.N)
    src = slice(u.grid.N - m, u.grid.N + m + 1)
    dst = slice(N - m, N + m + 1)
    c[:, dst, dst, dst] = u.coeff[:, src, src, src]
    return SpectralField(g, c, u.solenoidal)


# ---------------------------------------------------------------------------
# JSON schema: {"N": int, "solenoidal": bool, "modes": [{"k": [i,j,l], "re": [..3], "im": [..3]}]}
# only the half spectrum (first nonzero component of k positive) is written.


def _half_mask(grid: WavevectorGrid) -> np.ndarray:
    k = grid.k
    return (k[0] > 0) | ((k[0] == 0) & (k[1] > 0)) | ((k[0] == 0) & (k[1] == 0) & (k[2] > 0))


def to_json_dict(u: SpectralField, drop_zero: bool = True) -> dict:
    g = u.grid
    half = _half_mask(g)
    modes = []
    ks = g.k.reshape(3, -1).T
    cs = u.coeff.reshape(3, -1).T
    for flat in np.flatnonzero(half.ravel()):
        v = cs[flat]
        if drop_zero and not np.any(v):
            continue
        modes.append({"k": [int(x) for x in ks[flat]], "re": v.real.tolist(), "im": v.imag.tolist()})
    return {"N": g.N, "solenoidal": u.solenoidal, "modes": modes}


def from_json_dict(d: dict, tol: float = 1e-12) -> SpectralField:
    try:
        N = int(d["N"])
        entries = d["modes"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed field document: {exc}") from None
    g = make_grid(N)
    half = _half_mask(g)
    c = np.zeros((3,) + g.shape, complex)
    seen = set()
    for e in entries:
        k = tuple(int(x) for x in e["k"])
        if len(k) != 3 or not any(k):
            raise ValueError(f"invalid wavevector {e['k']}")
        idx = g.index(k)
        if not half[idx]:
            raise ValueError(f"wavevector {k} is not in the stored half spectrum")
        if k in seen:
            raise ValueError(f"duplicate wavevector {k}")
        seen.add(k)
        re, im = e["re"], e["im"]
        if len(re) != 3 or len(im) != 3:
            raise ValueError(f"mode {k} must carry 3 components")
        v = np.asarray(re, float) + 1j * np.asarray(im, float)
        if not np.all(np.isfinite(v)):
            raise ValueError(f"non-finite coefficient at {k}")
        c[(slice(None),) + idx] = v
        c[(slice(None),) + g.index(tuple(-x for x in k))] = np.conj(v)
    u = SpectralField(g, c)
    sol = bool(d.get("solenoidal", False))
    if sol and u.divergence_residual() > tol * max(u.l2(), 1e-300):
        raise ValueError("field flagged solenoidal but k . u_hat(k) != 0")
    u.solenoidal = sol
    return u


def save_field(u: SpectralField, path) -> None:
    Path(path).write_text(json.dumps(to_json_dict(u)))


def load_field(path) -> SpectralField:
    return from_json_dict(json.loads(Path(path).read_text()))


def decaying_field(grid: WavevectorGrid, lam: float, power: float = 1.0, amplitude: float = 1.0) -> SpectralField:
    """Deterministic solenoidal field with |u_hat(k)| = amplitude * exp(-lam |k|^power).

    The direction at each k is a fixed unit vector orthogonal to k, so shell
    maxima equal the profile at the innermost point of each shell.
    """
    k = grid.k.astype(float)
    e = np.zeros_like(k)
    e[0] = 1.0
    d = np.cross(k, e, axis=0)
    along = np.linalg.norm(d, axis=0) == 0
    e2 = np.zeros_like(k)
    e2[1] = 1.0
    d[:, along] = np.cross(k, e2, axis=0)[:, along]
    nrm = np.linalg.norm(d, axis=0)
    nrm[~grid.mask] = 1.0
    prof = np.where(grid.mask, amplitude * np.exp(-lam * grid.kabs**power), 0.0)
    # d(-k) = -d(k), so the factor i makes the coefficients Hermitian
    return SpectralField(grid, 1j * prof * d / nrm, solenoidal=True)
