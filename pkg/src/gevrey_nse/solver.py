"""Galerkin time stepping for du/dt + Au + B(u, u) = 0 (nu = 1, period 2*pi).

The viscous part is integrated exactly through the per-mode factor
exp(-|k|^2 dt).  Stability budgets:

* ``ifrk4`` (integrating-factor RK4): no viscous restriction; the advective
  limit is roughly ``dt * max|u| * N < 2.8``.  ``0.1 / N^2`` is always safe.
* ``imex-euler`` (backward Euler on A, forward on B): first order, same
  advective limit; meant as a cross-check only.

Galerkin trajectories of the truncated system are the computable stand-in
for strong solutions; nothing here says anything about the N -> infinity
limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .kernels import convolve
from .nonlinear import advect_fast, bilinear, leray
from .spectral import SpectralField, TimeVaryingWeight, curl, make_grid, stokes

SCHEMES = ("ifrk4", "imex-euler")
LEDGER_TOL = 1e-6


class NumericalBlowup(RuntimeError):
    """Raised by :func:`step` when the state stops being finite or explodes."""

    def __init__(self, message: str, last_state: "SolverState"):
        super().__init__(message)
        self.last_state = last_state


@dataclass(frozen=True)
class IntegratorSpec:
    dt: float
    scheme: str = "ifrk4"
    dealias: bool = True
    method: str = "fast"
    blowup_threshold: float = 1e12

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.method not in ("fast", "direct"):
            raise ValueError("method must be 'fast' or 'direct'")

    @staticmethod
    def default_dt(N: int) -> float:
        """Viscous-scale step 0.1 / N^2."""
        return 0.1 / N**2

    def with_dt(self, dt: float) -> "IntegratorSpec":
        return IntegratorSpec(dt, self.scheme, self.dealias, self.method, self.blowup_threshold)


@dataclass(frozen=True)
class SolverState:
    t: float
    u: SpectralField


@lru_cache(maxsize=64)
def _factors(N: int, dt: float):
    g = make_grid(N)
    return np.exp(-g.k2 * dt), np.exp(-g.k2 * dt / 2), 1.0 / (1.0 + g.k2 * dt)


def _rhs_nonlinear(c: np.ndarray, N: int, spec: IntegratorSpec) -> np.ndarray:
    g = make_grid(N)
    if spec.method == "fast":
        raw = advect_fast(c, None, N, spec.dealias)
    else:
        raw = convolve(c, c, N)
    return -leray(raw, g.k, g.k2_safe)


def _advance(c: np.ndarray, N: int, dt: float, spec: IntegratorSpec) -> np.ndarray:
    E, Eh, imp = _factors(N, dt)
    f = lambda x: _rhs_nonlinear(x, N, spec)
    if spec.scheme == "imex-euler":
        return (c + dt * f(c)) * imp
    a = f(c)
    u1 = Eh * (c + 0.5 * dt * a)
    b = f(u1)
    u2 = Eh * c + 0.5 * dt * b
    cc = f(u2)
    u3 = E * c + dt * Eh * cc
    d = f(u3)
    return E * c + (dt / 6.0) * (E * a + 2.0 * Eh * (b + cc) + d)


def _size(c: np.ndarray, N: int, weight: TimeVaryingWeight | None, t: float) -> float:
    """Cheap (non-compensated) norm used only for the blow-up threshold."""
    g = make_grid(N)
    p = (np.abs(c) ** 2).sum(axis=0)[g.mask]
    if weight is None:
        return math.sqrt(float(p.sum()))
    ka = g.kabs[g.mask]
    logw = 2 * weight.s * np.log(ka) + 2 * weight.alpha(t) * ka
    with np.errstate(over="ignore"):
        return math.sqrt(float(np.sum(np.exp(logw) * p)))


def step(state: SolverState, spec: IntegratorSpec, dt: float | None = None, weight: TimeVaryingWeight | None = None) -> SolverState:
    """Advance by ``dt`` (default ``spec.dt``).

    Raises :class:`NumericalBlowup` carrying the last finite state when the
    result has non-finite entries or its size (the ``weight`` norm at the new
    time, L2 without one) passes ``spec.blowup_threshold``.
    """
    dt = spec.dt if dt is None else dt
    u = state.u
    N = u.grid.N
    with np.errstate(over="ignore", invalid="ignore"):
        c = _advance(u.coeff, N, dt, spec)
    t = state.t + dt
    if not np.all(np.isfinite(c)):
        raise NumericalBlowup(f"non-finite coefficients at t={t:.6g}", state)
    size = _size(c, N, weight, t)
    if not math.isfinite(size) or size > spec.blowup_threshold:
        raise NumericalBlowup(f"norm {size:.3g} passed {spec.blowup_threshold:.3g} at t={t:.6g}", state)
    return SolverState(t, SpectralField(u.grid, c, solenoidal=True))


def mode_power(u: SpectralField) -> np.ndarray:
    return (u.coeff.real**2 + u.coeff.imag**2).sum(axis=0)


def dissipation_integral(p0: np.ndarray, p1: np.ndarray, k2: np.ndarray, dt: float, quadrature: str = "log-mean") -> float:
    """Approximate int_t^{t+dt} ||grad u||^2 from per-mode powers at both ends.

    ``log-mean`` uses (p1 - p0) / log(p1 / p0) per mode, which is exact for
    pure exponential decay; ``trapezoid`` is the plain rule on the total.
    """
    if quadrature == "trapezoid":
        return 0.5 * dt * (float(np.sum(k2 * p0)) + float(np.sum(k2 * p1)))
    if quadrature != "log-mean":
        raise ValueError(f"unknown quadrature {quadrature!r}")
    m = np.array(p0, dtype=float)
    ok = (p0 > 0) & (p1 > 0)
    r = np.ones_like(m)
    r[ok] = p1[ok] / p0[ok]
    far = ok & (np.abs(r - 1.0) > 1e-8)
    m[far] = (p1[far] - p0[far]) / np.log(r[far])
    near = ok & ~far
    # second-order expansion of the log-mean for r close to 1
    m[near] = p0[near] * (1.0 + 0.5 * (r[near] - 1.0) - (r[near] - 1.0) ** 2 / 12.0)
    one_sided = (p0 > 0) != (p1 > 0)
    m[one_sided] = 0.5 * (p0[one_sided] + p1[one_sided])
    return dt * float(np.sum(k2 * m))


@dataclass
class Trajectory:
    """Snapshots plus the Leray energy ledger sampled at the same times."""

    snapshots: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    enstrophy: list = field(default_factory=list)
    dissipated: list = field(default_factory=list)
    blowup: bool = False
    blowup_time: float | None = None
    dt_history: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def ledger(self) -> np.ndarray:
        """||u(t)||^2 + 2 int_0^t ||grad u||^2 at each snapshot."""
        return np.asarray(self.energy) + 2.0 * np.asarray(self.dissipated)

    def ledger_excess(self) -> float:
        """max_t (ledger(t) / ||u0||^2 - 1); <= 1e-6 means the inequality held."""
        e0 = self.energy[0]
        if e0 == 0:
            return 0.0
        return float(np.max(self.ledger / e0 - 1.0))

    def fields(self):
        return [s.u for s in self.snapshots]


def run(
    u0: SpectralField,
    tmax: float,
    spec: IntegratorSpec,
    sample_every: int = 1,
    weight: TimeVaryingWeight | None = None,
    quadrature: str = "log-mean",
    auto_halve: bool = True,
    max_halvings: int = 6,
) -> Trajectory:
    """Integrate from t = 0 to ``tmax`` and sample every ``sample_every`` steps.

    The sampling interval is ``sample_every * spec.dt`` in time and is kept
    when the step is halved after a ledger violation.  The run stops early,
    with ``blowup`` set, on a numerical blow-up.
    """
    if not u0.solenoidal:
        raise ValueError("initial data must be solenoidal")
    if tmax < 0:
        raise ValueError("tmax must be >= 0")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    g = u0.grid
    traj = Trajectory()
    p = mode_power(u0)
    e0 = float(np.sum(p))

    def record(state, p, diss):
        traj.snapshots.append(state)
        traj.energy.append(math.fsum(p.ravel().tolist()))
        traj.enstrophy.append(math.fsum((g.k2 * p).ravel().tolist()))
        traj.dissipated.append(diss)

    state = SolverState(0.0, u0)
    record(state, p, 0.0)
    interval = sample_every * spec.dt
    n_samples = int(math.floor(tmax / interval + 1e-9))
    sample_times = [interval * (i + 1) for i in range(n_samples)]
    if tmax - (sample_times[-1] if sample_times else 0.0) > 1e-12 * max(tmax, 1.0):
        sample_times.append(tmax)
    dt = spec.dt
    diss = 0.0
    for target in sample_times:
        while state.t < target - 1e-12 * max(target, 1.0):
            h = min(dt, target - state.t)
            try:
                new = step(state, spec, h, weight)
            except NumericalBlowup as exc:
                traj.blowup = True
                traj.blowup_time = exc.last_state.t
                traj.notes.append(str(exc))
                if exc.last_state is not traj.snapshots[-1]:
                    record(exc.last_state, p, diss)
                return traj
            p_new = mode_power(new.u)
            d = dissipation_integral(p, p_new, g.k2, h, quadrature)
            excess = (float(np.sum(p_new)) + 2.0 * (diss + d)) / e0 - 1.0 if e0 > 0 else 0.0
            if auto_halve and excess > LEDGER_TOL and len(traj.dt_history) < max_halvings:
                dt = dt / 2
                traj.dt_history.append((state.t, dt))
                traj.notes.append(f"energy ledger excess {excess:.2e} at t={new.t:.6g}; dt halved to {dt:.3g}")
                continue
            state, p, diss = new, p_new, diss + d
        state = SolverState(target, state.u)
        record(state, p, diss)
    return traj


def velocity_rhs(u: SpectralField, method: str = "fast") -> SpectralField:
    """-Au - B(u, u)."""
    return -(stokes(u) + bilinear(u, None, method=method))


def vorticity_rhs(u: SpectralField, omega: SpectralField, method: str = "fast", tol: float = 1e-8) -> SpectralField:
    """-A omega - B(u, omega) + B(omega, u) for omega = curl u."""
    ref = curl(u)
    scale = max(ref.l2(), omega.l2())
    if scale > 0 and (ref - omega).l2() > tol * scale:
        raise ValueError("omega is not the curl of u within tolerance")
    return -stokes(omega) - bilinear(u, omega, method=method) + bilinear(omega, u, method=method)
