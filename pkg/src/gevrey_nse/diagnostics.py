"""Measurements on fields and trajectories.

Bounds are evaluated with every unspecified constant set to 1, so each
:class:`TrilinearReport` carries the measured ratio ``lhs / sum(rhs_terms)``.
Ensemble sweeps record the sup of that ratio, which is the empirical value of
the constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import convolve
from .nonlinear import advect_fast
from .spectral import (
    GevreyOverflowError,
    GevreyWeight,
    SpectralField,
    TimeVaryingWeight,
    _fsum,
    _mode_power,
    apply_multiplier,
    curl,
    gevrey_norm,
    inner_product,
    make_grid,
    random_band,
    sobolev_norm,
    wiener_norm,
)

# ---------------------------------------------------------------------------
# time series


@dataclass
class GevreyTrack:
    times: np.ndarray
    values: np.ndarray
    truncated: bool = False
    note: str = ""


def track_gevrey(series, w: TimeVaryingWeight, theta: float = 1.0) -> GevreyTrack:
    """||u(t)||_{s, beta0 + beta t} for each snapshot.

    ``series`` is a :class:`~gevrey_nse.solver.Trajectory` or an iterable of
    ``(t, field)`` pairs.  An overflowing weight truncates the series.
    """
    pairs = [(s.t, s.u) for s in series.snapshots] if hasattr(series, "snapshots") else list(series)
    ts, vs = [], []
    for t, u in pairs:
        try:
            v = gevrey_norm(u, GevreyWeight(w.s, w.alpha(t), theta))
        except GevreyOverflowError as exc:
            return GevreyTrack(np.array(ts), np.array(vs), True, f"truncated at t={t:.6g}: {exc}")
        ts.append(t)
        vs.append(v)
    return GevreyTrack(np.array(ts), np.array(vs))


# ---------------------------------------------------------------------------
# analyticity radius


@dataclass(frozen=True)
class RadiusEstimate:
    lam: float
    fit_quality: float
    shells_used: int
    flag: str
    curvature: float = 0.0
    intercept: float = 0.0


def shell_maxima(u: SpectralField, complete_only: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Shell index n and M(n) = max_{n <= |k| < n+1} |u_hat(k)|.

    With ``complete_only`` only shells lying entirely inside the cube
    (n + 1 <= N) are returned.
    """
    g = u.grid
    amp = np.sqrt(_mode_power(u))[g.mask]
    shell = np.floor(g.kabs[g.mask] + 1e-12).astype(int)
    top = g.N - 1 if complete_only else int(shell.max())
    ns = np.arange(1, top + 1)
    M = np.zeros(len(ns))
    np.maximum.at(M, shell[shell <= top] - 1, amp[shell <= top])
    return ns, M


def estimate_radius(u: SpectralField, floor: float = 1e-14, curvature_tol: float = 0.5) -> RadiusEstimate:
    """Fit log M(n) = a - lambda n over the shells with M(n) > floor.

    The flag comes from a quadratic fit: with curvature ``2 a2 span / |a1|``
    (``span`` the fitted shell range), values below ``-curvature_tol`` mean
    the spectrum falls faster than exponentially, above ``+curvature_tol``
    slower.
    """
    ns, M = shell_maxima(u)
    keep = M > floor
    x, y = ns[keep].astype(float), np.log(M[keep])
    if len(x) < 3:
        lam = 0.0
        if len(x) == 2:
            lam = max(0.0, -(y[1] - y[0]) / (x[1] - x[0]))
        return RadiusEstimate(lam, 0.0, int(len(x)), "insufficient-data")
    a1, a0 = np.polyfit(x, y, 1)
    resid = y - (a1 * x + a0)
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / sst if sst > 0 else 1.0
    q2, _, _ = np.polyfit(x, y, 2)
    span = x[-1] - x[0]
    curv = 2.0 * q2 * span / max(abs(a1), 1e-12)
    if curv < -curvature_tol:
        flag = "super-exponential"
    elif curv > curvature_tol:
        flag = "sub-exponential"
    else:
        flag = "exponential"
    return RadiusEstimate(max(0.0, -float(a1)), r2, int(len(x)), flag, float(curv), float(a0))


# ---------------------------------------------------------------------------
# trilinear forms


@dataclass
class TrilinearReport:
    name: str
    lhs: float
    rhs_terms: list = field(default_factory=list)
    variant: "TrilinearReport | None" = None

    @property
    def rhs(self) -> float:
        return math.fsum(v for _, v in self.rhs_terms)

    @property
    def implied_constant(self) -> float:
        r = self.rhs
        if r == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return abs(self.lhs) / r

    def row(self) -> dict:
        d = {"name": self.name, "lhs": self.lhs}
        for label, v in self.rhs_terms:
            d[label] = v
        d["implied_constant"] = self.implied_constant
        return d


def _raw_advection(u: np.ndarray, v: np.ndarray, N: int, method: str) -> np.ndarray:
    if method == "direct":
        return convolve(u, v, N)
    return advect_fast(u, v, N, True)


def _weighted(u: SpectralField, s: float, alpha: float) -> SpectralField:
    """A^s e^{2 alpha A^{1/2}} u."""
    return apply_multiplier(u, lambda ka: ka ** (2 * s) * np.exp(2 * alpha * ka))


def trilinear_form(u: SpectralField, v: SpectralField, w: SpectralField, method: str = "direct") -> float:
    """(B(u, v), w) for solenoidal w; B's projection is absorbed by w."""
    raw = _raw_advection(u.coeff, v.coeff, u.grid.N, method)
    return inner_product(SpectralField(u.grid, raw), w)


def trilinear_velocity_lhs(u: SpectralField, s: float, alpha: float, method: str = "direct") -> float:
    """(B(u, u), A^s e^{2 alpha A^{1/2}} u)."""
    return trilinear_form(u, u, _weighted(u, s, alpha), method)


def _norms(u, s, alpha):
    return gevrey_norm(u, GevreyWeight(s, alpha)), gevrey_norm(u, GevreyWeight(s + 1, alpha))


def lemma1_bound_i(u: SpectralField, s: float, alpha: float, lhs: float | None = None, method: str = "direct") -> TrilinearReport:
    """|lhs| against ||e^{alpha A^{1/2}} u||_{F^0} ||u||_{s,alpha} ||u||_{s+1,alpha}."""
    if s <= 0:
        raise ValueError("requires s > 0")
    if lhs is None:
        lhs = trilinear_velocity_lhs(u, s, alpha, method)
    ns, ns1 = _norms(u, s, alpha)
    f0 = wiener_norm(u, 0.0, alpha)
    return TrilinearReport("velocity-F0", abs(lhs), [("F0*Hs*Hs1", f0 * ns * ns1)])


def lemma1_bound_ii(u: SpectralField, s: float, alpha: float, lhs: float | None = None, method: str = "direct") -> TrilinearReport:
    """Two-term F^1 bound; the Young-closed three-term form rides in ``variant``."""
    if s < 1:
        raise ValueError("requires s >= 1")
    if lhs is None:
        lhs = trilinear_velocity_lhs(u, s, alpha, method)
    ns, ns1 = _norms(u, s, alpha)
    f1 = wiener_norm(u, 1.0, alpha)
    main = TrilinearReport(
        "velocity-F1",
        abs(lhs),
        [("F1*Hs^2", f1 * ns**2), ("alpha*F1*Hs1*Hs", alpha * f1 * ns1 * ns)],
    )
    main.variant = TrilinearReport(
        "velocity-F1-young",
        abs(lhs),
        [("F1*Hs^2", f1 * ns**2), ("alpha^2*F1^2*Hs^2", alpha**2 * f1**2 * ns**2), ("Hs1^2/2", 0.5 * ns1**2)],
    )
    return main


def lemma_vorticity_bounds(
    omega: SpectralField, u: SpectralField, st: float, alpha: float, method: str = "direct", tol: float = 1e-8
) -> tuple[TrilinearReport, TrilinearReport]:
    """Stretching (B(omega, u), .) and transport (B(u, omega), .) reports.

    ``st`` is the vorticity index (velocity index minus one).
    """
    if not -0.5 < st < 1.5:
        raise ValueError("vorticity index must lie in (-1/2, 3/2)")
    ref = curl(u)
    if (ref - omega).l2() > tol * max(ref.l2(), 1e-300):
        raise ValueError("omega is not curl(u)")
    w = _weighted(omega, st, alpha)
    stretch = trilinear_form(omega, u, w, method)
    transport = trilinear_form(u, omega, w, method)
    a, b = _norms(omega, st, alpha)
    t1 = a ** (st + 1.5) * b ** (1.5 - st)
    t2 = alpha * a ** (st + 0.5) * b ** (2.5 - st)
    return (
        TrilinearReport("vorticity-stretch", abs(stretch), [("Ws^(s+3/2)*Ws1^(3/2-s)", t1)]),
        TrilinearReport("vorticity-transport", abs(transport), [("Ws^(s+3/2)*Ws1^(3/2-s)", t1), ("alpha*Ws^(s+1/2)*Ws1^(5/2-s)", t2)]),
    )


def orthogonality_residual(u: SpectralField, s: float, alpha: float, method: str = "direct") -> float:
    """|(B(u, w), w)| / (||u||_{F^1} ||w||^2) with w = A^{s/2} e^{alpha A^{1/2}} u."""
    w = apply_multiplier(u, lambda ka: ka**s * np.exp(alpha * ka))
    den = wiener_norm(u, 1.0) * inner_product(w, w)
    if den == 0:
        return 0.0
    return abs(trilinear_form(u, w, w, method)) / den


# ---------------------------------------------------------------------------
# static inequalities


def exp_weight_l2_report(u: SpectralField, s: float, alpha: float) -> TrilinearReport:
    """||e^{alpha A^{1/2}} u|| against sqrt(e) ||u|| + (2 alpha)^s ||u||_{s,alpha}."""
    lhs = gevrey_norm(u, GevreyWeight(0.0, alpha))
    return TrilinearReport(
        "exp-weight-L2",
        lhs,
        [("sqrt(e)*L2", math.sqrt(math.e) * u.l2()), ("(2alpha)^s*Hs", (2 * alpha) ** s * gevrey_norm(u, GevreyWeight(s, alpha)))],
    )


def exp_weight_l2_batch(power: np.ndarray, kabs: np.ndarray, s: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Vectorised version for a batch of mode-power spectra.

    ``power`` is (batch, modes); returns rhs - lhs per instance (>= 0 when
    the inequality holds).
    """
    e = np.exp(2 * alpha[:, None] * kabs[None, :])
    lhs = np.sqrt(np.sum(e * power, axis=1))
    hs = np.sqrt(np.sum(kabs[None, :] ** (2 * s[:, None]) * e * power, axis=1))
    rhs = math.sqrt(math.e) * np.sqrt(np.sum(power, axis=1)) + (2 * alpha) ** s * hs
    return rhs - lhs


def exp_triangle_margin(k: np.ndarray, j: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """e^{alpha|k-j|} e^{alpha|j|} / e^{alpha|k|} - 1 per row (>= 0 up to rounding)."""
    nk = np.linalg.norm(k, axis=-1)
    nj = np.linalg.norm(j, axis=-1)
    nkj = np.linalg.norm(k - j, axis=-1)
    return np.exp(alpha * nkj) * np.exp(alpha * nj) / np.exp(alpha * nk) - 1.0


def interpolation_ratio(u: SpectralField, r: float, s1: float, s2: float) -> float:
    """||u||_{F^r} / (||u||_{s1}^a ||u||_{s2}^b) with the interpolation exponents."""
    if not 0 <= s1 < 1.5 + r < s2:
        raise ValueError("need 0 <= s1 < 3/2 + r < s2")
    a = (s2 - r - 1.5) / (s2 - s1)
    b = (1.5 + r - s1) / (s2 - s1)
    den = sobolev_norm(u, s1) ** a * sobolev_norm(u, s2) ** b
    return wiener_norm(u, r) / den if den > 0 else 0.0


# ---------------------------------------------------------------------------
# ensembles


def random_ensemble(N: int, size: int, seed: int = 0, band: tuple | None = None, amplitude: float = 1.0):
    """Seeded random solenoidal fields filling the grid (default band 1..N)."""
    g = make_grid(N)
    lo, hi = band or (1, N)
    ss = np.random.SeedSequence(seed)
    return [random_band(g, lo, hi, seed=int(c.generate_state(1)[0]), amplitude=amplitude) for c in ss.spawn(size)]


@dataclass
class SweepSummary:
    inequality: str
    N: int
    s: float
    alpha: float
    sup: float
    mean: float
    count: int
    excluded: int = 0


def sweep_constants(kind: str, N: int, s: float, alpha: float, fields, method: str = "direct"):
    """Implied-constant reports for each field plus a :class:`SweepSummary`.

    ``kind`` is one of 'velocity-F0', 'velocity-F1', 'vorticity-stretch',
    'vorticity-transport' (for the vorticity kinds ``s`` is the vorticity
    index).  Fields with a vanishing right side are excluded and counted.
    """
    reports = []
    for u in fields:
        if kind == "velocity-F0":
            rep = lemma1_bound_i(u, s, alpha, method=method)
        elif kind == "velocity-F1":
            rep = lemma1_bound_ii(u, s, alpha, method=method)
        elif kind in ("vorticity-stretch", "vorticity-transport"):
            st, tr = lemma_vorticity_bounds(curl(u), u, s, alpha, method=method)
            rep = st if kind == "vorticity-stretch" else tr
        else:
            raise ValueError(f"unknown sweep kind {kind!r}")
        reports.append(rep)
    vals = [r.implied_constant for r in reports if r.rhs > 0 and r.lhs > 0]
    excluded = len(reports) - len(vals)
    summary = SweepSummary(
        kind, N, s, alpha, max(vals) if vals else 0.0, float(np.mean(vals)) if vals else 0.0, len(vals), excluded
    )
    return reports, summary
