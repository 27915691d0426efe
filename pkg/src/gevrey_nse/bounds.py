"""Closed-form existence-time, blow-up-rate and radius bounds, plus the
comparison ODEs behind them.

Every bound carries one tunable dimensionless constant ``c`` (default 1).
Where a derivation multiplies several unrelated constants together, they are
folded into that single ``c``; the ``tracked`` options of
:func:`zeta_time_bound` and :func:`X_time_bound` instead keep the explicit
numeric factors produced by the comparison argument when every ODE
coefficient equals ``c``.

``s`` is always the velocity Sobolev index; the vorticity index is ``s - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import bisect

PROVENANCES = ("assumed", "calibrated-from-sweep")


@dataclass(frozen=True)
class ImpliedConstant:
    c: float = 1.0
    provenance: str = "assumed"

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError("implied constant must be positive and finite")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")

    def __float__(self):
        return float(self.c)


def _cval(c) -> float:
    v = float(c) if c is not None else 1.0
    if not v > 0:
        raise ValueError("constant must be positive")
    return v


class RegimeError(ValueError):
    """The requested formula does not apply at this Sobolev index."""


@dataclass(frozen=True)
class BoundResult:
    value: float
    regime: str
    formula_id: str
    detail: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return float(self.value)


def small_data_threshold(c=1.0) -> float:
    """Norm below which the weighted norm never grows: 1 / (2c)."""
    return 1.0 / (2.0 * _cval(c))


def _check_basic_s(s):
    if s <= 0.5:
        raise RegimeError("requires s > 1/2")
    if s == 1.5:
        raise RegimeError("s = 3/2 is handled by persistence_time_mid")


# ---------------------------------------------------------------------------
# 1/2 < s, s != 3/2


def persistence_time_basic(s: float, gevrey_norm0: float, c=1.0, threshold: float | None = None) -> BoundResult:
    """Lower bound on the blow-up time of ||u||_{s, beta0 + beta t}.

    c / n0^{4/(2s-1)} for 1/2 < s < 3/2 and c / n0^2 for s > 3/2.  Data at or
    below ``threshold`` (default :func:`small_data_threshold`) returns +inf.
    """
    _check_basic_s(s)
    if not gevrey_norm0 > 0:
        raise ValueError("initial norm must be positive")
    cv = _cval(c)
    thr = small_data_threshold(cv) if threshold is None else threshold
    if gevrey_norm0 <= thr:
        return BoundResult(math.inf, "global", "basic-time", {"threshold": thr})
    if s < 1.5:
        return BoundResult(cv / gevrey_norm0 ** (4.0 / (2 * s - 1)), "local-low", "basic-time", {"exponent": 4.0 / (2 * s - 1)})
    return BoundResult(cv / gevrey_norm0**2, "local-high", "basic-time", {"exponent": 2.0})


def _rate_exponent(s: float) -> float:
    return (2 * s - 1) / 4.0 if s < 1.5 else 0.5


def blowup_rate_basic(s: float, Tstar: float, t: float, c=1.0) -> float:
    """c / (T* - t)^{(2s-1)/4} (s < 3/2) or c / (T* - t)^{1/2} (s > 3/2)."""
    _check_basic_s(s)
    if not 0 <= t < Tstar:
        raise ValueError("requires 0 <= t < T*")
    return _cval(c) / (Tstar - t) ** _rate_exponent(s)


def _check_low(s):
    if not 0.5 < s < 1.5:
        raise RegimeError("requires 1/2 < s < 3/2")


def t_star(s: float, beta: float, norm0: float, c=1.0) -> float:
    """Lifetime of the analytic growth envelope."""
    _check_low(s)
    cv = _cval(c)
    q = 4.0 / (2 * s - 1)
    base = 2 * cv * norm0**q
    if beta == 0:
        return (2 * s - 1) / (2 * base)
    return (2 * s - 1) / (2 * beta**2) * math.log1p(beta**2 / base)


def gevrey_growth_envelope(s: float, beta: float, norm0: float, c, t: float) -> float:
    """e^{beta^2 t/2} n0 / (1 - (2c/beta^2) n0^q (e^{2 beta^2 t/(2s-1)} - 1))^{1/q}, q = 4/(2s-1).

    Exact solution of y' = c y^{1+q} + (beta^2/2) y, y(0) = n0.
    """
    _check_low(s)
    if not 0 <= t < t_star(s, beta, norm0, c):
        raise ValueError("t outside [0, t*)")
    cv = _cval(c)
    q = 4.0 / (2 * s - 1)
    if beta == 0:
        growth = 2 * cv * 2 * t / (2 * s - 1)
    else:
        growth = 2 * cv / beta**2 * math.expm1(2 * beta**2 * t / (2 * s - 1))
    den = 1.0 - growth * norm0**q
    return math.exp(beta**2 * t / 2) * norm0 / den ** (1.0 / q)


def _sigma_f(x):
    return -math.log1p(x * x) / (2 * x * x) + 1.0 / (1 + x * x)


@lru_cache(maxsize=1)
def sigma_root() -> float:
    """Positive root of -log(1 + x^2)/(2 x^2) + 1/(1 + x^2), bracketed in (1, 2.5)."""
    return bisect(_sigma_f, 1.0, 2.5, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def radius_lower_bound(s: float, beta: float, norm0: float, beta0: float = 0.0, c=1.0) -> float:
    """beta0 + ((2s-1)/(4 beta)) log(1 + beta^2 / (2c n0^{4/(2s-1)})): the radius at t*/2."""
    _check_low(s)
    if beta <= 0:
        raise ValueError("beta must be positive")
    cv = _cval(c)
    return beta0 + (2 * s - 1) / (4 * beta) * math.log1p(beta**2 / (2 * cv * norm0 ** (4.0 / (2 * s - 1))))


def optimal_beta_and_radius(s: float, norm0: float, beta0: float = 0.0, c=1.0) -> tuple[float, float]:
    """(beta_opt, radius bound at t*/2) for the radius-maximising growth rate.

    beta_opt = sqrt(2c) n0^{2/(2s-1)} sigma.  It may exceed 1/2; the radius
    formula itself does not need beta <= 1/2.
    """
    _check_low(s)
    if not norm0 > 0:
        raise ValueError("initial norm must be positive")
    cv = _cval(c)
    b = math.sqrt(2 * cv) * norm0 ** (2.0 / (2 * s - 1)) * sigma_root()
    return b, radius_lower_bound(s, b, norm0, beta0, cv)


# ---------------------------------------------------------------------------
# s > 5/2 and 3/2 <= s < 5/2


def zeta_gamma(s: float, L2norm0: float) -> float:
    return L2norm0 ** (1.0 - 5.0 / (2 * s))


def zeta_time_bound(s: float, zeta0: float, L2norm0: float, beta: float, c=1.0, tracked: bool = False) -> BoundResult:
    """Lower bound on the blow-up time of the s > 5/2 comparison ODE.

    ``zeta0`` is ||u0||_s.  Large-data branch returns Z, the other branch
    min{Z, Z^{2/5}}.  With ``tracked`` the factor 1/(beta^2 + 4c * 5/(2s))
    from the comparison argument replaces the folded constant.
    """
    if s <= 2.5:
        raise RegimeError("requires s > 5/2")
    if not 0 < beta <= 0.5:
        raise ValueError("requires 0 < beta <= 1/2")
    if not (zeta0 > 0 and L2norm0 > 0):
        raise ValueError("norms must be positive")
    cv = _cval(c)
    g = zeta_gamma(s, L2norm0)
    p = 5.0 / (2 * s)
    gmin = min(g ** (5.0 / (2 * s - 5)), 1.0 / g)
    cthr = min(g ** (2 * s / (2 * s - 5)), g ** (-2 * s / 5))
    if tracked:
        Z = gmin / ((beta**2 + 4 * cv * p) * zeta0**p)
        threshold = beta ** (-4 * s / 5) * cthr
    else:
        Z = cv * gmin / zeta0**p
        threshold = cv * beta ** (-4 * s / 5) * cthr
    detail = {"gamma": g, "Z": Z, "threshold": threshold, "tracked": tracked}
    if zeta0 >= threshold:
        return BoundResult(Z, "large-data", "zeta-large-data", detail)
    return BoundResult(min(Z, Z**0.4), "small-data", "zeta-small-data", detail)


def X_time_bound(s: float, Hs_norm0: float, beta: float, c=1.0, tracked: bool = False) -> BoundResult:
    """Lower bound for 3/2 <= s < 5/2 through the vorticity ODE (index s - 1).

    Returns N = c / ||u0||_s^{4/(2s-1)} above the threshold c / beta^{(2s-1)/2},
    min{N, N^{1/2}} below it.  At s = 3/2 the general-index formulas are
    applied with vorticity index 1/2 (the cube-law case).  With ``tracked`` the
    factor 1/(beta^2 + 2c q), q = 4/(2s-1), replaces the folded constant.
    """
    if not 1.5 <= s < 2.5:
        raise RegimeError("requires 3/2 <= s < 5/2")
    if not 0 < beta <= 0.5:
        raise ValueError("requires 0 < beta <= 1/2")
    if not Hs_norm0 > 0:
        raise ValueError("norm must be positive")
    cv = _cval(c)
    q = 4.0 / (2 * s - 1)
    if tracked:
        val = 1.0 / ((beta**2 + 2 * cv * q) * Hs_norm0**q)
        threshold = beta ** (-(2 * s - 1) / 2)
    else:
        val = cv / Hs_norm0**q
        threshold = cv / beta ** ((2 * s - 1) / 2)
    detail = {"N": val, "threshold": threshold, "tracked": tracked, "cube_law": s == 1.5}
    fid = "vorticity-large-data" if s > 1.5 else "cube-law"
    if Hs_norm0 >= threshold:
        return BoundResult(val, "large-data", fid, detail)
    return BoundResult(min(val, math.sqrt(val)), "small-data", "vorticity-small-data" if s > 1.5 else fid, detail)


def persistence_time_mid(s: float, Hs_norm0: float, beta: float, c=1.0) -> BoundResult:
    """Entry point for 3/2 <= s < 5/2 (including s = 3/2)."""
    return X_time_bound(s, Hs_norm0, beta, c)


def sobolev_blowup_rate(s: float, Tdd: float, t: float, c=1.0) -> float:
    """c / (T - t)^{(2s-1)/4} for 1/2 < s < 5/2."""
    if not 0.5 < s < 2.5:
        raise RegimeError("requires 1/2 < s < 5/2")
    if not t < Tdd:
        raise ValueError("requires t < T")
    return _cval(c) / (Tdd - t) ** ((2 * s - 1) / 4)


def sobolev_existence_time(s: float, Hs_norm0: float, c=1.0) -> float:
    """Companion of :func:`sobolev_blowup_rate`: c / ||u0||_s^{4/(2s-1)}."""
    if not 0.5 < s < 2.5:
        raise RegimeError("requires 1/2 < s < 5/2")
    return _cval(c) / Hs_norm0 ** (4.0 / (2 * s - 1))


# ---------------------------------------------------------------------------
# comparison ODEs

KINDS = ("zeta", "X", "power-law", "analyticity")


@dataclass(frozen=True)
class ComparisonODE:
    """A positive right side f(t, y); exponents follow from ``s``.

    * ``zeta``: c g y^{1+5/(2s)} + c (bt)^{s-5/2} y^2 + c (bt)^2 g^2 y^{1+5/s} + c (bt)^{2s-3} y^3
    * ``X``: c y^{1+4/(2s-1)} + c (bt)^{4/(2s-3)} y^{1+4/(2s-3)}  (vorticity index s-1)
    * ``power-law``: c y^{1+p}
    * ``analyticity``: c y^{1+4/(2s-1)} + (b^2/2) y
    """

    kind: str
    c: float = 1.0
    s: float | None = None
    beta: float = 0.0
    gamma: float = 1.0
    p: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.c < 0:
            raise ValueError("coefficients must be >= 0")
        if self.kind == "zeta" and not (self.s and self.s > 2.5):
            raise RegimeError("zeta ODE requires s > 5/2")
        if self.kind == "X" and not (self.s and 1.5 < self.s < 2.5):
            raise RegimeError("X ODE requires 3/2 < s < 5/2")
        if self.kind == "analyticity" and not (self.s and 0.5 < self.s < 1.5):
            raise RegimeError("analyticity ODE requires 1/2 < s < 3/2")
        if self.kind == "power-law" and not (self.p and self.p > 0):
            raise ValueError("power-law ODE needs an exponent p > 0")

    @classmethod
    def zeta(cls, s, L2norm0, beta, c=1.0):
        return cls("zeta", _cval(c), s, beta, zeta_gamma(s, L2norm0))

    @classmethod
    def X(cls, s, beta, c=1.0):
        return cls("X", _cval(c), s, beta)

    @classmethod
    def power_law(cls, p, c=1.0):
        return cls("power-law", float(c), p=p)

    @classmethod
    def analyticity(cls, s, beta, c=1.0):
        return cls("analyticity", _cval(c), s, beta)

    def rhs(self, t: float, y: float) -> float:
        c, b = self.c, self.beta
        if self.kind == "power-law":
            return c * y ** (1 + self.p)
        s = self.s
        bt = b * max(t, 0.0)
        if self.kind == "zeta":
            g = self.gamma
            return c * (
                g * y ** (1 + 5 / (2 * s))
                + bt ** (s - 2.5) * y**2
                + bt**2 * g**2 * y ** (1 + 5 / s)
                + bt ** (2 * s - 3) * y**3
            )
        if self.kind == "X":
            r = 4 / (2 * s - 3)
            return c * (y ** (1 + 4 / (2 * s - 1)) + bt**r * y ** (1 + r))
        return c * y ** (1 + 4 / (2 * s - 1)) + 0.5 * b * b * y

    def closed_form(self, t: float, y0: float) -> float | None:
        """Exact solution where one exists (power-law, analyticity), else None."""
        if self.kind == "power-law":
            if self.c == 0:
                return y0
            den = y0 ** (-self.p) - self.c * self.p * t
            if den <= 0:
                raise ValueError("t at or past the singularity")
            return den ** (-1 / self.p)
        if self.kind == "analyticity":
            if self.c == 0:
                return y0 * math.exp(0.5 * self.beta**2 * t)
            return gevrey_growth_envelope(self.s, self.beta, y0, self.c, t)
        return None


@dataclass
class ComparisonSolution:
    t: np.ndarray
    y: np.ndarray
    blowup_time: float | None
    crossings: tuple = ()
    message: str = ""

    def __call__(self, t):
        """Linear interpolation in log y (valid while finite)."""
        return np.exp(np.interp(t, self.t, np.log(self.y)))


BLOWUP_LEVELS = (1e8, 1e10, 1e12)


def _aitken(t1, t2, t3):
    d1, d2 = t2 - t1, t3 - t2
    den = d2 - d1
    if den == 0 or not math.isfinite(den):
        return t3
    return t3 - d2 * d2 / den


def integrate_comparison(
    ode: ComparisonODE, y0: float, tmax: float, t_eval=None, rtol: float = 1e-10, atol: float = 1e-14
) -> ComparisonSolution:
    """Adaptive DOP853 integration; blow-up once y passes 1e12.

    The blow-up time is extrapolated from the crossings of 1e8, 1e10 and
    1e12: for power-law growth those times approach the singularity
    geometrically, which the Aitken step removes exactly.
    """
    if not y0 > 0:
        raise ValueError("y0 must be positive")
    if y0 >= BLOWUP_LEVELS[0]:
        raise ValueError("initial value already above the blow-up levels")
    events = []
    for lev in BLOWUP_LEVELS:
        ev = lambda t, y, lev=lev: y[0] - lev
        ev.terminal = lev == BLOWUP_LEVELS[-1]
        ev.direction = 1
        events.append(ev)
    fun = lambda t, y: [ode.rhs(t, y[0])]
    with np.errstate(over="ignore"):
        sol = solve_ivp(fun, (0.0, tmax), [y0], method="DOP853", rtol=rtol, atol=atol, events=events, t_eval=t_eval)
    t, y = sol.t, sol.y[0]
    # keep the reported series monotone; the solver can dither by an ulp
    y = np.maximum.accumulate(y) if len(y) else y
    hits = [e[0] if len(e) else None for e in sol.t_events]
    blow = None
    if sol.status == 1 and all(h is not None for h in hits):
        blow = _aitken(*hits)
    elif sol.status == -1:
        blow = float(t[-1]) if len(t) else 0.0
    return ComparisonSolution(t, y, blow, tuple(hits), sol.message)


# ---------------------------------------------------------------------------
# closed forms used inside the comparison arguments

FAMILIES = ("zeta", "vorticity", "cube")


def phi_exponent(s: float, family: str = "zeta") -> float:
    if family == "zeta":
        return 5.0 / (2 * s)
    if family == "vorticity":
        return 4.0 / (2 * s - 1)  # 4/(1 + 2(s-1))
    if family == "cube":
        return 2.0
    raise ValueError(f"family must be one of {FAMILIES}")


def closed_form_phi(s: float, coeff: float, y0: float, t: float, family: str = "zeta") -> float:
    """(y0^{-p} - coeff t)^{-1/p}; solves y' = (coeff/p) y^{1+p}."""
    p = phi_exponent(s, family)
    den = y0 ** (-p) - coeff * t
    if den <= 0:
        raise ValueError("t at or past the singularity")
    return den ** (-1.0 / p)


def crossing_time(variant: str, **params) -> float:
    """Positive root of the crossing equations.

    * quadratic: a t^2 + b t = rhs
    * five-halves: a t^{5/2} + b t = rhs (bisection)
    * quadratic-beta: c beta^2 t^2 + c t = rhs
    * cube-law: c_breve^{-2} t^2 + c t = rhs
    """
    rhs = float(params["rhs"])
    if variant == "quadratic":
        a, b = float(params["a"]), float(params["b"])
    elif variant == "quadratic-beta":
        c, beta = float(params["c"]), float(params["beta"])
        a, b = c * beta**2, c
    elif variant == "cube-law":
        a, b = float(params["c_breve"]) ** -2, float(params["c"])
    elif variant == "five-halves":
        a, b = float(params["a"]), float(params["b"])
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if a < 0 or b < 0 or (a == 0 and b == 0) or rhs <= 0:
        raise ValueError("need nonnegative coefficients (not both zero) and positive rhs")
    if variant != "five-halves":
        return 2 * rhs / (b + math.sqrt(b * b + 4 * a * rhs))
    f = lambda t: a * t**2.5 + b * t - rhs
    hi = min(rhs / b if b > 0 else math.inf, (rhs / a) ** 0.4 if a > 0 else math.inf)
    if f(hi) == 0:
        return hi
    return bisect(f, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)


def crossing_residual(variant: str, t: float, **params) -> float:
    rhs = params["rhs"]
    if variant == "quadratic":
        return params["a"] * t * t + params["b"] * t - rhs
    if variant == "five-halves":
        return params["a"] * t**2.5 + params["b"] * t - rhs
    if variant == "quadratic-beta":
        return params["c"] * params["beta"] ** 2 * t * t + params["c"] * t - rhs
    if variant == "cube-law":
        return params["c_breve"] ** -2 * t * t + params["c"] * t - rhs
    raise ValueError(f"unknown variant {variant!r}")
