"""Scenario runners that tie the solver, diagnostics and bounds together.

Each scenario takes an :class:`ExperimentConfig` and returns a
:class:`RunRecord` of per-sample rows plus three-valued verdicts.  The initial
data recipes (Taylor-Green cell, shear mode, seeded random band, JSON file)
are a fixed choice of test flows, not something the theory singles out.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds as bd
from .diagnostics import (
    estimate_radius,
    random_ensemble,
    sweep_constants,
    track_gevrey,
)
from .solver import IntegratorSpec, run
from .spectral import (
    GevreyOverflowError,
    GevreyWeight,
    SpectralField,
    TimeVaryingWeight,
    gevrey_norm,
    load_field,
    make_grid,
    random_band,
    shear_flow,
    sobolev_norm,
    taylor_green,
)

PASS, FAIL, OBSERVATIONAL = "PASS", "FAIL", "OBSERVATIONAL"
SCENARIOS = ("small_data", "radius_growth", "gronwall", "constant_sweep", "band_limited", "ode_bounds")
RECIPES = ("taylor-green", "shear", "random-band", "file", "zero")

MONOTONE_TOL = 1e-6
GRONWALL_SLACK = 1e-3
RADIUS_SLACK = 0.15
EXPONENT_TOL = 0.3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass
class InitialData:
    recipe: str = "random-band"
    n1: float = 2.0
    n2: float = 4.0
    seed: int = 0
    amplitude: float = 1.0
    path: str | None = None

    def build(self, N: int, seed: int | None = None) -> SpectralField:
        g = make_grid(N)
        if self.recipe == "taylor-green":
            return taylor_green(g, self.amplitude)
        if self.recipe == "shear":
            return shear_flow(g, self.amplitude)
        if self.recipe == "zero":
            return SpectralField.zeros(g)
        if self.recipe == "random-band":
            return random_band(g, self.n1, self.n2, self.seed if seed is None else seed, self.amplitude)
        u = load_field(self.path)
        if u.grid.N != N:
            raise ConfigError(f"field file has N={u.grid.N}, config asks for N={N}")
        return u


@dataclass
class ExperimentConfig:
    scenario: str
    N: int = 16
    s: float = 1.0
    beta0: float = 0.0
    beta: float = 0.25
    theta: float = 1.0
    initial: InitialData = field(default_factory=InitialData)
    dt: float | None = None
    scheme: str = "ifrk4"
    dealias: bool = True
    tmax: float = 0.5
    sample_every: int = 5
    out: str | None = None
    constants: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: [0])
    ensemble: int = 100
    extra: dict = field(default_factory=dict)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "scenario" not in d:
            raise ConfigError("config needs a scenario")
        init = d.pop("initial", {}) or {}
        if isinstance(init, InitialData):
            init = dataclasses.asdict(init)
        inames = {f.name for f in dataclasses.fields(InitialData)}
        if set(init) - inames:
            raise ConfigError(f"unknown initial-data keys: {sorted(set(init) - inames)}")
        try:
            cfg = cls(initial=InitialData(**init), **d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def spec(self) -> IntegratorSpec:
        dt = self.dt if self.dt is not None else IntegratorSpec.default_dt(self.N)
        return IntegratorSpec(dt, self.scheme, self.dealias)

    def constant(self) -> bd.ImpliedConstant | None:
        if "c" in self.constants:
            return bd.ImpliedConstant(float(self.constants["c"]), self.constants.get("provenance", "assumed"))
        return None

    # -- validation -------------------------------------------------------
    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.scenario in SCENARIOS, f"scenario must be one of {SCENARIOS}")
        need(isinstance(self.N, int) and 1 <= self.N <= 64, "N must be an integer in [1, 64]")
        need(0 <= self.beta <= 0.5, "beta must lie in [0, 1/2]")
        need(self.beta0 >= 0, "beta0 must be >= 0")
        need(0 < self.theta <= 1, "theta must lie in (0, 1]")
        need(self.tmax >= 0, "tmax must be >= 0")
        need(self.dt is None or self.dt > 0, "dt must be positive")
        need(self.sample_every >= 1, "sample_every must be >= 1")
        need(self.scheme in ("ifrk4", "imex-euler"), "scheme must be ifrk4 or imex-euler")
        need(self.initial.recipe in RECIPES, f"initial recipe must be one of {RECIPES}")
        need(self.initial.recipe != "file" or self.initial.path, "file recipe needs a path")
        need(isinstance(self.seeds, list) and len(self.seeds) > 0, "seeds must be a non-empty list")
        if "c" in self.constants:
            need(float(self.constants["c"]) > 0, "constant c must be positive")
        s = self.s
        if self.scenario == "small_data":
            need(s > 0.5, "small_data needs s > 1/2")
        elif self.scenario == "radius_growth":
            need(s > 0.5 and s != 1.5, "radius_growth needs s > 1/2, s != 3/2")
        elif self.scenario == "gronwall":
            need(s > 0.5 and s != 2.5, "gronwall needs s > 1/2 and s != 5/2")
            need(s <= 1.5 or self.beta > 0, "the s > 3/2 majorants need beta > 0")
        elif self.scenario == "constant_sweep":
            need(s > 0, "constant_sweep needs s > 0")
            need(self.ensemble >= 100, "constant_sweep needs an ensemble of at least 100")
        elif self.scenario == "band_limited":
            need(0.5 < s < 1.5, "band_limited needs 1/2 < s < 3/2")
        if self.theta != 1.0 and self.scenario not in ("small_data",):
            raise ConfigError("theta < 1 is supported for norm logging only (small_data scenario)")


# ---------------------------------------------------------------------------
# records


@dataclass
class Verdict:
    name: str
    invariant: str
    status: str
    first_violation: dict | None = None
    detail: dict = field(default_factory=dict)


@dataclass
class RunRecord:
    config_hash: str
    scenario: str
    rows: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add_row(self, **row):
        self.rows.append(row)

    def add_verdict(self, v: Verdict):
        if v.status == FAIL and v.first_violation is None:
            raise ValueError("a FAIL verdict must carry its first violating sample")
        self.verdicts.append(v)

    @property
    def status(self) -> str:
        st = [v.status for v in self.verdicts]
        if FAIL in st:
            return FAIL
        if PASS in st:
            return PASS
        return OBSERVATIONAL

    def verdict(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    # -- emitters ---------------------------------------------------------
    def write_jsonl(self, path):
        with open(path, "w") as fh:
            fh.write(json.dumps({"type": "header", "config_hash": self.config_hash, "scenario": self.scenario}) + "\n")
            for r in self.rows:
                fh.write(json.dumps({"type": "row", **r}, default=_jsonable) + "\n")
            for v in self.verdicts:
                fh.write(json.dumps({"type": "verdict", **dataclasses.asdict(v)}, default=_jsonable) + "\n")
            for n in self.notes:
                fh.write(json.dumps({"type": "note", "text": n}) + "\n")

    def write_csv(self, path):
        keys = []
        for r in self.rows:
            keys.extend(k for k in r if k not in keys)
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            for r in self.rows:
                w.writerow(r)

    def write_plotdata(self, directory):
        """One two-column file per numeric metric, keyed on t (or row index)."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        groups = {}
        for i, r in enumerate(self.rows):
            key = r.get("series", "main")
            x = r.get("t", i)
            for k, v in r.items():
                if k in ("t", "series") or not isinstance(v, (int, float)) or isinstance(v, bool):
                    continue
                groups.setdefault((key, k), []).append((x, v))
        written = []
        for (series, metric), pts in groups.items():
            p = d / f"{series}.{metric}.dat".replace("/", "_")
            with open(p, "w") as fh:
                for x, v in pts:
                    fh.write(f"{x!r} {v!r}\n")
            written.append(p)
        return written


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _first_violation(ts, ok, **cols):
    for i, good in enumerate(ok):
        if not good:
            return {"t": float(ts[i]), **{k: float(v[i]) for k, v in cols.items()}}
    return None


# ---------------------------------------------------------------------------
# scenarios


def _trajectory(cfg: ExperimentConfig, u0: SpectralField, tmax: float, sample_every: int | None = None):
    w = TimeVaryingWeight(cfg.s, cfg.beta0, cfg.beta)
    return run(u0, tmax, cfg.spec(), sample_every or cfg.sample_every, weight=w)


def scenario_small_data(cfg: ExperimentConfig) -> RunRecord:
    """Weighted norm must not increase when the data start below the threshold."""
    rec = RunRecord(cfg.config_hash(), "small_data")
    c = cfg.constant() or bd.ImpliedConstant()
    thr = bd.small_data_threshold(c)
    for seed in cfg.seeds:
        u0 = cfg.initial.build(cfg.N, seed if cfg.initial.recipe == "random-band" else None)
        w = TimeVaryingWeight(cfg.s, cfg.beta0, cfg.beta)
        n0 = gevrey_norm(u0, w.at(0.0))
        traj = _trajectory(cfg, u0, cfg.tmax, sample_every=1)
        track = track_gevrey(traj, w, theta=cfg.theta)
        for t, v, e in zip(track.times, track.values, traj.energy):
            rec.add_row(series=f"seed{seed}", t=float(t), energy=e, gevrey=float(v), threshold=thr)
        if track.truncated:
            rec.notes.append(track.note)
        name = f"norm-nonincrease[seed={seed}]"
        inv = "weighted norm non-increasing for data below the small-data threshold"
        if cfg.theta != 1.0:
            rec.add_verdict(Verdict(name, inv, OBSERVATIONAL, detail={"reason": "theta < 1: logging only"}))
            continue
        if n0 > thr:
            rec.add_verdict(Verdict(name, inv, OBSERVATIONAL, detail={"reason": "initial norm above threshold", "norm0": n0, "threshold": thr}))
            continue
        vals = track.values
        ok = np.ones(len(vals), bool)
        ok[1:] = vals[1:] <= vals[:-1] * (1 + MONOTONE_TOL)
        fv = _first_violation(track.times, ok, gevrey=vals)
        rec.add_verdict(Verdict(name, inv, PASS if fv is None else FAIL, fv, {"norm0": n0, "threshold": thr}))
    return rec


def persistence_window(s: float, beta: float, norm0: float, c) -> float:
    if 0.5 < s < 1.5:
        return bd.t_star(s, beta, norm0, c)
    return bd.persistence_time_basic(s, norm0, c).value


def scenario_radius_growth(cfg: ExperimentConfig) -> RunRecord:
    """Fitted radius must stay above beta0 + beta t inside the persistence window."""
    rec = RunRecord(cfg.config_hash(), "radius_growth")
    c = cfg.constant() or bd.ImpliedConstant()
    floor = cfg.extra.get("floor", 1e-14)
    for seed in cfg.seeds:
        u0 = cfg.initial.build(cfg.N, seed if cfg.initial.recipe == "random-band" else None)
        w = TimeVaryingWeight(cfg.s, cfg.beta0, cfg.beta)
        n0 = gevrey_norm(u0, w.at(0.0))
        window = persistence_window(cfg.s, cfg.beta, n0, c) if n0 > 0 else math.inf
        tmax = min(cfg.tmax, window)
        traj = _trajectory(cfg, u0, tmax)
        ts, lam, target = [], [], []
        for snap, e in zip(traj.snapshots, traj.energy):
            r = estimate_radius(snap.u, floor)
            try:
                g = gevrey_norm(snap.u, w.at(snap.t))
            except GevreyOverflowError:
                g = math.inf
                rec.notes.append(f"weight overflow at t={snap.t:.4g}")
            row = dict(series=f"seed{seed}", t=snap.t, energy=e, Hs=sobolev_norm(snap.u, cfg.s), gevrey=g,
                       radius=r.lam, radius_flag=r.flag, fit_quality=r.fit_quality, target=w.alpha(snap.t))
            if 0.5 < cfg.s < 1.5 and snap.t < window:
                row["envelope"] = bd.gevrey_growth_envelope(cfg.s, cfg.beta, n0, c, snap.t)
            rec.add_row(**row)
            if snap.t < window:
                ts.append(snap.t)
                lam.append(r.lam)
                target.append(w.alpha(snap.t))
        ts, lam, target = map(np.array, (ts, lam, target))
        ok = lam >= target * (1 - RADIUS_SLACK)
        fv = _first_violation(ts, ok, radius=lam, target=target)
        rec.add_verdict(
            Verdict(f"radius-growth[seed={seed}]", "fitted radius >= beta0 + beta t (15% slack) within the persistence window",
                    PASS if fv is None else FAIL, fv, {"window": window, "tmax": tmax, "blowup": traj.blowup})
        )
    return rec


# -- Gronwall ---------------------------------------------------------------


def majorant_route(s: float) -> str:
    if s > 2.5:
        return "zeta"
    if 1.5 < s < 2.5:
        return "X"
    if s == 1.5:
        return "cube"
    if 0.5 < s < 1.5:
        return "analyticity"
    raise bd.RegimeError(f"no majorant implemented for s={s}")


def calibrate_constant(s: float, alphas, N: int = 8, size: int = 100, seed: int = 0, method: str = "fast") -> bd.ImpliedConstant:
    """Largest implied constant of the trilinear bounds feeding the route's ODE."""
    route = majorant_route(s)
    fields = random_ensemble(N, size, seed)
    sups = []
    for a in alphas:
        if route == "zeta":
            kinds = [("velocity-F1", s)]
        elif route == "analyticity":
            kinds = [("velocity-F0", s)]
        else:
            kinds = [("vorticity-stretch", s - 1), ("vorticity-transport", s - 1)]
        for kind, idx in kinds:
            sups.append(sweep_constants(kind, N, idx, a, fields, method=method)[1].sup)
    return bd.ImpliedConstant(max(sups), "calibrated-from-sweep")


def build_majorant(s: float, beta: float, c: float, L2norm0: float) -> bd.ComparisonODE:
    route = majorant_route(s)
    if route == "zeta":
        return bd.ComparisonODE.zeta(s, L2norm0, beta, c)
    if route == "X":
        return bd.ComparisonODE.X(s, beta, c)
    if route == "cube":
        return bd.ComparisonODE.power_law(2.0, c)
    return bd.ComparisonODE.analyticity(s, beta, c)


def scenario_gronwall(cfg: ExperimentConfig) -> RunRecord:
    """Measured ||u(t)||_{s, beta0 + beta t} must stay under the majorant ODE."""
    rec = RunRecord(cfg.config_hash(), "gronwall")
    route = majorant_route(cfg.s)
    # the s > 3/2 comparisons start from radius 0
    beta0 = cfg.beta0 if route == "analyticity" else 0.0
    c = cfg.constant()
    if c is None:
        alphas = sorted({0.0, beta0 + cfg.beta * cfg.tmax})
        c = calibrate_constant(cfg.s, alphas, N=min(cfg.N, 8), size=cfg.extra.get("calibration_size", 100))
        rec.notes.append(f"constant calibrated from sweep: c={c.c:.6g}")
    for seed in cfg.seeds:
        u0 = cfg.initial.build(cfg.N, seed if cfg.initial.recipe == "random-band" else None)
        w = TimeVaryingWeight(cfg.s, beta0, cfg.beta)
        traj = run(u0, cfg.tmax, cfg.spec(), cfg.sample_every, weight=w)
        track = track_gevrey(traj, w)
        ts, meas = track.times, track.values
        name = f"gronwall[seed={seed}]"
        inv = "measured weighted norm <= majorant ODE solution (1e-3 slack)"
        if meas[0] == 0:
            maj = np.zeros_like(meas)
            window = math.inf
        else:
            ode = build_majorant(cfg.s, cfg.beta, float(c), u0.l2())
            sol = bd.integrate_comparison(ode, float(meas[0]), float(ts[-1]) if ts[-1] > 0 else 1e-12, t_eval=ts)
            maj = np.full(len(ts), np.inf)
            maj[: len(sol.y)] = sol.y
            window = sol.blowup_time if sol.blowup_time is not None else math.inf
            if sol.blowup_time is not None:
                rec.notes.append(f"seed {seed}: majorant blew up at t={sol.blowup_time:.4g}; comparison window shortened")
        both = np.isfinite(maj) & np.isfinite(meas)
        ok = ~both | (meas <= maj * (1 + GRONWALL_SLACK))
        for t, m, M in zip(ts, meas, maj):
            rec.add_row(series=f"seed{seed}", t=float(t), measured=float(m), majorant=float(M),
                        margin=float(M / m - 1) if m > 0 and np.isfinite(M) else 0.0)
        fv = _first_violation(ts, ok, measured=meas, majorant=maj)
        rec.add_verdict(Verdict(name, inv, PASS if fv is None else FAIL, fv,
                                {"route": route, "c": float(c), "provenance": c.provenance, "window": window}))
    return rec


# -- sweeps -------------------------------------------------------------------


def sweep_kinds(s: float):
    kinds = []
    if s > 0:
        kinds.append(("velocity-F0", s))
    if s >= 1:
        kinds.append(("velocity-F1", s))
    if -0.5 < s - 1 < 1.5:
        kinds.append(("vorticity-stretch", s - 1))
        kinds.append(("vorticity-transport", s - 1))
    return kinds


def scenario_constant_sweep(cfg: ExperimentConfig) -> RunRecord:
    """Implied constants of the trilinear bounds across grid sizes."""
    rec = RunRecord(cfg.config_hash(), "constant_sweep")
    Ns = cfg.extra.get("Ns", [4, 6, 8])
    alphas = cfg.extra.get("alphas", [0.0, 0.1, 0.2])
    method = cfg.extra.get("method", "fast")
    summaries = {}
    for N in Ns:
        if cfg.initial.recipe == "random-band":
            fields = random_ensemble(N, cfg.ensemble, cfg.seeds[0])
        else:
            fields = [cfg.initial.build(N) for _ in range(cfg.ensemble)]
        for kind, idx in sweep_kinds(cfg.s):
            for a in alphas:
                reports, summ = sweep_constants(kind, N, idx, a, fields, method=method)
                for r in reports:
                    rec.add_row(series=kind, N=N, s=idx, alpha=a, **{k: v for k, v in r.row().items() if k != "name"})
                summaries[(kind, idx, a, N)] = summ
    for (kind, idx, a, N), summ in summaries.items():
        rec.add_row(series=f"summary-{kind}", N=N, s=idx, alpha=a, sup=summ.sup, mean=summ.mean, count=summ.count, excluded=summ.excluded)
    for kind, idx in sweep_kinds(cfg.s):
        for a in alphas:
            sups = [summaries[(kind, idx, a, N)].sup for N in Ns]
            excluded = sum(summaries[(kind, idx, a, N)].excluded for N in Ns)
            growth = sups[-1] / sups[0] - 1 if sups[0] > 0 else 0.0
            rec.add_verdict(Verdict(
                f"{kind}[s={idx:g},alpha={a:g}]", "sup implied constant finite and reported across N", OBSERVATIONAL,
                detail={"sups": sups, "Ns": Ns, "growth": growth, "growth_flag": growth > 0.25,
                        "degenerate_excluded": excluded, "finite": all(math.isfinite(x) for x in sups)},
            ))
    return rec


# -- band-limited data ----------------------------------------------------------


def band_limited_gain(s: float, N: int, band_factor: float = 1.5, seed: int = 0, c=1.0,
                      steps: int = 16, grid_factor: float = 2.0, floor: float = 1e-14):
    """Measured radius gain at t*/2 for unit-energy data on N <= |k| <= band_factor N.

    Runs the optimal-beta schedule: t* comes from the growth envelope at
    beta_opt.  Returns a dict with the measured and predicted gains.
    """
    top = band_factor * N
    Ng = min(64, int(math.ceil(grid_factor * top)))
    g = make_grid(Ng)
    u0 = random_band(g, N, top, seed=seed, amplitude=1.0)
    n0 = sobolev_norm(u0, s)
    b_opt, lam_bound = bd.optimal_beta_and_radius(s, n0, 0.0, c)
    ts = bd.t_star(s, b_opt, n0, c)
    half = ts / 2
    traj = run(u0, half, IntegratorSpec(half / steps), sample_every=steps, auto_halve=False)
    r0 = estimate_radius(u0, floor)
    r1 = estimate_radius(traj.snapshots[-1].u, floor)
    return {"N": N, "grid": Ng, "norm0": n0, "beta_opt": b_opt, "t_half": half, "predicted": lam_bound,
            "radius0": r0.lam, "radius": r1.lam, "gain": r1.lam - r0.lam, "flag": r1.flag, "shells": r1.shells_used}


def scenario_band_limited(cfg: ExperimentConfig) -> RunRecord:
    """Fit log(radius gain) against log N and compare with -2s/(2s-1)."""
    rec = RunRecord(cfg.config_hash(), "band_limited")
    Ns = cfg.extra.get("Ns", [4, 8, 16])
    c = cfg.constant() or bd.ImpliedConstant()
    gains = []
    for N in Ns:
        res = band_limited_gain(cfg.s, N, cfg.extra.get("band_factor", 1.5), cfg.seeds[0], c,
                                cfg.extra.get("steps", 16), cfg.extra.get("grid_factor", 2.0))
        rec.add_row(series="band", **res)
        gains.append(res["gain"])
    theory = -2 * cfg.s / (2 * cfg.s - 1)
    gains = np.array(gains)
    if np.all(gains > 0):
        slope = float(np.polyfit(np.log(Ns), np.log(gains), 1)[0])
    else:
        slope = math.nan
    pslope = float(np.polyfit(np.log(Ns), np.log([r["predicted"] for r in rec.rows]), 1)[0])
    ok = math.isfinite(slope) and abs(slope - theory) <= EXPONENT_TOL
    fv = None if ok else {"t": 0.0, "fitted_exponent": slope, "theory": theory}
    rec.add_verdict(Verdict("band-limited-exponent", "fitted radius-gain exponent within 0.3 of -2s/(2s-1)",
                            PASS if ok else FAIL, fv,
                            {"fitted": slope, "theory": theory, "formula_exponent": pslope, "gains": gains.tolist()}))
    return rec


# -- ODE bounds -----------------------------------------------------------------


def ode_bound_draws(route: str, draws: int, seed: int = 0):
    """Random parameters for the comparison-ODE checks.

    zeta: s in (2.6, 4), beta in (0.05, 1/2), L2 log-uniform in [0.1, 10] and
    ||u0||_s / L2 log-uniform in [1, 100].  X: s in (1.6, 2.4), same beta,
    X0 log-uniform in [0.1, 100].
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(draws):
        beta = rng.uniform(0.05, 0.5)
        if route == "zeta":
            s = rng.uniform(2.6, 4.0)
            L2 = 10 ** rng.uniform(-1, 1)
            out.append({"s": s, "beta": beta, "L2": L2, "y0": L2 * 10 ** rng.uniform(0, 2)})
        else:
            out.append({"s": rng.uniform(1.6, 2.4), "beta": beta, "y0": 10 ** rng.uniform(-1, 2)})
    return out


def ode_blowup_margins(route: str, draws, c: float = 1.0, tracked: bool = False):
    """(numeric blow-up time, lower bound) for each draw."""
    res = []
    for d in draws:
        if route == "zeta":
            ode = bd.ComparisonODE.zeta(d["s"], d["L2"], d["beta"], c)
            bound = bd.zeta_time_bound(d["s"], d["y0"], d["L2"], d["beta"], c, tracked=tracked)
        else:
            ode = bd.ComparisonODE.X(d["s"], d["beta"], c)
            bound = bd.X_time_bound(d["s"], d["y0"], d["beta"], c, tracked=tracked)
        sol = bd.integrate_comparison(ode, d["y0"], 1e6)
        res.append((sol.blowup_time if sol.blowup_time is not None else math.inf, bound.value, bound.regime))
    return res


def scenario_ode_bounds(cfg: ExperimentConfig) -> RunRecord:
    rec = RunRecord(cfg.config_hash(), "ode_bounds")
    n = cfg.extra.get("draws", 200)
    seed = cfg.seeds[0]
    for route in ("zeta", "X"):
        draws = ode_bound_draws(route, n, seed)
        for tracked in (False, True):
            res = ode_blowup_margins(route, draws, tracked=tracked)
            label = "tracked" if tracked else "literal"
            for i, (T, B, regime) in enumerate(res):
                rec.add_row(series=f"{route}-{label}", draw=i, **draws[i], blowup=T, bound=B, regime=regime, margin=T / B - 1)
            ok = [T >= B for T, B, _ in res]
            fv = None
            if not all(ok):
                i = ok.index(False)
                fv = {"t": 0.0, "draw": i, "blowup": res[i][0], "bound": res[i][1], **draws[i]}
            rec.add_verdict(Verdict(f"{route}-blowup-{label}", f"numeric blow-up time >= {label} lower bound (c=1)",
                                    PASS if fv is None else FAIL, fv,
                                    {"min_ratio": min(T / B for T, B, _ in res), "violations": ok.count(False)}))
    # crossing residuals
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(100):
        a, b, rhs = 10 ** rng.uniform(-2, 2, 3)
        for variant in ("quadratic", "five-halves"):
            t = bd.crossing_time(variant, a=a, b=b, rhs=rhs)
            worst = max(worst, abs(bd.crossing_residual(variant, t, a=a, b=b, rhs=rhs)) / max(rhs, 1.0))
    st = PASS if worst < 1e-10 else FAIL
    rec.add_verdict(Verdict("crossing-residuals", "crossing equations solved to residual < 1e-10", st,
                            None if st == PASS else {"t": 0.0, "residual": worst}, {"worst": worst}))
    # closed-form spot values
    spot = bd.closed_form_phi(5.0, 1.0, 1.0, 0.5)
    st = PASS if abs(spot - 4.0) < 1e-12 else FAIL
    rec.add_verdict(Verdict("closed-form-spot", "phi(0.5) = 4 for s = 5, coeff = 1, y0 = 1", st,
                            None if st == PASS else {"t": 0.5, "value": spot}))
    return rec


RUNNERS = {
    "small_data": scenario_small_data,
    "radius_growth": scenario_radius_growth,
    "gronwall": scenario_gronwall,
    "constant_sweep": scenario_constant_sweep,
    "band_limited": scenario_band_limited,
    "ode_bounds": scenario_ode_bounds,
}


def run_scenario(cfg: ExperimentConfig) -> RunRecord:
    cfg.validate()
    return RUNNERS[cfg.scenario](cfg)
