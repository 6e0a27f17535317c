"""Counting scans over h, scaling-law prediction and fitting, ratio limits.

The windowed count Upsilon(h) = #{j : |lambda_j - E_c| <= d h} follows a
power-log law c * h^alpha * |log h|^beta whose exponents depend only on the
geometry of the energy surface:

* regular surface: alpha = 1 - n, beta = 0, and the coefficient is the
  phase-space volume rate 2 d V(E_c) / (2 pi)^n;
* potential well/barrier criticality of local order 2k: alpha picks up the
  anomalous n/2 + n/(2k) correction, with a |log h| factor exactly when
  n (k + 1) / (2k) is an integer and n is odd;
* homogeneous phase-space criticality of order k: alpha = 2n/k - n, with a
  |log h| factor exactly when 2n/k is an integer.

The branch with the slowest decay dominates.  ``run_scan`` measures the
counts (and observable-weighted counts) over an h grid; ``fit_scaling``
recovers (alpha, beta) from measured rows by a model race: pure and
background-augmented power/log laws with nonnegative coefficients compete
under BIC, after a burn-in that drops rows whose energy window overlaps a
second critical level.  ``ratio_limit`` tracks Upsilon_a / Upsilon against
its semiclassical target, either a Liouville average or a point value at
the critical point.  Scan rows are deterministic and serialize to CSV
with embedded metadata so fits can run on stored scans.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classical import level_volume, mu_average
from .eig import eigs_in_window, radial_channels, weighted_count
from .errors import ConfigError, HypothesisError, NumericalError
from .microlocal import default_frame, upsilon, upsilon_a, weyl_averages
from .model import Polynomial1D, SymbolModel, get_model
from .observables import Observable, parse_observable
from .quantize import (
    build_schrodinger,
    build_split,
    grid_for_schrodinger,
    grid_for_split,
)

__all__ = [
    "ScalingLaw",
    "ScanRow",
    "ScanResult",
    "FitResult",
    "RatioLimit",
    "TwoWellsResult",
    "predict_scaling",
    "scaling_branches",
    "default_h_values",
    "default_center",
    "run_scan",
    "scan_to_csv",
    "scan_from_csv",
    "fit_scaling",
    "fit_log_coefficient",
    "ratio_limit",
    "two_wells_experiment",
    "thread_count",
]

_INT_TOL = 1e-9


def thread_count() -> int:
    """Worker count from SEMICLAB_THREADS (default 1)."""
    raw = os.environ.get("SEMICLAB_THREADS", "1")
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"SEMICLAB_THREADS={raw!r} is not an integer")
    if v < 1:
        raise ConfigError(f"SEMICLAB_THREADS={raw!r} must be >= 1")
    return v


def default_center(model: SymbolModel) -> float:
    """Catalog window centers: the shell E=1 for the harmonic well, else 0."""
    return 1.0 if model.name == "harmonic" else 0.0


@dataclass(frozen=True)
class ScalingLaw:
    alpha: float
    beta: int  # 0 or 1
    coefficient: float | None  # known only for the regular branch
    origin: str  # "regular_weyl" | "schrodinger_critical" | "homogeneous_critical"

    def weight(self, h: float) -> float:
        return h**self.alpha * abs(math.log(h)) ** self.beta


def _on_center_critical(model: SymbolModel, e_center: float):
    return [c for c in model.critical_points
            if abs(c.critical_energy - e_center) <= 1e-9 * max(1.0, abs(e_center))]


def scaling_branches(model: SymbolModel, e_center: float) -> tuple[ScalingLaw, ...]:
    """All predicted branches of the window count at this center energy."""
    n = model.n
    coeff = None
    try:
        vol = level_volume(model, e_center)
        if not vol.divergent and vol.value > 0:
            # regular Weyl rate: (2 pi h)^-n volume growth across the window
            coeff = 2.0 * 5.0 * vol.value / (2.0 * math.pi) ** n
    except (ConfigError, NumericalError):
        coeff = None
    laws = [ScalingLaw(alpha=float(1 - n), beta=0, coefficient=coeff,
                       origin="regular_weyl")]
    for cp in _on_center_critical(model, e_center):
        if model.family in ("schrodinger1d", "radial2d"):
            if cp.order % 2 != 0:
                continue  # odd-order saddle: no extremal branch
            k = cp.order // 2
            alpha = -n + n / 2.0 + n / (2.0 * k)
            ratio = n * (k + 1) / (2.0 * k)
            beta = 1 if (abs(ratio - round(ratio)) < _INT_TOL and n % 2 == 1) else 0
            laws.append(ScalingLaw(alpha=alpha, beta=beta, coefficient=None,
                                   origin="schrodinger_critical"))
        else:
            k = cp.order
            alpha = 2.0 * n / k - n
            ratio = 2.0 * n / k
            beta = 1 if abs(ratio - round(ratio)) < _INT_TOL else 0
            laws.append(ScalingLaw(alpha=alpha, beta=beta, coefficient=None,
                                   origin="homogeneous_critical"))
    return tuple(laws)


def predict_scaling(model: SymbolModel, e_center: float | None = None) -> ScalingLaw:
    """The dominant branch: smallest alpha, log factor breaking ties."""
    if e_center is None:
        e_center = default_center(model)
    laws = scaling_branches(model, e_center)
    return min(laws, key=lambda l: (l.alpha, -l.beta))


# ---------------------------------------------------------------------------
# Scans


@dataclass(frozen=True)
class ScanRow:
    h: float
    n_grid: int
    upsilon: float
    upsilon_obs: tuple[float, ...]
    ratios: tuple[float, ...]
    residual_max: float
    tie: bool
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.error == ""


@dataclass(frozen=True)
class ScanResult:
    model: str
    family: str
    e_center: float
    d: float
    route: str  # "fd" | "split" | "radial"
    ppw: int
    observable_ids: tuple[str, ...]
    rows: tuple[ScanRow, ...]

    def valid_rows(self) -> tuple[ScanRow, ...]:
        return tuple(r for r in self.rows if r.ok)


def default_h_values(route: str) -> tuple[float, ...]:
    """12 points over two decades for banded solvers, 8 over one otherwise.

    Dense and radial routes stop at h = 1e-2: the dense eigensolve and the
    channel sweep grow too fast below that.
    """
    if route == "fd":
        return tuple(float(v) for v in np.geomspace(0.1, 0.001, 12))
    return tuple(float(v) for v in np.geomspace(0.1, 0.01, 8))


def _phase_split_parts(model: SymbolModel) -> tuple[Polynomial1D, Polynomial1D]:
    fx = {}
    gx = {}
    for i, j, c in model.phase_poly.terms:
        if j == 0:
            fx[i] = fx.get(i, 0.0) + c
        elif i == 0:
            gx[j] = gx.get(j, 0.0) + c
        else:
            raise ConfigError(
                f"model {model.name!r} has the mixed term x^{i} xi^{j}; "
                "only split phase symbols are quantizable here")
    def to_poly(d):
        deg = max(d) if d else 0
        return Polynomial1D(tuple(d.get(k, 0.0) for k in range(deg + 1)))
    return to_poly(fx), to_poly(gx)


def _scan_route(model: SymbolModel) -> str:
    return {"schrodinger1d": "fd", "phase1d": "split", "radial2d": "radial"}[model.family]


def _scan_one(model: SymbolModel, route: str, h: float, h_max: float,
              e_center: float, d: float, ppw: int,
              observables: tuple[Observable, ...]) -> ScanRow:
    lo, hi = e_center - d * h, e_center + d * h
    need_vectors = bool(observables)
    nan_obs = tuple(math.nan for _ in observables)

    try:
        if route == "radial":
            chans = radial_channels(model.potential, h, lo, hi, d=d, h_max=h_max,
                                    ppw=ppw, vectors=need_vectors)
            ups = weighted_count(chans)
            obs_vals = tuple(upsilon_a(chans, o) for o in observables)
            n_grid = max((c.window.grid.n for c in chans), default=0)
            residual = max((c.window.residual_max for c in chans
                            if c.window.residual_max is not None), default=0.0)
            tie = any(bool(np.any(c.window.edge_flags)) for c in chans)
        else:
            if route == "fd":
                grid = grid_for_schrodinger(model.potential, h, e_center, d=d,
                                            h_max=h_max, ppw=ppw)
                op = build_schrodinger(model.potential, h, grid, window_top=hi)
            else:
                f, g = _phase_split_parts(model)
                grid = grid_for_split(f, g, h, e_center, d=d, h_max=h_max)
                op = build_split(f, g, h, grid, window_top=hi)
            win = eigs_in_window(op, lo, hi, vectors=need_vectors)
            ups = upsilon(win)
            frame = None
            obs_vals = []
            for o in observables:
                if o.routing == "general" and frame is None and win.count > 0:
                    frame = default_frame(win)
                obs_vals.append(upsilon_a(win, o, frame) if win.count else 0.0)
            obs_vals = tuple(obs_vals)
            n_grid = grid.n
            residual = win.residual_max if win.residual_max is not None else 0.0
            tie = bool(np.any(win.edge_flags))
        ratios = tuple(v / ups if ups > 0 else math.nan for v in obs_vals)
        return ScanRow(h=h, n_grid=n_grid, upsilon=ups, upsilon_obs=obs_vals,
                       ratios=ratios, residual_max=residual, tie=tie)
    except (ConfigError, NumericalError, HypothesisError) as exc:
        msg = str(exc).replace(",", ";").replace("\n", " ")
        return ScanRow(h=h, n_grid=0, upsilon=math.nan, upsilon_obs=nan_obs,
                       ratios=nan_obs, residual_max=math.nan, tie=False, error=msg)


def run_scan(
    model: SymbolModel | str,
    h_values=None,
    observables=(),
    e_center: float | None = None,
    d: float = 5.0,
    ppw: int = 64,
) -> ScanResult:
    """Windowed counts (and a-weighted counts) across an h grid.

    Rows are ordered by decreasing h.  A failing h (grid cap, aliasing,
    solver trouble) is recorded in its row's error column and the scan
    continues.  The geometry box is chosen once from the largest h so all
    rows share comparable grids.  SEMICLAB_THREADS > 1 distributes rows over
    a thread pool; results are identical to the serial order.
    """
    if isinstance(model, str):
        model = get_model(model)
    if e_center is None:
        e_center = default_center(model)
    route = _scan_route(model)
    if h_values is None:
        h_values = default_h_values(route)
    hs = sorted((float(v) for v in h_values), reverse=True)
    if not hs:
        raise ConfigError("empty h grid")
    if min(hs) <= 0:
        raise ConfigError("h values must be positive")
    obs = tuple(parse_observable(o) if isinstance(o, str) else o for o in observables)
    if route == "radial":
        for o in obs:
            if o.routing != "position_only":
                raise ConfigError(
                    f"radial scans take position observables a(r); got {o.id!r}")
    h_max = hs[0]

    workers = thread_count()
    if workers == 1:
        rows = [_scan_one(model, route, h, h_max, e_center, d, ppw, obs) for h in hs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda h: _scan_one(model, route, h, h_max, e_center, d, ppw, obs), hs))
    return ScanResult(model=model.name, family=model.family, e_center=e_center,
                      d=d, route=route, ppw=ppw,
                      observable_ids=tuple(o.id for o in obs), rows=tuple(rows))


def _fmt(v: float) -> str:
    return format(v, ".12g")


def scan_to_csv(scan: ScanResult) -> str:
    """Deterministic CSV with scan metadata in leading comment lines."""
    out = io.StringIO()
    out.write(f"# model={scan.model}\n")
    out.write(f"# family={scan.family}\n")
    out.write(f"# e_center={_fmt(scan.e_center)}\n")
    out.write(f"# d={_fmt(scan.d)}\n")
    out.write(f"# route={scan.route}\n")
    out.write(f"# ppw={scan.ppw}\n")
    out.write(f"# observables={'|'.join(scan.observable_ids)}\n")
    w = csv.writer(out, lineterminator="\n")
    header = ["h", "n_grid", "upsilon", "residual_max", "tie", "error"]
    for oid in scan.observable_ids:
        header += [f"upsilon_a[{oid}]", f"ratio[{oid}]"]
    w.writerow(header)
    for r in scan.rows:
        row = [_fmt(r.h), str(r.n_grid), _fmt(r.upsilon), _fmt(r.residual_max),
               "1" if r.tie else "0", r.error]
        for v, q in zip(r.upsilon_obs, r.ratios):
            row += [_fmt(v), _fmt(q)]
        w.writerow(row)
    return out.getvalue()


def scan_from_csv(text: str) -> ScanResult:
    meta = {}
    data_lines = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition("=")
            meta[key] = val
        elif line.strip():
            data_lines.append(line)
    required = ("model", "family", "e_center", "d", "route", "ppw", "observables")
    missing = [k for k in required if k not in meta]
    if missing:
        raise ConfigError(f"scan CSV is missing metadata keys: {', '.join(missing)}")
    reader = csv.reader(data_lines)
    header = next(reader)
    obs_ids = tuple(o for o in meta["observables"].split("|") if o)
    rows = []
    for rec in reader:
        base = 6
        vals = tuple(float(rec[base + 2 * i]) for i in range(len(obs_ids)))
        rats = tuple(float(rec[base + 2 * i + 1]) for i in range(len(obs_ids)))
        rows.append(ScanRow(h=float(rec[0]), n_grid=int(rec[1]), upsilon=float(rec[2]),
                            upsilon_obs=vals, ratios=rats, residual_max=float(rec[3]),
                            tie=rec[4] == "1", error=rec[5]))
    return ScanResult(model=meta["model"], family=meta["family"],
                      e_center=float(meta["e_center"]), d=float(meta["d"]),
                      route=meta["route"], ppw=int(meta["ppw"]),
                      observable_ids=obs_ids, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Fits


@dataclass(frozen=True)
class FitResult:
    alpha_hat: float
    beta_hat: int
    coeff_hat: float
    offset_hat: float  # fitted constant background, 0 for pure-law fits
    residual: float  # rms misfit of the counts
    law: str  # "free" or the origin label of the winning candidate
    n_rows: int
    decades: float
    burned: int  # rows dropped because their window touched another critical level


def _fit_rows(scan_or_rows):
    if isinstance(scan_or_rows, ScanResult):
        rows = [(r.h, r.upsilon) for r in scan_or_rows.valid_rows()]
    else:
        rows = [(float(h), float(u)) for h, u in scan_or_rows]
    rows = [(h, u) for h, u in rows if u > 0 and math.isfinite(u)]
    rows.sort(key=lambda r: -r[0])
    if len(rows) < 5:
        raise ConfigError(f"need at least 5 usable rows to fit, got {len(rows)}")
    return rows


def _decades(rows) -> float:
    hs = [h for h, _ in rows]
    return math.log10(max(hs) / min(hs))


def _burn_in(rows, scan_or_rows, model):
    """Drop rows whose count window reaches another critical energy.

    A window [E_c - d h, E_c + d h] that contains a second critical level
    counts states from a different spectral regime; such rows do not follow
    the E_c law and would bias the exponent.  The filter applies only when
    it leaves enough rows for a valid fit.
    """
    if model is None and isinstance(scan_or_rows, ScanResult):
        try:
            model = get_model(scan_or_rows.model)
        except (KeyError, ConfigError):
            return rows, 0
    if model is None or not isinstance(scan_or_rows, ScanResult):
        return rows, 0
    e_center, d = scan_or_rows.e_center, scan_or_rows.d
    gaps = [abs(c.critical_energy - e_center) for c in model.critical_points
            if abs(c.critical_energy - e_center) > 1e-9]
    if not gaps:
        return rows, 0
    nearest = min(gaps)
    kept = [(h, u) for h, u in rows if d * h < nearest]
    if len(kept) >= 5 and _decades(kept) >= 1.0 - 1e-9:
        return kept, len(rows) - len(kept)
    return rows, 0


def _family_fit(hs, us, beta, offset, alpha_hi=0.5):
    """Best nonnegative LS of A + c h^alpha |log h|^beta over an alpha grid."""
    from scipy.optimize import nnls

    best = None
    for alpha in np.arange(-1.5, alpha_hi + 1e-9, 0.005):
        w = hs**alpha * np.abs(np.log(hs)) ** beta
        design = np.column_stack([np.ones_like(hs), w]) if offset else w[:, None]
        sol, rnorm = nnls(design, us)
        rss = rnorm * rnorm
        if best is None or rss < best[0] - 1e-12 or (
                abs(rss - best[0]) <= 1e-12 and abs(alpha) < abs(best[1])):
            coeff = float(sol[1]) if offset else float(sol[0])
            bg = float(sol[0]) if offset else 0.0
            best = (rss, float(alpha), coeff, bg)
    return best


def fit_scaling(scan_or_rows, candidates=(), model: SymbolModel | None = None) -> FitResult:
    """Fit the window-count law A + c h^alpha |log h|^beta to scan rows.

    Free fit (no candidates): after the burn-in filter, four model families
    compete -- pure power, pure power with a |log h| factor, and both with
    an additive constant background (the regular part of the surface away
    from the critical point contributes a constant to the windowed count).
    Coefficients are kept nonnegative, alpha is profiled on a grid, and the
    winner is chosen by BIC with a parsimony tie-break: within 2 BIC of the
    leader, fewer parameters win, then the smaller beta.  The background
    pure-power family is restricted to alpha <= -0.1 because it becomes
    indistinguishable from the log family as alpha -> 0.

    With candidates, each candidate's exponents are held fixed, only the
    coefficient is estimated, and the best-residual candidate is returned.
    Needs >= 5 usable rows spanning at least a decade of h.
    """
    rows = _fit_rows(scan_or_rows)
    rows, burned = _burn_in(rows, scan_or_rows, model)
    decades = _decades(rows)
    if decades < 1.0 - 1e-9:
        raise ConfigError(f"h range spans {decades:.2f} decades; need at least one")
    hs = np.array([h for h, _ in rows])
    us = np.array([u for _, u in rows])
    n = hs.size

    if candidates:
        best = None
        for cand in candidates:
            w = hs**cand.alpha * np.abs(np.log(hs)) ** cand.beta
            c = max(0.0, float(w @ us) / float(w @ w))
            rss = float(np.sum((c * w - us) ** 2))
            if best is None or rss < best[0]:
                best = (rss, cand, c)
        rss, cand, c = best
        return FitResult(alpha_hat=cand.alpha, beta_hat=cand.beta, coeff_hat=c,
                         offset_hat=0.0, residual=math.sqrt(rss / n),
                         law=cand.origin, n_rows=n, decades=decades, burned=burned)

    entries = []
    for beta in (0, 1):
        rss, alpha, coeff, bg = _family_fit(hs, us, beta, offset=False)
        entries.append((rss, 2, beta, alpha, coeff, bg))
    rss, alpha, coeff, bg = _family_fit(hs, us, 0, offset=True, alpha_hi=-0.1)
    entries.append((rss, 3, 0, alpha, coeff, bg))
    rss, alpha, coeff, bg = _family_fit(hs, us, 1, offset=True)
    entries.append((rss, 3, 1, alpha, coeff, bg))

    scored = sorted(
        ((n * math.log(max(rss, 1e-280) / n) + k * math.log(n), k, beta, alpha, coeff, bg, rss)
         for rss, k, beta, alpha, coeff, bg in entries),
        key=lambda e: e[0])
    lead = scored[0]
    for e in scored[1:]:
        if e[0] - lead[0] < 2.0 and (e[1], e[2]) < (lead[1], lead[2]):
            lead = e
    _, _, beta, alpha, coeff, bg, rss = lead
    return FitResult(alpha_hat=alpha, beta_hat=beta, coeff_hat=coeff, offset_hat=bg,
                     residual=math.sqrt(rss / n), law="free", n_rows=n,
                     decades=decades, burned=burned)


def fit_log_coefficient(scan_or_rows) -> tuple[float, float]:
    """(intercept, slope) of the linear model Upsilon = A + B |log h|.

    The natural parametrization of a logarithmic counting law: the slope B
    is the |log h| coefficient, directly comparable between potentials (it
    scales like |V''|^(-1/2) at a quadratic barrier top, so ratios cancel
    the unknown universal constant).  Uses every valid row: the linear
    model absorbs regime crossover into the intercept and the wide lever
    arm sharpens the slope.
    """
    rows = _fit_rows(scan_or_rows)
    if _decades(rows) < 1.0 - 1e-9:
        raise ConfigError("h range must span at least one decade")
    hs = np.array([h for h, _ in rows])
    us = np.array([u for _, u in rows])
    design = np.column_stack([np.ones_like(hs), np.abs(np.log(hs))])
    sol, *_ = np.linalg.lstsq(design, us, rcond=None)
    return float(sol[0]), float(sol[1])


# ---------------------------------------------------------------------------
# Ratio limits


@dataclass(frozen=True)
class RatioLimit:
    observable_id: str
    target_kind: str  # "liouville" | "dirac"
    target_value: float
    h: tuple[float, ...]
    ratios: tuple[float, ...]
    gaps: tuple[float, ...]
    gap_at_h_min: float
    trend_exponent: float
    extrapolated: float
    converged: bool


def ratio_limit(scan: ScanResult, observable_id: str, model: SymbolModel | None = None,
                target: str = "liouville", tol: float = 0.15) -> RatioLimit:
    """Convergence of Upsilon_a / Upsilon toward its semiclassical target.

    ``liouville`` compares against the normalized Liouville average of a on
    the center energy surface and refuses divergent surfaces; ``dirac``
    compares against a evaluated at the critical point sitting on that
    surface.  The trend exponent is the log-log slope of the gap; a
    positive slope plus a final gap within ``tol`` counts as converged.
    The extrapolated column is the Aitken limit of the ratio sequence.
    """
    if model is None:
        model = get_model(scan.model)
    obs = parse_observable(observable_id)
    if obs.id not in scan.observable_ids:
        raise ConfigError(f"scan has no observable {observable_id!r}")
    idx = scan.observable_ids.index(obs.id)

    if target == "liouville":
        target_value = mu_average(model, obs, scan.e_center)
    elif target == "dirac":
        cps = _on_center_critical(model, scan.e_center)
        if not cps:
            raise ConfigError(
                f"no critical point at E={scan.e_center:.6g} for a dirac target")
        z0 = cps[0].z0
        target_value = float(obs(z0[0], z0[1]))
    else:
        raise ConfigError(f"unknown ratio target {target!r}")

    pts = [(r.h, r.ratios[idx]) for r in scan.valid_rows()
           if math.isfinite(r.ratios[idx])]
    if len(pts) < 3:
        raise NumericalError("need at least 3 valid rows for a ratio trend")
    hs = tuple(h for h, _ in pts)
    ratios = tuple(q for _, q in pts)
    gaps = tuple(abs(q - target_value) for q in ratios)

    log_h = np.log([h for h in hs])
    safe = np.maximum(gaps, 1e-15)
    slope = float(np.polyfit(log_h, np.log(safe), 1)[0])

    r1, r2, r3 = ratios[-3], ratios[-2], ratios[-1]
    denom = (r3 - r2) - (r2 - r1)
    extrapolated = r3 - (r3 - r2) ** 2 / denom if abs(denom) > 1e-14 else r3
    converged = slope > 0.0 and gaps[-1] <= tol
    return RatioLimit(observable_id=observable_id, target_kind=target,
                      target_value=target_value, h=hs, ratios=ratios, gaps=gaps,
                      gap_at_h_min=gaps[-1], trend_exponent=slope,
                      extrapolated=float(extrapolated), converged=converged)


# ---------------------------------------------------------------------------
# Two symmetric barrier tops


@dataclass(frozen=True)
class TwoWellsRow:
    h: float
    count: int
    left_fraction: float
    pair_gaps: tuple[float, ...]
    state_splits: tuple[tuple[float, float], ...]  # (eigenvalue, left share)


@dataclass(frozen=True)
class TwoWellsResult:
    model: str
    e_center: float
    x_crit: float
    rows: tuple[TwoWellsRow, ...]

    @property
    def worst_asymmetry(self) -> float:
        return max((abs(r.left_fraction - 0.5) for r in self.rows
                    if math.isfinite(r.left_fraction)), default=math.nan)


def two_wells_experiment(h_values=(0.05, 0.035, 0.025, 0.018, 0.012, 0.008),
                         e_center: float | None = None, d: float = 5.0,
                         ppw: int = 64, bump_width: float = 12.0) -> TwoWellsResult:
    """Mass distribution between two symmetric critical points.

    The two-max potential x^2 (x^2 - 1)^2 carries two barrier tops at
    x = +-1/sqrt(3) sharing one critical energy.  How the eigenfunction
    mass distributes between them is an open question, so this experiment
    only reports data: per-window aggregate left/right shares of Gaussian
    bumps centered on the tops, per-eigenpair shares, and the spectral
    gaps of consecutive pairs.  Because eigenfunctions of the symmetric
    operator come in parity classes, the aggregate left fraction is 1/2
    up to solver roundoff; nothing here gates a build.
    """
    model = get_model("two-max")
    tops = [c for c in model.critical_points if c.kind == "max"]
    x0 = max(abs(c.z0[0]) for c in tops)
    if e_center is None:
        e_center = tops[0].critical_energy
    left = parse_observable(f"exp(-{bump_width:.12g}*(x + {x0:.12g})^2)")
    right = parse_observable(f"exp(-{bump_width:.12g}*(x - {x0:.12g})^2)")
    rows = []
    hs = sorted(float(v) for v in h_values)
    for h in reversed(hs):
        grid = grid_for_schrodinger(model.potential, h, e_center, d=d,
                                    h_max=max(hs), ppw=ppw)
        op = build_schrodinger(model.potential, h, grid)
        win = eigs_in_window(op, e_center - d * h, e_center + d * h)
        if win.count == 0:
            rows.append(TwoWellsRow(h=h, count=0, left_fraction=math.nan,
                                    pair_gaps=(), state_splits=()))
            continue
        lv, _ = weyl_averages(win, left)
        rv, _ = weyl_averages(win, right)
        frac = float(np.sum(lv) / (np.sum(lv) + np.sum(rv)))
        lam = win.eigenvalues
        splits = tuple((float(lam[j]), float(lv[j] / (lv[j] + rv[j])))
                       for j in range(lam.size))
        gaps = tuple(float(lam[i + 1] - lam[i]) for i in range(0, lam.size - 1, 2))
        rows.append(TwoWellsRow(h=h, count=int(win.count), left_fraction=frac,
                                pair_gaps=gaps, state_splits=splits))
    return TwoWellsResult(model="two-max", e_center=float(e_center), x_crit=x0,
                          rows=tuple(rows))
