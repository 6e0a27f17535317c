"""End-to-end acceptance scenarios with machine-checkable verdicts.

Each scenario freezes a model, an h grid, and a tolerance set, drives the
measurement pipeline, and returns a :class:`ScenarioReport` whose checks
carry one pass/fail verdict each.  ``run_scenario`` is the single entry
point shared by the command line and the acceptance test suite, so both
always agree on what was measured and against which target.

The two-wells scenario is exploratory: its report keeps ``gating=False``
and ``passed=True`` no matter what the split data show, and the per-state
weights ride along in the data payload for offline inspection.

All scenarios are deterministic: fixed grids, no randomness, and plain
Python floats in every report so serialized verdicts are byte-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classical import classify_integrability, coarea_check, levelset_connected
from .eig import eigs_in_window
from .errors import ConfigError
from .experiments import (
    fit_log_coefficient,
    fit_scaling,
    ratio_limit,
    run_scan,
    two_wells_experiment,
)
from .microlocal import egorov_defect, microlocal_records
from .model import get_model
from .observables import parse_observable
from .quantize import build_schrodinger, grid_for_schrodinger

GAUSS_1D = "exp(-x^2)"
GAUSS_PHASE = "exp(-x^2-xi^2)"


@dataclass(frozen=True)
class Check:
    """One named verdict: a measured value against a stated target."""

    name: str
    passed: bool
    value: float | int | str | bool
    target: str

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": self.value,
            "target": self.target,
        }


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    gating: bool
    passed: bool
    checks: tuple[Check, ...]
    config: dict
    data: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "scenario": self.name,
            "gating": self.gating,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "config": dict(self.config),
            "data": dict(self.data),
        }


def _report(name: str, checks, config: dict, data: dict | None = None,
            gating: bool = True) -> ScenarioReport:
    passed = all(c.passed for c in checks) if gating else True
    return ScenarioReport(name=name, gating=gating, passed=passed,
                          checks=tuple(checks), config=dict(config),
                          data=dict(data or {}))


def _window(model_name: str, h: float, e_center: float, d: float = 5.0,
            ppw: int = 64, h_max: float | None = None, vectors: bool = True):
    """Finite-difference eigenwindow for a potential model."""
    m = get_model(model_name)
    lo, hi = e_center - d * h, e_center + d * h
    grid = grid_for_schrodinger(m.potential, h, e_center, d=d,
                                h_max=h_max if h_max is not None else h, ppw=ppw)
    op = build_schrodinger(m.potential, h, grid, window_top=hi)
    return eigs_in_window(op, lo, hi, vectors=vectors)


def _slope(hs, values) -> float:
    """Log-log slope of values against h; positive means decay as h -> 0."""
    hs = np.asarray(hs, dtype=float)
    vals = np.asarray(values, dtype=float)
    keep = np.isfinite(vals) & (vals > 0.0)
    if keep.sum() < 3:
        raise ConfigError("slope fit needs at least 3 positive points")
    design = np.vstack([np.ones(int(keep.sum())), np.log(hs[keep])]).T
    coef, *_ = np.linalg.lstsq(design, np.log(vals[keep]), rcond=None)
    return float(coef[1])


def _fit_payload(fit) -> dict:
    return {
        "alpha_hat": float(fit.alpha_hat),
        "beta_hat": int(fit.beta_hat),
        "coeff_hat": float(fit.coeff_hat),
        "offset_hat": float(fit.offset_hat),
        "residual": float(fit.residual),
        "law": fit.law,
        "n_rows": int(fit.n_rows),
        "decades": float(fit.decades),
        "burned": int(fit.burned),
    }


def _ratio_payload(rl) -> dict:
    return {
        "observable_id": rl.observable_id,
        "target": rl.target_kind,
        "target_value": float(rl.target_value),
        "gap_at_hmin": float(rl.gap_at_h_min),
        "trend_exponent": float(rl.trend_exponent),
        "extrapolated": float(rl.extrapolated),
        "converged": bool(rl.converged),
        "h": [float(v) for v in rl.h],
        "ratios": [float(v) for v in rl.ratios],
    }


def scenario_harmonic_weyl() -> ScenarioReport:
    """Window counts and eigenvalues of the exactly solvable oscillator."""
    e_center, d, ppw = 1.0, 5.0, 160
    hs = (0.04, 0.02, 0.01, 0.005)
    counts: list[int] = []
    rel_worst = 0.0
    for h in hs:
        win = _window("harmonic", h, e_center, d=d, ppw=ppw, h_max=hs[0],
                      vectors=False)
        counts.append(int(win.count))
        lam = np.asarray(win.eigenvalues, dtype=float)
        level = np.round((lam / h - 1.0) / 2.0)
        predicted = (2.0 * level + 1.0) * h
        rel_worst = max(rel_worst,
                        float(np.max(np.abs(lam - predicted) / predicted)))
    checks = (
        Check("window_count", all(4 <= c <= 6 for c in counts),
              ",".join(str(c) for c in counts), "5 +- 1 states at every h"),
        Check("eigenvalue_accuracy", rel_worst <= 1e-4, rel_worst,
              "relative error against (2j+1)h <= 1e-4"),
    )
    config = {"model": "harmonic", "e_center": e_center, "d": d, "ppw": ppw,
              "h_values": [float(h) for h in hs]}
    return _report("harmonic-weyl", checks, config,
                   {"counts": counts, "eigenvalue_rel_error": rel_worst})


def scenario_critical_exponent_k2() -> ScenarioReport:
    """Fractional count exponent at a fourth-order potential maximum."""
    hs = np.geomspace(1e-1, 1e-3, 16)
    scan = run_scan("deg-max", h_values=hs, e_center=0.0, d=5.0)
    fit = fit_scaling(scan)
    checks = (
        Check("alpha_hat", abs(fit.alpha_hat + 0.25) <= 0.05,
              float(fit.alpha_hat), "-0.25 +- 0.05"),
        Check("beta_hat", fit.beta_hat == 0, int(fit.beta_hat),
              "0 (no log factor)"),
    )
    config = {"model": "deg-max", "e_center": 0.0, "d": 5.0, "ppw": 64,
              "h_from": 1e-1, "h_to": 1e-3, "h_steps": 16}
    data = {"fit": _fit_payload(fit),
            "counts": [float(r.upsilon) for r in scan.valid_rows()],
            "h": [float(r.h) for r in scan.valid_rows()]}
    return _report("critical-exponent-k2", checks, config, data)


def scenario_log_law_k1() -> ScenarioReport:
    """Log-law selection at a quadratic maximum plus the curvature ratio."""
    hs = np.geomspace(1e-1, 3e-5, 24)
    scan_main = run_scan("quad-max", h_values=hs, e_center=0.0, d=5.0)
    fit = fit_scaling(scan_main)
    scan_steep = run_scan("quad-max-steep", h_values=hs, e_center=0.0, d=5.0)
    offset_main, slope_main = fit_log_coefficient(scan_main)
    offset_steep, slope_steep = fit_log_coefficient(scan_steep)
    ratio = slope_main / slope_steep
    checks = (
        Check("beta_hat", fit.beta_hat == 1, int(fit.beta_hat),
              "1 (log factor selected)"),
        Check("alpha_hat", abs(fit.alpha_hat) <= 0.05, float(fit.alpha_hat),
              "0 +- 0.05"),
        Check("log_coefficient_ratio", abs(ratio - 2.0) <= 0.4, float(ratio),
              "2 +- 20% (inverse square-root curvature law)"),
    )
    config = {"models": ["quad-max", "quad-max-steep"], "e_center": 0.0,
              "d": 5.0, "ppw": 64, "h_from": 1e-1, "h_to": 3e-5, "h_steps": 24}
    data = {"fit": _fit_payload(fit),
            "log_fit_main": {"offset": float(offset_main),
                             "slope": float(slope_main)},
            "log_fit_steep": {"offset": float(offset_steep),
                              "slope": float(slope_steep)}}
    return _report("log-law-k1", checks, config, data)


def scenario_dirac_concentration_1d() -> ScenarioReport:
    """Eigenstate concentration at a connected separatrix in 1D."""
    model = get_model("quad-max")
    obs = parse_observable(GAUSS_PHASE)
    target = 1.0  # observable value at the unstable equilibrium
    connected, n_components = levelset_connected(model, 0.0)
    hs = np.geomspace(1e-1, 1e-3, 10)
    gaps: list[float] = []
    win = None
    for h in hs:
        win = _window("quad-max", float(h), 0.0, d=5.0, ppw=64,
                      h_max=float(hs[0]), vectors=True)
        recs = microlocal_records(win, obs)
        gaps.append(max(abs(r.nu_weyl - target) for r in recs))
    trend = _slope(hs, gaps)
    lam = np.asarray(win.eigenvalues, dtype=float)
    j_star = int(np.argmin(np.abs(lam)))
    psi = np.asarray(win.vectors[:, j_star], dtype=float)
    x = win.grid.nodes
    second_moment = float(np.sum(x * x * psi * psi))
    checks = (
        Check("levelset_connected", bool(connected), int(n_components),
              "level set at the critical energy is one component"),
        Check("nu_gap_at_hmin", gaps[-1] <= 0.15, float(gaps[-1]),
              "max |nu_j(a) - a(0,0)| <= 0.15 at h = 1e-3"),
        Check("convergence_trend", trend > 0.0, float(trend),
              "positive log-log decay of the gap in h"),
        Check("second_moment", second_moment <= 0.05, second_moment,
              "position spread of the nearest state <= 0.05 at h = 1e-3"),
    )
    config = {"model": "quad-max", "e_center": 0.0, "d": 5.0, "ppw": 64,
              "observable": GAUSS_PHASE, "h_from": 1e-1, "h_to": 1e-3,
              "h_steps": 10}
    data = {"h": [float(v) for v in hs], "gaps": [float(g) for g in gaps],
            "trend_exponent": float(trend), "second_moment": second_moment,
            "nearest_eigenvalue": float(lam[j_star])}
    return _report("dirac-concentration-1d", checks, config, data)


def scenario_liouville_limit_2d() -> ScenarioReport:
    """Observable ratio against the Liouville average in the radial model."""
    hs = np.geomspace(1e-1, 1e-2, 10)
    scan = run_scan("radial-deg", h_values=hs, observables=(GAUSS_1D,),
                    e_center=0.0, d=5.0)
    rl = ratio_limit(scan, GAUSS_1D, target="liouville", tol=0.10)
    co = coarea_check(get_model("radial-deg"), 0.05, 0.15)
    checks = (
        Check("ratio_gap_at_hmin", rl.gap_at_h_min <= 0.10,
              float(rl.gap_at_h_min),
              "|upsilon_a/upsilon - mu_average| <= 0.10 at h = 1e-2"),
        Check("convergence_trend", rl.trend_exponent > 0.0,
              float(rl.trend_exponent), "positive decay of the gap in h"),
        Check("coarea_validation", float(co["rel_diff"]) <= 0.01,
              float(co["rel_diff"]),
              "band integral matches lattice area within 1%"),
    )
    config = {"model": "radial-deg", "e_center": 0.0, "d": 5.0, "ppw": 64,
              "observable": GAUSS_1D, "h_from": 1e-1, "h_to": 1e-2,
              "h_steps": 10}
    return _report("liouville-limit-2d", checks, config,
                   {"ratio_limit": _ratio_payload(rl)})


def scenario_pseudo_concentration_k3() -> ScenarioReport:
    """Dirac-type concentration for a non-integrable cubic phase symbol."""
    model = get_model("pseudo-k3")
    cp = next(c for c in model.critical_points if c.order == 3)
    verdict = classify_integrability(cp, model)
    hs = np.geomspace(1e-1, 1.25e-3, 16)
    scan = run_scan("pseudo-k3", h_values=hs, observables=(GAUSS_PHASE,),
                    e_center=0.0, d=5.0)
    fit = fit_scaling(scan)
    rl = ratio_limit(scan, GAUSS_PHASE, target="dirac", tol=0.15)
    n_max = max((r.n_grid for r in scan.valid_rows()), default=0)
    checks = (
        Check("classifier", verdict == "non_integrable", verdict,
              "cubic singularity exceeds the 2n integrability threshold"),
        Check("alpha_hat", abs(fit.alpha_hat + 1.0 / 3.0) <= 0.07,
              float(fit.alpha_hat), "-1/3 +- 0.07"),
        Check("ratio_gap_at_hmin", rl.gap_at_h_min <= 0.15,
              float(rl.gap_at_h_min),
              "|upsilon_a/upsilon - a(0,0)| <= 0.15 at the smallest h"),
        Check("convergence_trend", rl.trend_exponent > 0.0,
              float(rl.trend_exponent), "positive decay of the gap in h"),
        Check("grid_cap", n_max <= 4096, int(n_max),
              "dense path stays within 4096 points"),
    )
    config = {"model": "pseudo-k3", "e_center": 0.0, "d": 5.0,
              "observable": GAUSS_PHASE, "h_from": 1e-1, "h_to": 1.25e-3,
              "h_steps": 16}
    data = {"fit": _fit_payload(fit), "ratio_limit": _ratio_payload(rl),
            "n_grid_max": int(n_max)}
    return _report("pseudo-concentration-k3", checks, config, data)


def scenario_property_suite() -> ScenarioReport:
    """Cross-cutting invariants: normalization, positivity, decay rates."""
    gauss = parse_observable(GAUSS_PHASE)
    unit = parse_observable("1")
    xsq = parse_observable("x^2")

    # (a) normalization and (f) count agreement on two reference windows.
    windows = [_window("harmonic", 0.02, 1.0, ppw=64),
               _window("quad-max", 0.01, 0.5, ppw=64)]
    norm_worst = 0.0
    counts_ok = True
    for win in windows:
        recs = microlocal_records(win, unit)
        norm_worst = max(norm_worst,
                         max(abs(r.nu_weyl - 1.0) for r in recs))
        counts_ok = counts_ok and bool(win.count_check)

    # (b) anti-Wick positivity for nonnegative observables.
    aw_min = math.inf
    for o in (gauss, xsq):
        recs = microlocal_records(windows[0], o)
        aw_min = min(aw_min, min(r.nu_antiwick for r in recs))

    # (c) Weyl vs anti-Wick gap decays linearly in h on a regular window.
    hs_gap = np.geomspace(0.1, 0.02, 5)
    gap_vals = []
    for h in hs_gap:
        win = _window("harmonic", float(h), 1.0, ppw=64, h_max=float(hs_gap[0]))
        recs = microlocal_records(win, gauss)
        gap_vals.append(max(r.gap for r in recs))
    gap_slope = _slope(hs_gap, gap_vals)

    # (d) flow invariance defect decays in h on a regular window.
    model_qm = get_model("quad-max")
    hs_eg = np.geomspace(0.1, 0.02, 5)
    defects = []
    for h in hs_eg:
        win = _window("quad-max", float(h), 0.5, ppw=64, h_max=float(hs_eg[0]))
        defects.append(egorov_defect(model_qm, gauss, 0.5, win))
    egorov_slope = _slope(hs_eg, defects)

    # (e) coarea consistency on regular bands, 1D and radial.
    co_1d = coarea_check(get_model("harmonic"), 0.8, 1.2)
    co_2d = coarea_check(get_model("radial-deg"), 0.05, 0.15)
    coarea_worst = max(float(co_1d["rel_diff"]), float(co_2d["rel_diff"]))

    # (g) exponent recovery on synthetic scaling data.
    hs_fit = np.geomspace(1e-1, 1e-3, 12)

    def synthetic(fn):
        return [(float(h), float(fn(h))) for h in hs_fit]

    fit_pow = fit_scaling(synthetic(lambda h: 3.7 * h ** -0.25))
    fit_log = fit_scaling(synthetic(lambda h: 2.0 * abs(math.log(h))))
    recovery_ok = (abs(fit_pow.alpha_hat + 0.25) <= 0.01
                   and fit_pow.beta_hat == 0
                   and abs(fit_log.alpha_hat) <= 0.01
                   and fit_log.beta_hat == 1)

    checks = (
        Check("weyl_normalization", norm_worst <= 1e-8, float(norm_worst),
              "nu(1) = 1 to 1e-8 on every eigenpair"),
        Check("antiwick_positivity", aw_min >= -1e-10, float(aw_min),
              "anti-Wick averages of a >= 0 stay nonnegative"),
        Check("quantization_gap_slope", gap_slope >= 0.8, float(gap_slope),
              "Weyl/anti-Wick gap decays with slope >= 0.8 in h"),
        Check("egorov_slope", egorov_slope >= 0.8, float(egorov_slope),
              "flow defect at t = 0.5 decays with slope >= 0.8 in h"),
        Check("coarea", coarea_worst <= 0.01, float(coarea_worst),
              "coarea consistency within 1% on regular bands"),
        Check("count_agreement", counts_ok, counts_ok,
              "bisection counts match extracted eigenvalue counts"),
        Check("fit_recovery", recovery_ok,
              f"alpha {fit_pow.alpha_hat:+.4f}/{fit_log.alpha_hat:+.4f}",
              "synthetic exponents recovered within 0.01"),
    )
    config = {"windows": [{"model": "harmonic", "h": 0.02, "e_center": 1.0},
                          {"model": "quad-max", "h": 0.01, "e_center": 0.5}],
              "gap_h": [float(v) for v in hs_gap],
              "egorov_h": [float(v) for v in hs_eg], "egorov_t": 0.5,
              "fit_h": [float(v) for v in hs_fit]}
    data = {"normalization_gap": float(norm_worst),
            "antiwick_min": float(aw_min),
            "gap_values": [float(v) for v in gap_vals],
            "gap_slope": float(gap_slope),
            "egorov_defects": [float(v) for v in defects],
            "egorov_slope": float(egorov_slope),
            "coarea_rel_diff": {"harmonic": float(co_1d["rel_diff"]),
                                "radial-deg": float(co_2d["rel_diff"])},
            "fit_recovery": {"power": _fit_payload(fit_pow),
                             "log": _fit_payload(fit_log)}}
    return _report("property-suite", checks, config, data)


def scenario_two_wells() -> ScenarioReport:
    """Exploratory split of near-degenerate pairs across two wells."""
    res = two_wells_experiment()
    asym = float(res.worst_asymmetry)
    checks = (
        Check("aggregate_symmetry", asym <= 1e-3, asym,
              "aggregate left/right split 0.5/0.5 within 1e-3 (non-gating)"),
    )
    config = {"model": res.model, "e_center": float(res.e_center),
              "h_values": [float(r.h) for r in res.rows]}
    data = {"x_crit": float(res.x_crit),
            "rows": [{"h": float(r.h), "count": int(r.count),
                      "left_fraction": float(r.left_fraction),
                      "pair_gaps": [float(g) for g in r.pair_gaps],
                      "state_splits": [{"eigenvalue": float(e),
                                        "left_share": float(s)}
                                       for e, s in r.state_splits]}
                     for r in res.rows]}
    return _report("two-wells", checks, config, data, gating=False)


SCENARIOS = {
    "harmonic-weyl": scenario_harmonic_weyl,
    "critical-exponent-k2": scenario_critical_exponent_k2,
    "log-law-k1": scenario_log_law_k1,
    "dirac-concentration-1d": scenario_dirac_concentration_1d,
    "liouville-limit-2d": scenario_liouville_limit_2d,
    "pseudo-concentration-k3": scenario_pseudo_concentration_k3,
    "property-suite": scenario_property_suite,
    "two-wells": scenario_two_wells,
}


def run_scenario(name: str) -> ScenarioReport:
    try:
        fn = SCENARIOS[name]
    except KeyError:
        known = ", ".join(sorted(SCENARIOS))
        raise ConfigError(f"unknown scenario {name!r}; known: {known}") from None
    return fn()
