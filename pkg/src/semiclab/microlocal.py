"""Per-eigenfunction phase-space averages and windowed spectral counting.

Every window eigenfunction psi_j gets two phase-space averages of an
observable a:

* the Weyl route <Op(a) psi_j, psi_j>, evaluated by the cheapest exact
  discretization the observable's routing class allows: position-only
  symbols are diagonal sums, momentum-only symbols one FFT, split symbols
  the sum of both, and genuinely mixed symbols a dense Weyl matrix (grid
  capped, so mixed observables belong on the moderate-size spectral grids);

* the anti-Wick route, a nonnegative average of the Husimi density over a
  coherent-state lattice.

The two routes differ by O(h); their gap is a useful convergence
diagnostic and is never collapsed into a single number silently.  Counting
functions: ``upsilon`` is the plain (multiplicity-weighted) number of window
states, ``upsilon_a`` the a-weighted count through the Weyl route, so that
``upsilon_a == upsilon`` when a is identically 1.  Mixed observables on
grids past the dense cap fall back to the anti-Wick value as the reference
(the record's method label says so).

Radial 2D windows support position-only observables a(r); their records
carry NaN in the anti-Wick slot since no planar coherent frame exists for
them here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import flow_points
from .eig import EigenWindow, RadialChannel, eigvals_in_range
from .errors import NumericalError
from .model import SymbolModel
from .observables import Observable
from .quantize import (
    DENSE_CAP,
    CoherentFrame,
    DiscreteOperator,
    build_coherent_frame,
    build_weyl_observable,
    antiwick_batch,
)

__all__ = [
    "MicrolocalRecord",
    "weyl_averages",
    "antiwick_averages",
    "microlocal_records",
    "default_frame",
    "upsilon",
    "upsilon_a",
    "radial_position_averages",
    "measure_gap",
    "smoothed_trace",
    "egorov_defect",
]


@dataclass(frozen=True)
class MicrolocalRecord:
    j: int  # index of the state inside its window
    h: float
    eigenvalue: float
    observable_id: str
    nu_weyl: float
    nu_antiwick: float
    antiwick_mass: float
    method: str  # discretization used on the Weyl side

    @property
    def gap(self) -> float:
        return abs(self.nu_weyl - self.nu_antiwick)


def _window_matrix(window: EigenWindow) -> np.ndarray:
    if window.vectors is None:
        raise ValueError("window was solved without eigenvectors")
    return window.vectors


def weyl_averages(window: EigenWindow, obs: Observable) -> tuple[np.ndarray, str]:
    """<Op(a) psi, psi> for every window state, plus the method label."""
    v = _window_matrix(window)
    grid = window.grid
    h = window.h
    dens = np.abs(v) ** 2  # (n, k)

    if obs.routing == "position_only":
        ax = np.asarray(obs(grid.nodes, 0.0), dtype=float)
        return ax @ dens, "diagonal"

    xi = grid.xi_values(h)
    if obs.routing == "momentum_only":
        spec = np.fft.fft(v, axis=0) / math.sqrt(grid.n)
        axi = np.asarray(obs(0.0, xi), dtype=float)
        return axi @ (np.abs(spec) ** 2), "multiplier"

    if obs.routing == "split":
        x_part, xi_part = obs.split_parts()
        out = np.zeros(v.shape[1])
        if x_part is not None:
            out += np.asarray(x_part.eval(grid.nodes, 0.0), dtype=float) @ dens
        if xi_part is not None:
            spec = np.fft.fft(v, axis=0) / math.sqrt(grid.n)
            out += np.asarray(xi_part.eval(0.0, xi), dtype=float) @ (np.abs(spec) ** 2)
        return out, "split"

    if grid.n > DENSE_CAP:
        raise NumericalError(
            f"mixed observable {obs.id!r} needs a dense Weyl matrix but the grid "
            f"has {grid.n} > {DENSE_CAP} points; use the anti-Wick reference route")
    op = build_weyl_observable(lambda x, s: obs(x, s), h, grid)
    out = np.empty(v.shape[1])
    for j in range(v.shape[1]):
        col = v[:, j].astype(complex)
        out[j] = float(np.real(np.vdot(col, op.matrix @ col)))
    return out, "weyl-dense"


def _auto_xi_span(window: EigenWindow, coverage: float = 0.999) -> tuple[float, float]:
    """Momentum span actually occupied by the window states, with margin."""
    v = _window_matrix(window)
    grid = window.grid
    xi = grid.xi_values(window.h)
    power = np.sum(np.abs(np.fft.fft(v, axis=0)) ** 2, axis=1)
    power /= np.sum(power)
    order = np.argsort(np.abs(xi))
    cum = np.cumsum(power[order])
    cut_idx = int(np.searchsorted(cum, coverage))
    xi_cut = float(np.abs(xi)[order][min(cut_idx, xi.size - 1)])
    pad = 6.0 * math.sqrt(window.h)
    return (-xi_cut - pad, xi_cut + pad)


def default_frame(window: EigenWindow, xi_span: tuple[float, float] | None = None) -> CoherentFrame:
    if xi_span is None:
        xi_span = _auto_xi_span(window)
    return build_coherent_frame(window.grid, window.h, xi_span)


def antiwick_averages(
    window: EigenWindow,
    obs,
    frame: CoherentFrame | None = None,
) -> tuple[np.ndarray, np.ndarray, CoherentFrame]:
    """Anti-Wick averages and captured masses for every window state.

    ``obs`` is a callable a(x, xi) or a precomputed table over the frame
    lattice (x_centers by xi_centers).
    """
    if frame is None:
        frame = default_frame(window)
    v = _window_matrix(window)
    psis = np.ascontiguousarray(v.T)
    vals, masses, _low = antiwick_batch(frame, window.grid, psis, obs)
    return vals, masses, frame


def _weyl_or_reference(window: EigenWindow, obs: Observable,
                       frame: CoherentFrame | None):
    """Weyl averages, or the anti-Wick values when no dense route exists.

    Mixed observables on grids past the dense cap have no affordable exact
    Weyl matrix; the anti-Wick average then serves as the reference value
    and the method label records the substitution.
    """
    if obs.routing == "general" and window.grid.n > DENSE_CAP:
        vals, _masses, frame = antiwick_averages(window, obs, frame)
        return vals, "antiwick-reference", frame
    nw, method = weyl_averages(window, obs)
    return nw, method, frame


def microlocal_records(
    window: EigenWindow,
    obs: Observable,
    frame: CoherentFrame | None = None,
    mass_floor: float = 0.99,
) -> list[MicrolocalRecord]:
    """Both measure routes per window state; warns through the mass column."""
    nw, method, frame = _weyl_or_reference(window, obs, frame)
    na, masses, frame = antiwick_averages(window, obs, frame)
    recs = []
    for j in range(window.count):
        recs.append(MicrolocalRecord(
            j=j, h=window.h, eigenvalue=float(window.eigenvalues[j]),
            observable_id=obs.id, nu_weyl=float(nw[j]), nu_antiwick=float(na[j]),
            antiwick_mass=float(masses[j]), method=method))
    if recs and min(r.antiwick_mass for r in recs) < mass_floor:
        worst = min(r.antiwick_mass for r in recs)
        raise NumericalError(
            f"coherent frame captures only {worst:.4f} of the Husimi mass; "
            "widen the frame or the grid")
    return recs


def upsilon(window) -> float:
    """Multiplicity-weighted number of window states."""
    if isinstance(window, EigenWindow):
        return float(window.count)
    return float(sum(c.weight * c.window.count for c in window))


def upsilon_a(window, obs: Observable, frame: CoherentFrame | None = None) -> float:
    """a-weighted state count: sum of multiplicity-weighted Weyl averages.

    Reduces to :func:`upsilon` when a is identically one, because every
    normalized state averages the constant symbol to exactly its l2 mass.
    Accepts an :class:`EigenWindow` or a list of radial channels (position
    observables only in the radial case).
    """
    if isinstance(window, EigenWindow):
        vals, _method, _frame = _weyl_or_reference(window, obs, frame)
        return float(np.sum(vals))
    total = 0.0
    for ch in window:
        win = ch.window
        if win.count == 0:
            continue
        if win.vectors is None:
            raise ValueError("radial channels were solved without eigenvectors")
        if obs.routing != "position_only":
            raise ValueError("radial windows take position observables a(r) only")
        ar = np.asarray(obs(win.grid.nodes, 0.0), dtype=float)
        total += ch.weight * float(np.sum(ar @ (win.vectors ** 2)))
    return total


def radial_position_averages(channels: list[RadialChannel], a) -> tuple[float, list[float]]:
    """Weighted mean and per-state values of a(r) across radial channels.

    Eigenvectors hold sqrt(r dr) psi(r), so the plane average of a(r) is a
    plain l2 sum over the vector entries.
    """
    per_state: list[float] = []
    weights: list[float] = []
    for ch in channels:
        win = ch.window
        if win.vectors is None:
            raise ValueError("radial channels were solved without eigenvectors")
        r = win.grid.nodes
        ar = np.asarray(a(r), dtype=float)
        for j in range(win.count):
            per_state.append(float(ar @ (win.vectors[:, j] ** 2)))
            weights.append(ch.weight)
    if not per_state:
        raise NumericalError("no states in the radial window")
    w = np.asarray(weights)
    vals = np.asarray(per_state)
    return float(np.sum(w * vals) / np.sum(w)), per_state


def measure_gap(records: list[MicrolocalRecord]) -> float:
    """Largest Weyl/anti-Wick disagreement across the window (O(h) check)."""
    if not records:
        raise ValueError("no records")
    return max(abs(r.gap) for r in records)


# ---------------------------------------------------------------------------
# Smoothed spectral traces


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def smoothed_trace(op: DiscreteOperator, e_center: float, kind: str = "gaussian",
                   sigma: float = 1.0, d: float = 5.0, rolloff: float = 1.0,
                   cutoff: float = 8.0) -> float:
    """Smoothly weighted spectral count around e_center, in units of h.

    ``gaussian`` sums exp(-u^2 / 2 sigma^2) over u = (lambda - E) / h; the
    tail is certified by recomputing with a widened harvest window and
    demanding agreement to 1e-8.  ``smoothed_indicator`` is a C^1 plateau:
    1 for |u| <= d - rolloff, 0 for |u| >= d + rolloff, a cubic smoothstep
    between, so it differs from the sharp count of {|u| <= d} by at most
    the number of eigenvalues inside the roll-off bands; its support makes
    the harvest window exact.
    """
    if kind == "gaussian":
        scale = sigma * op.h

        def partial(c):
            w = eigvals_in_range(op, e_center - c * scale, e_center + c * scale)
            return float(np.sum(np.exp(-0.5 * ((w - e_center) / scale) ** 2)))

        t0 = partial(cutoff)
        t1 = partial(cutoff + 2.0)
        if abs(t1 - t0) > 1e-8 * (1.0 + abs(t1)):
            raise NumericalError(
                f"smoothed trace tail not converged: {t0:.10g} vs {t1:.10g} "
                f"at cutoff {cutoff}")
        return t1

    if kind == "smoothed_indicator":
        if not 0.0 < rolloff <= d:
            raise ValueError("need 0 < rolloff <= d")
        span = (d + rolloff) * op.h
        w = eigvals_in_range(op, e_center - span, e_center + span)
        u = np.abs(w - e_center) / op.h
        return float(np.sum(_smoothstep((d + rolloff - u) / (2.0 * rolloff))))

    raise ValueError(f"unknown weight {kind!r}")


# ---------------------------------------------------------------------------
# Flow invariance (Egorov-type) diagnostics


def egorov_defect(model: SymbolModel, obs: Observable, t: float,
                  window: EigenWindow, frame: CoherentFrame | None = None) -> float:
    """max_j |nu_j(a) - nu_j(a o flow_t)| through the anti-Wick route.

    Microlocal measures of eigenfunctions are flow-invariant up to O(h); the
    pulled-back symbol is tabulated on the coherent lattice by integrating
    the classical flow from every lattice point.
    """
    if frame is None:
        frame = default_frame(window)
    xc = frame.x_centers
    xic = frame.xi_centers
    xx, ss = np.meshgrid(xc, xic, indexing="ij")
    flowed = flow_points(model, xx.ravel(), ss.ravel(), t)
    table_t = np.asarray(obs(flowed.x, flowed.xi), dtype=float).reshape(xx.shape)

    base, _m0, frame = antiwick_averages(window, lambda x, xi: obs(x, xi), frame)
    moved, _m1, _ = antiwick_averages(window, table_t, frame)
    return float(np.max(np.abs(base - moved)))
