"""Perturbation norms, source-term norms and decay-envelope fits."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DomainError
from .interaction import InteractionCurves, find_x1, find_z1
from .waves import WaveAnsatz, ansatz, pieces, rarefaction, source_h, xi2

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass
class DiagnosticsRecord:
    t: float
    l2_phi: float
    l2_psi: float
    h1_phi: float
    h1_psi: float
    sup_phi: float
    sup_psi: float
    g_increment: float
    weighted_l2: float
    h_l1: float = float("nan")
    h_linf: float = float("nan")
    x1: float = float("nan")
    z1: float = float("nan")

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def as_dict(self):
        return asdict(self)


class DecayFit(NamedTuple):
    exponent: float
    constant: float
    residual: float
    t_min: float
    t_max: float
    n: int


# ---------------------------------------------------------------------------
# Norms of nodal fields
# ---------------------------------------------------------------------------

def l2_norm(f, h):
    return float(np.sqrt(np.trapezoid(f * f, dx=h)))


def h1_norm(f, h):
    """``sqrt(||f||^2 + ||f_x||^2)`` with second-order finite-difference ``f_x``."""
    fx = np.gradient(f, h, edge_order=2)
    return float(np.sqrt(np.trapezoid(f * f, dx=h) + np.trapezoid(fx * fx, dx=h)))


def sup_norm(f):
    return float(np.max(np.abs(f)))


def perturbation(state, ans: WaveAnsatz):
    """``(phi, psi) = (v - v_hat, u - u_hat)`` on the state's grid."""
    x = state.grid.x
    if state.v.shape != x.shape:
        raise ConfigError("state fields do not match the grid")
    v_hat, u_hat = ansatz(ans, x, state.t)
    return state.v - v_hat, state.u - u_hat


def field_norms(phi, psi, h) -> dict:
    return {
        "l2_phi": l2_norm(phi, h),
        "l2_psi": l2_norm(psi, h),
        "h1_phi": h1_norm(phi, h),
        "h1_psi": h1_norm(psi, h),
        "sup_phi": sup_norm(phi),
        "sup_psi": sup_norm(psi),
    }


def perturbation_norms(state, ans: WaveAnsatz) -> dict:
    phi, psi = perturbation(state, ans)
    return field_norms(phi, psi, state.grid.h)


def heat_weight(ans: WaveAnsatz, x, t):
    """Gaussian weight ``exp(-(x - sqrt(b) t)^2 / (2 mu (1+t))) / sqrt(2 mu (1+t))``."""
    s2 = 2.0 * ans.mu * (1.0 + t)
    return np.exp(-((np.asarray(x) - ans.model.sqrt_b * t) ** 2) / s2) / np.sqrt(s2)


def weighted_l2(ans: WaveAnsatz, x, t, phi, psi, h) -> float:
    """``int w^2 (phi^2 + psi^2) dx`` by the trapezoid rule."""
    w = heat_weight(ans, x, t)
    return float(np.trapezoid(w * w * (phi * phi + psi * psi), dx=h))


def weighted_norm(state, ans: WaveAnsatz) -> float:
    phi, psi = perturbation(state, ans)
    return weighted_l2(ans, state.grid.x, state.t, phi, psi, state.grid.h)


def u_hat_1x(ans: WaveAnsatz, x, t):
    """``u^r_x - sqrt(b) Xi_2x``; strictly negative."""
    r = rarefaction(ans, x, np.asarray(t, dtype=float) + ans.time_shift)
    return r.u_x - ans.model.sqrt_b * xi2(ans.diffusion, x, t, 1)


def g_integrand(a, v_hat, phi, du1):
    """Pointwise integrand of the region-split functional at one time.

    ``du1`` is ``u_hat_1x``. Regions use the strict inequalities
    ``v_hat + phi > a`` etc. exactly as the functional is defined.
    """
    v = v_hat + phi
    r1 = (v > a) & (v_hat > a)
    r2 = (v > a) & (-a < v_hat) & (v_hat <= a)
    r3 = (-a < v) & (v <= a) & (v_hat > a)
    weight = -du1
    out = np.zeros_like(v_hat)
    out = np.where(r1, weight * phi * phi, out)
    out = np.where(r2, weight * (phi + v_hat - a) ** 2, out)
    out = np.where(r3, weight * (a - v_hat) ** 2, out)
    return out


def g_increment(ans: WaveAnsatz, x, t, v_hat, phi, h) -> float:
    return float(np.trapezoid(g_integrand(ans.model.a, v_hat, phi, u_hat_1x(ans, x, t)), dx=h))


def g_functional(records, max_cadence: float = 1.0):
    """Cumulative trapezoid in time of the ``g_increment`` series.

    Returns ``(t, G, cadence_ok)``; a cadence coarser than ``max_cadence``
    also emits a warning.
    """
    t = np.array([r.t for r in records], dtype=float)
    inc = np.array([r.g_increment for r in records], dtype=float)
    if len(t) < 2:
        return t, np.zeros_like(t), True
    dt = np.diff(t)
    g = np.concatenate([[0.0], np.cumsum(0.5 * dt * (inc[1:] + inc[:-1]))])
    cadence_ok = bool(np.max(dt) <= max_cadence + 1e-12)
    if not cadence_ok:
        warnings.warn(f"snapshot cadence {np.max(dt):g} exceeds {max_cadence:g}; G is under-resolved")
    return t, g, cadence_ok


def running_sup(values):
    return np.maximum.accumulate(np.asarray(values, dtype=float))


# ---------------------------------------------------------------------------
# Source-term norms
# ---------------------------------------------------------------------------

def _gauss_panels(edges, n_panels):
    """Gauss-Legendre nodes and weights on ``n_panels`` panels per segment."""
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        b = np.linspace(lo, hi, n_panels + 1)
        half = 0.5 * np.diff(b)
        mid = 0.5 * (b[1:] + b[:-1])
        xs.append((mid[:, None] + half[:, None] * _GAUSS_NODES).ravel())
        ws.append((half[:, None] * _GAUSS_WEIGHTS).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def source_window(ans: WaveAnsatz, t: float, widths: float = 12.0):
    """Breakpoints covering the contact wave and the rarefaction fan."""
    s = np.sqrt(2.0 * ans.mu * (1.0 + t))
    tr = t + ans.time_shift
    left = ans.model.sqrt_b * t - widths * s
    tail = widths * s + 20.0 * ans.width
    edges = [left, ans.model.sqrt_b * t, ans.w_minus * tr, ans.w_plus * tr, ans.w_plus * tr + tail]
    return np.unique(np.clip(edges, left, None))


class HNorms(NamedTuple):
    l1: float
    linf: float
    l2: float
    converged: bool
    rel_change: float


def h_norms(ans: WaveAnsatz, t: float, rtol: float = 1e-6, max_doublings: int = 9) -> HNorms:
    """``L^1``, ``L^inf`` and ``L^2`` norms of the source ``H`` at time ``t``.

    Panels on each window segment are doubled until the ``L^1`` value
    changes by less than ``rtol`` (relative). ``L^inf`` is the maximum over
    every node used plus a dense uniform sample, so the discrete
    interpolation inequality ``L2^2 <= L1 * Linf`` holds on the same nodes.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    edges = source_window(ans, t)
    n_panels = 8
    prev = None
    rel = np.inf
    for _ in range(max_doublings + 1):
        xq, wq = _gauss_panels(edges, n_panels)
        habs = np.abs(source_h(ans, xq, t))
        l1 = float(np.dot(wq, habs))
        if prev is not None:
            rel = abs(l1 - prev) / max(abs(l1), 1e-300)
            if rel <= rtol:
                break
        prev = l1
        n_panels *= 2
    dense = np.linspace(edges[0], edges[-1], 20001)
    linf = float(max(np.max(habs), np.max(np.abs(source_h(ans, dense, t)))))
    l2 = float(np.sqrt(np.dot(wq, habs * habs)))
    return HNorms(l1, linf, l2, bool(rel <= rtol), float(rel))


def rarefaction_gradient_norms(ans: WaveAnsatz, t: float, rtol: float = 1e-10):
    """``L^1`` and ``L^inf`` norms of ``|d/dx (v^r, u^r)|`` at the unshifted time ``t``."""
    s = 20.0 * ans.width + 4.0 * np.log1p(t)
    edges = np.array([ans.w_minus * t - s, ans.w_minus * t, ans.w_plus * t, ans.w_plus * t + s])
    n_panels = 8
    prev = None
    for _ in range(12):
        xq, wq = _gauss_panels(edges, n_panels)
        r = rarefaction(ans, xq, t)
        mag = np.hypot(r.v_x, r.u_x)
        l1 = float(np.dot(wq, mag))
        if prev is not None and abs(l1 - prev) <= rtol * l1:
            break
        prev = l1
        n_panels *= 2
    return l1, float(np.max(mag))


# ---------------------------------------------------------------------------
# Decay fits
# ---------------------------------------------------------------------------

def fit_decay(t, values, window=None, min_samples: int = 8) -> DecayFit:
    """Least-squares slope of ``log(value)`` against ``log(1 + t)``.

    ``window = (t_lo, t_hi)`` restricts the samples. The window must hold at
    least ``min_samples`` samples spanning a decade in ``t``.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, values = t[keep], values[keep]
    if np.any(~(values > 0)):
        raise DomainError("decay fits need strictly positive values")
    if len(t) < min_samples:
        raise DomainError(f"fit window has {len(t)} samples, need {min_samples}")
    if not (t.min() > 0 and t.max() / t.min() >= 10.0 - 1e-9):
        raise DomainError("fit window must span at least one decade in t")
    lx = np.log1p(t)
    ly = np.log(values)
    (slope, icpt), res, *_ = np.polyfit(lx, ly, 1, full=True)
    resid = float(np.sqrt(res[0] / len(t))) if len(res) else 0.0
    return DecayFit(float(slope), float(np.exp(icpt)), resid, float(t.min()), float(t.max()), len(t))


# ---------------------------------------------------------------------------
# Trajectory observer
# ---------------------------------------------------------------------------

class DiagnosticsObserver:
    """Solver observer collecting one :class:`DiagnosticsRecord` per snapshot.

    Source norms are taken on the solver grid (trapezoid rule) and the
    interaction curves are located only when ``track_curves`` is set.
    """

    def __init__(self, ans: WaveAnsatz, curves: InteractionCurves | None = None,
                 track_curves: bool = True, keep_fields: bool = False):
        self.ans = ans
        self.curves = curves if curves is not None else InteractionCurves(ans)
        self.track_curves = track_curves
        self.keep_fields = keep_fields
        self.records: list[DiagnosticsRecord] = []
        self.fields: list = []

    def __call__(self, state):
        ans = self.ans
        x, h, t = state.grid.x, state.grid.h, state.t
        c, r = pieces(ans, x, t)
        v_hat = c.v + r.v - ans.model.a
        u_hat = c.u + r.u - ans.data.u_a
        phi = state.v - v_hat
        psi = state.u - u_hat
        du1 = r.u_x - ans.model.sqrt_b * xi2(ans.diffusion, x, t, 1)
        hh = np.abs(source_h(ans, x, t))
        rec = DiagnosticsRecord(
            t=t,
            **field_norms(phi, psi, h),
            g_increment=float(np.trapezoid(g_integrand(ans.model.a, v_hat, phi, du1), dx=h)),
            weighted_l2=weighted_l2(ans, x, t, phi, psi, h),
            h_l1=float(np.trapezoid(hh, dx=h)),
            h_linf=float(np.max(hh)),
        )
        if self.track_curves:
            rec.x1 = find_x1(self.curves, t)
            rec.z1 = find_z1(self.curves, t)
        self.records.append(rec)
        if self.keep_fields:
            self.fields.append((t, x, state.v.copy(), state.u.copy(), v_hat, u_hat))
