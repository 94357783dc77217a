"""Curves separating the contact-dominated and rarefaction-dominated regions.

``X1(t)`` solves ``Xi_2 + v^r - a = a``; ``Z1(t)`` solves the same level-set
problem for ``v_hat_1 = Xi_2 + v^r - a`` at a level lowered by the peak of
the derivative correction. Both defining functions increase in ``x``, so
each curve is a unique bracketed root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

from .errors import BracketError, DomainError, VerificationFailure
from .stress import lambda2_inverse
from .waves import WaveAnsatz, rarefaction, xi2

_BRACKET_WIDTHS = 10.0
_MONOTONE_SAMPLES = 65


@dataclass
class InteractionCurves:
    """Root-finding state for the interaction curves of one composite wave.

    ``samples`` caches ``t -> (X1, Z1)``; ``t0`` is set by :func:`detect_t0`.
    """

    ans: WaveAnsatz
    beta: float = 0.25
    eps: float = 0.25
    xtol: float = 1e-10
    t0: float | None = None
    samples: dict = field(default_factory=dict)

    def width(self, t):
        return float(np.sqrt(2.0 * self.ans.mu * (1.0 + t)))

    def v_hat_1(self, x, t):
        """``Xi_2 + v^r - a``: the composite strain without its derivative correction."""
        r = rarefaction(self.ans, x, np.asarray(t, dtype=float) + self.ans.time_shift)
        return xi2(self.ans.diffusion, x, t) + r.v - self.ans.model.a

    def z1_level(self, t):
        ans = self.ans
        amp = ans.model.a - ans.data.v_minus
        return ans.model.a - ans.correction * amp / (np.sqrt(np.pi) * self.width(t))

    def bracket(self, t):
        sb = self.ans.model.sqrt_b
        s = self.width(t)
        return sb * (1.0 + t) - _BRACKET_WIDTHS * s, self.ans.w_plus * (1.0 + t) + _BRACKET_WIDTHS * s


def _solve_level(curves: InteractionCurves, t: float, level: float, what: str) -> float:
    if t < 0:
        raise DomainError("interaction curves are defined for t >= 0")
    lo, hi = curves.bracket(t)
    xs = np.linspace(lo, hi, _MONOTONE_SAMPLES)
    vals = curves.v_hat_1(xs, t) - level
    if not (vals[0] < 0 < vals[-1]):
        raise BracketError(
            f"{what}({t:g}) not bracketed on [{lo:.6g}, {hi:.6g}]: "
            f"f(lo) = {vals[0]:.3e}, f(hi) = {vals[-1]:.3e}"
        )
    if np.any(np.diff(vals) < -1e-14):
        raise VerificationFailure(f"defining function of {what}({t:g}) is not monotone on its bracket")
    # Narrow to the sampled sign change before the fine solve.
    i = int(np.argmax(vals > 0))
    f = lambda x: float(curves.v_hat_1(x, t)) - level  # noqa: E731
    return brentq(f, xs[i - 1], xs[i], xtol=curves.xtol * (1.0 + t), rtol=4 * np.finfo(float).eps)


def find_x1(curves: InteractionCurves, t: float) -> float:
    x1 = _solve_level(curves, t, curves.ans.model.a, "X1")
    curves.samples.setdefault(t, {})["x1"] = x1
    return x1


def find_z1(curves: InteractionCurves, t: float) -> float:
    z1 = _solve_level(curves, t, curves.z1_level(t), "Z1")
    curves.samples.setdefault(t, {})["z1"] = z1
    return z1


class BoundCheck(NamedTuple):
    t: float
    x1: float
    z1: float
    l1_lower: bool
    l1_upper: bool
    z1_lower: bool
    z1_below_x1: bool

    @property
    def holds(self) -> bool:
        return self.l1_lower and self.l1_upper and self.z1_lower and self.z1_below_x1


def z1_lower_bound(curves: InteractionCurves, t: float) -> float:
    """``sqrt(b) t + sqrt(beta ln(1+t)) sqrt(2 mu (1+t))``."""
    sb = curves.ans.model.sqrt_b
    return sb * t + np.sqrt(curves.beta * np.log1p(t)) * curves.width(t)


def check_bounds(curves: InteractionCurves, t: float) -> BoundCheck:
    """Two-sided window of ``X1`` and the lower bound ``Z1 >= M1`` at time ``t``."""
    ans = curves.ans
    sb = ans.model.sqrt_b
    x1 = find_x1(curves, t)
    z1 = find_z1(curves, t)
    return BoundCheck(
        t=t,
        x1=x1,
        z1=z1,
        l1_lower=bool(sb * (1.0 + t) + curves.width(t) <= x1),
        l1_upper=bool(x1 <= ans.w_plus * (1.0 + t)),
        z1_lower=bool(z1_lower_bound(curves, t) <= z1),
        z1_below_x1=bool(z1 <= x1),
    )


def default_t_grid(n: int = 50, t_max: float = 1e4) -> np.ndarray:
    return np.logspace(0.0, np.log10(t_max), n)


def detect_t0(curves: InteractionCurves, t_grid=None):
    """Smallest grid time from which every later sample satisfies the bounds.

    Returns ``(t0, checks)``. Raises :class:`VerificationFailure` when the
    bounds fail at the last grid point, or when ``X1`` does not exist.
    """
    t_grid = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    checks = []
    for t in t_grid:
        try:
            checks.append(check_bounds(curves, float(t)))
        except BracketError as exc:
            raise VerificationFailure(f"interaction curves undefined: {exc}") from exc
    ok = np.array([c.holds for c in checks])
    if not ok[-1]:
        last = checks[-1]
        raise VerificationFailure(
            f"bounds fail at the last sample t = {last.t:g}: {last._asdict()}"
        )
    first_bad_from_end = len(ok) - int(np.argmin(ok[::-1])) if not ok.all() else 0
    curves.t0 = float(t_grid[first_bad_from_end])
    return curves.t0, checks


class L3Report(NamedTuple):
    t: float
    y1: float
    upper_slack: float
    lower_slack: float


def check_l3(curves: InteractionCurves, t: float, eps: float | None = None) -> L3Report:
    """Normalized ``Y1 = (X1 - sqrt(b)(1+t)) / sqrt(2 mu (1+t))`` and its slacks.

    ``upper_slack = Y1^2 - ln((1+t)^(1/2))`` must stay bounded above and
    ``lower_slack = Y1^2 - ln((1+t)^(1/(2(1+eps))))`` bounded below.
    """
    eps = curves.eps if eps is None else eps
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    x1 = curves.samples.get(t, {}).get("x1")
    if x1 is None:
        x1 = find_x1(curves, t)
    y1 = (x1 - curves.ans.model.sqrt_b * (1.0 + t)) / curves.width(t)
    lt = np.log1p(t)
    return L3Report(t, y1, y1 * y1 - 0.5 * lt, y1 * y1 - lt / (2.0 * (1.0 + eps)))


def midpoint_residual(curves: InteractionCurves, t: float) -> float:
    """``|lambda2^{-1}(X1/(1+t)) - a - (a - v_-)/2 erfc(z(X1))|``; NaN if ``X1/(1+t) < sqrt(b)``."""
    ans = curves.ans
    x1 = curves.samples.get(t, {}).get("x1")
    if x1 is None:
        x1 = find_x1(curves, t)
    try:
        v_mid = float(lambda2_inverse(ans.model, x1 / (1.0 + t)))
    except DomainError:
        return float("nan")
    z = (x1 - ans.model.sqrt_b * t) / curves.width(t)
    amp = ans.model.a - ans.data.v_minus
    return abs(v_mid - ans.model.a - 0.5 * amp * erfc(z))


def m1_margin(curves: InteractionCurves, t: float) -> float:
    """``level(Z1) - v_hat_1(M1)``; nonnegative exactly when ``M1 <= Z1``."""
    m1 = z1_lower_bound(curves, t)
    return float(curves.z1_level(t) - curves.v_hat_1(m1, t))


def no_upward_trend(values, margin=0.0) -> bool:
    """Later-half maximum does not exceed the earlier-half maximum (plus ``margin``)."""
    values = np.asarray(values, dtype=float)
    half = len(values) // 2
    return bool(np.max(values[half:]) <= np.max(values[:half]) + margin)


def no_downward_trend(values, margin=0.0) -> bool:
    values = np.asarray(values, dtype=float)
    half = len(values) // 2
    return bool(np.min(values[half:]) >= np.min(values[:half]) - margin)


def curve_table(curves: InteractionCurves, t_values) -> dict:
    """Columns ``t, X1, Z1, Y1, upper_slack, lower_slack`` for CSV export."""
    rows = {k: [] for k in ("t", "X1", "Z1", "Y1", "upper_slack", "lower_slack")}
    for t in t_values:
        t = float(t)
        x1 = find_x1(curves, t)
        z1 = find_z1(curves, t)
        rep = check_l3(curves, t)
        for key, val in zip(rows, (t, x1, z1, rep.y1, rep.upper_slack, rep.lower_slack)):
            rows[key].append(val)
    return {k: np.asarray(v) for k, v in rows.items()}
