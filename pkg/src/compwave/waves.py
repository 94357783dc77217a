r"""Rarefaction wave, viscous contact wave and their composite.

The rarefaction wave is the smooth Burgers solution with ``tanh`` data,
mapped back to strain through the inverse characteristic speed. The viscous
contact wave is built from the linear diffusion wave

.. math::

    \Xi_2 = v_- + \frac{a - v_-}{2}\,\mathrm{erfc}(-z), \qquad
    z = \frac{x - \sqrt{b}\,t}{\sqrt{2\mu(1+t)}},

plus a first-derivative correction that cancels the leading viscous error.
Every derivative is supplied in closed form; nothing here differentiates
numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

from .errors import DomainError
from .riemann import FarFieldData
from .stress import (
    StressModel,
    lambda2,
    lambda2_inverse,
    lambda2_primitive,
    sigma_prime,
)

# exp(-z^2) underflows past |z| ~ 27; tails are replaced by exact limits.
_Z_CUTOFF = 30.0
_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# Burgers equation with tanh data
# ---------------------------------------------------------------------------

def _tanh_data(w_minus, w_plus, x0, width):
    mid = 0.5 * (w_plus + w_minus)
    half = 0.5 * (w_plus - w_minus)
    th = np.tanh(x0 / width)
    sech2 = 1.0 - th * th
    w0 = mid + half * th
    w0_x = (half / width) * sech2
    w0_xx = -2.0 * (half / width**2) * th * sech2
    return w0, w0_x, w0_xx


def _characteristic_foot(w_minus, w_plus, x, t, width, max_iter=200):
    """Solve ``x = x0 + w0(x0) t`` for the foot ``x0`` (finite ``x`` only).

    Safeguarded Newton: each iterate keeps a sign-change bracket and falls
    back to bisection whenever the Newton step leaves it.
    """
    mid = 0.5 * (w_plus + w_minus)
    half = 0.5 * (w_plus - w_minus)
    lo = x - w_plus * t
    hi = x - w_minus * t
    if half > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = np.where(t > 0, x / np.where(t > 0, t, 1.0), mid)
        r = np.clip((xi - mid) / half, -1.0 + 1e-15, 1.0 - 1e-15)
        x0 = np.clip(width * np.arctanh(r), lo, hi)
    else:
        x0 = lo.copy()
    for _ in range(max_iter):
        th = np.tanh(x0 / width)
        f = x0 + (mid + half * th) * t - x
        fp = 1.0 + (half / width) * (1.0 - th * th) * t
        lo = np.where(f < 0, x0, lo)
        hi = np.where(f > 0, x0, hi)
        x_new = x0 - f / fp
        outside = (x_new < lo) | (x_new > hi)
        x_new = np.where(outside, 0.5 * (lo + hi), x_new)
        # f itself carries round-off of order eps * (|x| + |w| t).
        tol = 1e-13 * (1.0 + np.abs(x_new)) + 4.0 * _EPS * (np.abs(x) + np.abs(w_plus) * t)
        done = np.abs(x_new - x0) <= tol
        x0 = x_new
        if np.all(done):
            break
    return x0


class BurgersSolution(NamedTuple):
    w: np.ndarray
    w_x: np.ndarray
    w_xx: np.ndarray


def burgers_solution(w_minus, w_plus, x, t, width=1.0) -> BurgersSolution:
    """Classical Burgers solution with data ``mid + half * tanh(x / width)``.

    Returns the solution and its first two x-derivatives, obtained exactly
    by differentiating through the characteristic map:
    ``w_x = w0'/(1 + w0' t)`` and ``w_xx = w0''/(1 + w0' t)^3``.
    """
    if w_minus > w_plus:
        raise DomainError(f"need w_minus <= w_plus, got {w_minus} > {w_plus}")
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise DomainError("the Burgers solution is defined for t >= 0 only")
    finite = np.isfinite(x)
    xf = np.where(finite, x, 0.0)
    x0 = _characteristic_foot(w_minus, w_plus, xf, t, width)
    w0, w0_x, w0_xx = _tanh_data(w_minus, w_plus, x0, width)
    jac = 1.0 + w0_x * t
    w = np.where(finite, w0, np.where(x > 0, w_plus, w_minus))
    w_x = np.where(finite, w0_x / jac, 0.0)
    w_xx = np.where(finite, w0_xx / jac**3, 0.0)
    return BurgersSolution(w, w_x, w_xx)


def burgers_w(w_minus, w_plus, x, t, width=1.0):
    """Smooth Burgers solution ``w(x, t)``; see :func:`burgers_solution`."""
    return burgers_solution(w_minus, w_plus, x, t, width).w


def exact_fan(w_minus, w_plus, x, t):
    """Self-similar rarefaction fan of the Riemann problem for Burgers."""
    if not np.all(np.asarray(t) > 0):
        raise DomainError("the fan is defined for t > 0 only")
    return np.clip(np.asarray(x, dtype=float) / t, w_minus, w_plus)


# ---------------------------------------------------------------------------
# Linear diffusion wave
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffusionWave:
    """Error-function profile from ``v_minus`` to ``a`` moving at ``sqrt(b)``."""

    v_minus: float
    a: float
    b: float
    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"viscosity must be positive, got {self.mu}")

    def scales(self, x, t):
        """Return ``(z, s)`` with ``s = sqrt(2 mu (1 + t))``."""
        s = np.sqrt(2.0 * self.mu * (1.0 + np.asarray(t, dtype=float)))
        z = (np.asarray(x, dtype=float) - np.sqrt(self.b) * t) / s
        return z, s


def _gaussian_derivative(n, z):
    """``d^n/dz^n`` of ``(sqrt(pi)/2) erfc(-z)``, i.e. ``(-1)^(n-1) H_{n-1}(z) e^{-z^2}``."""
    g = np.exp(-z * z)
    if n == 1:
        poly = 1.0
    elif n == 2:
        poly = -2.0 * z
    elif n == 3:
        poly = 4.0 * z * z - 2.0
    elif n == 4:
        poly = -8.0 * z**3 + 12.0 * z
    elif n == 5:
        poly = 16.0 * z**4 - 48.0 * z * z + 12.0
    else:
        raise DomainError(f"unsupported derivative order {n}")
    return poly * g


def xi2(dw: DiffusionWave, x, t, order: int = 0):
    """Diffusion wave ``Xi_2`` or its ``order``-th x-derivative (0 to 4)."""
    if order not in (0, 1, 2, 3, 4):
        raise DomainError(f"order must be one of 0..4, got {order}")
    z, s = dw.scales(x, t)
    amp = dw.a - dw.v_minus
    tail = np.abs(z) > _Z_CUTOFF
    zc = np.where(tail, 0.0, z)
    if order == 0:
        inner = dw.v_minus + 0.5 * amp * erfc(-zc)
        limit = np.where(z > 0, dw.a, dw.v_minus)
        return np.where(tail, limit, inner)
    value = amp / np.sqrt(np.pi) * _gaussian_derivative(order, zc) / s**order
    return np.where(tail, 0.0, value)


def xi2_t(dw: DiffusionWave, x, t, order: int = 0):
    """Time derivative of the ``order``-th x-derivative of ``Xi_2`` (0 to 3).

    Computed directly from ``z(x, t)`` and ``s(t)``, independently of the
    advection-diffusion equation ``Xi_2`` satisfies.
    """
    if order not in (0, 1, 2, 3):
        raise DomainError(f"order must be one of 0..3, got {order}")
    z, s = dw.scales(x, t)
    tail = np.abs(z) > _Z_CUTOFF
    zc = np.where(tail, 0.0, z)
    amp = dw.a - dw.v_minus
    s_t = dw.mu / s
    z_t = -np.sqrt(dw.b) / s - zc * s_t / s
    value = _gaussian_derivative(order + 1, zc) * z_t / s**order
    if order > 0:
        value = value - order * s_t * _gaussian_derivative(order, zc) / s ** (order + 1)
    return np.where(tail, 0.0, amp / np.sqrt(np.pi) * value)


# ---------------------------------------------------------------------------
# Composite wave
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveAnsatz:
    """Composite of the viscous contact wave and the rarefaction wave.

    Parameters
    ----------
    model, data : StressModel, FarFieldData
        Stress law and Case-1 far-field states.
    mu : float
        Viscosity.
    time_shift : float
        The rarefaction piece of the composite is evaluated at time
        ``t + time_shift``; this keeps ``t = 0`` smooth.
    width : float
        Width of the ``tanh`` data of the Burgers solution.
    """

    model: StressModel
    data: FarFieldData
    mu: float
    time_shift: float = 1.0
    width: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"viscosity must be positive, got {self.mu}")
        if not self.width > 0:
            raise DomainError(f"tanh width must be positive, got {self.width}")
        if self.time_shift < 0:
            raise DomainError("time shift must be non-negative")
        if self.model.k <= 0:
            raise DomainError("the rarefaction wave needs a convex branch (k > 0)")

    @property
    def diffusion(self) -> DiffusionWave:
        return DiffusionWave(self.data.v_minus, self.model.a, self.model.b, self.mu)

    @property
    def correction(self) -> float:
        """Coefficient ``mu / (4 sqrt(b))`` of the derivative correction."""
        return self.mu / (4.0 * self.model.sqrt_b)

    @property
    def w_minus(self) -> float:
        return float(lambda2(self.model, self.model.a))

    @property
    def w_plus(self) -> float:
        return float(lambda2(self.model, self.data.v_plus))

    def __call__(self, x, t):
        return ansatz(self, x, t)


class Profile(NamedTuple):
    v: np.ndarray
    u: np.ndarray
    v_x: np.ndarray
    u_x: np.ndarray
    v_xx: np.ndarray
    u_xx: np.ndarray
    v_t: np.ndarray
    u_t: np.ndarray


def rarefaction(ans: WaveAnsatz, x, t) -> Profile:
    """Rarefaction wave at the unshifted time ``t``.

    ``v^r = lambda2^{-1}(w)``, ``u^r = u_a - int_a^{v^r} lambda2``. With the
    quadratic stress law ``lambda2(v^r) = w`` exactly, so
    ``v^r_x = w w_x / k`` and ``u^r_x = -w v^r_x``.
    """
    m = ans.model
    sol = burgers_solution(ans.w_minus, ans.w_plus, x, t, ans.width)
    w, w_x, w_xx = sol
    w_t = -w * w_x
    v = lambda2_inverse(m, w)
    u = ans.data.u_a - lambda2_primitive(m, m.a, v)
    v_x = w * w_x / m.k
    v_xx = (w_x * w_x + w * w_xx) / m.k
    v_t = w * w_t / m.k
    u_x = -w * v_x
    u_xx = -(w_x * v_x + w * v_xx)
    u_t = -w * v_t
    return Profile(v, u, v_x, u_x, v_xx, u_xx, v_t, u_t)


def contact(ans: WaveAnsatz, x, t) -> Profile:
    """Viscous contact wave ``v^c = Xi_2 + c Xi_2x``, ``u^c = sqrt(b)(c Xi_2x - Xi_2)``."""
    dw = ans.diffusion
    c = ans.correction
    sb = ans.model.sqrt_b
    g0, g1, g2, g3 = (xi2(dw, x, t, n) for n in range(4))
    g0t, g1t = xi2_t(dw, x, t, 0), xi2_t(dw, x, t, 1)
    return Profile(
        v=g0 + c * g1,
        u=sb * (c * g1 - g0),
        v_x=g1 + c * g2,
        u_x=sb * (c * g2 - g1),
        v_xx=g2 + c * g3,
        u_xx=sb * (c * g3 - g2),
        v_t=g0t + c * g1t,
        u_t=sb * (c * g1t - g0t),
    )


def sources_q(ans: WaveAnsatz, x, t):
    """Contact-wave remainders ``Q1 = (mu^2 / (8 sqrt b)) Xi_2xxx`` and ``Q2 = -sqrt(b) Q1``."""
    q1 = 0.5 * ans.mu * ans.correction * xi2(ans.diffusion, x, t, 3)
    return q1, -ans.model.sqrt_b * q1


def pieces(ans: WaveAnsatz, x, t):
    """Contact piece at ``t`` and rarefaction piece at ``t + time_shift``."""
    return contact(ans, x, t), rarefaction(ans, x, np.asarray(t, dtype=float) + ans.time_shift)


def ansatz(ans: WaveAnsatz, x, t):
    """Composite wave ``(v_hat, u_hat)``."""
    c, r = pieces(ans, x, t)
    return c.v + r.v - ans.model.a, c.u + r.u - ans.data.u_a


def ansatz_profile(ans: WaveAnsatz, x, t) -> Profile:
    """Composite wave with its closed-form derivatives."""
    c, r = pieces(ans, x, t)
    return Profile(
        v=c.v + r.v - ans.model.a,
        u=c.u + r.u - ans.data.u_a,
        v_x=c.v_x + r.v_x,
        u_x=c.u_x + r.u_x,
        v_xx=c.v_xx + r.v_xx,
        u_xx=c.u_xx + r.u_xx,
        v_t=c.v_t + r.v_t,
        u_t=c.u_t + r.u_t,
    )


def _source_h(ans, c, r, q2):
    m = ans.model
    v_hat = c.v + r.v - m.a
    bracket = (
        sigma_prime(m, v_hat) * (c.v_x + r.v_x)
        - sigma_prime(m, c.v) * c.v_x
        - sigma_prime(m, r.v) * r.v_x
    )
    return -bracket - ans.mu * r.u_xx + q2


def source_h(ans: WaveAnsatz, x, t):
    """Momentum remainder ``H`` of the composite wave."""
    c, r = pieces(ans, x, t)
    _, q2 = sources_q(ans, x, t)
    return _source_h(ans, c, r, q2)


def contact_excess(ans: WaveAnsatz, x, t):
    """``-(sigma'(v^c) - b) v^c_x``: the part of the contact momentum residual
    not captured by ``Q2``. It vanishes wherever ``|v^c| <= a``."""
    c = contact(ans, x, t)
    return -(sigma_prime(ans.model, c.v) - ans.model.b) * c.v_x


def momentum_residual(ans: WaveAnsatz, x, t):
    """Exact residual ``u_t - sigma(v)_x - mu u_xx`` of the composite wave,
    equal to ``H`` plus :func:`contact_excess`."""
    c, r = pieces(ans, x, t)
    _, q2 = sources_q(ans, x, t)
    excess = -(sigma_prime(ans.model, c.v) - ans.model.b) * c.v_x
    return _source_h(ans, c, r, q2) + excess


def w1w2(ans: WaveAnsatz, x, t):
    """Diagonal variables of the contact wave, ``w1 = c Xi_2x`` and ``w2 = Xi_2``."""
    dw = ans.diffusion
    return ans.correction * xi2(dw, x, t, 1), xi2(dw, x, t, 0)


def profile_columns(ans: WaveAnsatz, x, t) -> dict:
    """Snapshot table of the composite wave and its pieces."""
    x = np.asarray(x, dtype=float)
    c, r = pieces(ans, x, t)
    q1, q2 = sources_q(ans, x, t)
    h = _source_h(ans, c, r, q2)
    return {
        "x": x,
        "v_hat": c.v + r.v - ans.model.a,
        "u_hat": c.u + r.u - ans.data.u_a,
        "v_c": c.v,
        "u_c": c.u,
        "v_r": r.v,
        "u_r": r.u,
        "Q1": q1,
        "H": h,
    }

