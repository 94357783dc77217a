"""Piecewise non-convex stress law.

The stress is linear on the elastic band ``|v| < a`` and bends quadratically
outside it::

    sigma(v) = b v + k (v - a)^2     v >= a      (convex branch)
    sigma(v) = b v                   |v| <= a    (linear band)
    sigma(v) = b v - k (v + a)^2     v <= -a     (concave branch)

``sigma'`` is continuous everywhere, ``sigma''`` jumps from 0 to ``+-2k`` at
``v = +-a``. On the convex branch the characteristic speed
``lambda2 = sqrt(sigma')`` can be inverted and integrated in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# Allowed round-off deficit when inverting speeds at the joint w = sqrt(b).
_JOINT_RTOL = 1e-12


@dataclass(frozen=True)
class StressModel:
    """Parameters of the stress law.

    Parameters
    ----------
    a : float
        Strain threshold of the linear band, ``a > 0``.
    b : float
        Modulus of the linear band, ``b > 0``.
    k : float
        Curvature of the nonlinear branches. ``k = 0`` gives a globally
        linear law (useful for linear-stability checks); every construction
        involving the rarefaction wave requires ``k > 0``.
    """

    a: float = 1.0
    b: float = 1.0
    k: float = 0.5

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"strain threshold a must be positive, got {self.a}")
        if not self.b > 0:
            raise DomainError(f"modulus b must be positive, got {self.b}")
        if not self.k >= 0:
            raise DomainError(f"curvature k must be non-negative, got {self.k}")

    @property
    def sqrt_b(self) -> float:
        return float(np.sqrt(self.b))


def sigma(m: StressModel, v):
    v = np.asarray(v, dtype=float)
    upper = m.b * v + m.k * (v - m.a) ** 2
    lower = m.b * v - m.k * (v + m.a) ** 2
    return np.where(v >= m.a, upper, np.where(v <= -m.a, lower, m.b * v))


def sigma_prime(m: StressModel, v):
    v = np.asarray(v, dtype=float)
    upper = m.b + 2.0 * m.k * (v - m.a)
    lower = m.b - 2.0 * m.k * (v + m.a)
    return np.where(v >= m.a, upper, np.where(v <= -m.a, lower, m.b))


def sigma_double_prime(m: StressModel, v):
    """Second derivative; the closed nonlinear branches own the joints ``+-a``."""
    v = np.asarray(v, dtype=float)
    return np.where(v >= m.a, 2.0 * m.k, np.where(v <= -m.a, -2.0 * m.k, 0.0))


def lambda2(m: StressModel, v):
    """Characteristic speed of the second family, ``sqrt(sigma'(v))``."""
    return np.sqrt(sigma_prime(m, v))


def lambda2_inverse(m: StressModel, w):
    """Invert ``lambda2`` on the convex branch ``v >= a``.

    Raises
    ------
    DomainError
        If ``w < sqrt(b)`` (beyond round-off) or the model has ``k = 0``.
    """
    if m.k == 0:
        raise DomainError("lambda2 is not invertible for a linear stress law (k = 0)")
    w = np.asarray(w, dtype=float)
    floor = m.sqrt_b * (1.0 - _JOINT_RTOL)
    if np.any(~(w >= floor)):
        raise DomainError(f"speed below sqrt(b) = {m.sqrt_b}: min {np.min(w)!r}")
    return m.a + np.maximum(w * w - m.b, 0.0) / (2.0 * m.k)


def _lambda2_antiderivative(m: StressModel, v):
    return (m.b + 2.0 * m.k * (v - m.a)) ** 1.5 / (3.0 * m.k)


def lambda2_primitive(m: StressModel, v_lo, v_hi):
    """Exact ``int_{v_lo}^{v_hi} lambda2(s) ds`` for ``a <= v_lo <= v_hi``.

    Arrays broadcast. Reversed limits are accepted and give the negated
    integral, which keeps additivity exact for any ordering.
    """
    v_lo = np.asarray(v_lo, dtype=float)
    v_hi = np.asarray(v_hi, dtype=float)
    if np.any(v_lo < m.a) or np.any(v_hi < m.a):
        raise DomainError(f"primitive limits must be >= a = {m.a}")
    if m.k == 0:
        return m.sqrt_b * (v_hi - v_lo)
    return _lambda2_antiderivative(m, v_hi) - _lambda2_antiderivative(m, v_lo)
