"""Far-field Riemann data and wave-configuration classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ClassificationError, DomainError, OrderingError
from .stress import StressModel, lambda2, lambda2_primitive, sigma


class CaseLabel(str, enum.Enum):
    CASE1 = "Case1"  # linear band -> convex branch: contact + rarefaction
    CASE2 = "Case2"  # concave branch -> linear band: shock
    CASE3 = "Case3"  # concave branch -> convex branch
    SINGLE_WAVE = "SingleWave"  # both states in one region


@dataclass(frozen=True)
class FarFieldData:
    """Constant states at ``x -> -inf`` and ``x -> +inf``.

    ``u_a`` is the velocity of the intermediate state ``(a, u_a)`` where the
    contact wave hands over to the rarefaction wave.
    """

    v_minus: float
    v_plus: float
    u_minus: float
    u_plus: float
    a: float
    u_a: float

    @property
    def delta(self) -> float:
        return abs(self.v_plus - self.v_minus)


def classify(m: StressModel, v_minus: float, v_plus: float) -> CaseLabel:
    if not v_minus < v_plus:
        raise OrderingError(f"need v_minus < v_plus, got {v_minus} >= {v_plus}")
    a = m.a
    in_band_minus = -a < v_minus < a
    if in_band_minus and v_plus >= a:
        return CaseLabel.CASE1
    if v_minus <= -a and -a < v_plus < a:
        return CaseLabel.CASE2
    if v_minus <= -a and v_plus >= a:
        return CaseLabel.CASE3
    return CaseLabel.SINGLE_WAVE


def build_case1(m: StressModel, v_minus: float, v_plus: float) -> FarFieldData:
    """Far-field data for a contact wave followed by a rarefaction wave.

    Velocities use the normalization under which the contact wave's
    diagonal variables vanish in the far field: ``u_minus = -sqrt(b) v_minus``
    and ``u_a = -sqrt(b) a``. The right state follows from the rarefaction
    relation ``u_plus = u_a - int_a^{v_plus} lambda2``.

    Raises
    ------
    ClassificationError
        Unless ``-a < v_minus < a < v_plus``.
    """
    a = m.a
    if not -a < v_minus < a:
        region = "concave branch (v <= -a)" if v_minus <= -a else "convex branch (v >= a)"
        raise ClassificationError(
            f"v_minus = {v_minus} lies in the {region}; Case 1 needs -a < v_minus < a"
        )
    if not v_plus > a:
        region = "linear band (|v| < a)" if v_plus > -a else "concave branch (v <= -a)"
        if v_plus == a:
            region = "joint v = a (no rarefaction)"
        raise ClassificationError(
            f"v_plus = {v_plus} lies at the {region}; Case 1 needs v_plus > a"
        )
    sb = m.sqrt_b
    u_a = -sb * a
    return FarFieldData(
        v_minus=float(v_minus),
        v_plus=float(v_plus),
        u_minus=-sb * v_minus,
        u_plus=float(u_a - lambda2_primitive(m, a, v_plus)),
        a=a,
        u_a=u_a,
    )


class RHResiduals(NamedTuple):
    mass: float
    momentum: float
    holds: bool


def check_rh(m: StressModel, data: FarFieldData, v_star: float, tol: float = 1e-12) -> RHResiduals:
    """Evaluate the two jump relations with speed ``lambda2(v_star)``.

    Case-1 data is resolved by two waves rather than one discontinuity, so
    nonzero residuals are expected there; ``holds`` only reports whether
    both residuals are within ``tol``.
    """
    if not min(data.v_minus, data.v_plus) <= v_star <= max(data.v_minus, data.v_plus):
        raise DomainError(f"v_star = {v_star} outside [{data.v_minus}, {data.v_plus}]")
    s = float(lambda2(m, v_star))
    dv = data.v_plus - data.v_minus
    du = data.u_plus - data.u_minus
    dsig = float(sigma(m, data.v_plus) - sigma(m, data.v_minus))
    mass = -s * dv - du
    momentum = -s * du - dsig
    return RHResiduals(mass, momentum, bool(max(abs(mass), abs(momentum)) <= tol))


def contact_data(m: StressModel, v_minus: float) -> FarFieldData:
    """Pure contact data joining ``(v_minus, u_minus)`` to ``(a, u_a)``."""
    if not -m.a < v_minus < m.a:
        raise ClassificationError(f"v_minus = {v_minus} must lie in the linear band")
    sb = m.sqrt_b
    return FarFieldData(
        v_minus=float(v_minus), v_plus=m.a, u_minus=-sb * v_minus,
        u_plus=-sb * m.a, a=m.a, u_a=-sb * m.a,
    )


def far_field_ok(m: StressModel, data: FarFieldData, tol: float = 1e-14) -> bool:
    """Check the contact and rarefaction relations of Case-1 data."""
    sb = m.sqrt_b
    checks = [
        data.u_a - data.u_minus + sb * (data.a - data.v_minus),
        data.u_minus + sb * data.v_minus,
        data.u_a + sb * data.a,
        data.u_plus - (data.u_a - float(lambda2_primitive(m, data.a, data.v_plus))),
    ]
    return bool(np.max(np.abs(checks)) <= tol)
