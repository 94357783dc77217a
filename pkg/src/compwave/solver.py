"""Method-of-lines solver for ``v_t = u_x``, ``u_t = sigma(v)_x + mu u_xx``.

Second-order centered differences in space, classical RK4 in time, and
Dirichlet boundary values taken from a time-dependent boundary function
(normally the composite wave itself).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .errors import BlowUpError, ConfigError
from .stress import StressModel, lambda2, sigma

# Values beyond this are treated as overflow even if still finite.
_OVERFLOW = 1e150


@dataclass(frozen=True)
class Grid:
    x_left: float
    x_right: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise ConfigError(f"grid needs at least 16 nodes, got {self.n}")
        if not self.x_right > self.x_left:
            raise ConfigError("grid needs x_right > x_left")

    @classmethod
    def from_spacing(cls, x_left: float, x_right: float, h: float) -> "Grid":
        """Uniform grid of spacing ``h`` starting at ``x_left``; ``x_right`` is
        moved outward to the nearest node."""
        n = int(np.ceil((x_right - x_left) / h - 1e-9)) + 1
        return cls(x_left, x_left + (n - 1) * h, n)

    @property
    def h(self) -> float:
        return (self.x_right - self.x_left) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_left, self.x_right, self.n)


@dataclass(frozen=True)
class SolverConfig:
    cfl: float = 0.4
    T: float = 200.0
    snapshot_dt: float = 1.0

    def __post_init__(self):
        if not 0 < self.cfl <= 0.9:
            raise ConfigError(f"cfl must lie in (0, 0.9], got {self.cfl}")
        if not (np.isfinite(self.T) and self.T >= 0):
            raise ConfigError(f"end time must be finite and >= 0, got {self.T}")
        if not self.snapshot_dt > 0:
            raise ConfigError(f"snapshot cadence must be positive, got {self.snapshot_dt}")


@dataclass(frozen=True)
class SolverState:
    t: float
    v: np.ndarray
    u: np.ndarray
    grid: Grid

    def __post_init__(self):
        if self.v.shape != (self.grid.n,) or self.u.shape != (self.grid.n,):
            raise ConfigError("field lengths must equal the grid size")


@dataclass(frozen=True)
class PerturbationSpec:
    """Smooth bump ``A exp(1 / (q - 1))``, ``q = ((x - c)/r)^2 < 1``, added to
    both fields. ``amplitude_u`` defaults to ``amplitude``."""

    amplitude: float = 0.1
    center: float = 0.0
    radius: float = 2.0
    amplitude_u: float | None = None

    def bump(self, x, amplitude=None):
        amp = self.amplitude if amplitude is None else amplitude
        q = ((np.asarray(x, dtype=float) - self.center) / self.radius) ** 2
        inside = q < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            out = np.exp(1.0 / np.where(inside, q - 1.0, -1.0))
        return np.where(inside, amp * out, 0.0)

    def fields(self, x):
        amp_u = self.amplitude if self.amplitude_u is None else self.amplitude_u
        return self.bump(x), self.bump(x, amp_u)


def domain_for(ans, T: float, margin_widths: float = 20.0):
    """Domain that keeps both wave tails away from the boundary up to time ``T``."""
    spread = margin_widths * np.sqrt(2.0 * ans.mu * (1.0 + T))
    return -spread, ans.w_plus * (1.0 + T) + spread


def initial_data(ans, grid: Grid, perturbation: PerturbationSpec | None = None) -> SolverState:
    """Composite wave at ``t = 0`` plus a bump perturbation."""
    x = grid.x
    v_hat, u_hat = ans(x, 0.0)
    if perturbation is None or perturbation.amplitude == 0 and not perturbation.amplitude_u:
        return SolverState(0.0, np.array(v_hat, dtype=float), np.array(u_hat, dtype=float), grid)
    margin = 0.1 * (grid.x_right - grid.x_left)
    lo = perturbation.center - perturbation.radius
    hi = perturbation.center + perturbation.radius
    if lo < grid.x_left + margin or hi > grid.x_right - margin:
        raise ConfigError(
            f"perturbation support [{lo:g}, {hi:g}] must stay {margin:g} inside "
            f"[{grid.x_left:g}, {grid.x_right:g}]"
        )
    phi0, psi0 = perturbation.fields(x)
    return SolverState(0.0, v_hat + phi0, u_hat + psi0, grid)


def rhs_interior(v, u, h, model: StressModel, mu: float):
    """Semi-discrete right-hand side at the interior nodes ``1..n-2``."""
    s = sigma(model, v)
    inv2h = 0.5 / h
    dv = (u[2:] - u[:-2]) * inv2h
    du = (s[2:] - s[:-2]) * inv2h + mu * (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    return dv, du


def rk4_interior(v, u, dt, h, model, mu, rhs=rhs_interior):
    """One RK4 step of the interior nodes; boundary nodes are held fixed."""

    def shifted(base, k, c):
        out = base.copy()
        out[1:-1] += c * k
        return out

    k1v, k1u = rhs(v, u, h, model, mu)
    k2v, k2u = rhs(shifted(v, k1v, 0.5 * dt), shifted(u, k1u, 0.5 * dt), h, model, mu)
    k3v, k3u = rhs(shifted(v, k2v, 0.5 * dt), shifted(u, k2u, 0.5 * dt), h, model, mu)
    k4v, k4u = rhs(shifted(v, k3v, dt), shifted(u, k3u, dt), h, model, mu)
    v_new = shifted(v, k1v + 2.0 * k2v + 2.0 * k3v + k4v, dt / 6.0)
    u_new = shifted(u, k1u + 2.0 * k2u + 2.0 * k3u + k4u, dt / 6.0)
    return v_new, u_new


def stable_dt(state: SolverState, cfg: SolverConfig, model: StressModel, mu: float) -> float:
    h = state.grid.h
    speed = float(np.max(lambda2(model, state.v)))
    return cfg.cfl * min(h / speed, h * h / (2.0 * mu))


def _check_finite(v, u, t_last):
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(u))) or max(
        np.max(np.abs(v)), np.max(np.abs(u))
    ) > _OVERFLOW:
        raise BlowUpError(f"non-finite fields after t = {t_last:g}", last_valid_time=t_last)


def step(state: SolverState, cfg: SolverConfig, ans, dt: float | None = None) -> SolverState:
    """Advance one RK4 step.

    ``ans`` supplies ``model``, ``mu`` and boundary values through
    ``ans(x, t) -> (v, u)``. ``dt`` overrides the CFL step when given.

    Raises
    ------
    BlowUpError
        If the new fields are non-finite or overflow.
    """
    if dt is None:
        dt = stable_dt(state, cfg, ans.model, ans.mu)
    grid = state.grid
    v_new, u_new = rk4_interior(state.v, state.u, dt, grid.h, ans.model, ans.mu)
    t_new = state.t + dt
    xb = np.array([grid.x_left, grid.x_right])
    vb, ub = ans(xb, t_new)
    v_new[0], v_new[-1] = vb
    u_new[0], u_new[-1] = ub
    _check_finite(v_new, u_new, state.t)
    return SolverState(t_new, v_new, u_new, grid)


class RunSummary(NamedTuple):
    state: SolverState
    n_steps: int
    dt: float
    snapshot_times: list
    mass_change: float
    boundary_flux: float


def run(
    state: SolverState,
    cfg: SolverConfig,
    ans,
    observers: Iterable[Callable[[SolverState], None]] = (),
) -> RunSummary:
    """Integrate to ``cfg.T``, calling each observer at every snapshot time.

    Steps are shortened to land exactly on snapshot times. The summary
    carries the change of the trapezoidal integral of ``v`` and the
    time-integrated boundary flux ``u(x_right) - u(x_left)``; the two agree
    up to time-integration error for a conservative first equation.
    """
    observers = list(observers)
    for obs in observers:
        obs(state)
    times = [state.t]
    h = state.grid.h
    mass0 = float(np.trapezoid(state.v, dx=h))
    flux = 0.0
    n_steps = 0
    dt_nominal = stable_dt(state, cfg, ans.model, ans.mu) if cfg.T > 0 else 0.0
    n_snap = int(np.floor(cfg.T / cfg.snapshot_dt + 1e-9))
    targets = [cfg.snapshot_dt * (i + 1) for i in range(n_snap)]
    if cfg.T > 0 and (not targets or targets[-1] < cfg.T - 1e-12):
        targets.append(cfg.T)
    for target in targets:
        while state.t < target - 1e-12:
            dt = min(stable_dt(state, cfg, ans.model, ans.mu), target - state.t)
            old_jump = state.u[-1] - state.u[0]
            state = step(state, cfg, ans, dt)
            flux += 0.5 * dt * (old_jump + state.u[-1] - state.u[0])
            n_steps += 1
        state = replace(state, t=float(target))
        times.append(state.t)
        for obs in observers:
            obs(state)
    mass_change = float(np.trapezoid(state.v, dx=h)) - mass0
    return RunSummary(state, n_steps, dt_nominal, times, mass_change, flux)
