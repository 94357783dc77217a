"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion still reports its measured values.
Criterion 7 runs the full T = 200 simulation and takes several minutes.
"""

import time

import numpy as np
import pytest

from compwave.cli import main
from compwave.diagnostics import (
    DiagnosticsObserver,
    fit_decay,
    g_functional,
    g_increment,
    h1_norm,
    h_norms,
    l2_norm,
    rarefaction_gradient_norms,
    running_sup,
    sup_norm,
    weighted_l2,
)
from compwave.interaction import (
    InteractionCurves,
    check_bounds,
    check_l3,
    default_t_grid,
    no_downward_trend,
    no_upward_trend,
)
from compwave.solver import (
    Grid,
    PerturbationSpec,
    SolverConfig,
    SolverState,
    domain_for,
    initial_data,
    run,
    step,
)
from compwave.stress import sigma_prime
from compwave.verify import observed_orders, rarefaction_fd_residual
from compwave.waves import burgers_solution, contact, sources_q, xi2, xi2_t

SEED = 20240531
pytestmark = pytest.mark.acceptance


def test_c1_identities(ans, criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    x, t = rng.uniform(-20, 60, 1000), rng.uniform(0, 50, 1000)
    dw, sb, mu = ans.diffusion, ans.model.sqrt_b, ans.mu
    heat = xi2_t(dw, x, t) + sb * xi2(dw, x, t, 1) - 0.5 * mu * xi2(dw, x, t, 2)
    c = contact(ans, x, t)
    q1, q2 = sources_q(ans, x, t)
    mass = c.v_t - c.u_x - q1
    band = np.abs(c.v) <= ans.model.a
    mom = (c.u_t - sigma_prime(ans.model, c.v) * c.v_x - mu * c.u_xx - q2)[band]
    errs = [float(np.max(np.abs(r))) for r in (heat, mass, mom)]
    elapsed = time.perf_counter() - start
    ok = max(errs) <= 1e-10 and elapsed < 5.0 and band.sum() > 0
    criterion(1, "analytic identities", ok,
              f"heat {errs[0]:.1e}, mass {errs[1]:.1e}, momentum {errs[2]:.1e} "
              f"({band.sum()} pts in band), {elapsed:.2f} s")
    assert ok


def _bisection_oracle(w_minus, w_plus, x, t, width):
    mid, half = 0.5 * (w_plus + w_minus), 0.5 * (w_plus - w_minus)
    out = np.empty_like(x)
    for i, (xi, ti) in enumerate(zip(x, t)):
        lo, hi = xi - w_plus * ti, xi - w_minus * ti
        for _ in range(200):
            m = 0.5 * (lo + hi)
            if m + (mid + half * np.tanh(m / width)) * ti - xi < 0:
                lo = m
            else:
                hi = m
        out[i] = mid + half * np.tanh(0.5 * (lo + hi) / width)
    return out


def test_c2_rarefaction(ans, criterion):
    times = (1.0, 3.0, 10.0)
    x = np.concatenate([np.linspace(ans.w_minus * s - 3, ans.w_plus * s + 3, 40) for s in times])
    t = np.repeat(times, 40)
    errs = [rarefaction_fd_residual(ans, x, t, h) for h in (1e-2, 5e-3, 2.5e-3)]
    orders = observed_orders(errs)
    rng = np.random.default_rng(SEED)
    xs, ts = rng.uniform(-10, 40, 300), rng.uniform(0, 20, 300)
    w = burgers_solution(ans.w_minus, ans.w_plus, xs, ts, ans.width).w
    root_err = float(np.max(np.abs(w - _bisection_oracle(ans.w_minus, ans.w_plus, xs, ts, ans.width))))
    ok = bool(np.all(np.abs(orders - 2.0) <= 0.2)) and root_err <= 1e-10
    criterion(2, "rarefaction exactness", ok,
              f"orders {np.round(orders, 4).tolist()}, root finder vs bisection {root_err:.1e}")
    assert ok


def test_c3_rarefaction_envelopes(ans, criterion):
    ts = np.logspace(0, 4, 50)
    l1, linf = map(np.array, zip(*(rarefaction_gradient_norms(ans, t) for t in ts)))
    s1 = fit_decay(ts, l1).exponent
    sinf = fit_decay(ts, linf * (1 + ts)).exponent
    ok = abs(s1) <= 0.1 and abs(sinf) <= 0.1
    criterion(3, "rarefaction gradient envelopes", ok,
              f"slope L1 {s1:+.4f}, slope Linf*(1+t) {sinf:+.4f} (tolerance 0.1); "
              f"Linf*(1+t) ranges {np.min(linf * (1 + ts)):.3f}..{np.max(linf * (1 + ts)):.3f}")
    assert ok


def test_c4_interaction_bounds(ans, criterion):
    start = time.perf_counter()
    curves = InteractionCurves(ans, beta=0.25, eps=0.25)
    grid = default_t_grid(50, 1e4)
    checks = [check_bounds(curves, float(t)) for t in grid]
    held = np.array([c.l1_lower and c.l1_upper and c.z1_lower and c.z1_below_x1 for c in checks])
    # Operational T0: first sample after the last failure (none if the last sample fails).
    t0 = None
    if held[-1]:
        t0 = float(grid[len(held) - int(np.argmin(held[::-1]))]) if not held.all() else float(grid[0])
    detail = []
    ok = t0 is not None and t0 <= 100.0
    if t0 is not None:
        late = [c for c in checks if c.t >= t0]
        reps = [check_l3(curves, c.t) for c in late]
        l3_ok = len(reps) >= 4 and no_upward_trend([r.upper_slack for r in reps]) \
            and no_downward_trend([r.lower_slack for r in reps])
        ok = ok and l3_ok
        detail.append(f"T0 = {t0:.4g}, l3 slacks bounded: {l3_ok}")
    else:
        detail.append("no T0 on [1, 1e4]: bounds fail at t = 1e4")
    l1_first = next((c.t for c in checks if c.l1_lower), None)
    z1_fail = sum(not c.z1_lower for c in checks)
    last = checks[-1]
    m1 = last.z1 - (curves.ans.model.sqrt_b * last.t) - np.sqrt(0.25 * np.log1p(last.t)) * curves.width(last.t)
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 30.0
    detail.append(f"X1 window lower bound first holds at t = {l1_first}")
    detail.append(f"Z1 lower bound fails at {z1_fail}/50 samples; Z1 - M1 at t = 1e4: {m1:.3f}")
    detail.append(f"{elapsed:.1f} s")
    criterion(4, "interaction-curve bounds", ok, "; ".join(detail))
    assert ok


def test_c5_source_envelopes(ans, criterion):
    eps = 0.25
    ts = np.logspace(1, 3, 20)
    norms = [h_norms(ans, t) for t in ts]
    l1 = np.array([h.l1 for h in norms]) * (1 + ts) ** (0.5 + 1 / (2 * (1 + eps))) / np.sqrt(np.log(2 + ts))
    linf = np.array([h.linf for h in norms]) * np.sqrt(1 + ts)
    s1, sinf = fit_decay(ts, l1).exponent, fit_decay(ts, linf).exponent
    interp = max(h.l2 / np.sqrt(h.l1 * h.linf) for h in norms)
    ok = s1 <= 0.05 and sinf <= 0.05 and interp <= 1 + 1e-10
    criterion(5, "source-term envelopes", ok,
              f"slope L1 {s1:+.4f}, slope Linf {sinf:+.4f}, max L2/sqrt(L1 Linf) {interp:.6f}")
    assert ok


class _Constant:
    def __init__(self, model, mu, v0, u0):
        self.model, self.mu, self.v0, self.u0 = model, mu, v0, u0

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, self.v0), np.full_like(x, self.u0)


def test_c6_solver(ans, criterion):
    m = ans.model
    # Fixed point.
    g = Grid(-10.0, 10.0, 401)
    v0 = 0.3
    bc = _Constant(m, ans.mu, v0, -m.sqrt_b * v0)
    s = SolverState(0.0, np.full(g.n, v0), np.full(g.n, -m.sqrt_b * v0), g)
    fp = 0.0
    for _ in range(10):
        s_new = step(s, SolverConfig(), bc)
        fp = max(fp, float(np.max(np.abs(s_new.v - s.v))), float(np.max(np.abs(s_new.u - s.u))))
        s = s_new
    # Conservation on the default grid spacing.
    T = 10.0
    xl, xr = domain_for(ans, T)
    out = run(initial_data(ans, Grid.from_spacing(xl, xr, 0.05), PerturbationSpec()), SolverConfig(T=T), ans)
    drift = abs(out.mass_change - out.boundary_flux) / T
    # Self-convergence under grid halving, compared on the coarse nodes.
    finals = []
    for h in (0.2, 0.1, 0.05):
        st = initial_data(ans, Grid.from_spacing(-20.0, 40.0, h), PerturbationSpec())
        finals.append(run(st, SolverConfig(T=2.0, snapshot_dt=2.0), ans).state)
    d1 = finals[0].v - finals[1].v[::2]
    d2 = finals[1].v[::2] - finals[2].v[::4]
    e1 = [l2_norm(d1, 0.2), l2_norm(finals[0].u - finals[1].u[::2], 0.2)]
    e2 = [l2_norm(d2, 0.2), l2_norm(finals[1].u[::2] - finals[2].u[::4], 0.2)]
    orders = np.log2(np.array(e1) / np.array(e2))
    ok = fp <= 1e-14 and drift <= 1e-8 and bool(np.all(np.abs(orders - 2.0) <= 0.2))
    criterion(6, "solver correctness", ok,
              f"fixed point {fp:.1e}/step, drift {drift:.1e}/unit time, orders (v, u) {np.round(orders, 3).tolist()}")
    assert ok


def test_c7_stability_surrogate(ans, criterion):
    T = 200.0
    start = time.perf_counter()
    xl, xr = domain_for(ans, T)
    grid = Grid.from_spacing(xl, xr, 0.05)
    state = initial_data(ans, grid, PerturbationSpec(amplitude=0.1, center=0.0, radius=2.0))
    obs = DiagnosticsObserver(ans, track_curves=False)
    run(state, SolverConfig(cfl=0.4, T=T, snapshot_dt=1.0), ans, [obs])
    elapsed = time.perf_counter() - start
    recs = obs.records
    sup = np.array([max(r.sup_phi, r.sup_psi) for r in recs])
    n_h1 = running_sup(np.hypot([r.h1_phi for r in recs], [r.h1_psi for r in recs]))
    _, g, _ = g_functional(recs)
    sup_ok = sup[-1] <= 0.2 * sup[0]
    n_ok = n_h1[-1] <= 2.0 * n_h1[0]
    g_ok = bool(np.all(np.isfinite(g)) and np.all(np.diff(g) >= 0))
    ok = sup_ok and n_ok and g_ok
    criterion(7, "stability surrogate (T = 200)", ok,
              f"sup ratio {sup[-1] / sup[0]:.3f} (need <= 0.2), peak sup {sup.max():.3f} at t = {recs[int(sup.argmax())].t:g}; "
              f"N(T)/N(0) {n_h1[-1] / n_h1[0]:.3f} (need <= 2); G finite and nondecreasing: {g_ok}; {elapsed:.0f} s")
    assert ok


def test_c8_homogeneity(ans, criterion):
    rng = np.random.default_rng(SEED)
    h = 0.05
    x = np.arange(-20.0, 60.0, h)
    f, g = rng.normal(size=x.size), rng.normal(size=x.size)
    errs = []
    for c in (2.5, -0.3, 1e3):
        errs.append(abs(l2_norm(c * f, h) / (abs(c) * l2_norm(f, h)) - 1))
        errs.append(abs(h1_norm(c * f, h) / (abs(c) * h1_norm(f, h)) - 1))
        errs.append(abs(sup_norm(c * f) / (abs(c) * sup_norm(f)) - 1))
        errs.append(abs(weighted_l2(ans, x, 5.0, c * f, c * g, h) / (c * c * weighted_l2(ans, x, 5.0, f, g, h)) - 1))
    # Region membership depends on phi itself, so the quadratic scaling of the
    # G increment is exact only for phi >= 0 supported where v_hat > a.
    t = 5.0
    v_hat = ans(x, t)[0]
    phi = np.where(v_hat > ans.model.a + 1e-3, np.abs(f), 0.0)
    base = g_increment(ans, x, t, v_hat, phi, h)
    for c in (0.5, 2.0, 7.0):
        errs.append(abs(g_increment(ans, x, t, v_hat, c * phi, h) / (c * c * base) - 1))
    ts = np.logspace(0, 3, 30)
    vals = 1.7 * (1 + ts) ** -0.6 * (1 + 0.1 * np.sin(ts))
    f0 = fit_decay(ts, vals)
    for c in (3.0, 1e-4):
        fc = fit_decay(ts, c * vals)
        errs.append(abs(fc.exponent - f0.exponent))
        errs.append(abs(fc.constant / (c * f0.constant) - 1))
    worst = max(errs)
    ok = worst <= 1e-13
    criterion(8, "diagnostic homogeneity", ok, f"worst relative deviation {worst:.1e} over {len(errs)} checks")
    assert ok


def test_c9_determinism(tmp_path, criterion):
    base = ["--set", "solver.T=3", "--set", "grid.h=0.1", "--set", "grid.x_left=-20",
            "--set", "grid.x_right=40", "--set", "verification.t_samples=20", "--set", "verification.t_max=1000"]
    dirs = []
    for run_id in ("a", "b"):
        d = tmp_path / run_id
        for cmd in (["profile", "--time", "5"], ["simulate"], ["verify"]):
            main(["--set", f"output.directory={d}", *base, *cmd])
        dirs.append(d)
    names = sorted(p.name for p in dirs[0].glob("*.csv"))
    same = names == sorted(p.name for p in dirs[1].glob("*.csv")) and len(names) >= 4
    same = same and all((dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes() for n in names)
    criterion(9, "determinism", same, f"{len(names)} CSV files compared byte for byte")
    assert same
