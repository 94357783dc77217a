import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compwave.errors import DomainError
from compwave.verify import observed_orders, rarefaction_fd_residual
from compwave.waves import (
    DiffusionWave,
    WaveAnsatz,
    ansatz,
    ansatz_profile,
    burgers_solution,
    contact,
    contact_excess,
    exact_fan,
    momentum_residual,
    profile_columns,
    rarefaction,
    source_h,
    sources_q,
    xi2,
    xi2_t,
)


def test_burgers_satisfies_pde():
    x = np.linspace(-5, 15, 201)
    t, e = 4.0, 1e-5
    s = burgers_solution(1.0, 1.5, x, t)
    wt = (burgers_solution(1.0, 1.5, x, t + e).w - burgers_solution(1.0, 1.5, x, t - e).w) / (2 * e)
    np.testing.assert_allclose(wt + s.w * s.w_x, 0.0, atol=1e-8)


def test_burgers_derivatives_fd():
    x = np.linspace(-5, 15, 201)
    e = 1e-5
    s = burgers_solution(1.0, 1.5, x, 3.0)
    wp, wm = burgers_solution(1.0, 1.5, x + e, 3.0), burgers_solution(1.0, 1.5, x - e, 3.0)
    np.testing.assert_allclose(s.w_x, (wp.w - wm.w) / (2 * e), atol=1e-9)
    np.testing.assert_allclose(s.w_xx, (wp.w_x - wm.w_x) / (2 * e), atol=1e-8)


def test_burgers_monotone_and_bounded():
    x = np.linspace(-50, 80, 1001)
    s = burgers_solution(1.0, 1.4, x, 10.0)
    assert np.all(np.diff(s.w) >= 0)
    assert np.all((s.w >= 1.0) & (s.w <= 1.4))


def test_equal_states_give_constant():
    s = burgers_solution(1.2, 1.2, np.linspace(-3, 3, 11), 2.0)
    np.testing.assert_array_equal(s.w, 1.2)
    np.testing.assert_array_equal(s.w_x, 0.0)


def test_approaches_fan():
    t = 1e3
    xi = np.linspace(0.7, 1.7, 101)
    err = np.abs(burgers_solution(1.0, 1.4, xi * t, t).w - exact_fan(1.0, 1.4, xi * t, t))
    assert err.max() < 5e-3


def test_fan_needs_positive_time():
    with pytest.raises(DomainError):
        exact_fan(1.0, 1.4, 0.0, 0.0)


def test_heat_identity(ans, rng):
    x, t = rng.uniform(-20, 60, 500), rng.uniform(0, 50, 500)
    dw = ans.diffusion
    res = xi2_t(dw, x, t) + ans.model.sqrt_b * xi2(dw, x, t, 1) - 0.5 * ans.mu * xi2(dw, x, t, 2)
    assert np.max(np.abs(res)) < 1e-12


@pytest.mark.parametrize("order", [0, 1, 2, 3])
def test_xi2_space_derivatives_fd(ans, order):
    dw = ans.diffusion
    x, e = np.linspace(-6, 8, 57), 1e-5
    fd = (xi2(dw, x + e, 2.0, order) - xi2(dw, x - e, 2.0, order)) / (2 * e)
    np.testing.assert_allclose(xi2(dw, x, 2.0, order + 1), fd, atol=1e-7)


def test_xi2_limits(ans):
    dw = ans.diffusion
    assert xi2(dw, -1e3, 1.0) == pytest.approx(ans.data.v_minus, abs=1e-15)
    assert xi2(dw, 1e3, 1.0) == pytest.approx(ans.model.a, abs=1e-15)


def test_contact_mass_identity(ans, rng):
    x, t = rng.uniform(-20, 60, 500), rng.uniform(0, 50, 500)
    c = contact(ans, x, t)
    q1, _ = sources_q(ans, x, t)
    assert np.max(np.abs(c.v_t - c.u_x - q1)) < 1e-12


def test_contact_excess_vanishes_in_band(ans):
    x = np.linspace(-20, 20, 401)
    c = contact(ans, x, 3.0)
    band = np.abs(c.v) <= ans.model.a
    assert np.all(contact_excess(ans, x, 3.0)[band] == 0.0)


def test_rarefaction_fd_order(ans):
    t = np.full(60, 3.0)
    x = np.linspace(0, 8, 60)
    errs = [rarefaction_fd_residual(ans, x, t, h) for h in (1e-2, 5e-3, 2.5e-3)]
    np.testing.assert_allclose(observed_orders(errs), 2.0, atol=0.2)


def test_rarefaction_far_field(ans):
    r = rarefaction(ans, np.array([-200.0, 400.0]), 5.0)
    np.testing.assert_allclose(r.v, [ans.model.a, ans.data.v_plus], atol=1e-12)
    np.testing.assert_allclose(r.u, [ans.data.u_a, ans.data.u_plus], atol=1e-12)


def test_ansatz_far_field(ans):
    v, u = ansatz(ans, np.array([-200.0, 400.0]), 0.0)
    np.testing.assert_allclose(v, [ans.data.v_minus, ans.data.v_plus], atol=1e-10)
    np.testing.assert_allclose(u, [ans.data.u_minus, ans.data.u_plus], atol=1e-10)


def test_ansatz_monotone(ans):
    v, _ = ansatz(ans, np.linspace(-40, 60, 2001), 10.0)
    assert np.all(np.diff(v) > -1e-15)


def test_profile_derivatives_fd(ans):
    x, t, e = np.linspace(-10, 20, 121), 2.5, 1e-5
    p = ansatz_profile(ans, x, t)
    np.testing.assert_allclose(p.v_x, (ansatz(ans, x + e, t)[0] - ansatz(ans, x - e, t)[0]) / (2 * e), atol=1e-8)
    np.testing.assert_allclose(p.u_t, (ansatz(ans, x, t + e)[1] - ansatz(ans, x, t - e)[1]) / (2 * e), atol=1e-8)


def test_momentum_residual_is_h_plus_excess(ans):
    x = np.linspace(-10, 20, 301)
    np.testing.assert_allclose(momentum_residual(ans, x, 1.0),
                               source_h(ans, x, 1.0) + contact_excess(ans, x, 1.0), atol=1e-15)


def test_profile_columns(ans):
    cols = profile_columns(ans, np.linspace(-5, 5, 11), 1.0)
    assert list(cols) == ["x", "v_hat", "u_hat", "v_c", "u_c", "v_r", "u_r", "Q1", "H"]


@settings(max_examples=30, deadline=None)
@given(st.floats(0.6, 0.95), st.floats(0.1, 2.0))
def test_contact_in_band_is_linear(vm, mu):
    from compwave.riemann import build_case1
    from compwave.stress import StressModel

    m = StressModel(1.0, 1.0, 0.5)
    a = WaveAnsatz(m, build_case1(m, vm, 2.0), mu)
    # Small jumps keep v^c inside the linear band, where the residual is Q2.
    x = np.linspace(-10, 10, 81)
    c = contact(a, x, 5.0)
    if np.all(np.abs(c.v) <= m.a):
        _, q2 = sources_q(a, x, 5.0)
        assert np.max(np.abs(c.u_t - m.b * c.v_x - mu * c.u_xx - q2)) < 1e-12


def test_ansatz_needs_convexity(data):
    from compwave.stress import StressModel

    with pytest.raises(DomainError):
        WaveAnsatz(StressModel(1.0, 1.0, 0.0), data, 0.5)


def test_diffusion_wave_scales(ans):
    z, s = ans.diffusion.scales(np.array([1.0]), 1.0)
    assert s == pytest.approx(np.sqrt(2 * ans.mu * 2.0))
    assert isinstance(ans.diffusion, DiffusionWave)
