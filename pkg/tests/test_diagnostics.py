"""Diagnostics records, eigenvalue oracle, decay fits and inequality checks."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from mbq.coeffs import Coefficient, CoefficientModel
from mbq.diagnostics import (
    CSV_FIELDS,
    alpha_theory,
    current_l2,
    decay_fit,
    lambda1,
    lp_inequality_check,
    record,
    record_from_csv_row,
    theta_hat_residual,
)
from mbq.errors import InsufficientDataError, ParameterError
from mbq.field import Grid
from mbq.stepper import State, dissipation, step

from .conftest import POLY_MODEL, random_state, standard_state

UNIT = CoefficientModel()
KAPPA_1PZ2 = CoefficientModel(kappa=Coefficient.poly(1.0, 0.0, 1.0))

# smallest Dirichlet eigenvalue of the 5-point Laplacian: dense eigendecomposition
# at n=8 and the closed form (8/h^2) sin^2(pi h / 2) at the larger sizes
LAMBDA_DENSE_N8 = 19.486839677110623
LAMBDA_SINE = {16: 19.67587286709202, 32: 19.723359550681554, 64: 19.73524553445552}


def _sine_state(n: int, amp: float = 1.0) -> State:
    g = Grid(n)
    x, y = g.mesh
    th = amp * np.sin(np.pi * x) * np.sin(np.pi * y)
    th[g.boundary] = 0.0
    z = np.zeros(g.shape)
    return State.from_arrays(g, th, z, z, z, z)


def _synthetic(ts, values, functional="E_l2", extras=None):
    out = []
    for k, (t, v) in enumerate(zip(ts, values)):
        row = [0.0] * len(CSV_FIELDS)
        row[CSV_FIELDS.index("t")] = t
        row[CSV_FIELDS.index(functional)] = v
        r = record_from_csv_row(row)
        if extras is not None:
            r = type(r)(**{**{f: getattr(r, f) for f in CSV_FIELDS}, "extras": extras[k]})
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# records


def test_record_zero_state():
    r = record(State.zeros(Grid(8)), UNIT)
    for k in CSV_FIELDS:
        assert getattr(r, k) == 0
    assert r.extras["E_u"] == 0.0


def test_record_sine_mode_values():
    # trapezoid sums of sin^2 and sin^4 are exact on the uniform lattice, and
    # the face-based H1 seminorm of the sine mode is lambda_h / 4
    n = 32
    r = record(_sine_state(n), UNIT)
    lam = LAMBDA_SINE[n]
    assert r.E_l2 == pytest.approx(0.25, rel=1e-14)
    assert r.D_h1 == pytest.approx(lam / 4, rel=1e-13)
    assert r.H2 == pytest.approx(lam**2 / 4, rel=1e-12)
    assert r.lp2_theta == pytest.approx(0.5, rel=1e-14)
    assert r.lp4_theta == pytest.approx((9 / 64) ** 0.25, rel=1e-14)
    assert r.lpinf_theta == pytest.approx(1.0, rel=1e-15)
    assert r.theta_hat_h1 == pytest.approx(math.sqrt(lam / 4), rel=1e-13)
    assert r.mean_theta == pytest.approx(4 / np.pi**2, rel=2e-3)
    assert r.J_l2 == 0.0 and r.div_u_inf == 0.0 and r.coeff_flag == 0
    assert abs(r.cross_res) < 1e-12 * r.D_h1


def test_record_coefficient_flag():
    assert record(_sine_state(8, 1.5), UNIT).coeff_flag == 1


@pytest.mark.parametrize("model", [UNIT, POLY_MODEL], ids=["const", "poly"])
def test_cross_residual_is_roundoff(rng, model):
    s = random_state(16, rng, scale=0.3)
    r = record(s, model)
    assert abs(r.cross_res) <= 1e-12 * dissipation(s, model)


def test_current_l2_of_uniform_shear():
    # B = (y, 0) has curl -1; conducting walls pin B1 on x = 0 and x = 1,
    # which halves the cell current in the two edge columns
    n = 16
    g = Grid(n)
    x, y = g.mesh
    z = np.zeros(g.shape)
    s = State.from_arrays(g, z, z, z, y, z, bc_b="conducting")
    assert current_l2(State.zeros(g)) == 0.0
    assert current_l2(s) == pytest.approx(g.h**2 * n * (n - 2 + 2 * 0.25), rel=1e-14)


def test_budget_residual_uses_accumulated_dissipation():
    s = standard_state(16)
    r0 = record(s, UNIT)
    assert r0.budget_res == 0.0
    r1 = record(s, UNIT, prev=r0, dissipated=0.125)
    assert r1.budget_res == pytest.approx(0.125, rel=1e-14)
    with pytest.raises(ParameterError):
        record(s, UNIT, prev=r0)


def test_budget_residual_small_over_one_step():
    s = standard_state(32)
    dt = 0.25 * 0.4 * Grid(32).h ** 2 / 4
    s1, rep = step(s, dt, UNIT)
    r0 = record(s, UNIT)
    r1 = record(s1, UNIT, prev=r0, dissipated=2 * dt * rep.dissipation)
    assert abs(r1.budget_res) <= 1e-6 * r0.E_l2 * dt


# ---------------------------------------------------------------------------
# eigenvalue and rate


def test_lambda1_dense_oracle():
    assert lambda1(Grid(8)) == pytest.approx(LAMBDA_DENSE_N8, rel=1e-8)


@pytest.mark.parametrize("n", sorted(LAMBDA_SINE))
def test_lambda1_closed_form(n):
    assert lambda1(Grid(n)) == pytest.approx(LAMBDA_SINE[n], rel=1e-8)


def test_lambda1_increases_below_continuum():
    lams = [lambda1(Grid(n)) for n in (8, 16, 32, 64)]
    assert all(a < b for a, b in zip(lams, lams[1:]))
    assert lams[-1] < 2 * np.pi**2


def test_alpha_theory():
    assert alpha_theory(1.0, 19.7) == 19.7
    assert alpha_theory(2.0, 19.7) == pytest.approx(9.85, rel=1e-15)
    with pytest.raises(ParameterError):
        alpha_theory(0.5, 19.7)
    with pytest.raises(ParameterError):
        alpha_theory(1.0, 0.0)


# ---------------------------------------------------------------------------
# decay fits


def test_decay_fit_exact_exponential():
    ts = np.linspace(0.0, 1.0, 21)
    f = decay_fit(_synthetic(ts, np.exp(-4.0 * ts)), "E_l2", (0.0, 1.0))
    assert f.alpha_emp == pytest.approx(2.0, rel=1e-12)
    assert f.r_squared == pytest.approx(1.0, abs=1e-12)
    assert f.samples == 21


def test_decay_fit_constant_and_window():
    ts = np.linspace(0.0, 1.0, 41)
    f = decay_fit(_synthetic(ts, np.full(41, 3.0), "D_h1"), "D_h1", (0.25, 0.75))
    assert f.alpha_emp == pytest.approx(0.0, abs=1e-12)
    assert f.r_squared == 1.0
    assert f.window == (0.25, 0.75)


def test_decay_fit_truncates_at_underflow():
    ts = np.linspace(0.0, 1.0, 30)
    vals = np.exp(-2.0 * ts)
    vals[20:] = 0.0
    f = decay_fit(_synthetic(ts, vals), "E_l2", (0.0, 1.0))
    assert f.samples == 20
    assert f.alpha_emp == pytest.approx(1.0, rel=1e-12)


def test_decay_fit_insufficient_data():
    ts = np.linspace(0.0, 1.0, 5)
    with pytest.raises(InsufficientDataError):
        decay_fit(_synthetic(ts, np.exp(-ts)), "E_l2", (0.0, 1.0))


@settings(max_examples=40, deadline=None)
@given(rate=hs.floats(0.01, 50.0), scale=hs.floats(1e-6, 1e6))
def test_property_decay_fit_recovers_rate(rate, scale):
    ts = np.linspace(0.0, 0.5, 26)
    f = decay_fit(_synthetic(ts, scale * np.exp(-2.0 * rate * ts)), "E_l2", (0.0, 0.5))
    assert f.alpha_emp == pytest.approx(rate, rel=1e-8)


# ---------------------------------------------------------------------------
# L^p inequality


def _lp_series(theta_norm, u_norm, ts):
    extras = [{"lp2_u": u, "lp4_u": u, "lpinf_u": u} for u in u_norm]
    recs = _synthetic(ts, theta_norm, "lp2_theta", extras)
    out = []
    for r, v in zip(recs, theta_norm):
        d = {f: getattr(r, f) for f in CSV_FIELDS}
        d.update(lp4_theta=v, lpinf_theta=v)
        out.append(type(r)(**d, extras=r.extras))
    return out


@pytest.mark.parametrize("p", [2, 4, math.inf])
def test_lp_check_with_zero_velocity(p):
    ts = np.linspace(0.0, 1.0, 11)
    ok = lp_inequality_check(_lp_series(np.exp(-ts), np.zeros(11), ts), p)
    assert ok.passed and ok.worst_margin == pytest.approx(0.01, rel=1e-12)
    bad = lp_inequality_check(_lp_series(1.0 + 0.1 * ts, np.zeros(11), ts), p)
    assert not bad.passed


def test_lp_check_integrates_velocity():
    # theta grows exactly by the integral of ||u||_p = 1, so only the slack remains
    ts = np.linspace(0.0, 1.0, 11)
    rep = lp_inequality_check(_lp_series(ts, np.ones(11), ts), 2, slack=0.0)
    assert rep.passed
    assert max(abs(m) for m in rep.margins) < 1e-14


def test_lp_check_rejects_bad_input():
    ts = np.linspace(0.0, 1.0, 11)
    with pytest.raises(ParameterError):
        lp_inequality_check(_lp_series(ts, ts, ts), 3)
    with pytest.raises(InsufficientDataError):
        lp_inequality_check([], 2)
    with pytest.raises(ParameterError):
        lp_inequality_check(_synthetic(ts, ts), 2)


def test_lp_check_on_zero_theta_data():
    s = standard_state(16, amps=(0.0, 0.5, 0.5))
    from mbq.experiments import simulate

    res = simulate(s, UNIT, 0.01, sample_every=5)
    for p in (2, 4, math.inf):
        assert lp_inequality_check(res.records, p).passed


# ---------------------------------------------------------------------------
# transformed temperature residual


def test_theta_hat_residual_zero_state():
    s = State.zeros(Grid(8))
    assert theta_hat_residual(s, s, 1e-3, KAPPA_1PZ2) == 0.0
    with pytest.raises(ParameterError):
        theta_hat_residual(s, s, 0.0, KAPPA_1PZ2)


def test_theta_hat_residual_unit_kappa_is_second_order_in_dt():
    # with kappa = 1 the transformed equation is the discrete one; the Heun
    # update differs from the endpoint average by half the gap between the
    # predictor and the corrector, which is O(dt^2)
    s = standard_state(16)
    res = []
    for dt in (1e-5, 1e-6):
        s1, _ = step(s, dt, UNIT)
        res.append(theta_hat_residual(s, s1, dt, UNIT))
    assert res[0] / res[1] == pytest.approx(100.0, rel=0.05)
    assert res[1] < 1e-3


def test_theta_hat_residual_second_order_in_h():
    res = []
    for n in (16, 32, 64):
        s = standard_state(n)
        s1, _ = step(s, 1e-7, KAPPA_1PZ2)
        res.append(theta_hat_residual(s, s1, 1e-7, KAPPA_1PZ2))
    assert all(a / b > 3.5 for a, b in zip(res, res[1:]))
