"""Initial data, manufactured solutions, the run loop and the studies."""

from __future__ import annotations

import math

import numpy as np
import pytest

from mbq.cli_io.config import config_from_dict
from mbq.coeffs import CoefficientModel
from mbq.diagnostics import CSV_FIELDS, record_from_csv_row
from mbq.errors import ParameterError
from mbq.experiments import (
    ConvergenceTable,
    InitialCondition,
    RunResult,
    exact_arrays,
    mean_drift_constant,
    run_config,
    run_decay,
    run_mms,
    run_stability,
    simulate,
)
from mbq.field import Grid
from mbq.field import stencils as st

from .conftest import BC_PAIRS, standard_state

UNIT = CoefficientModel()


def _cfg(**kw):
    base = {"n": 16, "t_final": 0.01, "sample_every": 5}
    base.update(kw)
    return config_from_dict(base)


# ---------------------------------------------------------------------------
# initial condition


@pytest.mark.parametrize("bc_theta,bc_b", BC_PAIRS)
def test_initial_condition_is_divergence_free(bc_theta, bc_b):
    s = standard_state(16, bc_theta, bc_b)
    h = s.grid.h
    assert np.abs(st.div_cell(s.u.x.values, s.u.y.values, h)).max() < 1e-12
    assert np.abs(st.div_cell(s.b_field.x.values, s.b_field.y.values, h)).max() < 1e-12
    assert s.divergence_ok()


def test_initial_condition_amplitudes_scale_linearly():
    a = standard_state(16, amps=(1.0, 0.5, 0.5))
    b = standard_state(16, amps=(2.0, 1.0, 1.0))
    for x, y in zip(a.arrays(), b.arrays()):
        assert np.allclose(2 * x, y, rtol=0, atol=1e-15)
    assert a.theta.values.max() == pytest.approx(1.0, rel=1e-15)


def test_initial_condition_perturbation_and_name():
    g = Grid(16)
    a = InitialCondition().build(g)
    b = InitialCondition().build(g, theta_perturbation=1e-3)
    d = b.theta.values - a.theta.values
    x, y = g.mesh
    assert np.allclose(d, 1e-3 * np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y), atol=1e-18)
    assert np.array_equal(a.u.x.values, b.u.x.values)
    with pytest.raises(ParameterError):
        InitialCondition("vortex").build(g)


def test_projected_velocity_close_to_continuum():
    g = Grid(64)
    s = standard_state(64, amps=(0.0, 1.0, 0.0))
    ref = exact_arrays(g, 0.0)
    assert np.abs(s.u.x.values - ref[1]).max() < 0.05 * np.abs(ref[1]).max()


# ---------------------------------------------------------------------------
# manufactured solutions


def test_convergence_table_orders():
    t = ConvergenceTable("continuous_forcing", [8, 16, 32], [1 / 8, 1 / 16, 1 / 32],
                         [(4.0, 4.0, 8.0), (1.0, 1.0, 2.0), (0.25, 0.25, 0.5)])
    assert t.min_order() == pytest.approx(2.0, rel=1e-14)
    assert t.fitted_order == pytest.approx((2.0, 2.0, 2.0), rel=1e-12)
    assert t.monotone


def test_mms_zero_amplitude_is_exact():
    tab = run_mms([8, 16], "continuous_forcing", 1e-3, amplitude=0.0)
    assert all(e == (0.0, 0.0, 0.0) for e in tab.errors)


def test_mms_discrete_forcing_time_order():
    tab = run_mms([16, 32, 64], "discrete_forcing", 0.02, n_time=8)
    assert tab.monotone
    assert tab.min_order() > 1.9


def test_mms_spatial_small_levels():
    tab = run_mms([8, 16], "continuous_forcing", 2e-3)
    assert tab.monotone
    assert tab.min_order() > 1.5


def test_mms_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        run_mms([8], "weak")
    with pytest.raises(ParameterError):
        run_mms([8], t_final=0.0)


# ---------------------------------------------------------------------------
# run loop


def test_simulate_lands_on_t_final_and_samples():
    s = standard_state(16)
    res = simulate(s, UNIT, 0.003, sample_every=4)
    assert res.final.t == pytest.approx(0.003, rel=1e-12)
    assert res.records[0].t == 0.0 and res.records[-1].t == res.final.t
    assert len(res.records) == 1 + math.ceil(res.steps / 4)
    assert res.energy_monotone and res.max_cfl_ratio <= 1.0


def test_simulate_callbacks():
    seen, steps = [], []
    res = simulate(standard_state(16), UNIT, 0.002, sample_every=3,
                   on_sample=lambda r, s: seen.append(r.t), on_step=lambda s, r: steps.append(s.t))
    assert len(steps) == res.steps
    assert seen == [r.t for r in res.records]


def test_run_config_rejects_large_dt():
    with pytest.raises(ParameterError):
        run_config(_cfg(dt=1e-2))


def test_run_is_deterministic():
    cfg = _cfg()
    _, a = run_config(cfg)
    _, b = run_config(cfg)
    assert [r.csv_values() for r in a.records] == [r.csv_values() for r in b.records]


# ---------------------------------------------------------------------------
# studies


def test_decay_zero_data_passes():
    rep = run_decay(_cfg(initial_condition={"amplitudes": [0.0, 0.0, 0.0]}))
    assert rep.passed
    assert rep.max_energy_increase == 0.0
    assert math.isnan(rep.fits["E_l2"]["alpha_emp"])


def test_decay_short_run_checks():
    rep = run_decay(_cfg(t_final=0.02))
    assert rep.passed
    assert rep.worst_bound_ratio <= 1.0 + 1e-12
    assert all(v["passed"] for v in rep.lp.values())
    assert rep.lambda1_h == pytest.approx(19.67587286709202, rel=1e-8)


def test_decay_non_dirichlet_drops_bound():
    rep = run_decay(_cfg(bc_theta="adiabatic", bc_b="conducting"))
    assert "decay_bound" not in rep.checks
    assert rep.lp == {}


def test_stability_zero_delta():
    rep = run_stability(_cfg(stability={"transient": 0.005}), delta=0.0)
    assert rep.d0 == 0.0 and rep.d_final == 0.0
    assert rep.linearity_ratio == 1.0
    assert rep.passed
    with pytest.raises(ParameterError):
        run_stability(_cfg(), delta=1e-2)


def test_stability_short_run_is_linear():
    rep = run_stability(_cfg(t_final=0.02, stability={"transient": 0.005}))
    assert rep.checks["finite"] and rep.checks["linear_in_delta"]
    assert abs(rep.linearity_ratio - 1.0) < 1e-3


def _drift_result(means, ts, theta_inf=1.0):
    recs = []
    for t, m in zip(ts, means):
        row = [0.0] * len(CSV_FIELDS)
        row[CSV_FIELDS.index("t")] = t
        row[CSV_FIELDS.index("mean_theta")] = m
        row[CSV_FIELDS.index("lpinf_theta")] = theta_inf
        recs.append(record_from_csv_row(row))
    return RunResult(recs, None, 0, True, 0.0, 0.0, 0.0, 0.0, 0.0)


def test_mean_drift_constant():
    h = 1 / 32
    ts = [0.0, 0.1, 0.2]
    res = _drift_result([0.5, 0.5 + 2 * h * h * 0.1, 0.5 + 3 * h * h * 0.2], ts)
    assert mean_drift_constant(res, h) == pytest.approx(3.0, rel=1e-9)


def test_mean_drift_roundoff_counts_as_zero():
    ts = [0.0, 0.1, 0.2]
    res = _drift_result([0.5, 0.5 + 1e-13, 0.5 - 1e-13], ts)
    assert mean_drift_constant(res, 1 / 32) == 0.0
    res = _drift_result([0.5, 0.5 + 1e-9, 0.5], ts)
    assert mean_drift_constant(res, 1 / 32) > 0.0


def test_adiabatic_mean_is_conserved():
    _, res = run_config(_cfg(bc_theta="adiabatic", t_final=0.02))
    m0 = res.records[0].mean_theta
    assert max(abs(r.mean_theta - m0) for r in res.records) < 1e-14
