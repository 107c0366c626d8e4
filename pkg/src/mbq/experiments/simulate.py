"""Time loop shared by every experiment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..coeffs import CoefficientModel
from ..diagnostics import DiagnosticsRecord, record
from ..stepper import State, StepReport, cfl_max_dt, step
from ..stepper.integrate import Forcing

T_EPS = 1e-12


@dataclass
class RunResult:
    records: list[DiagnosticsRecord]
    final: State
    steps: int
    energy_monotone: bool
    max_energy_increase: float
    max_cfl_ratio: float
    max_div_u: float
    max_div_b: float
    max_budget_rate: float  # max |budget_res| / (E0 * time between samples)


def simulate(
    s: State,
    model: CoefficientModel,
    t_final: float,
    dt: float | None = None,
    sample_every: int = 10,
    forcing: Forcing | None = None,
    on_sample: Callable[[DiagnosticsRecord, State], None] | None = None,
    on_step: Callable[[State, StepReport], None] | None = None,
) -> RunResult:
    """Step ``s`` to ``t_final`` recording diagnostics every ``sample_every`` steps.

    ``dt=None`` re-evaluates the CFL bound each step.  The last step is
    shortened to land on ``t_final`` and is always sampled.
    """
    rec = record(s, model)
    records = [rec]
    if on_sample:
        on_sample(rec, s)
    e0 = rec.E_l2
    dissipated = 0.0
    t_prev = s.t
    steps = 0
    monotone = True
    max_inc = 0.0
    max_cfl = 0.0
    max_du = max_db = 0.0
    max_budget = 0.0
    end = t_final * (1.0 - T_EPS)
    while s.t < end:
        h = cfl_max_dt(s, model) if dt is None else dt
        h = min(h, t_final - s.t)
        e_old = s.energy()
        s, rep = step(s, h, model, forcing)
        steps += 1
        e_new = s.energy()
        if e_new > e_old:
            monotone = False
            max_inc = max(max_inc, e_new - e_old)
        dissipated += 2.0 * h * rep.dissipation
        max_cfl = max(max_cfl, rep.cfl_ratio)
        max_du = max(max_du, rep.div_u_after)
        max_db = max(max_db, rep.div_b_after)
        if on_step:
            on_step(s, rep)
        if steps % sample_every == 0 or s.t >= end:
            rec = record(s, model, prev=records[-1], dissipated=dissipated)
            if e0 > 0:
                max_budget = max(max_budget, abs(rec.budget_res) / (e0 * (s.t - t_prev)))
            dissipated = 0.0
            t_prev = s.t
            records.append(rec)
            if on_sample:
                on_sample(rec, s)
    return RunResult(records, s, steps, monotone, max_inc, max_cfl, max_du, max_db, max_budget)
