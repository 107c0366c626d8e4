"""Acceptance criteria 1-10, each reported as one PASS/FAIL line.

The long runs are shared through module-scoped fixtures: the two n=64
decay runs feed criteria 4, 5 and 7.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from mbq.cli_io.cli import EXIT_OK, main
from mbq.cli_io.config import config_from_dict
from mbq.cli_io.snapshot import encode_snapshot, read_snapshot, write_snapshot
from mbq.coeffs import Coefficient, CoefficientModel
from mbq.diagnostics import lambda1, lp_inequality_check, theta_hat_residual
from mbq.experiments import decay_report, run_bc_matrix, run_config, run_mms, run_stability
from mbq.field import (
    BC,
    Grid,
    curl2d,
    div,
    laplacian,
    norm_l2,
    perp_grad,
    poisson_solve,
    trilinear_skew,
)
from mbq.stepper import step

from .conftest import ACCEPTANCE_LINES, random_field, random_state, random_vector, standard_state

pytestmark = pytest.mark.slow

# smallest eigenvalue of the n=8 interior 5-point matrix, dense eigendecomposition
LAMBDA_DENSE_N8 = 19.486839677110623


def verdict(k: int, ok: bool, detail: str):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _decay_config(kappa: list[float]):
    kind = "const" if len(kappa) == 1 else "poly"
    return config_from_dict({
        "n": 64,
        "t_final": 0.5,
        "sample_every": 10,
        "bc_theta": "dirichlet",
        "bc_b": "dirichlet",
        "coefficients": {"c0": 1.0, "kappa": {"kind": kind, "coeffs": kappa}},
        "initial_condition": {"amplitudes": [1.0, 0.5, 0.5]},
    })


@pytest.fixture(scope="module")
def decay_runs():
    out = {}
    for name, kappa in (("const", [1.0]), ("kappa=1+z^2", [1.0, 0.0, 1.0])):
        cfg = _decay_config(kappa)
        t0 = time.perf_counter()
        _, res = run_config(cfg)
        out[name] = (cfg, res, decay_report(cfg, res, cfg.n), time.perf_counter() - t0)
    return out


# ---------------------------------------------------------------------------


def test_criterion_01_operator_identities(rng):
    g = Grid(32)
    worst_div = worst_curl = worst_tri = 0.0
    for _ in range(5):
        f = random_field(g, rng, BC.DIRICHLET)
        # relative to the size of the second differences, max|f| / h^2
        d = np.abs(div(perp_grad(f)).values[g.interior]).max() * g.h**2 / np.abs(f.values).max()
        worst_div = max(worst_div, float(d))
        lap = laplacian(f, wide=True).values
        worst_curl = max(worst_curl, float(np.abs(curl2d(perp_grad(f)).values - lap).max() / np.abs(lap).max()))
    for _ in range(100):
        a, v, w = random_vector(g, rng), random_vector(g, rng), random_vector(g, rng)
        scale = norm_l2(a) * norm_l2(v) * norm_l2(w) / g.h
        worst_tri = max(worst_tri, abs(trilinear_skew(a, v, w) + trilinear_skew(a, w, v)) / scale)
    ok = worst_div <= 1e-12 and worst_curl <= 1e-12 and worst_tri <= 1e-12
    verdict(1, ok, f"div.perp_grad={worst_div:.2e} curl.perp_grad-lap={worst_curl:.2e} "
                   f"trilinear={worst_tri:.2e}")


def test_criterion_02_poisson_and_eigenvalue(rng):
    worst = 0.0
    for bc in (BC.DIRICHLET, BC.NEUMANN):
        g = Grid(64)
        rhs = random_field(g, rng, bc)
        u = poisson_solve(rhs, bc)
        target = rhs.values
        mask = g.interior
        if bc is BC.NEUMANN:
            target = target - float(np.sum(g.weights * rhs.values)) / float(np.sum(g.weights))
            mask = np.ones(g.shape, bool)
        worst = max(worst, float(np.abs(laplacian(u).values - target)[mask].max() / np.abs(target).max()))

    n = 8
    h = 1.0 / n
    m = n - 1
    t = (np.diag(np.full(m, 2.0)) - np.diag(np.ones(m - 1), 1) - np.diag(np.ones(m - 1), -1)) / h**2
    dense = float(np.linalg.eigvalsh(np.kron(t, np.eye(m)) + np.kron(np.eye(m), t))[0])
    lam8 = lambda1(Grid(8))
    lams = [lam8] + [lambda1(Grid(k)) for k in (16, 32, 64)]
    ok = (
        worst <= 1e-8
        and abs(dense - LAMBDA_DENSE_N8) <= 1e-12 * dense
        and abs(lam8 - dense) <= 1e-8 * dense
        and all(a < b for a, b in zip(lams, lams[1:]))
        and lams[-1] < 2 * math.pi**2
    )
    verdict(2, ok, f"poisson rel={worst:.2e} lambda1(8)={lam8:.12g} dense={dense:.12g} "
                   f"lambda1(8..64)={[round(v, 6) for v in lams]}")


def test_criterion_03_mms_convergence():
    model = CoefficientModel()
    space = run_mms([32, 64, 128], "continuous_forcing", 0.01, model)
    tm = run_mms([512, 1024, 2048], "discrete_forcing", 0.05, model, n_time=32)
    ok = space.min_order() >= 1.9 and tm.min_order() >= 1.9
    fmt = lambda t: [[round(v, 3) for v in row] for row in t.orders]  # noqa: E731
    verdict(3, ok, f"space orders (theta,u,B)={fmt(space)} time orders={fmt(tm)}")


def test_criterion_04_energy_law(decay_runs):
    parts, ok = [], True
    for name, (cfg, res, rep, secs) in decay_runs.items():
        run_ok = res.energy_monotone and rep.bound_ok and secs <= 180.0
        ok &= run_ok
        parts.append(f"{name}: monotone={res.energy_monotone} worst E/envelope={rep.worst_bound_ratio:.4f} "
                     f"(limit 1.05) alpha_theory={rep.alpha_theory:.6g} {secs:.0f}s")
    verdict(4, ok, "; ".join(parts))


def test_criterion_05_lp_bound(decay_runs):
    parts, ok = [], True
    for name, (cfg, res, rep, _) in decay_runs.items():
        reps = [lp_inequality_check(res.records, p, 0.01) for p in (2, 4, math.inf)]
        ok &= all(r.passed for r in reps)
        parts.append(f"{name}: margins " + " ".join(f"p={r.p}:{r.worst_margin:.3g}" for r in reps))
    verdict(5, ok, "; ".join(parts))


def test_criterion_06_theta_hat_consistency():
    model = CoefficientModel(kappa=Coefficient.poly(1.0, 0.0, 1.0))
    dt = 1e-7
    res = []
    for n in (32, 64, 128):
        s = standard_state(n)
        s1, _ = step(s, dt, model)
        res.append(theta_hat_residual(s, s1, dt, model))
    ratios = [a / b for a, b in zip(res, res[1:])]
    verdict(6, min(ratios) >= 3.5, f"residuals n=32,64,128: {[f'{r:.3e}' for r in res]} "
                                   f"ratios={[round(r, 3) for r in ratios]}")


def test_criterion_07_decay_shape(decay_runs):
    parts, ok = [], True
    for name, (cfg, res, rep, _) in decay_runs.items():
        for key in ("D_h1", "H2"):
            f = rep.fits[key]
            ok &= f["alpha_emp"] > 0 and f["r_squared"] >= 0.95
            parts.append(f"{name} {key}: alpha={f['alpha_emp']:.4g} r2={f['r_squared']:.5f}")
    verdict(7, ok, "; ".join(parts))


def test_criterion_08_stability():
    cfg = config_from_dict({"n": 32, "t_final": 0.5, "stability": {"delta": 1e-6, "transient": 0.05}})
    t0 = time.perf_counter()
    rep = run_stability(cfg)
    secs = time.perf_counter() - t0
    ok = rep.checks["finite"] and rep.checks["contracts_after_transient"] \
        and abs(rep.linearity_ratio - 1.0) <= 0.01 and secs <= 360.0
    verdict(8, ok, f"d(T)/d(0)={rep.amplification[-1]:.4g} max after t=0.05={rep.max_after_transient:.4g} "
                   f"linearity={rep.linearity_ratio:.6f} {secs:.0f}s")


def test_criterion_09_bc_matrix():
    cfg = config_from_dict({"n": 32, "t_final": 0.5})
    t0 = time.perf_counter()
    rep = run_bc_matrix(cfg)
    secs = time.perf_counter() - t0
    parts = []
    for name, cell in rep.cells.items():
        extra = ""
        if cell.bc_b == "conducting":
            f = cell.fits["E_b"]
            extra += f" |B|^2 rate={f['alpha_emp']:.4g} r2={f['r_squared']:.5f}"
        if cell.bc_theta == "adiabatic":
            extra += f" drift C(32,64)={cell.mean_drift['C']}"
        else:
            extra += f" E/envelope={cell.decay['worst_bound_ratio']:.4f}"
        parts.append(f"[{name}: {'ok' if cell.passed else 'fail'}{extra}]")
    verdict(9, rep.passed and secs <= 600.0, " ".join(parts) + f" {secs:.0f}s")


def test_criterion_10_determinism_and_io(tmp_path, rng):
    cfg = tmp_path / "run.toml"
    cfg.write_text("n = 16\nt_final = 0.01\nsample_every = 5\n"
                   "[coefficients.kappa]\nkind = \"poly\"\ncoeffs = [1.0, 0.0, 1.0]\n")
    codes = [main(["run", "--config", str(cfg), "--out", str(tmp_path / d), "--quiet"]) for d in ("a", "b")]
    a, b = ((tmp_path / d / "timeseries.csv").read_bytes() for d in ("a", "b"))
    same = codes == [EXIT_OK, EXIT_OK] and a == b and len(a) > 0

    lossless = True
    for bc_theta, bc_b in (("dirichlet", "dirichlet"), ("adiabatic", "conducting")):
        s = random_state(16, rng, bc_theta, bc_b)
        back = read_snapshot(write_snapshot(s, tmp_path / "s.bin"), bc_theta, bc_b)
        lossless &= back.t == s.t and encode_snapshot(back) == encode_snapshot(s)
        lossless &= all(np.array_equal(x, y) for x, y in zip(s.arrays(), back.arrays()))
    verdict(10, same and lossless, f"csv byte-identical={same} ({len(a)} bytes) snapshot lossless={lossless}")
