"""Run configuration: TOML schema, defaults and validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from ..coeffs import Coefficient, CoefficientModel
from ..errors import CoefficientBoundError, ConfigError, ParameterError


@dataclass(frozen=True)
class InitialConditionSpec:
    name: str = "standard"
    amplitudes: tuple[float, float, float] = (1.0, 0.5, 0.5)


@dataclass(frozen=True)
class Slack:
    decay: float = 0.05
    lp: float = 0.01


@dataclass(frozen=True)
class DecayConfig:
    fit_start: float = 0.05
    r2_min: float = 0.95


@dataclass(frozen=True)
class MMSConfig:
    levels: tuple[int, ...] = (32, 64, 128)
    t_final: float = 0.01
    time_n: int = 32
    time_t_final: float = 0.05
    time_steps: tuple[int, ...] = (512, 1024, 2048)
    min_order: float = 1.9


@dataclass(frozen=True)
class StabilityConfig:
    delta: float = 1e-6
    transient: float = 0.05
    linearity_tol: float = 0.01


@dataclass(frozen=True)
class BCMatrixConfig:
    drift_levels: tuple[int, int] = (32, 64)
    drift_t_final: float = 0.1
    drift_growth: float = 1.5
    r2_min: float = 0.99


@dataclass(frozen=True)
class RunConfig:
    n: int = 32
    dt: float | str = "auto"
    t_final: float = 0.5
    sample_every: int = 10
    snapshot_every: int = 0
    bc_theta: str = "dirichlet"
    bc_b: str = "dirichlet"
    coefficients: CoefficientModel = field(default_factory=CoefficientModel)
    initial_condition: InitialConditionSpec = field(default_factory=InitialConditionSpec)
    out_dir: str = "out"
    slack: Slack = field(default_factory=Slack)
    seed: int = 0
    decay: DecayConfig = field(default_factory=DecayConfig)
    mms: MMSConfig = field(default_factory=MMSConfig)
    stability: StabilityConfig = field(default_factory=StabilityConfig)
    bc_matrix: BCMatrixConfig = field(default_factory=BCMatrixConfig)

    @property
    def fixed_dt(self) -> float | None:
        return None if self.dt == "auto" else float(self.dt)


TOP_KEYS = {
    "n", "dt", "t_final", "sample_every", "snapshot_every", "bc_theta", "bc_b",
    "out_dir", "seed", "coefficients", "initial_condition", "slack", "decay", "mms",
    "stability", "bc_matrix",
}
COEFF_KEYS = {"c0", "theta_range", "kappa", "mu", "sigma"}


def _fail(where: str, msg: str):
    raise ConfigError(f"{where}: {msg}")


def _check_keys(table: dict, allowed: set, where: str):
    if not isinstance(table, dict):
        _fail(where, "expected a table")
    for k in table:
        if k not in allowed:
            _fail(f"{where}.{k}" if where else k, "unknown key")


def _num(v, where: str, *, integer: bool = False, positive: bool = False, minimum=None) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(where, f"expected a number, got {v!r}")
    if integer and not isinstance(v, int):
        _fail(where, f"expected an integer, got {v!r}")
    if not math.isfinite(v):
        _fail(where, "must be finite")
    if positive and not v > 0:
        _fail(where, f"must be > 0, got {v}")
    if minimum is not None and v < minimum:
        _fail(where, f"must be >= {minimum}, got {v}")
    return v


def _choice(v, options: tuple, where: str) -> str:
    if v not in options:
        _fail(where, f"must be one of {options}, got {v!r}")
    return v


def _coefficient(t, where: str) -> Coefficient:
    _check_keys(t, {"kind", "coeffs"}, where)
    kind = _choice(t.get("kind", "const"), ("const", "poly"), f"{where}.kind")
    cs = t.get("coeffs", [1.0])
    if not isinstance(cs, list) or not cs:
        _fail(f"{where}.coeffs", "expected a non-empty list of numbers")
    cs = [_num(c, f"{where}.coeffs") for c in cs]
    try:
        return Coefficient(kind, tuple(cs))
    except ParameterError as exc:
        _fail(where, str(exc))


def _coefficients(t) -> CoefficientModel:
    _check_keys(t, COEFF_KEYS, "coefficients")
    c0 = _num(t.get("c0", 1.0), "coefficients.c0")
    if c0 < 1:
        _fail("coefficients.c0", f"must be >= 1, got {c0}")
    tr = t.get("theta_range", [-1.0, 1.0])
    if not isinstance(tr, list) or len(tr) != 2:
        _fail("coefficients.theta_range", "expected [lo, hi]")
    tr = tuple(_num(v, "coefficients.theta_range") for v in tr)
    if tr[0] > tr[1]:
        _fail("coefficients.theta_range", f"lo > hi in {list(tr)}")
    kw = {w: _coefficient(t[w], f"coefficients.{w}") for w in ("kappa", "mu", "sigma") if w in t}
    try:
        return CoefficientModel(c0=c0, theta_range=tr, **kw)
    except (CoefficientBoundError, ParameterError) as exc:
        _fail("coefficients", str(exc))


def _int_list(v, where: str, minimum: int) -> tuple[int, ...]:
    if not isinstance(v, list) or not v:
        _fail(where, "expected a non-empty list of integers")
    return tuple(int(_num(x, where, integer=True, minimum=minimum)) for x in v)


def _section(t, cls, where: str, spec: dict):
    """Validate a flat sub-table against ``spec``: key -> converter."""
    _check_keys(t, set(spec), where)
    return cls(**{k: spec[k](v, f"{where}.{k}") for k, v in t.items()})


def config_from_dict(d: dict) -> RunConfig:
    _check_keys(d, TOP_KEYS, "")
    kw = {}
    if "n" in d:
        kw["n"] = int(_num(d["n"], "n", integer=True, minimum=8))
    if "dt" in d:
        kw["dt"] = "auto" if d["dt"] == "auto" else _num(d["dt"], "dt", positive=True)
    if "t_final" in d:
        kw["t_final"] = _num(d["t_final"], "t_final", positive=True)
    for k in ("sample_every",):
        if k in d:
            kw[k] = int(_num(d[k], k, integer=True, minimum=1))
    for k in ("snapshot_every", "seed"):
        if k in d:
            kw[k] = int(_num(d[k], k, integer=True, minimum=0))
    if "bc_theta" in d:
        kw["bc_theta"] = _choice(d["bc_theta"], ("dirichlet", "adiabatic"), "bc_theta")
    if "bc_b" in d:
        kw["bc_b"] = _choice(d["bc_b"], ("dirichlet", "conducting"), "bc_b")
    if "out_dir" in d:
        if not isinstance(d["out_dir"], str) or not d["out_dir"]:
            _fail("out_dir", "expected a non-empty string")
        kw["out_dir"] = d["out_dir"]
    if "coefficients" in d:
        kw["coefficients"] = _coefficients(d["coefficients"])

    pos = lambda v, w: _num(v, w, positive=True)  # noqa: E731
    if "initial_condition" in d:
        ic = d["initial_condition"]
        _check_keys(ic, {"name", "amplitudes"}, "initial_condition")
        amps = ic.get("amplitudes", [1.0, 0.5, 0.5])
        if not isinstance(amps, list) or len(amps) != 3:
            _fail("initial_condition.amplitudes", "expected three numbers [a_theta, a_u, a_b]")
        name = ic.get("name", "standard")
        if not isinstance(name, str):
            _fail("initial_condition.name", "expected a string")
        kw["initial_condition"] = InitialConditionSpec(
            name, tuple(float(_num(a, "initial_condition.amplitudes")) for a in amps)
        )
    if "slack" in d:
        kw["slack"] = _section(d["slack"], Slack, "slack", {"decay": pos, "lp": pos})
    if "decay" in d:
        kw["decay"] = _section(d["decay"], DecayConfig, "decay", {"fit_start": pos, "r2_min": pos})
    if "mms" in d:
        kw["mms"] = _section(d["mms"], MMSConfig, "mms", {
            "levels": lambda v, w: _int_list(v, w, 8),
            "t_final": pos,
            "time_n": lambda v, w: int(_num(v, w, integer=True, minimum=8)),
            "time_t_final": pos,
            "time_steps": lambda v, w: _int_list(v, w, 1),
            "min_order": pos,
        })
    if "stability" in d:
        st = _section(d["stability"], StabilityConfig, "stability", {
            "delta": pos, "transient": pos, "linearity_tol": pos,
        })
        if st.delta > 1e-3:
            _fail("stability.delta", f"must lie in (0, 1e-3], got {st.delta}")
        kw["stability"] = st
    if "bc_matrix" in d:
        kw["bc_matrix"] = _section(d["bc_matrix"], BCMatrixConfig, "bc_matrix", {
            "drift_levels": lambda v, w: _int_list(v, w, 8),
            "drift_t_final": pos,
            "drift_growth": pos,
            "r2_min": pos,
        })
        if len(kw["bc_matrix"].drift_levels) != 2:
            _fail("bc_matrix.drift_levels", "expected two grid sizes")
    return RunConfig(**kw)


def parse_config(path) -> RunConfig:
    """Read and validate a TOML run configuration."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            d = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        return config_from_dict(d)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
