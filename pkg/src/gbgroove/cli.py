"""Command-line interface: parameter reduction, canned figure data, solver runs.

One JSON config document describes a run; every flag can also be given on
the command line, and the command line wins.  Outputs are deterministic:
identical configs give byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .composite import (
    ExpansionSpec,
    composite_profile_nd,
    depth_difference,
    mullins_profile_dim,
)
from .layers import CornerSpec, corner_combination, corner_solutions_yc
from .material import (
    ModelParams,
    PhysicalParams,
    model_from_physical,
    mullins_coefficient,
    nondimensionalize,
    slope_parameter,
    stiffness_parameter,
)
from .oracle import ConfigError, DivergenceError, Grid, SolverConfig, mass, solve
from .outer import QuadratureError, mullins_profile
from .specfun import GammaPoleError, SeriesError

__all__ = ["RunConfig", "run", "main", "PRESETS"]

MODES = ("params", "profile", "depth-series", "corner", "oracle", "compare")
FORMATS = ("csv", "json")

# figure-style canned parameter sets (SI units)
_ALPHA_AL2O3 = 9.7e-16
PRESETS: dict[str, dict] = {
    "figure3": {"mode": "profile", "model": {"B": 1.0, "alpha": _ALPHA_AL2O3, "m": 0.209},
                "times": [3e-30]},
    "figure4": {"mode": "profile", "model": {"B": 1.0, "alpha": _ALPHA_AL2O3, "m": 0.209},
                "times": [1e-29]},
    "figure5": {"mode": "profile", "model": {"B": 1.0, "alpha": _ALPHA_AL2O3, "m": 0.209},
                "times": [2e-29]},
    # sweep window is a documented choice; the source figures do not pin it
    "figure6": {"mode": "depth-series", "model": {"B": 1.0, "alpha": _ALPHA_AL2O3, "m": 0.209},
                "alphas": [10.5e-16, 9.7e-16, 3e-16, 9.7e-17],
                "times": list(np.geomspace(1e-31, 1e-28, 25))},
    "cornerfig": {"mode": "corner", "model": {"B": 1.0, "alpha": _ALPHA_AL2O3, "m": 0.209},
                  "times": [1e-29], "corner_r": -1.0},
}


class CliConfigError(ValueError):
    """Bad run configuration (exit code 2)."""


@dataclass
class RunConfig:
    """Fully resolved description of one CLI run."""

    mode: str
    physical: dict | None = None
    model: dict | None = None          # keys: B, alpha, m
    times: list[float] = field(default_factory=list)   # Bt values, m^4
    alphas: list[float] = field(default_factory=list)  # depth-series alpha sweep, m^2
    order: int = 2
    include_corner: bool = False
    corner_r: float = -1.0
    corner_gamma: float = 0.0
    samples: int = 400
    xmax: float | None = None          # window in units of (Bt)^(1/4)
    out: str | None = None
    fmt: str = "csv"
    solver: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.mode not in MODES:
            raise CliConfigError(f"unknown mode {self.mode!r}; pick one of {MODES}")
        if self.fmt not in FORMATS:
            raise CliConfigError(f"unknown format {self.fmt!r}; pick one of {FORMATS}")
        if (self.physical is None) == (self.model is None):
            raise CliConfigError("provide exactly one of 'physical' or 'model'")
        if self.mode in ("profile", "depth-series", "oracle", "compare") and not self.times:
            raise CliConfigError(f"mode {self.mode!r} needs at least one Bt value")
        if self.samples < 2:
            raise CliConfigError("samples must be >= 2")
        if self.order < 0:
            raise CliConfigError("order must be >= 0")
        for bt in self.times:
            if not bt > 0:
                raise CliConfigError(f"Bt values must be positive, got {bt}")

    def resolved(self) -> dict:
        d = asdict(self)
        # the destination path is not part of the physics configuration and
        # must not break byte-identity between otherwise identical runs
        d.pop("out", None)
        return d

    # ---- physics ----------------------------------------------------------

    def reduced(self, bt: float) -> ModelParams:
        """ModelParams nondimensionalized at the evaluation time Bt."""
        if self.model is not None:
            try:
                B = float(self.model["B"])
                alpha = float(self.model["alpha"])
                m = float(self.model["m"])
            except (KeyError, TypeError, ValueError) as exc:
                raise CliConfigError(f"model block needs numeric B, alpha, m: {exc}")
            return nondimensionalize(B, alpha, bt / B, m)
        try:
            phys = PhysicalParams(**self.physical)
        except (TypeError, ValueError) as exc:
            raise CliConfigError(f"bad physical block: {exc}")
        B = mullins_coefficient(phys)
        return model_from_physical(phys, bt / B)


def _merge_cli(cfg: dict, args: argparse.Namespace) -> dict:
    """Command-line flags override config-file entries."""
    if args.mode is not None:
        cfg["mode"] = args.mode
    model = dict(cfg.get("model") or {})
    for key, val in (("B", args.B), ("alpha", args.alpha), ("m", args.m)):
        if val is not None:
            model[key] = val
    if model:
        cfg["model"] = model
        cfg.setdefault("physical", None)
        if args.B is not None or args.alpha is not None or args.m is not None:
            cfg["physical"] = None
    if args.Bt:
        cfg["times"] = list(args.Bt)
    if args.order is not None:
        cfg["order"] = args.order
    if args.samples is not None:
        cfg["samples"] = args.samples
    if args.xmax is not None:
        cfg["xmax"] = args.xmax
    if args.include_corner:
        cfg["include_corner"] = True
    if args.out is not None:
        cfg["out"] = args.out
    if args.format is not None:
        cfg["fmt"] = args.format
    return cfg


# ---- output ----------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.16e}"


def _write_table(cfg: RunConfig, columns: list[str], rows: list[list[float]],
                 notes: list[str]) -> str:
    header_cfg = json.dumps(cfg.resolved(), sort_keys=True)
    if cfg.fmt == "csv":
        lines = ["# gbgroove output", f"# config: {header_cfg}"]
        lines += [f"# {n}" for n in notes]
        lines.append("# columns: " + ",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        doc = {
            "config": json.loads(header_cfg),
            "notes": notes,
            "columns": columns,
            "rows": [[_fmt(v) for v in row] for row in rows],
        }
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    return text


# ---- modes -----------------------------------------------------------------


def _expansion_spec(cfg: RunConfig, params: ModelParams) -> ExpansionSpec:
    corner = None
    if cfg.include_corner:
        corner = CornerSpec(r=cfg.corner_r, gamma=cfg.corner_gamma,
                            alpha_hat=params.alpha_hat, B=1.0)
    return ExpansionSpec(N=cfg.order, include_corner=cfg.include_corner,
                         corner=corner)


def _mode_params(cfg: RunConfig) -> str:
    bt = cfg.times[0] if cfg.times else 1e-29
    params = cfg.reduced(bt)
    lines = [
        f"B_m4_per_s = {_fmt(params.B)}",
        f"alpha_m2 = {_fmt(params.alpha)}",
        f"m = {_fmt(params.m)}",
        f"L0_m = {_fmt(params.L0)} (at Bt = {_fmt(bt)} m^4)",
        f"alpha_hat = {_fmt(params.alpha_hat)}",
    ]
    text = "\n".join(lines) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    return text


def _profile_rows(cfg: RunConfig, with_oracle: bool):
    columns = ["Bt_m4", "x_m", "y_mullins_m", "y_composite_m"]
    if with_oracle:
        columns.append("y_oracle_m")
    rows: list[list[float]] = []
    notes: list[str] = []
    for bt in cfg.times:
        params = cfg.reduced(bt)
        spec = _expansion_spec(cfg, params)
        span = (cfg.xmax if cfg.xmax is not None else 8.0) * bt ** 0.25
        xs = np.linspace(0.0, span, cfg.samples)
        t = bt / params.B
        oracle_vals = None
        if with_oracle:
            prof, sup = _oracle_profile(cfg, params)
            xs_nd = xs / params.L0
            oracle_vals = params.L0 * np.interp(xs_nd, prof[0], prof[1])
            notes.append(f"Bt={_fmt(bt)}: sup|composite-oracle|/depth = {_fmt(sup)}")
        for i, x in enumerate(xs):
            row = [bt, float(x),
                   mullins_profile_dim(float(x), t, params),
                   float(composite_profile_nd(float(x) / params.L0,
                                              params.B * t / params.L0 ** 4,
                                              params.m, params.alpha_hat, spec)
                         * params.L0)]
            if with_oracle:
                row.append(float(oracle_vals[i]))
            rows.append(row)
    return columns, rows, notes


def _solver_config(cfg: RunConfig, params: ModelParams) -> SolverConfig:
    s = dict(cfg.solver)
    ah = params.alpha_hat
    L = float(s.pop("L", 8.0))
    if ah > 0:
        max_dx = math.sqrt(ah) / 4.0
        nx_min = int(math.ceil(L / max_dx)) + 1
    else:
        nx_min = 65
    nx = int(s.pop("nx", max(513, nx_min)))
    dt = float(s.pop("dt", 1.0 / 512))
    theta = float(s.pop("theta", 1.0))
    snapshot_times = tuple(s.pop("snapshot_times", ()))
    kwargs = dict(bc_order=int(s.pop("bc_order", 3)),
                  flux_form=str(s.pop("flux_form", "balance")))
    if s:
        raise CliConfigError(f"unknown solver options: {sorted(s)}")
    return SolverConfig(grid=Grid(L=L, nx=nx), dt=dt, t_final=1.0,
                        alpha_hat=ah, m=params.m, theta=theta,
                        snapshot_times=snapshot_times, **kwargs)


def _oracle_profile(cfg: RunConfig, params: ModelParams):
    """Solve the PDE at t_hat = 1 and report (x_nd, y_nd) plus the sup gap."""
    scfg = _solver_config(cfg, params)
    prof = solve(scfg)[-1]
    xs = scfg.grid.nodes
    spec = _expansion_spec(cfg, params)
    comp = np.array([composite_profile_nd(float(u), 1.0, params.m,
                                          params.alpha_hat, spec) for u in xs])
    depth = abs(comp[0]) if comp[0] != 0 else 1.0
    sup = float(np.max(np.abs(comp - prof.heights)) / depth)
    return (xs, prof.heights), sup


def _mode_profile(cfg: RunConfig) -> str:
    columns, rows, notes = _profile_rows(cfg, with_oracle=False)
    return _write_table(cfg, columns, rows, notes)


def _mode_compare(cfg: RunConfig) -> str:
    columns, rows, notes = _profile_rows(cfg, with_oracle=True)
    return _write_table(cfg, columns, rows, notes)


def _mode_depth_series(cfg: RunConfig) -> str:
    alphas = cfg.alphas
    if not alphas:
        if cfg.model is not None and "alpha" in cfg.model:
            alphas = [float(cfg.model["alpha"])]
        else:
            raise CliConfigError("depth-series needs an 'alphas' list or a model alpha")
    columns = ["alpha_m2", "Bt_m4", "depth_mullins_m", "depth_composite_m",
               "relative_effect"]
    rows = []
    base = dict(cfg.model or {})
    for alpha in alphas:
        for bt in cfg.times:
            model = dict(base)
            model["alpha"] = alpha
            model.setdefault("B", 1.0)
            sub = RunConfig(mode=cfg.mode, model=model, times=[bt], order=cfg.order)
            params = sub.reduced(bt)
            t = bt / params.B
            ym = abs(mullins_profile_dim(0.0, t, params))
            dd = depth_difference(t, params)
            rows.append([alpha, bt, ym, ym - dd, dd / ym if ym > 0 else 0.0])
    return _write_table(cfg, columns, rows, [])


def _mode_corner(cfg: RunConfig) -> str:
    bt = cfg.times[0] if cfg.times else 1e-29
    params = cfg.reduced(bt)
    ah = params.alpha_hat
    if ah <= 0:
        raise CliConfigError("corner mode needs alpha > 0")
    gamma_amp = cfg.corner_gamma if cfg.corner_gamma != 0.0 else ah
    spec = CornerSpec(r=cfg.corner_r, gamma=gamma_amp, alpha_hat=ah, B=1.0)
    tau = 1.0
    ws = np.linspace(0.0, 20.0, cfg.samples)
    columns = ["w", "y_c4", "y_c5", "y_c6", "combination"]
    rows = []
    for w in ws:
        zeta = float(w) * (spec.B * tau) ** (1.0 / 6.0)
        rows.append([
            float(w),
            corner_solutions_yc(4, zeta, tau, spec),
            corner_solutions_yc(5, zeta, tau, spec),
            corner_solutions_yc(6, zeta, tau, spec),
            corner_combination(zeta, tau, spec),
        ])
    notes = [f"nondimensional corner-layer similarity solutions at tau=1, "
             f"r={cfg.corner_r}, amplitude gamma={_fmt(gamma_amp)}"]
    return _write_table(cfg, columns, rows, notes)


def _mode_oracle(cfg: RunConfig) -> str:
    columns = ["Bt_m4", "x_m", "y_oracle_m"]
    rows = []
    notes = []
    for bt in cfg.times:
        params = cfg.reduced(bt)
        scfg = _solver_config(cfg, params)
        profiles = solve(scfg)
        prof = profiles[-1]
        notes.append(f"Bt={_fmt(bt)}: mass={_fmt(mass(prof))} (nondimensional)")
        xs = np.linspace(0.0, scfg.grid.L, cfg.samples)
        ys = np.interp(xs, scfg.grid.nodes, prof.heights)
        for x, y in zip(xs, ys):
            rows.append([bt, float(x) * params.L0, float(y) * params.L0])
    return _write_table(cfg, columns, rows, notes)


_MODE_TABLE = {
    "params": _mode_params,
    "profile": _mode_profile,
    "depth-series": _mode_depth_series,
    "corner": _mode_corner,
    "oracle": _mode_oracle,
    "compare": _mode_compare,
}


def run(cfg: RunConfig) -> str:
    """Dispatch one validated run; returns the emitted text."""
    cfg.validate()
    return _MODE_TABLE[cfg.mode](cfg)


# ---- entry point -----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbgroove",
        description="Groove profiles under an elastic passivation layer: "
                    "series expansion, finite-difference solver, figure data.")
    parser.add_argument("--config", type=Path, help="JSON config document")
    parser.add_argument("--preset", choices=sorted(PRESETS),
                        help="canned figure-style configuration")
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--m", type=float, help="slope parameter")
    parser.add_argument("--alpha", type=float, help="stiffness parameter, m^2")
    parser.add_argument("--B", type=float, help="kinetic coefficient, m^4/s")
    parser.add_argument("--Bt", type=float, action="append", default=None,
                        help="evaluation time as a Bt product, m^4 (repeatable)")
    parser.add_argument("--order", type=int, help="outer expansion order N")
    parser.add_argument("--samples", type=int, help="output sample count")
    parser.add_argument("--xmax", type=float,
                        help="window in units of (Bt)^(1/4), default 8")
    parser.add_argument("--include-corner", action="store_true")
    parser.add_argument("--out", type=str, help="output file path")
    parser.add_argument("--format", choices=FORMATS)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg_dict: dict = {}
        if args.preset:
            cfg_dict.update(json.loads(json.dumps(PRESETS[args.preset])))
        if args.config:
            try:
                cfg_dict.update(json.loads(args.config.read_text()))
            except (OSError, json.JSONDecodeError) as exc:
                raise CliConfigError(f"cannot read config file: {exc}")
        cfg_dict = _merge_cli(cfg_dict, args)
        if "fmt" not in cfg_dict and "format" in cfg_dict:
            cfg_dict["fmt"] = cfg_dict.pop("format")
        if "mode" not in cfg_dict:
            raise CliConfigError("no mode given (flag --mode, config, or preset)")
        allowed = {f.name for f in RunConfig.__dataclass_fields__.values()}
        unknown = set(cfg_dict) - allowed
        if unknown:
            raise CliConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = RunConfig(**cfg_dict)
        text = run(cfg)
    except (CliConfigError, ConfigError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except (SeriesError, QuadratureError, DivergenceError, GammaPoleError) as exc:
        print("error: numerical failure", file=sys.stderr)
        print(f"  {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if not cfg.out:
        sys.stdout.write(text)
    else:
        print(f"wrote {cfg.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
