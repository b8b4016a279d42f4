"""Command-line front end: ``hybridspdc <subcommand> [flags]``.

Every subcommand writes one report (JSON by default, CSV for sweeps when
asked) to ``--out`` or stdout.  Reports carry ``"schema": 1`` and the fully
resolved configuration.  Exit codes: 0 success, 1 invalid configuration,
2 tolerance breach in ``verify``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import conditioning, metrics, verification
from .fock_algebra import StateVector
from .gmatrix import compare_series, gmatrix_numeric, gmatrix_series
from .multisource import declared_tail
from .pump_dynamics import DEFAULT_STEPS, pump_window, solve_blocks, total_output_norm
from .spdc_state import assemble_output, correlation_matrix, reduced_density, tmsv_reference

SCHEMA = 1
SUBCOMMANDS = ("pump-solve", "gmatrix", "output-state", "herald2", "herald3", "sweep", "verify")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    alpha: float = 2.0
    eta: float = 0.02
    l_cut: int | None = None
    n_cut: int | None = None
    m_max: int = 4
    fock_cut: int = 40
    steps: int = DEFAULT_STEPS
    sweep_eta: tuple = (0.005, 0.01, 0.02, 0.04)
    fixed_alpha_eta: float = 0.06
    out: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if not 0 <= self.alpha <= 8:
            raise ConfigError(f"alpha={self.alpha} outside [0, 8]")
        if not 0 <= self.eta <= 0.5:
            raise ConfigError(f"eta={self.eta} outside [0, 0.5]")
        for name in ("l_cut", "n_cut", "m_max", "fock_cut", "steps"):
            v = getattr(self, name)
            if v is not None and (int(v) != v or v <= 0):
                raise ConfigError(f"{name}={v} must be a positive integer")
        if len(self.sweep_eta) < 3 or any(not 0 < e <= 0.5 for e in self.sweep_eta):
            raise ConfigError("sweep_eta needs at least three values in (0, 0.5]")
        if not 0 < self.fixed_alpha_eta < 1:
            raise ConfigError("fixed_alpha_eta must lie in (0, 1)")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _matrix(a) -> dict:
    a = np.asarray(a)
    return {"real": a.real.tolist(), "imag": a.imag.tolist()}


def cmd_pump_solve(cfg: RunConfig) -> dict:
    lo, hi = pump_window(cfg.alpha, cfg.l_cut)
    sample = list(range(0, min(hi, 8) + 1))
    blocks = solve_blocks(sample, cfg.eta, cfg.steps)
    window = solve_blocks(range(lo, hi + 1), cfg.eta, cfg.steps)
    norm_dev = max(abs(float(f @ f) - 1.0) for f in window)
    n_cut = cfg.n_cut if cfg.n_cut is not None else 8
    return {
        "pump_window": [lo, hi],
        "f_blocks": [{"l": l, "f": f} for l, f in zip(sample, blocks)],
        "max_block_norm_deviation": norm_dev,
        "total_output_norm": total_output_norm(cfg.alpha, cfg.eta, n_cut, cfg.l_cut, cfg.steps),
        "n_cut": n_cut,
    }


def cmd_gmatrix(cfg: RunConfig) -> dict:
    num = gmatrix_numeric(cfg.alpha, cfg.eta, cfg.n_cut or 2, cfg.m_max, cfg.l_cut, cfg.steps)
    rep = {"numeric": _matrix(num.entries), "normalization": num.normalization()}
    if cfg.alpha > 0:
        ser = gmatrix_series(cfg.alpha, cfg.eta)
        rep["series"] = _matrix(np.where(ser.available, ser.entries, np.nan))
        rep["comparison"] = compare_series(cfg.alpha, cfg.eta, cfg.steps)
    return rep


def _state_metrics(alpha: float, eta: float, n_cut, m_max, steps) -> dict:
    out = assemble_output(alpha, eta, n_cut, None, None, steps)
    rho12 = reduced_density(out.state, ("1", "2"))
    rho = out.state.density()
    J = correlation_matrix(out.g)
    split = metrics.BipartitionSpec.of(rho.modes, ("1", "2"))
    rep = {
        "n_cut": out.n_cut,
        "raw_norm": out.raw_norm,
        "pair_tail_bound": abs(alpha * eta) ** (2 * (out.n_cut + 1)),
        "purity_rho12": rho12.purity(),
        "negativity_12_vs_p": metrics.negativity(rho, split),
        "hybrid_witness": metrics.hybrid_witness(J),
        "J": _matrix(J.entries),
    }
    if eta > 0:
        rep["fidelity_tmsv"] = rho12.fidelity(tmsv_reference(np.arctanh(min(abs(alpha * eta), 0.999)), out.n_cut))
    return rep


def cmd_output_state(cfg: RunConfig) -> dict:
    return _state_metrics(cfg.alpha, cfg.eta, cfg.n_cut, cfg.m_max, cfg.steps)


def _herald_dict(r: conditioning.HeraldResult) -> dict:
    return {
        "click_pattern": r.click_pattern,
        "probability": r.probability,
        "fidelities": r.fidelities,
        "components": r.components,
    }


def cmd_herald2(cfg: RunConfig) -> dict:
    r = conditioning.herald_two_source(cfg.alpha, cfg.eta, cfg.m_max, cfg.steps)
    return {"two_source": _herald_dict(r), "tail_bound": declared_tail(cfg.alpha, cfg.eta, 2)}


def cmd_herald3(cfg: RunConfig) -> dict:
    a, b = conditioning.herald_three_source(cfg.alpha, cfg.eta, cfg.m_max, cfg.steps)
    return {"patterns": [_herald_dict(a), _herald_dict(b)], "tail_bound": declared_tail(cfg.alpha, cfg.eta, 3)}


def _sweep_point(args) -> dict:
    alpha_eta, eta, m_max, steps = args
    pt = conditioning.scaling_point(alpha_eta, eta, m_max, steps)
    alpha = pt["alpha"]
    g = gmatrix_numeric(alpha, eta, 2, m_max, steps=steps)
    pt["hybrid_witness"] = metrics.hybrid_witness(correlation_matrix(g))
    out = assemble_output(alpha, eta, 3, None, None, steps)
    rho = out.state.density()
    pt["negativity_12_vs_p"] = metrics.negativity(rho, metrics.BipartitionSpec.of(rho.modes, ("1", "2")))
    return pt


def sweep_points(alpha_eta: float, etas, m_max: int = 4, steps: int = DEFAULT_STEPS, workers: int | None = None) -> list[dict]:
    """Evaluate the grid concurrently; results come back in grid order."""
    tasks = [(alpha_eta, float(e), m_max, steps) for e in sorted(etas)]
    if workers == 1:
        return [_sweep_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers or min(len(tasks), 4)) as pool:
        return list(pool.map(_sweep_point, tasks))


def cmd_sweep(cfg: RunConfig) -> dict:
    pts = sweep_points(cfg.fixed_alpha_eta, cfg.sweep_eta, cfg.m_max, cfg.steps)
    etas = [p["eta"] for p in pts]
    slope = lambda key: conditioning.loglog_slope(etas, [p[key] for p in pts])  # noqa: E731
    return {
        "points": pts,
        "slope_P2": slope("P2"),
        "slope_P3": slope("P3"),
        "slope_P1_over_P2": slope("P1_over_P2"),
        "slope_neighbor_ratio": slope("neighbor_ratio"),
        "ratio_P3_P2": [p["P3"] / p["P2"] for p in pts],
    }


def cmd_verify(cfg: RunConfig) -> dict:
    return verification.run_all(cfg.alpha, cfg.eta, cfg.steps)


COMMANDS = {
    "pump-solve": cmd_pump_solve,
    "gmatrix": cmd_gmatrix,
    "output-state": cmd_output_state,
    "herald2": cmd_herald2,
    "herald3": cmd_herald3,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridspdc", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="JSON file with config keys; flags override it")
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--eta", type=float)
    ap.add_argument("--l-cut", dest="l_cut", type=int)
    ap.add_argument("--n-cut", dest="n_cut", type=int)
    ap.add_argument("--m-max", dest="m_max", type=int)
    ap.add_argument("--fock-cut", dest="fock_cut", type=int)
    ap.add_argument("--steps", type=int)
    ap.add_argument("--sweep-eta", dest="sweep_eta", type=_floats)
    ap.add_argument("--fixed-alpha-eta", dest="fixed_alpha_eta", type=float)
    ap.add_argument("--out")
    ap.add_argument("--format", choices=("json", "csv"))
    return ap


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            values.update(json.load(fh))
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    for name in known:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if "sweep_eta" in values:
        values["sweep_eta"] = tuple(float(e) for e in values["sweep_eta"])
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def render(report: dict, fmt: str) -> str:
    if fmt == "csv" and "points" in report:
        buf = io.StringIO()
        cols = list(report["points"][0])
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for p in report["points"]:
            writer.writerow({k: repr(float(p[k])) for k in cols})
        return buf.getvalue()
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ConfigError, TypeError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    body = COMMANDS[args.command](cfg)
    report = {"schema": SCHEMA, "command": args.command, "config": asdict(cfg), **body}
    text = render(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and not body["passed"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
