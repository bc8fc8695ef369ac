"""Command-line front end: ``qnoise <command> --config FILE --out DIR``.

Every command reads a JSON config, validates it (unknown fields are
rejected), runs the library and writes CSV/JSON results, plus SVG figures
with ``--plot``.  Failures print a JSON error object to stderr and exit with
2 (invalid input) or 3 (numerical failure).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Literal, Optional, Union

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import analysis as an
from . import serialization as ser
from .channels import KrausSet, channel_rank, identity_chi, kraus_to_chi
from .errors import QNoiseError, ValidationError
from .gates import GATE_NAMES, gate_library
from .noise import NoiseSpec, RelaxationParams, relaxation_kraus
from .simulation import simulate

log = logging.getLogger("qnoise")

COMMANDS = ("convert", "noise-sweep", "gate-sim", "ecc", "negativity")


# ---------------------------------------------------------------------------
# Config schemas
# ---------------------------------------------------------------------------


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Linspace(_Strict):
    start: float
    stop: float
    num: int = Field(ge=1)


Grid = Union[list[float], Linspace]


def grid_values(g: Grid) -> np.ndarray:
    if isinstance(g, Linspace):
        return np.linspace(g.start, g.stop, g.num)
    vals = np.asarray(g, dtype=float)
    if vals.size == 0:
        raise ValidationError("grid is empty")
    return vals


class ConvertConfig(_Strict):
    command: Literal["convert"] = "convert"
    input: str
    target: Literal["kraus", "chi", "evolution", "dilation"]
    trace_convention: Literal["canonical", "normalized"] = "canonical"
    output: str = "channel.json"


class EccConfig(_Strict):
    command: Literal["ecc"] = "ecc"
    p: Grid


class NoiseSweepConfig(_Strict):
    command: Literal["noise-sweep"] = "noise-sweep"
    kind: Literal["dephasing", "amplitude", "phase_flip", "depolarizing", "relaxation"]
    values: Grid
    T1: Optional[float] = None
    T2: Optional[float] = None
    s: int = Field(default=2, ge=2, le=10)

    @model_validator(mode="after")
    def _times(self):
        given = (self.T1 is not None, self.T2 is not None)
        if given != ((self.kind == "relaxation"),) * 2:
            raise ValueError("T1 and T2 are required for relaxation and only allowed there")
        if self.s != 2 and self.kind != "depolarizing":
            raise ValueError("s applies to depolarizing noise only")
        return self


class RunConfig(_Strict):
    gate: str
    t_oper: float = Field(default=1.0, gt=0)
    g: Optional[float] = None
    dt: Optional[float] = None
    noise: Optional[dict[str, Any]] = None
    sample_times: Optional[Grid] = None
    label: Optional[str] = None

    @field_validator("gate")
    @classmethod
    def _known(cls, v):
        if v not in GATE_NAMES:
            raise ValueError(f"gate must be one of {GATE_NAMES}")
        return v


class GateSimConfig(RunConfig):
    command: Literal["gate-sim"] = "gate-sim"


class DynamicsRun(RunConfig):
    splits: list[Literal["ancilla_vs_physical", "channel_vs_channel"]] = ["ancilla_vs_physical"]
    sources: list[Literal["chi", "chi_tilde"]] = ["chi"]


class NegativityConfig(_Strict):
    command: Literal["negativity"] = "negativity"
    mode: Literal["depolarizing", "dynamics"]
    s: Optional[list[int]] = None
    p: Optional[Grid] = None
    runs: Optional[list[DynamicsRun]] = None

    @model_validator(mode="after")
    def _mode_fields(self):
        if self.mode == "depolarizing":
            if self.s is None or self.p is None or self.runs is not None:
                raise ValueError("depolarizing mode takes 's' and 'p' only")
            if not self.s:
                raise ValueError("s list is empty")
        elif self.runs is None or self.s is not None or self.p is not None:
            raise ValueError("dynamics mode takes 'runs' only")
        elif not self.runs:
            raise ValueError("runs list is empty")
        return self


SCHEMAS = {"convert": ConvertConfig, "ecc": EccConfig, "noise-sweep": NoiseSweepConfig,
           "gate-sim": GateSimConfig, "negativity": NegativityConfig}


def resolve_config(path: str) -> Path:
    """A config path, falling back to the bundled configs by file name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("qnoise") / "configs" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise ValidationError(f"config file not found: {path}")


def bundled_configs() -> list[str]:
    root = resources.files("qnoise") / "configs"
    return sorted(f.name for f in root.iterdir() if f.name.endswith(".json"))


def parse_config(command: str, data: Any):
    if not isinstance(data, dict):
        raise ValidationError("config must be a JSON object")
    if data.get("command", command) != command:
        raise ValidationError(f"config is for {data['command']!r}, not {command!r}")
    try:
        return SCHEMAS[command].model_validate(data)
    except pydantic.ValidationError as exc:
        errs = [{"loc": ".".join(map(str, e["loc"])), "msg": e["msg"]} for e in exc.errors()]
        raise ValidationError(f"invalid {command} config", errors=errs) from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _plot(args) -> Any:
    if not args.plot:
        return None
    from . import plotting
    return plotting


def cmd_convert(cfg: ConvertConfig, args) -> dict:
    src_path = Path(cfg.input)
    if not src_path.is_absolute() and args.config_dir and not src_path.exists():
        src_path = args.config_dir / src_path
    data = ser.load_json(src_path)
    src = ser.channel_from_json(data)
    out = ser.convert(src, cfg.target, cfg.trace_convention)
    back = ser.to_chi(out).matrix
    ref = ser.to_chi(src).matrix
    rt = float(np.linalg.norm(back - ref) / max(np.linalg.norm(ref), 1e-300))
    doc = ser.channel_to_json(out, source=data["representation"],
                              round_trip_chi_error=rt,
                              rank=channel_rank(ser.to_chi(src)))
    path = args.out / cfg.output
    ser.dump_json(doc, path)
    return {"output": str(path), "round_trip_chi_error": rt}


def cmd_ecc(cfg: EccConfig, args) -> dict:
    p = grid_values(cfg.p)
    if np.any((p < 0) | (p > 1)):
        raise ValidationError("p must lie in [0, 1]")
    rows = an.ecc_table(p, jobs=args.jobs)
    path = args.out / "ecc.csv"
    ser.write_csv(path, ("p", "F_noise", "F_code", "F_code_simulated"), rows)
    if (plt := _plot(args)):
        plt.plot_ecc(rows, args.out / "ecc.svg")
    worst = max(abs(r[2] - r[3]) for r in rows)
    return {"output": str(path), "max_analytic_vs_simulated": worst}


def _noise_chi(cfg: NoiseSweepConfig, x: float):
    if cfg.kind == "relaxation":
        return kraus_to_chi(relaxation_kraus(x, RelaxationParams(cfg.T1, cfg.T2)))
    key = "gamma" if cfg.kind in ("dephasing", "amplitude") else "p"
    spec = NoiseSpec.from_dict({"kind": cfg.kind, key: x})
    u = np.eye(cfg.s) if cfg.kind == "depolarizing" else None
    return kraus_to_chi(spec.kraus(u=u))


def cmd_noise_sweep(cfg: NoiseSweepConfig, args) -> dict:
    xs = grid_values(cfg.values)
    chis = an._pool_map(lambda x: _noise_chi(cfg, x), xs, args.jobs)
    s = chis[0].dim
    ident = identity_chi(s)
    split = an.SplitSpec.reference(s)
    param = "t" if cfg.kind == "relaxation" else ("gamma" if cfg.kind in
                                                  ("dephasing", "amplitude") else "p")
    fid = an.SweepResult(param, xs, [an.fidelity(ident, c) for c in chis], "fidelity",
                         gate=cfg.kind)
    neg = an.SweepResult(param, xs, [an.negativity(c.normalized().matrix, split) for c in chis],
                         "negativity", gate=cfg.kind, split="ancilla_vs_physical")
    rank = an.SweepResult(param, xs, [float(channel_rank(c)) for c in chis], "rank",
                          gate=cfg.kind)
    results = [fid, neg, rank]
    path = args.out / "noise_sweep.csv"
    ser.write_sweeps(path, results)
    if (plt := _plot(args)):
        plt.plot_sweeps([fid, neg], args.out / "noise_sweep.svg", title=f"{cfg.kind} noise")
    return {"output": str(path)}


def _run(cfg: RunConfig, args):
    gate = gate_library(cfg.gate, cfg.t_oper, cfg.g)
    noise = None
    if cfg.noise is not None:
        d = dict(cfg.noise)
        d.setdefault("kind", "relaxation")
        noise = NoiseSpec.from_dict(d)
        if noise.kind != "relaxation":
            raise ValidationError("gate simulation supports relaxation noise only")
    dt = args.dt if args.dt is not None else cfg.dt
    times = None if cfg.sample_times is None else grid_values(cfg.sample_times)
    return simulate(gate, noise, dt, times)


def _opt(x) -> Any:
    return "" if x is None else float(x)


def cmd_gate_sim(cfg: GateSimConfig, args) -> dict:
    run = _run(cfg, args)
    c = run.gate.comp_dim
    anc = an.SplitSpec.named("ancilla_vs_physical", c)
    chan = an.SplitSpec.named("channel_vs_channel", c) if c == 4 else None
    traj, rows = [], []
    for t, chi, tilde in zip(run.times, run.chi, run.chi_tilde):
        ideal = run.gate.ideal_unitary(t)
        f = ft = n_chan = n_tilde = None
        if ideal is not None:
            f = an.fidelity(kraus_to_chi(KrausSet((ideal,))), chi)
        if tilde is not None:
            ft = an.fidelity(identity_chi(c), tilde)
        if chan is not None:
            n_chan = an.negativity(chi.matrix, chan)
            if tilde is not None:
                n_tilde = an.negativity(tilde.matrix, chan)
        rows.append((float(t), _opt(f), _opt(ft), an.negativity(chi.matrix, anc),
                     _opt(n_chan), _opt(n_tilde)))
        traj.append({"t": float(t), "chi": ser.channel_to_json(chi),
                     "chi_tilde": None if tilde is None else ser.channel_to_json(tilde)})
    ser.dump_json({"gate": run.gate.name, "dt": run.dt, "samples": traj},
                  args.out / "chi_trajectory.json")
    ser.write_csv(args.out / "metrics.csv",
                  ("t", "fidelity", "fidelity_tilde", "negativity_ancilla",
                   "negativity_channel", "negativity_tilde_channel"), rows)
    final_f = rows[-1][1]
    summary = {"gate": run.gate.name, "t": rows[-1][0], "dt": run.dt,
               "fidelity": final_f if final_f != "" else None,
               "trace": float(np.trace(run.chi[-1].matrix).real)}
    ser.dump_json(summary, args.out / "summary.json")
    if (plt := _plot(args)):
        plt.plot_chi(run.chi[-1], args.out / "chi_final.svg",
                     title=f"{run.gate.name}, t = {rows[-1][0]:g}")
        curves = [an.fidelity_trajectory(run)]
        curves.append(an.entanglement_dynamics(run, anc))
        if chan is not None:
            curves.append(an.entanglement_dynamics(run, chan))
        plt.plot_sweeps(curves, args.out / "metrics.svg", ylabel="value")
    return summary


def cmd_negativity(cfg: NegativityConfig, args) -> dict:
    path = args.out / "negativity.csv"
    if cfg.mode == "depolarizing":
        results = an.depolarizing_negativity_sweep(cfg.s, grid_values(cfg.p), jobs=args.jobs)
        crit = [(r.meta["s"], an.critical_noise(r), r.meta["s"] / (r.meta["s"] + 1))
                for r in results]
        ser.write_sweeps(path, results)
        ser.write_csv(args.out / "critical.csv", ("s", "p_c", "s_over_s_plus_1"), crit)
        summary = {"output": str(path),
                   "critical": {str(s): pc for s, pc, _ in crit}}
    else:
        def one(rc: DynamicsRun):
            run = _run(rc, args)
            out = []
            for src in rc.sources:
                for sp in rc.splits:
                    r = an.entanglement_dynamics(run, sp, src)
                    r.gate = rc.label or rc.gate
                    out.append(r)
            return out
        results = [r for rs in an._pool_map(one, cfg.runs, args.jobs) for r in rs]
        ser.write_sweeps(path, results)
        summary = {"output": str(path), "curves": len(results)}
    if (plt := _plot(args)):
        plt.plot_sweeps(results, args.out / "negativity.svg")
    return summary


HANDLERS = {"convert": cmd_convert, "ecc": cmd_ecc, "noise-sweep": cmd_noise_sweep,
            "gate-sim": cmd_gate_sim, "negativity": cmd_negativity}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (path or bundled name)")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--plot", action="store_true", help="also write SVG figures")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="parallel workers for sweeps (default: all cores)")
    common.add_argument("--dt", type=float, help="override the simulation time step")
    p = argparse.ArgumentParser(prog="qnoise", description=__doc__.splitlines()[0])
    p.add_argument("--list-configs", action="store_true", help="list bundled configs")
    sub = p.add_subparsers(dest="command")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "convert":
            sp.add_argument("input", nargs="?", help="channel JSON (instead of --config)")
            sp.add_argument("--to", choices=ser.REPRESENTATIONS, help="target representation")
            sp.add_argument("--trace-convention", choices=("canonical", "normalized"))
    return p


def _config_data(args) -> dict:
    if args.command == "convert" and args.input is not None:
        if args.config or not args.to:
            raise ValidationError("give either --config or INPUT --to REPR")
        d = {"input": args.input, "target": args.to}
        if args.trace_convention:
            d["trace_convention"] = args.trace_convention
        return d
    if not args.config:
        raise ValidationError(f"{args.command} needs --config")
    path = resolve_config(args.config)
    args.config_dir = path.parent
    return ser.load_json(path)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_configs:
        print("\n".join(bundled_configs()))
        return 0
    if not args.command:
        build_parser().print_usage(sys.stderr)
        return 2
    args.config_dir = None
    try:
        if args.jobs < 1:
            raise ValidationError("--jobs must be at least 1")
        cfg = parse_config(args.command, _config_data(args))
        args.out = Path(args.out)
        args.out.mkdir(parents=True, exist_ok=True)
        result = HANDLERS[args.command](cfg, args)
    except QNoiseError as exc:
        print(json.dumps(exc.to_dict(), default=str), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        err = ValidationError(str(exc))
        print(json.dumps(err.to_dict(), default=str), file=sys.stderr)
        return err.exit_code
    print(json.dumps(result, default=str))
    return 0


def main() -> None:
    level = os.environ.get("QNOISE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
