"""
Command-line entry point.

Exit codes: 0 success, 1 runtime error or truth-table mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import calibration, logic, magnetics, memory, pulsedsl
from .config import RunConfig
from .errors import InfeasibleWarning, MemtranstorError
from .readout import ReadoutConfig

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration (defaults apply to missing keys)")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--seed", type=int, help="override readout.rng_seed")
    common.add_argument("--snr", type=float, help="add voltage noise at this SNR [dB] relative to alpha_max")

    parser = _Parser(prog="memtranstor", description="Behavioral memtranstor memory and logic simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="run a pulse program, emit a JSON-lines trace")
    p.add_argument("program", type=Path)

    p = sub.add_parser("truth-table", parents=[common], help="verify a gate's truth table")
    p.add_argument("gate", choices=["NOR_A", "NOR_B", "NAND"])
    p.add_argument("--trials", type=int, default=1, help="repeat with consecutive seeds (noisy runs)")
    p.add_argument("--json", action="store_true", help="emit LogicRun records as JSON lines")

    p = sub.add_parser("memory-cycle", parents=[common], help="multi-level write/read endurance cycling")
    p.add_argument("--cycles", type=int, required=True)
    p.add_argument("--pattern", default="0,1,2,3", help="comma-separated level sequence")

    p = sub.add_parser("sweep-h", parents=[common], help="triangle dc-field sweep, emit H, m, alpha_E")
    p.add_argument("--min", dest="h_min", type=float, required=True)
    p.add_argument("--max", dest="h_max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True, help="intervals per sweep leg")
    p.add_argument("--polarization", type=float, choices=[-1.0, 1.0], default=1.0)
    p.add_argument("--periods", type=int, default=1)

    p = sub.add_parser("calibrate", parents=[common], help="fit switching parameters to constraints")
    p.add_argument("--constraints", type=Path, help="constraint JSON; built-in defaults when omitted")
    p.add_argument("--budget", type=int, default=4000)

    sub.add_parser("params", parents=[common], help="print the effective configuration")
    return parser


def _readout(cfg: RunConfig, args: argparse.Namespace) -> ReadoutConfig:
    rc = cfg.readout
    if args.seed is not None:
        rc = dataclasses.replace(rc, rng_seed=args.seed)
    if args.snr is not None:
        rc = rc.with_snr(args.snr, cfg.magnet.alpha_max, cfg.geometry)
    return rc


def _csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v: object) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def cmd_simulate(cfg: RunConfig, args: argparse.Namespace) -> tuple[str, int]:
    program = pulsedsl.parse(args.program.read_text(encoding="utf-8"))
    trace = pulsedsl.execute(program, cfg.build_device(), _readout(cfg, args))
    return trace.to_jsonl(), EXIT_OK


def cmd_truth_table(cfg: RunConfig, args: argparse.Namespace) -> tuple[str, int]:
    if args.trials < 1:
        raise MemtranstorError(f"--trials must be >= 1: {args.trials}")
    gate = cfg.gate_configs()[args.gate]
    device = cfg.build_device()
    rc = _readout(cfg, args)
    results = []
    for trial in range(args.trials):
        trial_cfg = dataclasses.replace(rc, rng_seed=rc.rng_seed + trial)
        results.append(logic.truth_table(gate, device, trial_cfg))
    ok = all(r.passed for r in results)
    if args.json:
        lines = []
        for trial, res in enumerate(results):
            for run in res.runs:
                lines.append(json.dumps({"gate": gate.name, "trial": trial, **run.to_dict()}))
        text = "".join(line + "\n" for line in lines)
    else:
        rows = [
            [trial, *r.inputs, _fmt(r.alpha_out), r.output, r.expected, "pass" if r.passed else "FAIL"]
            for trial, res in enumerate(results)
            for r in res.runs
        ]
        text = _csv(["trial", "X1", "X2", "alpha_E", "output", "expected", "pass"], rows)
    if not ok:
        failed = sum(not r.passed for r in results)
        print(f"{gate.name}: truth table mismatch in {failed} of {len(results)} trial(s)", file=sys.stderr)
    return text, EXIT_OK if ok else EXIT_RUNTIME


def cmd_memory_cycle(cfg: RunConfig, args: argparse.Namespace) -> tuple[str, int]:
    try:
        pattern = [int(tok) for tok in args.pattern.split(",") if tok.strip()]
    except ValueError as ex:
        raise MemtranstorError(f"bad --pattern {args.pattern!r}") from ex
    table = cfg.level_table()
    report = memory.cycle_endurance(cfg.build_device(), table, pattern, args.cycles, _readout(cfg, args))
    if report.errors:
        print(f"memory-cycle: {report.errors} read-back error(s)", file=sys.stderr)
    return report.to_csv(), EXIT_OK


def cmd_sweep_h(cfg: RunConfig, args: argparse.Namespace) -> tuple[str, int]:
    if args.periods < 1:
        raise MemtranstorError(f"--periods must be >= 1: {args.periods}")
    device = cfg.build_device()
    state = device.magnetization
    rows = []
    for _ in range(args.periods):
        period, state = magnetics.sweep_h_loop(
            state, args.h_min, args.h_max, args.steps, args.polarization, device.composition
        )
        rows.extend(period)
    return _csv(["H_Oe", "m", "alpha_E"], [[_fmt(v) for v in row] for row in rows]), EXIT_OK


def cmd_calibrate(cfg: RunConfig, args: argparse.Namespace) -> tuple[str, int]:
    if args.constraints is None:
        constraints = calibration.default_constraints()
    else:
        constraints = calibration.ConstraintSet.from_json(args.constraints.read_text(encoding="utf-8"))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", InfeasibleWarning)
        result = calibration.fit(constraints, budget=args.budget, base=cfg.switching)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    for c, slack in zip(constraints, result.residuals):
        print(
            f"F({c.field:g} kV/cm, {c.n_pulses} x {c.width_ms:g} ms) = {c.fraction(result.params):.4f}"
            f"  slack {slack:+.4f}",
            file=sys.stderr,
        )
    fragment = {"switching": dataclasses.asdict(result.params)}
    return json.dumps(fragment, indent=2) + "\n", EXIT_OK


def cmd_params(cfg: RunConfig, args: argparse.Namespace) -> tuple[str, int]:
    return cfg.to_json(), EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "truth-table": cmd_truth_table,
    "memory-cycle": cmd_memory_cycle,
    "sweep-h": cmd_sweep_h,
    "calibrate": cmd_calibrate,
    "params": cmd_params,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        text, code = _COMMANDS[args.command](cfg, args)
        if args.out is not None:
            args.out.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return code
    except (MemtranstorError, ValueError, OSError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
