"""Batch front end: validates a job config, runs the pipeline, writes
CSV/JSON artifacts and a pass/fail summary.

Usage:
    sumrule-lab run config.json [--out DIR] [--k-max X] [--ode-tol T]

The config is a JSON document:

    {
      "potential": {"family": "sech2", "params": {"strength": 5}},
      "tasks": [
        {"kind": "phases", "channel": "antisymmetric"},
        {"kind": "bound_states", "channel": "antisymmetric"},
        {"kind": "sumrule", "channel": "antisymmetric", "n": 1, "m": 1},
        {"kind": "levinson", "channel": "antisymmetric"},
        {"kind": "oversub"},
        {"kind": "bf", "order": 1},
        {"kind": "wkb", "n": 1},
        {"kind": "figure1", "l_min": 1, "l_max": 6, "n_list": [1, 2]}
      ],
      "numerics": {"K_cut": null, "m_max": 3, "tolerance": 1e-3},
      "output_dir": "out"
    }

Identity-style tasks (sumrule, levinson, oversub, bf, wkb) are judged
against the tolerance; the exit status is nonzero iff any of them fails
and is not flagged "expect_failure".  Output files carry 12 significant
digits and no timestamps, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .channels import ANTISYM, SYM, Channel
from .errors import ConfigError, SumruleLabError
from .potentials import PotentialSpec
from . import jost1d, radial, spectrum, sumrules, wkb

_TASK_KINDS = (
    "phases",
    "born",
    "bound_states",
    "sumrule",
    "levinson",
    "oversub",
    "bf",
    "wkb",
    "figure1",
)

_NEEDS_PHASES = {"sumrule", "levinson", "oversub", "bf"}
_NEEDS_BOUND = {"sumrule", "levinson", "oversub", "bf"}


@dataclass
class JobConfig:
    potential: PotentialSpec
    tasks: list
    numerics: dict = field(default_factory=dict)
    output_dir: str = "out"

    @classmethod
    def from_json_dict(cls, doc: dict) -> "JobConfig":
        try:
            pot = PotentialSpec.from_json_dict(doc["potential"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad potential spec: {exc}") from exc
        tasks = doc.get("tasks", [])
        if not isinstance(tasks, list):
            raise ConfigError("tasks must be a list")
        cfg = cls(
            potential=pot,
            tasks=tasks,
            numerics=dict(doc.get("numerics", {})),
            output_dir=doc.get("output_dir", "out"),
        )
        cfg.validate()
        return cfg

    def validate(self):
        """Fail fast: every task is checked before any computation starts."""
        kinds_present = set()
        channels_with_phases = set()
        channels_with_bound = set()
        for i, task in enumerate(self.tasks):
            if not isinstance(task, dict) or "kind" not in task:
                raise ConfigError(f"task {i}: missing kind")
            kind = task["kind"]
            if kind not in _TASK_KINDS:
                raise ConfigError(f"task {i}: unknown kind {kind!r}")
            kinds_present.add(kind)
            if kind in ("phases", "born", "bound_states", "sumrule", "levinson"):
                ch = self._channel_of(task, i)
                if kind == "phases":
                    channels_with_phases.add(ch.label)
                if kind == "bound_states":
                    channels_with_bound.add(ch.label)
            if kind == "sumrule":
                n, m = task.get("n"), task.get("m")
                if not isinstance(n, int) or not isinstance(m, int) or m < n or n < 0:
                    raise ConfigError(f"task {i}: sumrule needs integers m >= n >= 0")
            if kind == "bf" and task.get("order") not in (1, 2):
                raise ConfigError(f"task {i}: bf order must be 1 or 2")
            if kind == "wkb" and not isinstance(task.get("n", 1), int):
                raise ConfigError(f"task {i}: wkb n must be an integer")
            if kind == "figure1":
                if task.get("l_min", 1) < 1 or task.get("l_max", 6) < task.get("l_min", 1):
                    raise ConfigError(f"task {i}: bad l range")
        # dependency wiring: identity checks consume the phase sweep and the
        # spectrum of their channel, which must be requested explicitly
        for i, task in enumerate(self.tasks):
            kind = task["kind"]
            if kind in ("sumrule", "levinson"):
                ch = self._channel_of(task, i)
                if ch.label not in channels_with_phases:
                    raise ConfigError(
                        f"task {i}: {kind} on {ch.label} needs a phases task "
                        "for that channel"
                    )
                if ch.label not in channels_with_bound:
                    raise ConfigError(
                        f"task {i}: {kind} on {ch.label} needs a bound_states "
                        "task for that channel"
                    )
            if kind in ("oversub", "bf"):
                if ANTISYM.label not in channels_with_phases:
                    raise ConfigError(
                        f"task {i}: {kind} needs a phases task on the "
                        "antisymmetric channel"
                    )

    def _channel_of(self, task: dict, i: int) -> Channel:
        text = task.get("channel")
        if text is None:
            if task["kind"] in ("oversub", "bf"):
                return ANTISYM
            raise ConfigError(f"task {i}: missing channel")
        try:
            return Channel.parse(str(text))
        except ValueError as exc:
            raise ConfigError(f"task {i}: {exc}") from exc


def _fmt(x: float) -> str:
    return f"{x:.11e}"


class JobRunner:
    def __init__(self, config: JobConfig):
        self.config = config
        self.pot = config.potential
        num = config.numerics
        self.K_cut = num.get("K_cut")
        self.m_max = int(num.get("m_max", 3))
        self.tolerance = float(num.get("tolerance", 1e-3))
        self.ode_tol = (
            float(num.get("ode_atol", jost1d.DEFAULT_ATOL)),
            float(num.get("ode_rtol", jost1d.DEFAULT_RTOL)),
        )
        self._sweeps: dict[str, sumrules.ChannelSweep] = {}
        self.summary_lines: list[str] = []
        self.failures = 0

    # -- shared caches -------------------------------------------------------

    def sweep(self, channel: Channel) -> sumrules.ChannelSweep:
        if channel.label not in self._sweeps:
            self._sweeps[channel.label] = sumrules.ChannelSweep(
                self.pot, channel, self.K_cut, self.m_max, self.ode_tol
            )
        return self._sweeps[channel.label]

    def _phase_grid(self, task: dict):
        import numpy as np

        num = self.config.numerics.get("k_grid", {})
        lo = float(task.get("k_min", num.get("min", 5e-2)))
        hi = float(task.get("k_max", num.get("max", 50.0 * self.pot.k_scale)))
        pts = int(task.get("points", num.get("points", 200)))
        if num.get("spacing", "log") == "linear":
            return np.linspace(lo, hi, pts)
        return np.geomspace(lo, hi, pts)

    # -- task execution ------------------------------------------------------

    def run(self) -> dict:
        workers = int(os.environ.get("SUMRULE_LAB_THREADS", "4"))
        results: dict = {
            "phases": {},
            "born": {},
            "spectrum": {},
            "sumrules": [],
            "levinson": [],
            "oversub": [],
            "bf": [],
            "wkb": [],
            "figure1": None,
        }
        # warm per-channel sweeps (the expensive part) concurrently
        sweep_channels = []
        if not self.pot.singular:
            for task in self.config.tasks:
                if task["kind"] in _NEEDS_PHASES:
                    ch = self.config._channel_of(task, -1)
                    if ch.label not in [c.label for c in sweep_channels]:
                        sweep_channels.append(ch)
        if workers > 1 and len(sweep_channels) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(self.sweep, sweep_channels))

        for i, task in enumerate(self.config.tasks):
            try:
                self._run_task(task, results)
            except SumruleLabError as exc:
                self.failures += 1
                self.summary_lines.append(
                    f"[FAIL] task {i} ({task['kind']}): {type(exc).__name__}: {exc}"
                )
        return results

    def _run_task(self, task: dict, results: dict):
        kind = task["kind"]
        tol = float(task.get("tolerance", self.tolerance))
        expect_failure = bool(task.get("expect_failure", False))

        if kind == "phases":
            ch = self.config._channel_of(task, -1)
            grid = self._phase_grid(task)
            if ch.is_1d:
                table = jost1d.build_phase_table(
                    self.pot, ch, grid, self.m_max, *self.ode_tol
                )
            else:
                table = radial.build_phase_table_radial(
                    self.pot, ch.ell, grid, self.m_max, *self.ode_tol
                )
            results["phases"][ch.label] = table
            self.summary_lines.append(
                f"[ok]   phases {ch.label}: {len(grid)} points, "
                f"delta(k_max)={_fmt(float(table.delta[-1]))}"
            )
            return

        if kind == "born":
            from . import born as born_mod

            ch = self.config._channel_of(task, -1)
            grid = self._phase_grid(task)
            orders = int(task.get("orders", self.m_max))
            eng = born_mod.BornEngine(
                self.pot, ell=None if ch.is_1d else ch.ell
            )
            dump = {"channel": ch.label, "orders": {}}
            for nu in range(1, orders + 1):
                vals = [eng.born_beta_value(nu, k) for k in grid]
                dump["orders"][str(nu)] = {
                    "k": [float(k) for k in grid],
                    "re": [v.real for v in vals],
                    "im": [v.imag for v in vals],
                }
            results["born"][ch.label] = dump
            self.summary_lines.append(f"[ok]   born {ch.label}: orders 1..{orders}")
            return

        if kind == "bound_states":
            ch = self.config._channel_of(task, -1)
            bs = spectrum.bound_states(self.pot, ch)
            results["spectrum"][ch.label] = spectrum.bound_state_report(bs)
            self.summary_lines.append(
                f"[ok]   bound_states {ch.label}: {bs.count} states, "
                f"agreement={_fmt(bs.agreement)}"
            )
            return

        if kind == "sumrule":
            ch = self.config._channel_of(task, -1)
            n, m = task["n"], task["m"]
            sweep = None if self.pot.singular else self.sweep(ch)
            rep = sumrules.verify(self.pot, ch, n, m, self.K_cut, sweep)
            results["sumrules"].append(rep)
            scale = max(abs(rep.lhs), 1.0)
            ok = abs(rep.residual) < tol * scale
            self._record(
                ok,
                expect_failure,
                f"sumrule {ch.label} (n={n},m={m}): residual={_fmt(rep.residual)} "
                f"tol={_fmt(tol * scale)}",
            )
            return

        if kind == "levinson":
            ch = self.config._channel_of(task, -1)
            sweep = None if self.pot.singular else self.sweep(ch)
            rep = sumrules.levinson(self.pot, ch, sweep)
            results["levinson"].append(rep)
            ok = abs(rep["residual"]) < tol * math.pi
            self._record(
                ok,
                expect_failure,
                f"levinson {ch.label}: delta0={_fmt(rep['delta0'])} "
                f"expected={_fmt(rep['expected'])} residual={_fmt(rep['residual'])}"
                + (" [half-bound]" if rep["half_bound"] else ""),
            )
            return

        if kind == "oversub":
            sweep = self.sweep(ANTISYM)
            val = sumrules.oversubtraction_check(self.pot, ANTISYM, 2, sweep)
            results["oversub"].append(val)
            scale = max(sum(k**2 for k in sweep.bound.kappas), 1.0)
            ok = abs(val) < tol * scale
            self._record(ok, expect_failure, f"oversubtraction: value={_fmt(val)} tol={_fmt(tol * scale)}")
            return

        if kind == "bf":
            order = task["order"]
            sweep = self.sweep(ANTISYM)
            rep = sumrules.buslaev_faddeev(self.pot, order, sweep)
            results["bf"].append(rep)
            scale = max(abs(rep["rhs"]), sum(k**2 for k in sweep.bound.kappas), 1.0)
            ok = abs(rep["residual"]) < tol * scale
            self._record(
                ok,
                expect_failure,
                f"trace identity order {order}: residual={_fmt(rep['residual'])} "
                f"tol={_fmt(tol * scale)}",
            )
            return

        if kind == "wkb":
            n = int(task.get("n", 1))
            ps, wm = wkb.semiclassical_check(self.pot, n)
            est = wkb.wkb_estimate(self.pot, n)
            results["wkb"].append(
                {"n": n, "phase_space": ps, "moment": wm, "estimate": est.__dict__}
            )
            ok = abs(ps - wm) < 1e-8 * max(abs(wm), 1.0)
            self._record(
                ok,
                expect_failure,
                f"wkb n={n}: moment={_fmt(wm)} phase_space={_fmt(ps)} "
                f"relative_error={_fmt(est.relative_error)}",
            )
            return

        if kind == "figure1":
            rows = wkb.figure1_data(
                n_list=tuple(task.get("n_list", (0, 1, 2))),
                l_range=range(int(task.get("l_min", 1)), int(task.get("l_max", 6)) + 1),
            )
            results["figure1"] = rows
            self.summary_lines.append(f"[ok]   figure1: {len(rows)} rows")
            return

        raise ConfigError(f"unhandled task kind {kind!r}")

    def _record(self, ok: bool, expect_failure: bool, text: str):
        if ok:
            self.summary_lines.append(f"[PASS] {text}")
        elif expect_failure:
            self.summary_lines.append(f"[KNOWN-FAIL] {text} (expected failure)")
        else:
            self.summary_lines.append(f"[FAIL] {text}")
            self.failures += 1


def emit_report(results: dict, runner: JobRunner, out_dir: Path) -> list[str]:
    """Write the deterministic artifact set; returns the file names."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    for label, table in sorted(results["phases"].items()):
        name = f"phases_{label}.csv"
        (out_dir / name).write_text(table.to_csv())
        written.append(name)

    for label, dump in sorted(results["born"].items()):
        name = f"born_{label}.json"
        (out_dir / name).write_text(json.dumps(dump, indent=1, sort_keys=True))
        written.append(name)

    if results["spectrum"]:
        doc = {label: rep for label, rep in sorted(results["spectrum"].items())}
        (out_dir / "spectrum.json").write_text(json.dumps(doc, indent=1, sort_keys=True))
        written.append("spectrum.json")

    if results["sumrules"]:
        lines = ["channel,n,m,lhs,rhs_spectral,anomaly,half_bound_correction,residual"]
        for rep in results["sumrules"]:
            lines.append(
                f"{rep.channel.label},{rep.n},{rep.m},{_fmt(rep.lhs)},"
                f"{_fmt(rep.rhs_spectral)},{_fmt(rep.anomaly)},"
                f"{_fmt(rep.half_bound_correction)},{_fmt(rep.residual)}"
            )
        (out_dir / "sumrules.csv").write_text("\n".join(lines) + "\n")
        written.append("sumrules.csv")
        doc = [rep.to_json_dict() for rep in results["sumrules"]]
        if results["levinson"]:
            doc = {"sum_rules": doc, "levinson": results["levinson"]}
        (out_dir / "sumrules.json").write_text(json.dumps(doc, indent=1, sort_keys=True))
        written.append("sumrules.json")

    if results["figure1"]:
        (out_dir / "figure1.csv").write_text(wkb.figure1_csv(results["figure1"]))
        written.append("figure1.csv")

    summary = "\n".join(runner.summary_lines) + "\n"
    status = "FAILED" if runner.failures else "OK"
    summary += f"status: {status} ({runner.failures} failures)\n"
    (out_dir / "summary.txt").write_text(summary)
    written.append("summary.txt")
    return written


def run_job(config: JobConfig, out_dir: str | None = None) -> int:
    runner = JobRunner(config)
    results = runner.run()
    emit_report(results, runner, Path(out_dir or config.output_dir))
    return 1 if runner.failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sumrule-lab",
        description="Scattering phases, bound states and finite-energy sum-rule checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute a job config")
    runp.add_argument("config", help="path to the JSON job config")
    runp.add_argument("--out", help="output directory (overrides config)")
    runp.add_argument("--k-max", type=float, help="override K_cut")
    runp.add_argument("--ode-tol", type=float, help="override the ODE relative tolerance")
    args = parser.parse_args(argv)

    if args.command == "run":
        try:
            doc = json.loads(Path(args.config).read_text())
            config = JobConfig.from_json_dict(doc)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if args.k_max:
            config.numerics["K_cut"] = args.k_max
        if args.ode_tol:
            config.numerics["ode_rtol"] = args.ode_tol
            config.numerics["ode_atol"] = args.ode_tol * 1e-2
        code = run_job(config, args.out)
        out = Path(args.out or config.output_dir)
        print((out / "summary.txt").read_text(), end="")
        return code
    return 2


if __name__ == "__main__":
    sys.exit(main())
