"""Command-line front end.

::

    scatter1d run <config.json> [--set path=value]... [--oracle]
    scatter1d verify <config.json> [--set path=value]...
    scatter1d converge <config.json> --grids 32,64,128,256

Exit codes: 0 success, 1 verification failed, 2 configuration error,
3 numerical failure, 4 file-system failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .exceptions import ScatteringError
from .lssolver import find_bound_states
from .observables import ScatteringReport, align_phase
from .oracle import delta_closed_forms, numerov_phase_shifts
from .rspace import amplitude_from_wavefunction, asymptotic_residual, solve_wavefunction
from .sweep import convergence_study, momenta, sweep
from .verification import run_acceptance

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

RESULT_FIELDS = (
    "k", "E", "delta0", "delta1",
    "re_f_plus", "im_f_plus", "re_f_minus", "im_f_minus",
    "sigma_plus", "sigma_minus", "sigma_tot", "sigma_tot_phase", "R", "T",
    "optical_residual_13", "optical_residual_14", "unitarity_residual",
    "condition_estimate", "flags",
)
WAVEFUNCTION_FIELDS = ("x", "re_psi", "im_psi", "abs_psi2")
CONVERGE_FIELDS = ("k", "n_grid", "delta0", "delta1", "diff_delta0", "diff_delta1")
ORACLE_FIELDS = ("k", "source", "delta0_ls", "delta1_ls", "delta0_oracle", "delta1_oracle",
                 "max_phase_difference")
CONDITION_FLAG = 1e12


class NumericFailure(Exception):
    def __init__(self, task: str, context: str, cause: Exception):
        super().__init__(f"numeric failure in {task} [{context}]: {cause}")


def _context(config: RunConfig, **extra) -> str:
    pot = config.potential
    items = {"potential": pot.kind.value, "strength": pot.strength, "length": pot.length,
             "n_grid": config.solver.n_grid, **extra}
    return ", ".join(f"{key}={value}" for key, value in items.items())


def row_flags(report: ScatteringReport, tolerances: dict) -> str:
    flags = []
    if not abs(report.R + report.T - 1.0) <= tolerances["rt"]:
        flags.append("rt")
    if not report.unitarity_residual <= tolerances["unitarity"]:
        flags.append("unitarity")
    if not max(report.optical_residual_13, report.optical_residual_14) <= tolerances["optical"]:
        flags.append("optical")
    if not report.sigma_mismatch <= tolerances["sigma"]:
        flags.append("sigma")
    if not report.condition_estimate <= CONDITION_FLAG:
        flags.append("condition")
    return ";".join(flags)


def result_row(report: ScatteringReport, tolerances: dict) -> dict:
    return {
        "k": report.k, "E": report.energy, "delta0": report.delta0, "delta1": report.delta1,
        "re_f_plus": report.f_plus.real, "im_f_plus": report.f_plus.imag,
        "re_f_minus": report.f_minus.real, "im_f_minus": report.f_minus.imag,
        "sigma_plus": report.sigma_plus, "sigma_minus": report.sigma_minus,
        "sigma_tot": report.sigma_tot, "sigma_tot_phase": report.sigma_tot_phase,
        "R": report.R, "T": report.T,
        "optical_residual_13": report.optical_residual_13,
        "optical_residual_14": report.optical_residual_14,
        "unitarity_residual": report.unitarity_residual,
        "condition_estimate": report.condition_estimate,
        "flags": row_flags(report, tolerances),
    }


def format_value(value, precision: int = 17) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    # %-formatting ignores the locale
    return "%.*e" % (precision - 1, float(value))


def csv_text(fields, rows, precision: int = 17) -> str:
    buf = io.StringIO()
    buf.write(",".join(fields) + "\n")
    for row in rows:
        buf.write(",".join(format_value(row[f], precision) for f in fields) + "\n")
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, complex):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def json_text(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n"


def k_label(k: float) -> str:
    return format(float(k), "g")


class Run:
    """Executes the tasks of one configuration and stages every output file."""

    def __init__(self, config: RunConfig, oracle: bool = False, echo=None):
        self.config = config
        self.oracle = oracle
        self.echo = echo or (lambda line: None)
        self.files: dict[str, str] = {}
        self.status = EXIT_OK
        self._reports = None

    @property
    def ks(self) -> np.ndarray:
        sw = self.config.sweep
        return momenta(sw.k_min, sw.k_max, sw.n_k, sw.spacing)

    def reports(self) -> list:
        if self._reports is None:
            so = self.config.solver
            try:
                self._reports = sweep(self.config.potential, self.ks, so.n_grid, so.map_scale)
            except (ScatteringError, ArithmeticError, np.linalg.LinAlgError) as exc:
                raise NumericFailure("observables", _context(self.config), exc) from exc
        return self._reports

    def _emit(self, stem: str, fields, rows, payload):
        out = self.config.output
        if "csv" in out.formats:
            self.files[f"{stem}.csv"] = csv_text(fields, rows, out.precision)
        if "json" in out.formats:
            self.files[f"{stem}.json"] = json_text(payload)

    def task_observables(self):
        tol = self.config.solver.tolerances
        rows = [result_row(r, tol) for r in self.reports()]
        self._emit("observables", RESULT_FIELDS, rows, {"fields": list(RESULT_FIELDS), "rows": rows})
        flagged = sum(1 for r in rows if r["flags"])
        self.echo(f"observables: {len(rows)} rows, {flagged} flagged")
        if self.oracle:
            self.task_oracle()

    def task_oracle(self):
        model = self.config.potential
        rows = []
        for rep in self.reports():
            try:
                if model.is_delta:
                    ref = delta_closed_forms(model.strength, rep.k)
                else:
                    ref = numerov_phase_shifts(model, rep.k)
            except (ScatteringError, ValueError) as exc:
                raise NumericFailure("oracle", _context(self.config, k=rep.k), exc) from exc
            d0 = align_phase(rep.delta0, ref.delta0)
            d1 = align_phase(rep.delta1, ref.delta1)
            gap = max(abs(d0 - ref.delta0), abs(d1 - ref.delta1))
            rows.append({"k": rep.k, "source": ref.source, "delta0_ls": d0, "delta1_ls": d1,
                         "delta0_oracle": ref.delta0, "delta1_oracle": ref.delta1,
                         "max_phase_difference": gap})
        self._emit("oracle", ORACLE_FIELDS, rows, {"fields": list(ORACLE_FIELDS), "rows": rows})
        self.echo(f"oracle: max phase difference {max(r['max_phase_difference'] for r in rows):.3e}")

    def task_wavefunction(self):
        cfg = self.config.wavefunction
        model = self.config.potential
        ks = cfg.k or (float(self.ks[0]),)
        precision = self.config.output.precision
        for k in ks:
            grid = None
            if cfg.x_min is not None or cfg.x_max is not None:
                span = 3.0 * (model.range if model.range > 0 else 2.0 * math.pi / k)
                lo = -span if cfg.x_min is None else float(cfg.x_min)
                hi = span if cfg.x_max is None else float(cfg.x_max)
                grid = np.linspace(lo, hi, cfg.n_x)
            try:
                profile = solve_wavefunction(model, k, grid)
            except (ScatteringError, ValueError) as exc:
                raise NumericFailure("wavefunction", _context(self.config, k=k), exc) from exc
            rows = [dict(zip(WAVEFUNCTION_FIELDS, r)) for r in profile.rows()]
            name = f"wavefunction_k{k_label(k)}.csv"
            self.files[name] = csv_text(WAVEFUNCTION_FIELDS, rows, precision)
            f_plus = amplitude_from_wavefunction(profile, model, 1)[0]
            f_minus = amplitude_from_wavefunction(profile, model, -1)[0]
            resid = asymptotic_residual(profile, f_plus, f_minus)
            self.echo(f"wavefunction: k={k_label(k)} asymptotic residual {resid:.3e}")

    def task_bound_states(self):
        bs = self.config.bound_states
        model = self.config.potential
        states = []
        for L in (0, 1):
            try:
                found = find_bound_states(model, L, bs.E_min, bs.E_max, bs.n_scan, bs.n_grid)
            except (ScatteringError, ArithmeticError) as exc:
                raise NumericFailure("bound-states", _context(self.config, L=L), exc) from exc
            states.extend(found)
        states.sort(key=lambda s: s.energy)
        payload = {"window": [bs.E_min, bs.E_max], "n_scan": bs.n_scan, "n_grid": bs.n_grid,
                   "states": [{"L": s.L, "parity": "even" if s.L == 0 else "odd",
                               "energy": s.energy, "det_residual": s.det_residual}
                              for s in states]}
        self.files["bound_states.json"] = json_text(payload)
        self.echo(f"bound-states: {len(states)} found")

    def task_verify(self):
        tol = self.config.solver.tolerances
        reports = self.reports()
        checks = {
            "max_unitarity_residual": (max(r.unitarity_residual for r in reports), tol["unitarity"]),
            "max_optical_residual_13": (max(r.optical_residual_13 for r in reports), tol["optical"]),
            "max_optical_residual_14": (max(r.optical_residual_14 for r in reports), tol["optical"]),
            "max_R_plus_T_minus_1": (max(abs(r.R + r.T - 1.0) for r in reports), tol["rt"]),
            "max_sigma_mismatch": (max(r.sigma_mismatch for r in reports), tol["sigma"]),
        }
        residuals = {name: {"value": value, "threshold": limit, "passed": bool(value <= limit)}
                     for name, (value, limit) in checks.items()}
        criteria = run_acceptance(self.echo)
        passed = all(c["passed"] for c in residuals.values()) and all(c.passed for c in criteria)
        payload = {"status": "pass" if passed else "fail", "version": __version__,
                   "config_residuals": residuals,
                   "criteria": [c.as_dict() for c in criteria]}
        self.files["verify_report.json"] = json_text(payload)
        self.echo(f"verify: {payload['status']}")
        if not passed:
            self.status = EXIT_VERIFY

    def execute(self) -> int:
        handlers = {"observables": self.task_observables, "wavefunction": self.task_wavefunction,
                    "bound-states": self.task_bound_states, "verify": self.task_verify}
        for task in self.config.tasks:
            handlers[task]()
        return self.status


def converge_files(config: RunConfig, grids) -> tuple:
    """Convergence tables for every momentum of the sweep; returns (files, all_monotone)."""
    rows, summary = [], []
    for k in momenta(config.sweep.k_min, config.sweep.k_max, config.sweep.n_k, config.sweep.spacing):
        table, monotone = convergence_study(config.potential, float(k), grids, config.solver.map_scale)
        rows.extend(dict(zip(CONVERGE_FIELDS, (float(k), *row))) for row in table)
        summary.append({"k": float(k), "monotone": monotone})
    files = {}
    out = config.output
    if "csv" in out.formats:
        files["converge.csv"] = csv_text(CONVERGE_FIELDS, rows, out.precision)
    if "json" in out.formats:
        files["converge.json"] = json_text({"grids": list(grids), "fields": list(CONVERGE_FIELDS),
                                            "rows": rows, "summary": summary})
    return files, all(s["monotone"] for s in summary)


def write_files(directory, files: dict):
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for name in sorted(files):
        with open(root / name, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(files[name])


def parse_grids(text: str) -> list:
    try:
        grids = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError("--grids", f"expected comma-separated integers, got {text!r}") from exc
    if len(grids) < 3:
        raise ConfigError("--grids", "convergence study needs at least three grid sizes")
    if any(b <= a for a, b in zip(grids[:-1], grids[1:])):
        raise ConfigError("--grids", "grid sizes must increase strictly")
    if grids[0] < 8:
        raise ConfigError("--grids", "grid sizes must be at least 8")
    return grids


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scatter1d",
                                     description="1D partial-wave Lippmann-Schwinger scattering solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="JSON run configuration")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="PATH=VALUE",
                       help="override a configuration field, e.g. solver.n_grid=256")
        p.add_argument("--output", help="output directory (overrides output.directory)")
        p.add_argument("-q", "--quiet", action="store_true", help="suppress progress lines")

    run = sub.add_parser("run", help="execute the tasks listed in the configuration")
    common(run)
    run.add_argument("--oracle", action="store_true",
                     help="also compare phase shifts with the Numerov or closed-form oracle")
    verify = sub.add_parser("verify", help="run the verify task and the acceptance suite")
    common(verify)
    converge = sub.add_parser("converge", help="phase shifts versus momentum-grid size")
    common(converge)
    converge.add_argument("--grids", default="32,64,128,256", help="comma-separated grid sizes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    echo = (lambda line: None) if args.quiet else (lambda line: print(line, flush=True))

    def fail(code, message):
        print(f"scatter1d: {message}", file=sys.stderr)
        return code

    overrides = list(args.overrides)
    if args.output:
        overrides.append(f"output.directory={json.dumps(args.output)}")
    if args.command == "verify":
        overrides.append('tasks=["verify"]')
    try:
        config = load_config(args.config, overrides)
        grids = parse_grids(args.grids) if args.command == "converge" else None
    except ConfigError as exc:
        return fail(EXIT_CONFIG, f"configuration error at {exc}")
    except OSError as exc:
        return fail(EXIT_IO, f"cannot read configuration: {exc}")

    started = time.perf_counter()
    try:
        if args.command == "converge":
            files, monotone = converge_files(config, grids)
            status = EXIT_OK
            if not monotone:
                print("scatter1d: warning: non-monotone convergence", file=sys.stderr)
        else:
            runner = Run(config, oracle=getattr(args, "oracle", False), echo=echo)
            status = runner.execute()
            files = runner.files
    except NumericFailure as exc:
        return fail(EXIT_NUMERIC, str(exc))
    except (ScatteringError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return fail(EXIT_NUMERIC, f"numeric failure [{_context(config)}]: {exc}")
    try:
        write_files(config.output.directory, files)
    except OSError as exc:
        return fail(EXIT_IO, f"cannot write outputs: {exc}")
    echo(f"wrote {len(files)} files to {config.output.directory} in "
         f"{time.perf_counter() - started:.2f} s")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
