"""Batch front end: ``qndprop run <config.yaml> [--tol X] [--out DIR]``.

A config is a YAML mapping; see ``configs/`` and the README for the schema.
Exit status: 0 success, 2 parse error, 3 validation error, 4 tolerance
breach in an ``oracle-compare`` task.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import canonical, oracle, osc_qnd, spin_bath, spin_bose
from .model import BathKind, BathSpec, Model, ModelError, SystemSpec, TruncationSpec, validate_model

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_TOLERANCE = 0, 2, 3, 4

MODELS = ("H1", "H2", "H3", "H4", "equivalence", "structure")
TASKS = ("propagator", "dephasing", "convergence", "oracle-compare", "equivalence-check", "classify")
FORMATS = ("csv", "structured-text")
ALLOWED = {
    "H1": {"propagator", "dephasing", "oracle-compare"},
    "H2": {"propagator", "oracle-compare"},
    "H3": {"propagator", "convergence", "oracle-compare"},
    "H4": {"propagator", "convergence", "oracle-compare"},
    "equivalence": {"equivalence-check"},
    "structure": {"classify"},
}


class ConfigError(ValueError):
    pass


def _complex(value, where: str) -> complex:
    try:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ConfigError(f"{where}: complex pairs need [re, im]")
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, str):
            return complex(value.replace(" ", ""))
        return complex(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot read {value!r} as a complex number") from exc


def _complex_list(values, where: str) -> np.ndarray:
    if values is None:
        return None
    if not isinstance(values, list):
        raise ConfigError(f"{where}: expected a list")
    return np.array([_complex(v, f"{where}[{i}]") for i, v in enumerate(values)], dtype=complex)


@dataclass
class TaskConfig:
    model: str
    task: str
    system: SystemSpec
    bath: BathSpec
    time: np.ndarray
    trunc: TruncationSpec
    labels: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    out_dir: Path = Path(".")
    name: str = "result"
    fmt: str = "csv"


def _section(raw: dict, key: str) -> dict:
    val = raw.get(key) or {}
    if not isinstance(val, dict):
        raise ConfigError(f"section {key!r} must be a mapping")
    return val


def parse_config(raw: Any, source: Path | None = None) -> TaskConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    model = raw.get("model")
    task = raw.get("task")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    if task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {task!r}")
    if task not in ALLOWED[model]:
        raise ConfigError(f"task {task!r} is not available for model {model!r}")
    sysd, bathd, timed = _section(raw, "system"), _section(raw, "bath"), _section(raw, "time")
    truncd, outd, labd = _section(raw, "truncation"), _section(raw, "output"), _section(raw, "labels")
    try:
        system = SystemSpec(float(sysd.get("omega", 1.0)),
                            None if sysd.get("drive_Omega") is None else float(sysd["drive_Omega"]))
        kind = BathKind.SPIN if model == "H4" else BathKind.OSCILLATOR
        bath = BathSpec(kind, [float(x) for x in bathd.get("omegas", [])],
                        [float(x) for x in bathd.get("couplings", [])])
        start = float(timed.get("start", 0.0))
        stop = float(timed.get("stop", start))
        steps = int(timed.get("steps", 1))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numeric field: {exc}") from exc
    if steps < 1:
        raise ConfigError("time.steps must be >= 1")
    labels = {key: _complex_list(labd.get(key), f"labels.{key}")
              for key in ("alpha_star", "alpha_prime", "bath_initial")}
    for key in ("nu_star", "nu_prime"):
        labels[key] = _complex(labd.get(key, 0.0), f"labels.{key}")
    fmt = outd.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output.format must be one of {FORMATS}")
    base = source.parent if source is not None else Path(".")
    try:
        trunc = TruncationSpec(
            fock_cutoff=int(truncd.get("fock_cutoff", 30)),
            series_order=int(truncd.get("series_order", 4)),
            quad_points=None if truncd.get("quad_points") is None else int(truncd["quad_points"]),
            tol=float(truncd.get("tol", 1e-8)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad truncation field: {exc}") from exc
    return TaskConfig(
        model=model, task=task, system=system, bath=bath,
        time=np.linspace(start, stop, steps), trunc=trunc, labels=labels,
        options=_section(raw, "options"),
        out_dir=base / str(outd.get("path", ".")),
        name=str(outd.get("name", source.stem if source is not None else "result")),
        fmt=fmt,
    )


def load_config(path: str | Path) -> TaskConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw, path)


def _labels(cfg: TaskConfig, model: Model, key: str) -> np.ndarray:
    vals = cfg.labels.get(key)
    return np.zeros(model.M, dtype=complex) if vals is None else model.labels(vals, key)


def _cplx(prefix: str, z: complex) -> dict:
    return {f"{prefix}_re": float(np.real(z)), f"{prefix}_im": float(np.imag(z))}


def _entries(prefix: str, m: np.ndarray) -> dict:
    row = {}
    for i in range(2):
        for j in range(2):
            row.update(_cplx(f"{prefix}{i}{j}", m[i, j]))
    return row


def _oracle_kernel(cfg: TaskConfig, model: Model, t: float) -> np.ndarray:
    a_s, a_p = _labels(cfg, model, "alpha_star"), _labels(cfg, model, "alpha_prime")
    if cfg.model == "H2":
        a_s = np.append(a_s, cfg.labels["nu_star"])
        a_p = np.append(a_p, cfg.labels["nu_prime"])
    H = oracle.build_hamiltonian(cfg.model, model, cfg.trunc)
    res = oracle.kernel_at(H, t, a_s, a_p, cfg.trunc.tol)
    return res.kernel


def _closed_kernel(cfg: TaskConfig, model: Model, t: float):
    a_s, a_p = _labels(cfg, model, "alpha_star"), _labels(cfg, model, "alpha_prime")
    if cfg.model == "H1":
        return osc_qnd.propagator_qnd(model, t, a_s, a_p), None
    if cfg.model == "H2":
        return osc_qnd.propagator_driven(model, t, a_s, a_p, cfg.labels["nu_star"], cfg.labels["nu_prime"]), None
    res = spin_bose.propagator_nonqnd(model, t, a_s, a_p, cfg.trunc)
    return res.propagator, res.error_estimate


def _sectors(cfg: TaskConfig):
    s = cfg.options.get("sector")
    return (1, -1) if s is None else (int(s),)


def run_task(cfg: TaskConfig):
    """Evaluate a parsed config; returns ``(rows, ok)``."""
    ok = True
    rows = []
    if cfg.model == "equivalence":
        omegas = list(cfg.bath.omegas)
        rep = canonical.verify_equivalence(len(omegas), omegas, int(cfg.options.get("angle_sign", 1)))
        return [{"M": len(omegas), "max_abs_deviation": rep.max_abs_deviation,
                 "symplectic_error": rep.symplectic_error, "pass": int(rep.passed)}], rep.passed

    if cfg.model == "structure":
        source = cfg.options.get("source", "H1")
        kind = BathKind.SPIN if source == "H4" else BathKind.OSCILLATOR
        model = validate_model(cfg.system, BathSpec(kind, cfg.bath.omegas, cfg.bath.couplings))
        for t in cfg.time:
            if source == "H4":
                for s in (1, -1):
                    for k in range(model.M):
                        c = canonical.classify_2x2(spin_bath.mode_term(model, k, s, t, 0))
                        rows.append({"t": t, "s": s, "mode": k, "kind": c.kind.value,
                                     **_cplx("param", c.parameter), "parity": c.parity,
                                     **_cplx("det", c.determinant)})
            else:
                a_s, a_p = _labels(cfg, model, "alpha_star"), _labels(cfg, model, "alpha_prime")
                p = osc_qnd.propagator_qnd(model, t, a_s, a_p)
                c = canonical.classify_2x2(p.amplitudes / np.exp(osc_qnd.amplitude_A(model, t)))
                rows.append({"t": t, "kind": c.kind.value, **_cplx("param", c.parameter),
                             **_cplx("det", c.determinant)})
        return rows, True

    model = validate_model(cfg.system, cfg.bath)

    if cfg.task == "dephasing":
        mu = cfg.labels.get("bath_initial")
        for t in cfg.time:
            r = osc_qnd.dephasing_factor(model, t, mu)
            rows.append({"t": t, **_cplx("r", r), "abs_r": abs(r)})
        return rows, True

    if cfg.model == "H4":
        N = cfg.trunc.series_order if cfg.options.get("series", True) else None
        for t in cfg.time:
            if cfg.task == "propagator":
                for s in _sectors(cfg):
                    prop = spin_bath.propagator_spinbath(model, t, s, N)
                    for k, mat in enumerate(prop.modes):
                        rows.append({"t": t, "s": s, "mode": k, **_cplx("phase", prop.phase),
                                     **_entries("U", mat), "err": prop.error_estimate})
            elif cfg.task == "convergence":
                for s in _sectors(cfg):
                    for k in range(model.M):
                        exact = spin_bath.mode_propagator_exact(model, k, s, t)
                        for n in cfg.options.get("orders", range(cfg.trunc.series_order + 1)):
                            mat, err = spin_bath.mode_propagator_series(model, k, s, t, int(n))
                            rows.append({"t": t, "s": s, "mode": k, "N": int(n),
                                         "deviation": float(np.abs(mat - exact).max()), "err": err})
            else:
                U = oracle.evolve(oracle.build_hamiltonian("H4", model, cfg.trunc), t)
                for s in _sectors(cfg):
                    closed = spin_bath.propagator_spinbath(model, t, s, N).materialize()
                    dev = float(np.abs(closed - oracle.sector_block(U, spin_bath.sector_slot(s))).max())
                    passed = dev <= cfg.trunc.tol
                    ok &= passed
                    rows.append({"t": t, "s": s, "max_abs_dev": dev, "tol": cfg.trunc.tol, "pass": int(passed)})
        return rows, ok

    for t in cfg.time:
        if cfg.task == "propagator":
            prop, err = _closed_kernel(cfg, model, t)
            row = {"t": t, **_cplx("kernel", prop.bath_kernel)}
            if cfg.model == "H2":
                row.update(_cplx("drive", prop.drive_factor))
            row.update(_entries("U", prop.amplitudes))
            if err is not None:
                row["err"] = err
            rows.append(row)
        elif cfg.task == "convergence":
            ref = _oracle_kernel(cfg, model, t)
            for n in cfg.options.get("orders", range(cfg.trunc.series_order + 1)):
                trunc = TruncationSpec(cfg.trunc.fock_cutoff, int(n), cfg.trunc.quad_points, cfg.trunc.tol)
                res = spin_bose.propagator_nonqnd(model, t, _labels(cfg, model, "alpha_star"),
                                                  _labels(cfg, model, "alpha_prime"), trunc)
                rows.append({"t": t, "N": int(n),
                             "deviation": float(np.abs(res.propagator.matrix - ref).max()),
                             "err": res.error_estimate})
        else:  # oracle-compare
            prop, _ = _closed_kernel(cfg, model, t)
            ref = _oracle_kernel(cfg, model, t)
            dev = float(np.abs(prop.matrix - ref).max())
            rel = dev / float(np.abs(ref).max())
            passed = rel <= cfg.trunc.tol
            ok &= passed
            rows.append({"t": t, "max_abs_dev": dev, "max_rel_dev": rel,
                         "tol": cfg.trunc.tol, "pass": int(passed)})
    return rows, ok


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_rows(rows: list, path: Path, fmt: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(rows[0]) if rows else []
    for row in rows[1:]:
        columns += [c for c in row if c not in columns]
    if fmt == "csv":
        path = path.with_suffix(".csv")
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row.get(c)) for c in columns])
    else:
        path = path.with_suffix(".json")
        body = [{c: format_value(row.get(c)) for c in columns} for row in rows]
        path.write_text(json.dumps({"columns": columns, "rows": body}, indent=1) + "\n")
    return path


def run(config_path, tol: Optional[float] = None, out: Optional[str] = None) -> int:
    try:
        cfg = load_config(config_path)
        if tol is not None:
            cfg.trunc = TruncationSpec(cfg.trunc.fock_cutoff, cfg.trunc.series_order,
                                       cfg.trunc.quad_points, float(tol))
    except ConfigError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ModelError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if out is not None:
        cfg.out_dir = Path(out)
    try:
        rows, ok = run_task(cfg)
    except ModelError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    dest = write_rows(rows, cfg.out_dir / cfg.name, cfg.fmt)
    print(dest)
    if not ok:
        print(f"tolerance breach: see {dest}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qndprop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="evaluate one config file")
    p_run.add_argument("config")
    p_run.add_argument("--tol", type=float, default=None, help="override truncation.tol")
    p_run.add_argument("--out", default=None, help="output directory")
    args = parser.parse_args(argv)
    return run(args.config, args.tol, args.out)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
