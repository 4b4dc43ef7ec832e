"""Command line front end: generation, runs, sweeps, scans, fits.

Subcommands: generate, anneal, spectrum, sweep, fit, twospin. Results are
UTF-8 CSV with a fixed column order; sweep output is append-only and
resumable (rows already present are skipped, re-running with an identical
config is a no-op). Exit codes: 0 success, 1 usage or I/O, 2 validation,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import multiprocessing
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    average_energy_trace,
    lz_fit,
    overlap_trace,
    twospin_table,
)
from .errors import (
    FitError,
    GenerationError,
    LanczosError,
    ValidationError,
)
from .evolution import EvolutionConfig, evolve
from .fixtures import FIXTURE_LABELS, load_fixture
from .operator import OperatorTerms
from .problems import (
    TriggerSpec,
    generate_2sat_instance,
    load_instance,
    map_formula_to_problem,
    save_instance,
    serialize_instance,
    parse_instance,
)
from .spectrum import counted_anticrossings, gap_profile, profile_table

SWEEP_SCHEMA = 1
SWEEP_MAGIC = f"# triganneal-sweep schema={SWEEP_SCHEMA}"
SWEEP_COLUMNS = [
    "instance", "trigger", "g", "t_anneal", "tau", "tau_effective",
    "seed", "grid_points", "p_success", "delta_min", "s_min",
    "n_anticrossings", "stretch_width", "final_norm", "wall_time",
    "code_version", "status",
]
_TRIGGER_KINDS = ("none", "ferro", "antiferro")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return str(x)


def _row_key(row):
    return (row["instance"], row["trigger"], row["g"], row["t_anneal"])


def _load_problem(ref, nonstoquastic):
    """Resolve an instance reference: fixture label or file path."""
    if ref in FIXTURE_LABELS:
        return load_fixture(ref, nonstoquastic=nonstoquastic)
    problem = load_instance(ref)
    if nonstoquastic and problem.y_coupling_strength == 0.0:
        problem = problem.with_y_couplings()
    return problem


def _make_trigger(kind, g):
    if kind == "none":
        return TriggerSpec("none", 0.0)
    return TriggerSpec(kind, g)


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


# ---------------------------------------------------------------- generate

def cmd_generate(args):
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for idx in range(args.count):
        formula, truth = generate_2sat_instance(args.n, seed=[args.seed, idx])
        label = f"n{args.n}_s{args.seed}_i{idx:03d}"
        problem = map_formula_to_problem(formula, label=label)
        fname = f"{label}.json"
        save_instance(problem, out_dir / fname)
        entries.append({
            "index": idx,
            "file": fname,
            "label": label,
            "n": args.n,
            "n_clauses": formula.n_clauses,
            "ground_state": list(truth.bitstring),
            "ground_energy": truth.energy,
            "degeneracy": truth.degeneracy,
            "first_excited_energy": truth.first_excited_energy,
            "first_excited_degeneracy": truth.first_excited_degeneracy,
        })
    manifest = {
        "schema": 1,
        "code_version": __version__,
        "n": args.n,
        "count": args.count,
        "master_seed": args.seed,
        "instances": entries,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.count} instances and manifest.json to {out_dir}")
    return 0


# ------------------------------------------------------------------ anneal

def cmd_anneal(args):
    problem = _load_problem(args.instance, args.nonstoquastic)
    trigger = _make_trigger(args.trigger, args.g)
    profile = None
    if not args.no_spectrum:
        profile = gap_profile(problem, trigger, grid_points=args.grid,
                              k=max(args.k, 3), seed=args.seed)

    steps = EvolutionConfig(t_anneal=args.t_anneal, tau=args.tau).n_steps
    stride = max(1, steps // 400) if args.trace else 0
    config = EvolutionConfig(t_anneal=args.t_anneal, tau=args.tau,
                             record_stride=stride)
    result = evolve(problem, trigger, config)
    if math.isnan(result.success_probability):
        raise FloatingPointError("success probability came out NaN")
    row = {
        "instance": problem.label or "unnamed",
        "trigger": trigger.kind,
        "g": _fmt(trigger.g),
        "t_anneal": _fmt(args.t_anneal),
        "tau": _fmt(args.tau),
        "tau_effective": _fmt(result.tau_effective),
        "seed": str(args.seed),
        "grid_points": str(args.grid if profile is not None else 0),
        "p_success": _fmt(result.success_probability),
        "delta_min": _fmt(profile.delta_min) if profile else "nan",
        "s_min": _fmt(profile.s_min) if profile else "nan",
        "n_anticrossings": str(profile.n_anticrossings) if profile else "",
        "stretch_width": _fmt(profile.stretch_width) if profile else "nan",
        "final_norm": _fmt(result.final_norm),
        "wall_time": _fmt(result.wall_time),
        "code_version": __version__,
        "status": "ok",
    }

    writer = csv.DictWriter(sys.stdout, fieldnames=SWEEP_COLUMNS)
    writer.writeheader()
    writer.writerow(row)

    if args.trace:
        out_dir = Path(args.out) if args.out else Path(".")
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = (f"{row['instance']}_{trigger.kind}-{_fmt(trigger.g)}"
                f"_T{_fmt(args.t_anneal)}")
        k_levels = min(max(args.k, 1), 4)
        trace = overlap_trace(problem, trigger, config, k_levels=k_levels,
                              seed=args.seed, result=result)
        with open(out_dir / f"{stem}.overlap.txt", "w",
                  encoding="utf-8") as fh:
            cols = " ".join(f"pop{i}" for i in range(k_levels))
            fh.write(f"s {cols} avg_energy ground_energy\n")
            for t in range(len(trace.s)):
                pops = " ".join(_fmt(float(v)) for v in trace.overlaps[t])
                fh.write(f"{trace.s[t]:.6f} {pops} "
                         f"{_fmt(float(trace.avg_energy[t]))} "
                         f"{_fmt(float(trace.ground_energy[t]))}\n")
        energies = average_energy_trace(problem, trigger, config,
                                        result=result)
        with open(out_dir / f"{stem}.energy.txt", "w",
                  encoding="utf-8") as fh:
            fh.write("s avg_energy\n")
            for s, e in energies:
                fh.write(f"{s:.6f} {_fmt(e)}\n")
        print(f"traces written to {out_dir / (stem + '.overlap.txt')} "
              f"and {out_dir / (stem + '.energy.txt')}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- spectrum

def cmd_spectrum(args):
    problem = _load_problem(args.instance, args.nonstoquastic)
    trigger = _make_trigger(args.trigger, args.g)
    profile = gap_profile(problem, trigger, grid_points=args.grid,
                          refine=not args.no_refine, k=args.k,
                          seed=args.seed)
    out, close = _open_out(args.out)
    try:
        out.write(f"# instance={problem.label or 'unnamed'} "
                  f"trigger={trigger.kind} g={_fmt(trigger.g)} "
                  f"k={args.k} grid_points={args.grid} seed={args.seed} "
                  f"code_version={__version__}\n")
        out.write(f"# delta_min={_fmt(profile.delta_min)} "
                  f"s_min={_fmt(profile.s_min)} "
                  f"n_anticrossings={profile.n_anticrossings} "
                  f"stretch_width={_fmt(profile.stretch_width)}\n")
        for s_loc, d_loc, prom in counted_anticrossings(profile):
            out.write(f"# anticrossing s={_fmt(s_loc)} delta={_fmt(d_loc)} "
                      f"prominence={_fmt(prom)}\n")
        out.write(profile_table(profile))
    finally:
        if close:
            out.close()
    return 0


# ------------------------------------------------------------------- sweep

def _sweep_bundle(payload):
    """One (instance, trigger) bundle: shared gap profile, then one
    evolution per annealing time. Returns finished CSV rows; failures are
    flagged per row and never abort the bundle."""
    problem = parse_instance(payload["instance_text"])
    trigger = _make_trigger(payload["trigger_kind"], payload["g"])
    rows = []
    base = {
        "instance": payload["label"],
        "trigger": trigger.kind,
        "g": _fmt(trigger.g),
        "tau": _fmt(payload["tau"]),
        "seed": str(payload["seed"]),
        "grid_points": str(payload["grid_points"]),
        "code_version": __version__,
    }
    profile = None
    profile_err = None
    try:
        profile = gap_profile(problem, trigger,
                              grid_points=payload["grid_points"],
                              seed=payload["seed"])
    except (ValidationError, LanczosError, FloatingPointError) as exc:
        profile_err = f"{type(exc).__name__}: {exc}"
    for t_a in payload["t_anneals"]:
        row = dict(base)
        row["t_anneal"] = _fmt(t_a)
        try:
            config = EvolutionConfig(t_anneal=t_a, tau=payload["tau"])
            result = evolve(problem, trigger, config)
            if math.isnan(result.success_probability):
                raise FloatingPointError("success probability is NaN")
            row.update({
                "tau_effective": _fmt(result.tau_effective),
                "p_success": _fmt(result.success_probability),
                "final_norm": _fmt(result.final_norm),
                "wall_time": _fmt(result.wall_time),
            })
            if profile is not None:
                row.update({
                    "delta_min": _fmt(profile.delta_min),
                    "s_min": _fmt(profile.s_min),
                    "n_anticrossings": str(profile.n_anticrossings),
                    "stretch_width": _fmt(profile.stretch_width),
                })
                row["status"] = "ok"
            else:
                row.update({"delta_min": "", "s_min": "",
                            "n_anticrossings": "", "stretch_width": ""})
                row["status"] = f"error({profile_err})"
        except (ValidationError, LanczosError, FloatingPointError,
                GenerationError) as exc:
            for col in SWEEP_COLUMNS:
                row.setdefault(col, "")
            row["status"] = f"error({type(exc).__name__}: {exc})"
        rows.append(row)
    return rows


def _load_sweep_config(path):
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValidationError("sweep config must be a JSON object")
    for key in ("instances", "triggers", "t_anneals", "out_dir"):
        if key not in cfg:
            raise ValidationError(f"sweep config missing '{key}'")
    if not cfg["triggers"] or not cfg["t_anneals"]:
        raise ValidationError("triggers and t_anneals must be nonempty")
    cfg.setdefault("tau", 0.01)
    cfg.setdefault("grid_points", 401)
    cfg.setdefault("seed", 0)
    cfg.setdefault("nonstoquastic", False)
    cfg.setdefault("workers", 1)
    return cfg


def _sweep_instances(cfg, out_dir):
    """Materialize the instance list as (label, serialized_text) pairs."""
    src = cfg["instances"]
    pairs = []
    if "generate" in src:
        gen = src["generate"]
        for key in ("n", "count", "seed"):
            if key not in gen:
                raise ValidationError(f"instances.generate missing '{key}'")
        inst_dir = out_dir / "instances"
        inst_dir.mkdir(parents=True, exist_ok=True)
        for idx in range(gen["count"]):
            formula, _ = generate_2sat_instance(gen["n"],
                                                seed=[gen["seed"], idx])
            label = f"n{gen['n']}_s{gen['seed']}_i{idx:03d}"
            problem = map_formula_to_problem(
                formula, nonstoquastic=cfg["nonstoquastic"], label=label)
            path = inst_dir / f"{label}.json"
            if not path.exists():
                save_instance(problem, path)
            pairs.append((label, serialize_instance(problem, fmt="json")))
    elif "files" in src:
        for ref in src["files"]:
            problem = _load_problem(ref, cfg["nonstoquastic"])
            label = problem.label or Path(ref).stem
            if not problem.label:
                problem = replace(problem, label=label)
            pairs.append((label, serialize_instance(problem, fmt="json")))
    else:
        raise ValidationError(
            "instances must declare 'generate' or 'files'")
    labels = [p[0] for p in pairs]
    if len(set(labels)) != len(labels):
        raise ValidationError("instance labels are not unique")
    return pairs


def _read_existing_rows(csv_path):
    done = set()
    if not csv_path.exists():
        return done
    with open(csv_path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != SWEEP_MAGIC:
            raise ValidationError(
                f"{csv_path} is not a schema-{SWEEP_SCHEMA} sweep file")
        reader = csv.DictReader(fh)
        for row in reader:
            done.add(_row_key(row))
    return done


def cmd_sweep(args):
    cfg = _load_sweep_config(args.config)
    if args.workers is not None:
        cfg["workers"] = args.workers
    for trig in cfg["triggers"]:
        if trig.get("kind") not in _TRIGGER_KINDS:
            raise ValidationError(
                f"unknown trigger kind {trig.get('kind')!r}")
    out_dir = Path(args.out) if args.out else Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    sidecar = out_dir / "sweep_config.json"
    cfg_text = json.dumps(cfg, indent=2, sort_keys=True) + "\n"
    if sidecar.exists():
        with open(sidecar, encoding="utf-8") as fh:
            prev = json.load(fh)
        cur = json.loads(cfg_text)
        for volatile in ("workers",):
            prev.pop(volatile, None)
            cur.pop(volatile, None)
        if prev != cur:
            raise ValidationError(
                f"{sidecar} holds a different configuration; "
                "use a fresh output directory")

    # nothing is persisted until the full configuration has validated,
    # so a rejected run cannot poison the output directory for resumes
    instances = _sweep_instances(cfg, out_dir)
    if not sidecar.exists():
        with open(sidecar, "w", encoding="utf-8") as fh:
            fh.write(cfg_text)

    csv_path = out_dir / "results.csv"
    done = _read_existing_rows(csv_path)

    tasks = []
    for label, text in instances:
        for trig in cfg["triggers"]:
            kind = trig["kind"]
            g = float(trig.get("g", 0.0))
            trigger = _make_trigger(kind, g)
            missing = [
                t_a for t_a in cfg["t_anneals"]
                if (label, trigger.kind, _fmt(trigger.g),
                    _fmt(float(t_a))) not in done
            ]
            if not missing:
                continue
            tasks.append({
                "instance_text": text,
                "label": label,
                "trigger_kind": kind,
                "g": g,
                "t_anneals": [float(t) for t in missing],
                "tau": float(cfg["tau"]),
                "grid_points": int(cfg["grid_points"]),
                "seed": int(cfg["seed"]),
            })

    new_file = not csv_path.exists()
    n_rows = 0
    with open(csv_path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        if new_file:
            fh.write(SWEEP_MAGIC + "\n")
            writer.writeheader()
            fh.flush()
        if cfg["workers"] > 1 and len(tasks) > 1:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(processes=cfg["workers"]) as pool:
                for rows in pool.imap(_sweep_bundle, tasks):
                    for row in rows:
                        writer.writerow(row)
                        n_rows += 1
                    fh.flush()
        else:
            for task in tasks:
                for row in _sweep_bundle(task):
                    writer.writerow(row)
                    n_rows += 1
                fh.flush()
    print(f"appended {n_rows} rows to {csv_path} "
          f"({len(done)} were already present)")
    return 0


# --------------------------------------------------------------------- fit

def cmd_fit(args):
    if args.min_points < 5:
        raise ValidationError("--min-points must be at least 5 "
                              "(the fit needs that many points)")
    path = Path(args.results)
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != SWEEP_MAGIC:
            raise ValidationError(
                f"{path} is not a schema-{SWEEP_SCHEMA} sweep file")
        rows = list(csv.DictReader(fh))

    groups = {}
    for row in rows:
        if row.get("status") != "ok":
            continue
        if args.trigger and row["trigger"] != args.trigger:
            continue
        if args.g is not None and float(row["g"]) != args.g:
            continue
        if args.t_anneal is not None and \
                float(row["t_anneal"]) != args.t_anneal:
            continue
        try:
            delta = float(row["delta_min"])
            p = float(row["p_success"])
        except (ValueError, KeyError):
            continue
        if not (delta > 0 and 0 <= p <= 1):
            continue
        key = (row["trigger"], row["g"], row["t_anneal"])
        groups.setdefault(key, []).append((delta, p))

    out, close = _open_out(args.out)
    try:
        writer = csv.writer(out)
        writer.writerow(["trigger", "g", "t_anneal", "n_points", "a", "b",
                         "rms_residual", "converged", "reliable", "message"])
        for key in sorted(groups):
            pts = groups[key]
            if len(pts) < args.min_points:
                writer.writerow(list(key) + [len(pts), "", "", "", "", "",
                                             f"skipped: {len(pts)} points"])
                continue
            fit = lz_fit(pts)
            reliable = (fit.converged
                        and fit.rms_residual <= args.residual_threshold)
            writer.writerow(list(key) + [
                len(pts), _fmt(fit.a), _fmt(fit.b), _fmt(fit.rms_residual),
                "yes" if fit.converged else "no",
                "yes" if reliable else "no", fit.message])
    finally:
        if close:
            out.close()
    if not groups:
        print("no fittable rows found", file=sys.stderr)
    return 0


# ----------------------------------------------------------------- twospin

def cmd_twospin(args):
    if args.points < 2:
        raise ValidationError("--points must be at least 2")
    s_values = np.linspace(0.0, 1.0, args.points)
    text = twospin_table(args.g, args.jx, args.jy, args.jz, s_values,
                         trigger_sign=args.sign)
    out, close = _open_out(args.out)
    try:
        out.write(f"# g={_fmt(args.g)} jx={_fmt(args.jx)} jy={_fmt(args.jy)} "
                  f"jz={_fmt(args.jz)} trigger_sign={args.sign} "
                  f"code_version={__version__}\n")
        out.write(text)
    finally:
        if close:
            out.close()
    return 0


# -------------------------------------------------------------- arg wiring

def _add_instance_args(p):
    p.add_argument("instance",
                   help="instance file (.json or .txt) or a bundled "
                        f"fixture label: {', '.join(FIXTURE_LABELS)}")
    p.add_argument("--trigger", choices=_TRIGGER_KINDS, default="none",
                   help="trigger kind (default none)")
    p.add_argument("--g", type=float, default=1.0,
                   help="trigger strength (ignored for --trigger none)")
    p.add_argument("--nonstoquastic", action="store_true",
                   help="add y couplings (strength 0.5) on the problem "
                        "graph")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for eigensolver start vectors")


def build_parser():
    parser = _Parser(prog="triganneal",
                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command", parser_class=_Parser)

    p = sub.add_parser("generate",
                       help="generate 2-SAT instances with unique solutions")
    p.add_argument("--n", type=int, required=True, help="number of variables")
    p.add_argument("--count", type=int, required=True,
                   help="number of instances")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("anneal",
                       help="run one annealing evolution")
    _add_instance_args(p)
    p.add_argument("--t-anneal", type=float, required=True,
                   help="total annealing time")
    p.add_argument("--tau", type=float, default=0.01, help="time step")
    p.add_argument("--grid", type=int, default=1001,
                   help="s grid points for the gap summary")
    p.add_argument("--k", type=int, default=3,
                   help="levels for the gap scan and traces")
    p.add_argument("--no-spectrum", action="store_true",
                   help="skip the gap profile columns")
    p.add_argument("--trace", action="store_true",
                   help="write overlap and average-energy trace files")
    p.add_argument("--out", default=None,
                   help="directory for trace files (default .)")
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("spectrum",
                       help="scan the low spectrum over s")
    _add_instance_args(p)
    p.add_argument("--grid", type=int, default=1001,
                   help="number of s grid points")
    p.add_argument("--k", type=int, default=3,
                   help="number of eigenvalues per point")
    p.add_argument("--no-refine", action="store_true",
                   help="skip golden-section refinement of gap minima")
    p.add_argument("--out", default=None,
                   help="output file (default stdout)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep",
                       help="run an ensemble sweep from a JSON config")
    p.add_argument("config", help="sweep configuration file (JSON)")
    p.add_argument("--workers", type=int, default=None,
                   help="process count (overrides the config)")
    p.add_argument("--out", default=None,
                   help="output directory (overrides the config)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit",
                       help="fit p = 1 - exp(-a delta^b) per sweep group")
    p.add_argument("results", help="sweep results.csv")
    p.add_argument("--trigger", choices=_TRIGGER_KINDS, default=None,
                   help="only fit this trigger kind")
    p.add_argument("--g", type=float, default=None,
                   help="only fit this trigger strength")
    p.add_argument("--t-anneal", type=float, default=None,
                   help="only fit this annealing time")
    p.add_argument("--min-points", type=int, default=5,
                   help="smallest group size worth fitting")
    p.add_argument("--residual-threshold", type=float, default=0.05,
                   help="rms residual above which a fit is unreliable")
    p.add_argument("--out", default=None,
                   help="output file (default stdout)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("twospin",
                       help="closed-form vs numeric two-spin spectra")
    p.add_argument("--g", type=float, required=True, help="trigger strength")
    p.add_argument("--jx", type=float, required=True, help="xx coupling")
    p.add_argument("--jy", type=float, required=True, help="yy coupling")
    p.add_argument("--jz", type=float, required=True, help="problem coupling")
    p.add_argument("--points", type=int, default=201,
                   help="number of s samples in [0, 1]")
    p.add_argument("--sign", type=int, choices=(-1, 1), default=-1,
                   help="trigger sign convention for the numeric spectrum")
    p.add_argument("--out", default=None,
                   help="output file (default stdout)")
    p.set_defaults(func=cmd_twospin)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (LanczosError, FitError, GenerationError,
            FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
