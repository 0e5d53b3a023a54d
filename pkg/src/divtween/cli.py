"""Command-line entry point.

Commands: gen-domain, run, baseline, eval, export-front, verify-theorems.
Exit codes: 0 success, 1 validation error, 2 IO error, 3 property violation.

Every randomized command requires an explicit --seed, and a re-run with the
same seed reproduces every CSV/JSON artifact byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from . import engine as eng
from .criteria import load_classifier, save_classifier
from .errors import (
    DivtweenError,
    IoError,
    PropertyViolation,
    ValidationError,
)
from .generators import (
    SeededStream,
    domain_classifier,
    load_domain,
    make_synthetic_domain,
    save_domain,
)
from .metrics import metrics_report
from .motion import BoundaryCondition, LengthPolicy, load_motion, save_motion
from .pareto import front_table_csv

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_VIOLATION = 3

# config-file keys, their parsers, and fallback defaults used when neither the
# file nor the flag supplies a value
CONFIG_KEYS = {
    "pop": (int, 20),
    "offspring": (int, 20),
    "tau_max": (int, 20),
    "y_min": (int, 5),
    "y_max": (int, 15),
    "seed": (int, None),
    "generator": (str, "mixture"),
    "sigma_mut": (float, 0.05),
    "p_keep": (float, 0.7),
    "noise_amplitude": (float, 0.1),
    "harmonics": (int, 3),
    "warp_tolerance": (float, 0.0),
    "param_jitter": (float, 0.25),
    "domain": (str, None),
    "classifier": (str, None),
    "x1": (str, None),
    "x2": (str, None),
}


def parse_config_file(path: str | Path) -> dict:
    """Parse a key=value config file; '#' starts a comment."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as err:
        raise IoError(f"{path}: {err}") from err
    out: dict = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
        parser, _ = CONFIG_KEYS[key]
        try:
            out[key] = parser(value)
        except ValueError as err:
            raise ValidationError(f"{path}:{lineno}: bad value for {key}: {err}") from err
    return out


def _merged(file_cfg: dict, key: str, flag_value):
    if flag_value is not None:
        return flag_value
    if key in file_cfg:
        return file_cfg[key]
    return CONFIG_KEYS[key][1]


def _require(value, name: str):
    if value is None:
        raise ValidationError(f"missing required setting: {name}")
    return value


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as err:
        raise IoError(f"{path}: {err}") from err


def _canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


@click.group()
def cli():
    """Multi-criteria guided sampling of in-betweening motion batches."""


@cli.command("gen-domain")
@click.option("--classes", type=int, required=True, help="Number of motion classes (>= 2).")
@click.option("--joints", type=int, default=16, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--frames", type=int, default=15, show_default=True,
              help="Template length used by the classifier.")
@click.option("--temperature", type=float, default=0.25, show_default=True)
@click.option("--margin", type=float, default=1.0, show_default=True,
              help="Minimum pairwise centroid distance.")
@click.option("--out", type=str, required=True, help="Output directory.")
def cmd_gen_domain(classes, joints, seed, frames, temperature, margin, out):
    """Generate a synthetic motion domain and its reference classifier."""
    domain = make_synthetic_domain(
        classes, joints, seed, centroid_frames=frames, separation_margin=margin
    )
    out_dir = Path(out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise IoError(f"{out_dir}: {err}") from err
    save_domain(domain, out_dir / "domain.json")
    save_classifier(domain_classifier(domain, temperature), out_dir / "classifier.json")
    click.echo(f"wrote {out_dir / 'domain.json'}")
    click.echo(f"wrote {out_dir / 'classifier.json'}")


def _run_options(fn):
    opts = [
        click.option("--config", "config_path", type=str, default=None,
                     help="key=value config file; flags override it."),
        click.option("--seed", type=int, default=None),
        click.option("--domain", "domain_path", type=str, default=None),
        click.option("--classifier", "classifier_path", type=str, default=None,
                     help="Defaults to classifier.json beside the domain file."),
        click.option("--x1", "x1_path", type=str, default=None,
                     help="Leading keyframe motion file."),
        click.option("--x2", "x2_path", type=str, default=None,
                     help="Trailing keyframe motion file."),
        click.option("--pop", type=int, default=None, help="Batch size l."),
        click.option("--offspring", type=int, default=None, help="Offspring per generation m."),
        click.option("--y-min", type=int, default=None),
        click.option("--y-max", type=int, default=None),
        click.option("--generator", type=click.Choice(["interp", "mixture"]), default=None),
        click.option("--sigma-mut", type=float, default=None),
        click.option("--p-keep", type=float, default=None),
        click.option("--noise-amplitude", type=float, default=None),
        click.option("--harmonics", type=int, default=None),
        click.option("--warp-tolerance", type=float, default=None),
        click.option("--param-jitter", type=float, default=None),
        click.option("--out", type=str, required=True, help="Output directory."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _execute_run(kw: dict, tau_max_flag: int | None) -> None:
    file_cfg = parse_config_file(kw["config_path"]) if kw["config_path"] else {}
    seed = _require(_merged(file_cfg, "seed", kw["seed"]), "seed")
    generator_id = _merged(file_cfg, "generator", kw["generator"])
    domain_path = _merged(file_cfg, "domain", kw["domain_path"])
    classifier_path = _merged(file_cfg, "classifier", kw["classifier_path"])
    x1_path = _require(_merged(file_cfg, "x1", kw["x1_path"]), "x1")
    x2_path = _require(_merged(file_cfg, "x2", kw["x2_path"]), "x2")

    domain = load_domain(domain_path) if domain_path else None
    if classifier_path is None:
        if domain_path is None:
            raise ValidationError("missing required setting: classifier (or domain)")
        classifier_path = str(Path(domain_path).parent / "classifier.json")
    classifier = load_classifier(classifier_path)

    cond = BoundaryCondition(x1=load_motion(x1_path), x2=load_motion(x2_path))
    config = eng.RunConfig(
        seed=seed,
        classifier=classifier,
        domain=domain,
        l=_merged(file_cfg, "pop", kw["pop"]),
        m=_merged(file_cfg, "offspring", kw["offspring"]),
        tau_max=_merged(file_cfg, "tau_max", tau_max_flag),
        length_policy=LengthPolicy(
            y_min=_merged(file_cfg, "y_min", kw["y_min"]),
            y_max=_merged(file_cfg, "y_max", kw["y_max"]),
        ),
        generator_id=generator_id,
        sigma_mut=_merged(file_cfg, "sigma_mut", kw["sigma_mut"]),
        p_keep=_merged(file_cfg, "p_keep", kw["p_keep"]),
        noise_amplitude=_merged(file_cfg, "noise_amplitude", kw["noise_amplitude"]),
        harmonics=_merged(file_cfg, "harmonics", kw["harmonics"]),
        warp_tolerance=_merged(file_cfg, "warp_tolerance", kw["warp_tolerance"]),
        param_jitter=_merged(file_cfg, "param_jitter", kw["param_jitter"]),
    )
    result = eng.run(config, cond)

    out_dir = Path(kw["out"])
    _write_text(out_dir / "run.json", _canonical_json(eng.result_to_jsonable(result)))
    _write_text(out_dir / "front.csv", front_table_csv(eng.result_front_rows(result)))
    for i, member in enumerate(result.final.members):
        save_motion(member.seq, out_dir / f"motion_{i:03d}.json")
    front0 = sum(1 for m in result.final.members if m.rank == 0)
    click.echo(
        f"run complete: {len(result.final.members)} sequences of length "
        f"{len(result.final.members[0].seq)} (transition length {result.y_len}), "
        f"front-0 size {front0}, wall time {result.wall_time:.2f}s"
    )
    click.echo(f"artifacts in {out_dir}")


@cli.command("run")
@_run_options
@click.option("--tau-max", type=int, default=None, help="Generation budget.")
def cmd_run(tau_max, **kw):
    """Guided sampling run; writes run.json, front.csv, and final motion files."""
    _execute_run(kw, tau_max)


@cli.command("baseline")
@_run_options
def cmd_baseline(**kw):
    """Unguided batch: identical to run with a zero generation budget."""
    _execute_run(kw, 0)


def _load_motion_dir(path: str | Path) -> list:
    path = Path(path)
    if not path.is_dir():
        raise IoError(f"{path}: not a directory")
    files = sorted(path.glob("motion_*.json"))
    if not files:
        raise IoError(f"{path}: no motion_*.json files")
    return [load_motion(f) for f in files]


METRIC_CSV_COLUMNS = ["arm", "run", "fid_tr", "fid_te", "acc", "ade", "apd", "class_coverage"]


@cli.command("eval")
@click.option("--run", "run_dirs", type=str, multiple=True, required=True,
              help="Guided run directory (repeatable).")
@click.option("--baseline", "baseline_dirs", type=str, multiple=True,
              help="Unguided run directory (repeatable).")
@click.option("--ref-train", type=str, required=True, help="Reference motion directory.")
@click.option("--ref-test", type=str, required=True, help="Second reference motion directory.")
@click.option("--gt", "gt_path", type=str, default=None, help="Ground-truth motion file.")
@click.option("--classifier", "classifier_path", type=str, required=True)
@click.option("--out", type=str, required=True, help="Output directory.")
def cmd_eval(run_dirs, baseline_dirs, ref_train, ref_test, gt_path, classifier_path, out):
    """Score run artifacts against reference sets; writes metrics.json and metrics.csv."""
    classifier = load_classifier(classifier_path)
    train_set = _load_motion_dir(ref_train)
    test_set = _load_motion_dir(ref_test)
    gt = load_motion(gt_path) if gt_path else None

    arms = {"guided": list(run_dirs), "unguided": list(baseline_dirs)}
    doc: dict = {"arms": {}}
    rows = []
    for arm, dirs in arms.items():
        doc["arms"][arm] = []
        for d in dirs:
            report = metrics_report(_load_motion_dir(d), classifier, train_set, test_set, gt)
            entry = {"run": str(d), **report}
            doc["arms"][arm].append(entry)
            rows.append({"arm": arm, **entry})

    out_dir = Path(out)
    _write_text(out_dir / "metrics.json", _canonical_json(doc))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRIC_CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            ["" if row[c] is None else (repr(row[c]) if isinstance(row[c], float) else str(row[c]))
             for c in METRIC_CSV_COLUMNS]
        )
    _write_text(out_dir / "metrics.csv", buf.getvalue())
    click.echo(f"metrics for {len(rows)} arm/run pairs in {out_dir}")


@cli.command("export-front")
@click.option("--run", "run_path", type=str, required=True,
              help="Run directory or run.json file.")
@click.option("--out", type=str, required=True, help="Output CSV path.")
def cmd_export_front(run_path, out):
    """Re-export the per-generation criteria table of a stored run."""
    path = Path(run_path)
    if path.is_dir():
        path = path / "run.json"
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as err:
        raise IoError(f"{path}: {err}") from err
    except json.JSONDecodeError as err:
        raise IoError(f"{path}: invalid JSON at byte {err.pos}: {err.msg}") from err
    rows = [row for snap in doc["history"] for row in snap]
    _write_text(Path(out), front_table_csv(rows))
    click.echo(f"wrote {out}")


@cli.command("verify-theorems")
@click.option("--sets", type=int, default=1000, show_default=True)
@click.option("--candidates", type=int, default=50, show_default=True)
@click.option("--classes", type=int, default=6, show_default=True)
@click.option("--joints", type=int, default=16, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", type=str, default=".",
              help="Directory for the violation dump, if any.")
@click.option("--inject-fault", is_flag=True, hidden=True,
              help="Deliberately mis-group candidates to exercise the failure path.")
def cmd_verify_theorems(sets, candidates, classes, joints, seed, out, inject_fault):
    """Run both nondominance properties over randomized candidate sets."""
    if sets < 1:
        raise ValidationError(f"--sets must be >= 1, got {sets}")
    if candidates < 2:
        raise ValidationError(f"--candidates must be >= 2, got {candidates}")
    # the fault hook mis-groups every candidate as offset-minimal, which the
    # dominance oracle is guaranteed to catch
    beta_tol = 10.0 if inject_fault else eng.BETA_MIN_TOL

    domain = make_synthetic_domain(classes, joints, seed)
    classifier = domain_classifier(domain)
    root = SeededStream(seed)
    checked = skipped = 0
    violations = []
    for s in range(sets):
        cands = eng.sample_theorem_candidates(
            domain, classifier, candidates, root.child(s)
        )
        rep1 = eng.verify_theorem_1(cands, beta_tol=beta_tol)
        rep2 = eng.verify_theorem_2(cands, classes, beta_tol=beta_tol)
        for rep in (rep1, rep2):
            if rep.skipped:
                skipped += 1
                continue
            checked += 1
            for v in rep.violations:
                violations.append({"set": s, "property": rep.name, **v})

    click.echo(
        f"{sets} sets x {candidates} candidates: {checked} checks, "
        f"{skipped} skipped, {len(violations)} violations"
    )
    if violations:
        dump = Path(out) / "violations.json"
        _write_text(dump, _canonical_json({"seed": seed, "violations": violations}))
        raise PropertyViolation(f"{len(violations)} violations, dumped to {dump}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as err:
        return int(err.exit_code)
    except click.UsageError as err:
        click.echo(f"error: {err.format_message()}", err=True)
        return EXIT_VALIDATION
    except click.Abort:
        return EXIT_VALIDATION
    except ValidationError as err:
        click.echo(f"error: {err}", err=True)
        return EXIT_VALIDATION
    except (IoError, OSError) as err:
        click.echo(f"error: {err}", err=True)
        return EXIT_IO
    except PropertyViolation as err:
        click.echo(f"violation: {err}", err=True)
        return EXIT_VIOLATION
    except DivtweenError as err:
        click.echo(f"error: {err}", err=True)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
