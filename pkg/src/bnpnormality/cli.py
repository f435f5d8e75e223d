"""Command-line front end: CSV ingestion, single tests, simulation grids.

Artifacts are machine-readable (JSON report, headered CSV plot data) and byte
reproducible: (input bytes, manifest) determine every output byte at any
parallelism level.

Exit codes: 0 success, 2 input/data error, 3 numerical degeneracy, 4 bad
arguments.
"""
import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dirichlet import StdNormalBase
from .errors import (
    BnpNormalityError,
    DegenerateGrid,
    DegenerateWeights,
    EmptyInput,
    InvalidSpec,
    ParseError,
    SingularCovariance,
)
from .mahalanobis import as_data_matrix, squared_mahalanobis
from .rbtest import TestConfig, run_test
from .rng import RngStream, derive_seed
from .simgen import AlternativeSpec, generate, table1_family
from .special import chi2_quantile

__all__ = ["ingest_csv", "RunManifest", "cmd_test", "cmd_simulate", "main"]

SCHEMA_VERSION = 1
_EMIT_CHOICES = ("qq", "densities", "distances")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 4

_NUMERIC_ERRORS = (SingularCovariance, DegenerateWeights, DegenerateGrid)
_INPUT_ERRORS = (ParseError, EmptyInput, InvalidSpec, OSError, ValueError)


def ingest_csv(path):
    """Read a comma-separated numeric table into a validated data matrix.

    A single leading header row is auto-detected (any cell of the first
    non-blank row that is not a number).  Every other non-numeric or
    non-finite cell is rejected with its line and column.
    """
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if width is None:
                width = len(row)
            if len(row) != width:
                raise ParseError(
                    lineno, len(row), f"expected {width} fields, got {len(row)}"
                )
            parsed = []
            for col, cell in enumerate(row, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    if not rows and lineno == _first_line(path):
                        parsed = None  # header row
                        break
                    raise ParseError(lineno, col, f"not a number: {cell.strip()!r}") from None
                if not math.isfinite(value):
                    raise ParseError(lineno, col, f"non-finite value: {cell.strip()!r}")
                parsed.append(value)
            if parsed is not None:
                rows.append(parsed)
    if not rows:
        raise EmptyInput(f"no data rows in {path}")
    return as_data_matrix(np.asarray(rows, dtype=np.float64))


def _first_line(path):
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if row and not all(cell.strip() == "" for cell in row):
                return lineno
    return 1


@dataclass(frozen=True)
class RunManifest:
    """Everything one `test` invocation depends on; exactly one data source."""

    config: TestConfig
    out_dir: Path
    input_path: Path = None
    generator: AlternativeSpec = None
    data_seed: int = 0
    emit: tuple = ()
    base: str = "chi2"
    jobs: int = 1
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if (self.input_path is None) == (self.generator is None):
            raise ValueError("exactly one of input_path / generator is required")
        unknown = set(self.emit) - set(_EMIT_CHOICES)
        if unknown:
            raise ValueError(f"unknown emit flags: {sorted(unknown)}")
        if self.base not in ("chi2", "normal"):
            raise ValueError(f"base must be 'chi2' or 'normal', got {self.base!r}")


def _strength_interpretation(rb, strength):
    if rb > 1.0:
        return (f"evidence in favor of H0 (RB > 1); strength {strength:.3f} "
                "is strong near 1, weak near 0")
    if rb < 1.0:
        return (f"evidence against H0 (RB < 1); strength {strength:.3f} "
                "is strong near 0, weak near 1")
    return "no evidence either way (RB = 1)"


def _write_report(path, report, config):
    payload = {
        "schema_version": SCHEMA_VERSION,
        "n": report.diagnostics["n"],
        "m": report.diagnostics["m"],
        "config": {
            "a": config.a, "N": config.N, "r1": config.r1, "r2": config.r2,
            "M": config.M, "i0": config.i0, "seed": config.seed,
        },
        "rb_at_zero": report.rb_at_zero,
        "strength": report.strength,
        "verdict": report.verdict,
        "strength_interpretation": _strength_interpretation(
            report.rb_at_zero, report.strength),
        "rb_per_bin": [float(v) for v in report.rb_per_bin],
        "quantile_grid": [float(v) for v in report.quantile_grid],
        "warnings": list(report.diagnostics.get("warnings", [])),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def cmd_test(manifest):
    """Run one test per the manifest; write report.json and flagged artifacts."""
    try:
        if manifest.input_path is not None:
            data = ingest_csv(manifest.input_path)
        else:
            data = generate(manifest.generator, RngStream(manifest.data_seed, 0))
            data = as_data_matrix(data)
    except _NUMERIC_ERRORS as err:
        _report_error(err)
        return EXIT_NUMERIC
    except _INPUT_ERRORS as err:
        _report_error(err)
        return EXIT_INPUT

    base = StdNormalBase() if manifest.base == "normal" else None
    try:
        report = run_test(data, manifest.config, base=base, jobs=manifest.jobs)
    except _NUMERIC_ERRORS as err:
        _report_error(err)
        return EXIT_NUMERIC
    except _INPUT_ERRORS as err:
        _report_error(err)
        return EXIT_INPUT

    for note in manifest.notes:
        report.diagnostics.setdefault("warnings", []).append(note)
    for note in report.diagnostics.get("warnings", []):
        sys.stderr.write(f"warning: {note}\n")

    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_report(out / "report.json", report, manifest.config)

    if manifest.emit:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # already surfaced by run_test
            d2 = squared_mahalanobis(data)
    if "qq" in manifest.emit:
        d2_sorted = np.sort(d2)
        n, m = data.shape
        rows = [
            (chi2_quantile((i - 0.5) / n, m), float(d2_sorted[i - 1]))
            for i in range(1, n + 1)
        ]
        _write_csv(out / "qq.csv", ("chi2_quantile", "squared_mahalanobis"), rows)
    if "densities" in manifest.emit:
        rows = [("prior", float(v)) for v in report.prior_distances.values]
        rows += [("posterior", float(v)) for v in report.posterior_distances.values]
        _write_csv(out / "densities.csv", ("sample", "ad_distance"), rows)
    if "distances" in manifest.emit:
        _write_csv(
            out / "distances.csv",
            ("row", "squared_mahalanobis"),
            [(i + 1, float(v)) for i, v in enumerate(d2)],
        )
    return EXIT_OK


def _report_error(err):
    sys.stderr.write(f"{type(err).__name__}: {err}\n")


def _load_grid(path):
    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict):
        raise InvalidSpec("grid file must contain a JSON object")
    return spec


def cmd_simulate(grid_path, out_dir, jobs=1):
    """Run a (family x dimension x a) grid of seeded tests; write table.csv.

    Failed cells are marked in the status column and the run continues.
    """
    try:
        spec = _load_grid(grid_path)
        families = list(spec.get("families", []))
        dims = [int(v) for v in spec.get("dims", [])]
        a_values = [float(v) for v in spec.get("a", [])]
        n = int(spec.get("n", 50))
        replicates = int(spec.get("replicates", 1))
        seed = int(spec.get("seed", 0))
        cfg_kw = {
            k: spec[k] for k in ("N", "r1", "r2", "M", "i0") if k in spec
        }
        if replicates < 1:
            raise InvalidSpec("replicates must be >= 1")
    except _INPUT_ERRORS as err:
        _report_error(err)
        return EXIT_INPUT

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for fi, family_name in enumerate(families):
        for mi, m in enumerate(dims):
            for ai, a in enumerate(a_values):
                rbs, strengths, status = [], [], "ok"
                for k in range(replicates):
                    try:
                        family = table1_family(family_name, m)
                        data = generate(
                            AlternativeSpec(family, n),
                            RngStream(derive_seed(seed, fi, mi, ai, k, 0), 0),
                        )
                        config = TestConfig(
                            a=a, seed=derive_seed(seed, fi, mi, ai, k, 1), **cfg_kw
                        )
                        report = run_test(data, config, jobs=jobs)
                    except (BnpNormalityError, ValueError) as err:
                        _report_error(err)
                        status = type(err).__name__
                        break
                    rbs.append(report.rb_at_zero)
                    strengths.append(report.strength)
                if status == "ok":
                    rows.append((family_name, m, float(a), float(np.median(rbs)),
                                 float(np.median(strengths)), replicates, "ok"))
                else:
                    rows.append((family_name, m, float(a), "", "", replicates, status))
    _write_csv(
        out / "table.csv",
        ("family", "m", "a", "rb", "strength", "replicates", "status"),
        rows,
    )
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _build_parser():
    parser = _Parser(prog="bnpnormality",
                     description="Bayesian nonparametric test of multivariate normality")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test one dataset (CSV or generated)")
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="CSV file: rows = observations")
    src.add_argument("--generate", metavar="FAMILY",
                     help="draw the dataset from a named study family")
    t.add_argument("--m", type=int, default=2, help="dimension for --generate")
    t.add_argument("--n", type=int, default=50, help="sample size for --generate")
    t.add_argument("--data-seed", type=int, default=0, help="seed for --generate")
    t.add_argument("--a", type=float, default=5.0, help="DP concentration")
    t.add_argument("--N", type=int, default=500, help="DP truncation level")
    t.add_argument("--r1", type=int, default=1000, help="prior replicates")
    t.add_argument("--r2", type=int, default=1000, help="posterior replicates")
    t.add_argument("--M", type=int, default=20, help="quantile bins")
    t.add_argument("--i0", type=int, default=None, help="small-distance bin index")
    t.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
    t.add_argument("--jobs", type=int, default=1, help="replicate threads")
    t.add_argument("--base", choices=("chi2", "normal"), default="chi2",
                   help="prior base measure ('normal' reproduces prior-data conflict)")
    t.add_argument("--out", type=Path, required=True, help="output directory")
    t.add_argument("--emit", default="",
                   help="comma list of extra artifacts: qq,densities,distances")

    s = sub.add_parser("simulate", help="run a simulation-study grid")
    s.add_argument("--grid", type=Path, required=True, help="JSON grid file")
    s.add_argument("--out", type=Path, required=True, help="output directory")
    s.add_argument("--jobs", type=int, default=1, help="replicate threads")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args.grid, args.out, jobs=args.jobs)

    emit = tuple(x for x in args.emit.split(",") if x)
    unknown = set(emit) - set(_EMIT_CHOICES)
    if unknown:
        parser.error(f"unknown --emit values: {','.join(sorted(unknown))}")
    try:
        config = TestConfig(a=args.a, N=args.N, r1=args.r1, r2=args.r2,
                            M=args.M, i0=args.i0, seed=args.seed)
    except ValueError as err:
        parser.error(str(err))

    notes = []
    generator = None
    if args.generate is not None:
        try:
            family = table1_family(args.generate, args.m)
            generator = AlternativeSpec(family, args.n)
        except InvalidSpec as err:
            _report_error(err)
            return EXIT_INPUT
        if args.generate == "lognormal-B":
            notes.append(
                "lognormal parameters are those of the underlying normal distribution"
            )
    manifest = RunManifest(
        config=config,
        out_dir=args.out,
        input_path=args.input,
        generator=generator,
        data_seed=args.data_seed,
        emit=emit,
        base=args.base,
        jobs=args.jobs,
        notes=tuple(notes),
    )
    return cmd_test(manifest)


if __name__ == "__main__":
    sys.exit(main())
