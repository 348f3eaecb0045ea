"""Command-line front end of the package.

Subcommands ``validate``, ``verify``, ``norm-scan``, ``coefficients`` and
``generate``. Machine output (JSON or CSV) goes to stdout or ``--out``,
human summaries to stderr. Exit codes: 0 all checks pass, 1 a check
failed, 2 usage or input error.
"""

import argparse
import json
import os
import re
import sys
import traceback
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import pandas as pd

import cubecocycle
from cubecocycle.complex_core import CubeComplex, jsonable
from cubecocycle.exceptions import (
    ConfigError,
    CubeComplexError,
    FamilyError,
    InvalidComplexError,
)
from cubecocycle.families import (
    MAX_VERTICES,
    FamilySpec,
    generate,
    group_action,
    parse_family,
)
from cubecocycle.hyperplanes import hyperplane_report
from cubecocycle.utils.log import get_logger
from cubecocycle.verification import (
    CHECK_ANCHORS,
    DEFAULT_MAX_PAIRS,
    STATUS_FAIL,
    CheckRecord,
    Report,
    SuiteConfig,
    coefficient_report,
    failures,
    norm_scan_frame,
    run_suite,
    sample_pairs,
    validation_report,
)
from cubecocycle.zw import z_grid

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMMANDS = ("validate", "verify", "norm-scan", "coefficients", "generate")
FORMATS = ("json", "csv")
DEFAULT_Z_GRID = "3x4@0.95"
_Z_GRID_PATTERN = re.compile(
    r"^\s*(\d+)\s*[x×]\s*(\d+)\s*@\s*([0-9]*\.?[0-9]+(?:[eE][-+]?\d+)?)\s*$"
)


def parse_z_grid(text: str) -> Tuple[int, int, float]:
    """``"RxA@rmax"`` (or ``"R×A@rmax"``) to ``(R, A, rmax)``."""
    match = _Z_GRID_PATTERN.match(text)
    if match is None:
        raise ConfigError(
            f"z-grid {text!r} is not of the form RxA@rmax", witness=text
        )
    return int(match.group(1)), int(match.group(2)), float(match.group(3))


@dataclass
class RunConfig:
    """Options of one CLI run, checked on construction.

    Raises:
        ConfigError: An option is out of range or inconsistent with the
            command.
    """

    command: str
    family: Optional[str] = None
    input: Optional[str] = None
    z_grid: str = DEFAULT_Z_GRID
    seed: int = 0
    out: Optional[str] = None
    store: Optional[str] = None
    format: str = "json"
    jobs: int = os.cpu_count() or 1
    max_pairs: int = DEFAULT_MAX_PAIRS
    max_vertices: int = MAX_VERTICES
    x: Optional[int] = None
    y: Optional[int] = None
    grid: Tuple[int, int, float] = field(init=False)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if (self.family is None) == (self.input is None):
            raise ConfigError("give exactly one of --family and --input")
        for name in ("jobs", "max_pairs", "max_vertices"):
            if getattr(self, name) <= 0:
                raise ConfigError(
                    f"{name} must be positive", witness=getattr(self, name)
                )
        self.grid = parse_z_grid(self.z_grid)
        radial, angular, r_max = self.grid
        if radial <= 0 or angular <= 0:
            raise ConfigError("z-grid counts must be positive")
        if not 0 <= r_max < 1:
            raise ConfigError(f"max |z| = {r_max} must be below 1")
        if self.command == "coefficients" and (
            self.x is None or self.y is None
        ):
            raise ConfigError("coefficients needs the vertices x and y")

    @property
    def label(self) -> str:
        return self.family if self.family is not None else self.input

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "family": self.family,
            "input": self.input,
            "z_grid": list(self.grid),
            "seed": self.seed,
            "format": self.format,
            "jobs": self.jobs,
            "max_pairs": self.max_pairs,
            "max_vertices": self.max_vertices,
        }


def _load(
    config: RunConfig, validate: bool = True
) -> Tuple[Optional[FamilySpec], CubeComplex]:
    if config.input is not None:
        complex_ = generate(
            FamilySpec("json", (config.input,)),
            max_vertices=config.max_vertices,
            validate=validate,
        )
        return None, complex_
    spec = parse_family(config.family)
    complex_ = generate(
        spec, max_vertices=config.max_vertices, validate=validate
    )
    return spec, complex_


def _emit(config: RunConfig, document: Any = None, frame=None):
    """Write JSON or CSV to ``--out`` or stdout."""
    if frame is not None and config.format == "csv":
        text = frame.to_csv(index=False)
    elif frame is not None:
        text = frame.to_json(orient="records", indent=2)
    else:
        text = json.dumps(jsonable(document), indent=2, ensure_ascii=False)
    if config.out:
        folder = os.path.dirname(config.out)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(config.out, "w") as f:
            f.write(text)
            f.write("\n")
        logger.info(f"Wrote {config.command} output to {config.out}")
    else:
        sys.stdout.write(text)
        sys.stdout.write("\n")


def _records_frame(report: Report) -> pd.DataFrame:
    rows = []
    for record in report.records:
        row = record.to_dict()
        rows.append(
            {
                "check": row["check"],
                "anchor": row["anchor"],
                "status": row["status"],
                "instance": json.dumps(row["instance"]),
                "witness": json.dumps(row.get("witness")),
            }
        )
    return pd.DataFrame(
        rows, columns=["check", "anchor", "status", "instance", "witness"]
    )


def _emit_report(config: RunConfig, report: Report):
    if config.format == "csv":
        _emit(config, frame=_records_frame(report))
    else:
        _emit(config, report.to_dict())
    if config.store:
        report.save(config.store)


def _print_summary(report: Report):
    summary = report.summary()
    print(
        f"{report.command}: {summary['total']} checks, {summary['pass']} "
        f"passed, {summary['fail']} failed, {summary['error']} errors"
        + (" (sampled)" if report.partial else ""),
        file=sys.stderr,
    )
    for record in failures(report)[:10]:
        print(
            f"  {record.status.upper()} {record.check} {record.instance}: "
            f"{json.dumps(jsonable(record.witness))[:200]}",
            file=sys.stderr,
        )


def cmd_validate(config: RunConfig) -> int:
    try:
        _, complex_ = _load(config, validate=False)
    except InvalidComplexError as e:
        logger.debug(traceback.format_exc())
        report = Report("validate", config.to_dict())
        report.records.append(
            CheckRecord(
                "complex.validate",
                CHECK_ANCHORS["complex.validate"],
                {},
                STATUS_FAIL,
                witness={"error": str(e), "witness": e.witness},
            )
        )
    else:
        report = validation_report(complex_, config.label, seed=config.seed)
        report.config = config.to_dict()
    _emit_report(config, report)
    _print_summary(report)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_verify(config: RunConfig) -> int:
    spec, complex_ = _load(config)
    action = group_action(spec, complex_) if spec is not None else None
    radial, angular, r_max = config.grid
    suite = SuiteConfig(
        max_pairs=config.max_pairs,
        seed=config.seed,
        jobs=config.jobs,
        norm_points=tuple(
            p.z for p in z_grid(radial, angular, r_max)
        ),
    )
    report = run_suite(complex_, config.label, suite, action=action)
    report.config = {**config.to_dict(), **report.config}
    _emit_report(config, report)
    _print_summary(report)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_norm_scan(config: RunConfig) -> int:
    _, complex_ = _load(config)
    points = z_grid(*config.grid)
    pairs, sampled = sample_pairs(
        complex_.n_vertices, config.max_pairs, config.seed
    )
    frame = norm_scan_frame(
        complex_, config.label, points, pairs, jobs=config.jobs
    )
    _emit(config, frame=frame)
    violations = int((~frame["pass"]).sum())
    print(
        f"norm-scan: {len(frame)} rows over {len(pairs)} pairs"
        + (" (sampled)" if sampled else "")
        + f", {violations} above the bound",
        file=sys.stderr,
    )
    return EXIT_OK if violations == 0 else EXIT_FAILURE


def cmd_coefficients(config: RunConfig) -> int:
    _, complex_ = _load(config)
    for v in (config.x, config.y):
        complex_.check_vertex(v)
    document = coefficient_report(complex_, config.x, config.y)
    if config.format == "csv":
        _emit(config, frame=pd.DataFrame(document["entries"]))
    else:
        _emit(config, document)
    print(
        f"coefficients: {len(document['entries'])} nonzero entries of "
        f"c({config.x},{config.y}), prediction "
        + ("agrees" if document["agree"] else "DISAGREES"),
        file=sys.stderr,
    )
    return EXIT_OK if document["agree"] else EXIT_FAILURE


def cmd_generate(config: RunConfig) -> int:
    _, complex_ = _load(config)
    document = {
        "name": complex_.name,
        **complex_.to_dict(),
        "dim": complex_.dim,
        "hyperplanes": hyperplane_report(complex_),
    }
    if config.format == "csv":
        _emit(
            config,
            frame=pd.DataFrame(
                {"cube": [json.dumps(c) for c in document["cubes"]]}
            ),
        )
    else:
        _emit(config, document)
    print(
        f"generate: {complex_.name} with {complex_.n_vertices} vertices, "
        f"dimension {complex_.dim}, {len(document['hyperplanes'])} "
        "hyperplanes",
        file=sys.stderr,
    )
    return EXIT_OK


HANDLERS = {
    "validate": cmd_validate,
    "verify": cmd_verify,
    "norm-scan": cmd_norm_scan,
    "coefficients": cmd_coefficients,
    "generate": cmd_generate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubecocycle",
        description="Check the cocycle construction on CAT(0) cube "
        "complexes.",
    )
    parser.add_argument(
        "--version", action="version", version=cubecocycle.__version__
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--family", help="Family string, e.g. grid:3x4 or tree(2,3)."
    )
    common.add_argument("--input", help="Path to a JSON complex.")
    common.add_argument(
        "--z-grid",
        default=DEFAULT_Z_GRID,
        help="Polar grid of z values, RxA@rmax.",
    )
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="Output file instead of stdout.")
    common.add_argument(
        "--store", help="TinyDB file receiving the check records."
    )
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument(
        "--jobs",
        type=int,
        default=os.cpu_count() or 1,
        help="Worker threads.",
    )
    common.add_argument(
        "--max-pairs",
        type=int,
        default=DEFAULT_MAX_PAIRS,
        help="Vertex pairs checked before sampling kicks in.",
    )
    common.add_argument(
        "--max-vertices", type=int, default=MAX_VERTICES
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command, parents=[common])
        if command == "coefficients":
            sub.add_argument("x", type=int)
            sub.add_argument("y", type=int)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        family=args.family,
        input=args.input,
        z_grid=args.z_grid,
        seed=args.seed,
        out=args.out,
        store=args.store,
        format=args.format,
        jobs=args.jobs,
        max_pairs=args.max_pairs,
        max_vertices=args.max_vertices,
        x=getattr(args, "x", None),
        y=getattr(args, "y", None),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        return HANDLERS[config.command](config)
    except (ConfigError, FamilyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as e:
        print(f"error: malformed JSON input: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CubeComplexError as e:
        logger.debug(traceback.format_exc())
        print(f"error: {e}", file=sys.stderr)
        if e.witness is not None:
            print(f"  witness: {jsonable(e.witness)}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
