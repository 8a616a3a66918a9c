"""``hyperpaths`` command-line entry point.

Every subcommand builds a :class:`~hyperpaths.jobs.JobSpec` from its flags,
or loads one from ``--job FILE``, and hands it to :func:`hyperpaths.jobs.run`.
Exit status: 0 on success, 1 when a certificate or check fails, 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .errors import HyperpathsError
from .jobs import EXIT_USAGE, UsageError, load_job, run, validate_job, write_artifacts
from .serialize import dumps


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 already; keep the prefix tidy
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"hyperpaths: error: {message}\n")


def _json_arg(text: str, flag: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _space_arg(text: str) -> Any:
    text = text.strip()
    if text.startswith("{"):
        return _json_arg(text, "--space")
    p = Path(text)
    if p.suffix == ".json" and p.exists():
        return _json_arg(p.read_text(encoding="utf-8"), str(p))
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperpaths", description="Paths in hyperspaces of finite subsets.")
    parser.add_argument("--version", action="version", version=f"hyperpaths {__version__}")
    parser.add_argument("--job", metavar="FILE", help="run a JSON job file instead of a subcommand")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--space", default="r2", help="r1..rN, cross, or a JSON space config")
    common.add_argument("--x", "--a", dest="x", help="first set as JSON")
    common.add_argument("--y", "--b", dest="y", help="second set as JSON")
    common.add_argument("--n", type=int, help="set size (cardinality cap for two-leg)")
    common.add_argument("--lambda", dest="lam", type=float, help="quasiconvexity constant")
    common.add_argument("--depth", type=int, default=8, help="dyadic grid depth")
    common.add_argument("--eps", type=float, help="net spacing or spaced-pair epsilon")
    common.add_argument("--seed", type=int, help="seed for random input sets")
    common.add_argument("--out", help="path sample output file")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--plot", help="CSV polyline output file")
    common.add_argument("--report", help="JSON report output file")

    for name in ("hausdorff", "relation", "synth", "two-leg", "interpolate", "certify", "extract"):
        p = sub.add_parser(name, parents=[common])
        if name in ("relation", "synth"):
            p.add_argument("--mode", choices=("proximal", "reduced", "trimmed", "minimal"))
        if name == "synth":
            p.add_argument("--cap", type=int, help="cardinality cap for the bundle (default |R|)")
        if name == "interpolate":
            p.add_argument("--t", type=float, help="single parameter value")
            p.add_argument("--steps", type=int, default=16)
        if name in ("certify", "extract"):
            p.add_argument("--path", required=True, help="sampled path file (.json or .csv)")
        if name == "certify":
            p.add_argument("--L", dest="L", type=float, help="declared Lipschitz constant")
        if name == "extract":
            p.add_argument("--start", dest="start", help="start point as JSON (defaults to --x)")

    ce = sub.add_parser("counterexample", parents=[common])
    ce.add_argument("kind", choices=("taxicab-fs2", "spaced-pair"))
    ce.add_argument("--s", type=int, default=2, help="number of size-three groups")
    ce.add_argument("--delta", type=float, help="grid spacing")
    ce.add_argument("--variant", choices=("groups", "two-group"), default="groups")
    return parser


def _spec_from_args(args: argparse.Namespace) -> dict[str, Any]:
    inputs: dict[str, Any] = {"depth": args.depth}
    for key in ("n", "eps", "seed"):
        if getattr(args, key) is not None:
            inputs[key] = getattr(args, key)
    if args.lam is not None:
        inputs["lambda"] = args.lam
    if args.command == "extract":
        raw = args.start if args.start is not None else args.x
        if raw is not None:
            inputs["a"] = _json_arg(raw, "--start")
    else:
        for key in ("x", "y"):
            raw = getattr(args, key)
            if raw is not None:
                inputs[key] = _json_arg(raw, f"--{key}")
    for key in ("mode", "cap", "t", "steps", "path", "L", "s", "delta", "variant", "kind"):
        val = getattr(args, key, None)
        if val is not None:
            inputs[key] = val
    output = {"format": args.format}
    for key in ("out", "plot", "report"):
        if getattr(args, key) is not None:
            output[key] = getattr(args, key)
    return {
        "schema": 1,
        "command": args.command,
        "space": _space_arg(args.space),
        "inputs": inputs,
        "output": output,
    }


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.job:
            job_path = Path(args.job)
            if not job_path.exists():
                raise UsageError(f"job file {job_path} does not exist")
            spec = load_job(job_path.read_text(encoding="utf-8"), str(job_path))
        elif args.command:
            spec = validate_job(_spec_from_args(args), "flags")
        else:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        result = run(spec)
        write_artifacts(result)
    except (UsageError, HyperpathsError) as exc:
        print(f"hyperpaths: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if result.text is not None:
        sys.stdout.write(result.text)
    else:
        sys.stdout.write(dumps(result.report))
    return result.status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
