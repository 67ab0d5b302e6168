import argparse
import logging
import sys
from typing import *

from ..utils.error import GeometryError, StrictModeError, UserConfigError
from ..utils.version import NLOSVIEW_VERSION
from .config import EMIT_CHOICES, MODES, load_config, preset_names
from .context import RunContext
from .pipeline import design_only, run
from .results import RunResults

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USER = 2
EXIT_STRICT = 3


def _emit_list(text: str) -> List[str]:
    items = [i.strip() for i in text.split(",") if i.strip()]
    unknown = [i for i in items if i not in EMIT_CHOICES]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown format(s) {', '.join(unknown)}; choose from {', '.join(EMIT_CHOICES)}"
        )
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlosview",
        description="Multi-view NLOS imaging through a time-varying reflecting plane.",
    )
    parser.add_argument("--version", action="version", version=NLOSVIEW_VERSION)
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="Design, simulate and image one configuration.")
    run_cmd.add_argument("--config", required=True, help="Config file or preset name.")
    run_cmd.add_argument("--out", required=True, help="Output folder.")
    run_cmd.add_argument("--seed", type=int, help="Overrides `seed`.")
    run_cmd.add_argument("--mode", choices=MODES, help="Overrides `mode`.")
    run_cmd.add_argument("--sweeps", type=int, help="Overrides `sweeps`.")
    run_cmd.add_argument("--threads", type=int, help="Overrides `threads`.")
    run_cmd.add_argument("--emit", type=_emit_list, help="Comma-separated artifact list.")
    run_cmd.add_argument("--strict", action="store_true", default=None, help="Warnings fail the run.")
    run_cmd.add_argument("-v", "--verbose", action="store_true")

    design_cmd = commands.add_parser("design-only", help="Print the design report only.")
    design_cmd.add_argument("--config", required=True, help="Config file or preset name.")
    design_cmd.add_argument("--out", help="Also write design_report.json into this folder.")
    design_cmd.add_argument("--strict", action="store_true", default=None)
    design_cmd.add_argument("-v", "--verbose", action="store_true")

    commands.add_parser("presets", help="List the shipped presets.")
    return parser


def _run_command(args: argparse.Namespace) -> int:
    config = load_config(args.config).with_overrides(
        seed=args.seed,
        mode=args.mode,
        sweeps=args.sweeps,
        threads=args.threads,
        emit=args.emit,
        strict=args.strict,
    )
    context = RunContext(threads=None if config.threads == "auto" else config.threads)
    output = run(config, args.out, context)
    RunResults(output, print_summary=True).metrics
    return EXIT_OK


def _design_command(args: argparse.Namespace) -> int:
    config = load_config(args.config).with_overrides(strict=args.strict)
    report = design_only(config, args.out)
    print(report.to_json(indent=2, sort_keys=True))
    for warning in report.warnings:
        print("WARN: " + warning, file=sys.stderr)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "presets":
            print("\n".join(preset_names()))
            return EXIT_OK
        if args.command == "design-only":
            return _design_command(args)
        return _run_command(args)
    except (UserConfigError, GeometryError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USER
    except StrictModeError as err:
        # the artifacts are on disk; list each warning once
        for warning in err.warnings:
            print("WARN: " + warning, file=sys.stderr)
        print(f"error: strict mode, {len(err.warnings)} warning(s).", file=sys.stderr)
        return EXIT_STRICT
    except Exception:
        logger.exception("Internal error.")
        return EXIT_INTERNAL
