"""Command-line front end for the studies.

    python cli.py solitary --c 1.025 --out solitary.csv
    python cli.py residuals --eps 1e-1,1e-2,1e-3 --format json --out residuals.json

Exit codes: 0 success, 2 usage or precondition error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from studies import discover_studies
from xbouss.errors import LabError, ParameterError
from xbouss.logs import setup_logging
from xbouss.output import FORMATS, write_result

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def float_list(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


# flag dest -> (config key, argparse kwargs), per subcommand
_SCALAR = {"type": float}
FLAGS: Dict[str, Dict[str, tuple]] = {
    "solitary": {
        "c": ("c", _SCALAR),
        "eps": ("epsilon", _SCALAR),
        "tol": ("tol", _SCALAR),
        "grid_n": ("n", {"type": int}),
        "grid_half_width": ("half_width", _SCALAR),
        "gn_mode": ("gn_mode", {"action": "store_true", "default": None}),
    },
    "compare": {
        "c": ("c", {"type": float_list}),
        "eps": ("epsilon", _SCALAR),
        "tol": ("tol", _SCALAR),
        "grid_n": ("n", {"type": int}),
    },
    "corrector": {
        "alpha": ("alpha", _SCALAR),
        "eps": ("epsilon", _SCALAR),
        "t": ("t", _SCALAR),
        "grid_n": ("grid_n", {"type": int}),
        "grid_half_width": ("grid_half_width", _SCALAR),
        "tol": ("tol", _SCALAR),
        "closure": ("closure", {"choices": ["literal", "compensated"]}),
    },
    "residuals": {
        "eps": ("eps_list", {"type": float_list}),
        "alpha": ("alpha", _SCALAR),
        "t": ("t", _SCALAR),
        "grid_n": ("grid_n", {"type": int}),
        "grid_half_width": ("grid_half_width", _SCALAR),
        "dt": ("dt", _SCALAR),
        "tol": ("tol", _SCALAR),
        "closure": ("closure", {"choices": ["literal", "compensated"]}),
    },
    "opcheck": {
        "eps": ("eps_list", {"type": float_list}),
        "s": ("s", _SCALAR),
        "grid_n": ("grid_n", {"type": int}),
        "grid_half_width": ("grid_half_width", _SCALAR),
        "tol": ("tol", _SCALAR),
    },
}


def _flag_name(dest: str) -> str:
    return "--" + dest.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    studies = discover_studies()
    parser = argparse.ArgumentParser(prog="xbouss", description="Extended Boussinesq numerical laboratory")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, flags in FLAGS.items():
        wrapper = studies[name]
        p = sub.add_parser(name, help=wrapper.label, description=f"{wrapper.label}. Defaults:\n{wrapper.config_template}",
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", type=Path, help="YAML or JSON file overlaying the defaults")
        p.add_argument("--format", choices=FORMATS, default="csv")
        p.add_argument("--out", type=Path, help="output file (default: <command>.<format>)")
        for dest, (key, kwargs) in flags.items():
            p.add_argument(_flag_name(dest), dest=dest, help=f"sets '{key}'", **kwargs)
    return parser


def overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: getattr(args, dest) for dest, (key, _) in FLAGS[args.command].items()}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    level = logging.WARNING - 10 * min(args.verbose, 2)
    setup_logging(level)

    wrapper = discover_studies()[args.command]
    out = args.out or Path(f"{args.command}.{args.format}")
    try:
        file_overlay = args.config.read_text() if args.config else None
        config = wrapper.resolve(file_overlay, overrides(args))
        result = wrapper.run(config)
        write_result(result, out, args.format)
    except OSError as exc:
        print(f"xbouss {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LabError as exc:
        print(f"xbouss {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ParameterError) else exc.exit_code
    except (TypeError, ValueError) as exc:
        # malformed config values (wrong type, unknown closure name)
        print(f"xbouss {args.command}: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
