"""
Command-line entry point: argument parsing, logging setup and dispatch
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from typing import Any
from uuid import uuid4

from . import __version__
from .commands import (
    check_command,
    critical_command,
    exact_command,
    oracle_command,
    scan_command,
    spectrum_command,
    wavefunction_command,
)
from .config import load_config, logging_config_from
from .display import Sty, err_console
from .utils.logging import bind, bind_run_context, get_logger, setup_logging
from .utils.validation import ArgValidator as V

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

Handler = Callable[[argparse.Namespace, dict[str, Any]], int]


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="Single JSON object on stdout")
    fmt.add_argument("--csv", action="store_true", help="CSV with header row on stdout")
    common.add_argument("--digits", type=V.digits, default=None, help="Significant digits (default 12)")
    common.add_argument(
        "--precision", type=V.precision_bits, default=None, help="Mantissa bits (53 = binary64, more = mpmath)"
    )
    common.add_argument("--no-color", action="store_true", help="Disable colors")
    common.add_argument("--log-level", type=V.log_level, default=None, help="Console log level")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    ap = argparse.ArgumentParser(
        prog="hyperwell",
        description="Hyperwell - bound states of v(z) = -v0 sinh^4(z)/cosh^6(z)",
        epilog="Examples:\n"
        "  hyperwell spectrum --v0 57.8444102        # Numerical bound states\n"
        "  hyperwell exact --n 0 --parity even       # Polynomial solutions\n"
        "  hyperwell critical --k-max 9              # Threshold couplings\n"
        "  hyperwell scan --v0-from 400 --v0-to 2500 --steps 4 --nu 0 --with-asymptote --csv\n"
        "  hyperwell check --v0 57.8444102           # Cross-branch audit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=f"hyperwell {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, help="Commands")

    p = sub.add_parser("spectrum", parents=[common], help="Bound states from c_N(beta) = 0")
    p.add_argument("--v0", type=V.positive_float, required=True, help="Dimensionless well strength")
    p.add_argument("--parity", choices=["even", "odd", "both"], default="both")
    p.set_defaults(handler=spectrum_command)

    p = sub.add_parser("exact", parents=[common], help="Polynomial solutions of degree n")
    p.add_argument("--n", type=V.non_negative_int, required=True, help="Polynomial degree")
    p.add_argument("--parity", choices=["even", "odd", "both"], default="both")
    p.add_argument("--all-roots", action="store_true", help="Add the physical bound interval columns")
    p.set_defaults(handler=exact_command)

    p = sub.add_parser("critical", parents=[common], help="Critical couplings alpha_K (beta = 0)")
    p.add_argument("--parity", choices=["even", "odd", "both"], default="both")
    p.add_argument("--k-max", type=V.positive_int, default=9)
    p.add_argument("--N-max", dest="n_max", type=V.positive_int, default=60, help="Largest truncation order")
    p.set_defaults(handler=critical_command)

    p = sub.add_parser("scan", parents=[common], help="Energies over a range of v0 (figure data)")
    p.add_argument("--v0-from", type=V.positive_float, required=True)
    p.add_argument("--v0-to", type=V.positive_float, required=True)
    p.add_argument("--steps", type=V.positive_int, default=20)
    p.add_argument("--nu", type=V.non_negative_int, default=None, help="Only this state (default all)")
    p.add_argument("--with-asymptote", action="store_true", help="Add the harmonic asymptote column")
    p.add_argument("--with-exact-overlay", action="store_true", help="Add exact polynomial solutions")
    p.add_argument("--n-max", type=V.non_negative_int, default=4, help="Largest degree for the overlay")
    p.add_argument("--svg", type=V.output_path, default=None, help="Also write an SVG figure")
    p.set_defaults(handler=scan_command)

    p = sub.add_parser("oracle", parents=[common], help="Finite-difference reference levels")
    p.add_argument("--v0", type=V.positive_float, required=True)
    p.add_argument("--L", type=V.positive_float, default=None, help="Box half width")
    p.add_argument("--M", type=V.odd_int, default=None, help="Interior points (odd)")
    p.add_argument("--k", type=V.positive_int, default=None, help="Lowest levels to compute")
    p.set_defaults(handler=oracle_command)

    p = sub.add_parser("check", parents=[common], help="Oracle, Hellmann-Feynman and node audit")
    p.add_argument("--v0", type=V.positive_float, required=True)
    p.add_argument("--nu", type=V.non_negative_int, default=None, help="State for the Hellmann-Feynman check")
    p.set_defaults(handler=check_command)

    p = sub.add_parser("wavefunction", parents=[common], help="(z, phi) samples of one state")
    p.add_argument("--v0", type=V.positive_float, default=None)
    p.add_argument("--nu", type=V.non_negative_int, default=0)
    p.add_argument("--n", type=V.non_negative_int, default=None, help="Exact solution degree instead of --v0")
    p.add_argument("--i", type=V.positive_int, default=1, help="Accepted root index for --n")
    p.add_argument("--parity", choices=["even", "odd"], default="even", help="Parity for --n")
    p.add_argument("--h", type=V.positive_float, default=0.01, help="Grid step")
    p.set_defaults(handler=wavefunction_command)

    return ap


def main(argv: Sequence[str] | None = None) -> int:
    """Main program entry point"""
    config = load_config()
    ap = build_parser()
    args = ap.parse_args(argv)

    logging_config = logging_config_from(config)
    setup_logging(
        level=args.log_level or logging_config.level,
        file_enabled=logging_config.file_enabled,
        console_enabled=logging_config.console_enabled,
        json_file=logging_config.json_file,
        log_path=logging_config.path,
        rotate_max_bytes=logging_config.rotate_max_bytes,
        rotate_backups=logging_config.rotate_backups,
        rich_tracebacks=logging_config.rich_tracebacks,
        show_path=logging_config.show_path,
    )
    bind(app="hyperwell", schema="1.0", app_version=__version__)
    bind_run_context(args.command, run_id=str(uuid4()), precision_bits=args.precision)
    log = get_logger(__name__)
    log.info("startup", command=args.command)

    if args.no_color or not sys.stdout.isatty():
        Sty.off()
    if args.digits is None:
        args.digits = int(config.get("output", {}).get("digits", 12))
    if not (args.json or args.csv):
        default_format = config.get("output", {}).get("format", "table")
        args.json = default_format == "json"
        args.csv = default_format == "csv"

    handler: Handler = args.handler
    try:
        return handler(args, config)
    except ValueError as e:
        log.error("usage.invalid", error=str(e))
        err_console.print(f"[red][ERR] {e}[/red]")
        return EXIT_USAGE
    except RuntimeError as e:
        err_console.print(f"[red][ERR] {e}[/red]")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
