import os
import sys
import json
import logging
import argparse
from typing import Any, Dict, List, Optional

# Add the current directory to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.settings import Settings
from generators.analysis_generator import AnalysisGenerator
from models.report_models import AnalysisOptions
from processors.report_builder import emit_plot_data, render_json, render_text, summary_dict
from utils.exceptions import KernelTailError, ModelValidationError
from utils.number_format import dumps_deterministic, write_atomic

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ANALYSIS = 3
EXIT_DISAGREEMENT = 4


class _Console:
    """Progress lines on stdout, silenced when stdout carries the report itself."""

    def __init__(self, quiet: bool):
        self.quiet = quiet

    def say(self, message: str):
        if not self.quiet:
            print(message)


def load_model_file(file_path: str) -> Dict[str, Any]:
    """Load a model document from a JSON file."""
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ModelValidationError(f"Model file not found: {file_path}", path=file_path)
    except json.JSONDecodeError as e:
        raise ModelValidationError(f"Model file is not valid JSON: {e.msg}", path=file_path, line=e.lineno)


def emit_error(error: Exception, code: str = "internal_error"):
    """Machine-readable error document on stderr."""
    if isinstance(error, KernelTailError):
        payload = error.to_dict()
    else:
        payload = {"error": code, "message": str(error), "details": {}}
    sys.stderr.write(dumps_deterministic(payload, indent=0).replace("\n", "") + "\n")


def build_options(args: argparse.Namespace, verify: bool) -> AnalysisOptions:
    overrides: Dict[str, Any] = {"verify": verify, "cross_check": getattr(args, "cross_check", False)}
    if getattr(args, "truncation", None) is not None:
        overrides["truncation"] = args.truncation
    if getattr(args, "eps_eq", None) is not None:
        overrides["eps_eq"] = args.eps_eq
    if getattr(args, "oracle_method", None) is not None:
        overrides["oracle_method"] = args.oracle_method
    return AnalysisOptions(**overrides)


def write_output(text: str, path: Optional[str], console: _Console, label: str):
    if path:
        write_atomic(path, text)
        console.say(f"✅ {label} saved to: {path}")
    else:
        sys.stdout.write(text)


def run_analysis(args: argparse.Namespace, verify: bool) -> int:
    console = _Console(quiet=not args.report)
    console.say(f"📖 Loading model from: {args.model}")
    raw = load_model_file(args.model)

    console.say("🔧 Initializing analysis generator...")
    generator = AnalysisGenerator(build_options(args, verify))

    console.say(f"🎨 Analyzing {raw.get('family', 'unknown')} model...")
    report, solution = generator.run(raw)

    summary = summary_dict(report)
    console.say(f"📊 Case {summary['case']}: rate {summary['rate']}, power {summary['power']}")

    text = render_json(report) if args.format == "json" else render_text(report)
    write_output(text, args.report, console, "Report")

    if args.plot_data:
        write_atomic(args.plot_data, emit_plot_data(report, solution))
        console.say(f"✅ Plot data saved to: {args.plot_data}")

    if report.oracle is not None and not report.oracle.passed:
        console.say("❌ Oracle disagrees with the prediction")
        return EXIT_DISAGREEMENT
    console.say("\n✅ Analysis completed successfully!")
    return EXIT_OK


def run_dump_kernel(args: argparse.Namespace) -> int:
    console = _Console(quiet=not args.report)
    raw = load_model_file(args.model)
    generator = AnalysisGenerator()
    dump = generator.dump_kernel(raw)
    write_output(dumps_deterministic(dump), args.report, console, "Kernel dump")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Exact tail asymptotics by the kernel method")
    parser.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("analyze", "Classify the dominant singularity and report the tail form"),
        ("verify", "Analyze and compare against the truncated-chain oracle"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--model", required=True, help="Path to the model file (JSON)")
        sub.add_argument("--report", "-o", help="Output report path (stdout when omitted)")
        sub.add_argument("--format", choices=["json", "text"], default="json", help="Report format")
        sub.add_argument("--truncation", type=int, help="Oracle truncation size N")
        sub.add_argument("--eps-eq", type=float, help="Equality tolerance of the case classifier")
        sub.add_argument("--plot-data", help="CSV path for n, pi_n0, predicted, ratio")
        sub.add_argument("--oracle-method", choices=["auto", "gth", "qbd", "power"], help="Oracle solver")
        sub.add_argument("--cross-check", action="store_true", help="Resultant cross-check of x*")
        if name == "analyze":
            sub.add_argument("--verify", action="store_true", help="Run the truncated-chain oracle")

    dump = subparsers.add_parser("dump-kernel", help="Dump kernel polynomials and branch points")
    dump.add_argument("--model", required=True, help="Path to the model file (JSON)")
    dump.add_argument("--report", "-o", help="Output path (stdout when omitted)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main function to run the kernel-method analysis."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=(args.log_level or Settings.LOG_LEVEL).upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.command == "dump-kernel":
            return run_dump_kernel(args)
        return run_analysis(args, verify=args.command == "verify" or args.verify)
    except ModelValidationError as e:
        emit_error(e)
        return EXIT_VALIDATION
    except KernelTailError as e:
        emit_error(e)
        return EXIT_ANALYSIS
    except ValueError as e:
        emit_error(e, "invalid_option")
        return EXIT_VALIDATION
    except Exception as e:
        emit_error(e)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
