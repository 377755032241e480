"""Human-readable rendering of reports and plot-data export."""
from typing import Any, Dict, List, Optional
import math

from models.oracle_models import TruncatedSolution
from models.report_models import SingularityReport
from models.singularity_models import TailForm
from processors.oracle import boundary_sequence
from utils.exceptions import NoOracleError
from utils.number_format import csv_text, dumps_deterministic

__all__ = ["render_json", "render_text", "format_tail", "emit_plot_data", "summary_dict"]

FAMILY_TITLES = {
    "rwqp": "Random walk in the quarter plane",
    "srbm": "Reflected Brownian motion",
    "fluid": "M/M/c-driven fluid queue",
}


def render_json(report: SingularityReport) -> str:
    return dumps_deterministic(report)


def _num(value: Optional[float]) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float) and math.isinf(value):
        return "+inf" if value > 0 else "-inf"
    return f"{value:.10g}"


def format_tail(name: str, form: TailForm) -> str:
    """One-line formula for a tail form, e.g. ``pi_n0 ~ 0.1333 * n^0 * 0.6667^(n-0)``."""
    constant = _num(form.constant) if form.constant is not None else "C"
    if form.variable == "x":
        body = f"{constant} * x^{_num(form.power)} * exp(-{_num(form.rate)} x)"
    else:
        body = f"{constant} * n^{_num(form.power)} * {_num(form.rate)}^(n-{form.index_offset})"
    line = f"{name} ~ {body}  [{form.provenance}]"
    if form.error_band is not None:
        line += f" +/- {_num(form.error_band)}"
    return line


def render_text(report: SingularityReport) -> str:
    """Plain-text summary of a report."""
    lines: List[str] = []
    lines.append(f"🎯 {FAMILY_TITLES.get(report.family, report.family)}")
    lines.append("=" * 50)
    stability = report.stability
    verified = "" if stability.get("verified") else " (advisory)"
    lines.append(f"Stability: {stability.get('stable')}{verified} - {stability.get('reason')}")

    lines.append("\n📐 Branch points:")
    for key, value in report.branch_points.items():
        if isinstance(value, (list, tuple)) and all(isinstance(v, (int, float)) for v in value):
            lines.append(f"   {key}: " + ", ".join(_num(float(v)) for v in value))
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            lines.append(f"   {key}: {_num(float(value))}")

    lines.append("\n🔎 Pole candidates:")
    for key, value in report.pole_candidates.items():
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            lines.append(f"   {key}: {_num(float(value))}")

    case = report.case
    lines.append(f"\n📊 Case {case.get('case_id')}: dominant singularity {_num(case.get('x_dom'))}")
    if case.get("coincidence"):
        lines.append("   pole coincides with the branch point")
    for note in case.get("notes", []):
        lines.append(f"   • {note}")

    lines.append("\n📈 Tail forms:")
    for name, form in report.tail_forms.items():
        lines.append(f"   {format_tail(name, form)}")

    if report.oracle is not None:
        oracle = report.oracle
        fit = oracle.fit
        status = "✅ agrees" if oracle.passed else "❌ disagrees"
        lines.append(f"\n🧪 Oracle ({oracle.method}, N={oracle.truncation}): {status}")
        lines.append(f"   theta_hat = {_num(fit.theta_hat)} (predicted {_num(oracle.predicted_rate)})")
        lines.append(f"   alpha_hat = {_num(fit.alpha_hat)} (predicted {_num(oracle.predicted_power)})")
        lines.append(f"   c_hat     = {_num(fit.c_hat)} (predicted {_num(oracle.predicted_constant)})")
        lines.append(f"   window {fit.window[0]}..{fit.window[1]}, residual {oracle.residual:.2e}, edge mass {oracle.mass_at_edge:.2e}")

    if report.warnings:
        lines.append("\n⚠️  Warnings:")
        lines.extend(f"   • {w}" for w in report.warnings)
    if report.assumptions:
        lines.append("\n📌 Assumptions:")
        lines.extend(f"   • {a}" for a in report.assumptions)
    return "\n".join(lines) + "\n"


def emit_plot_data(report: SingularityReport, ts: Optional[TruncatedSolution]) -> str:
    """CSV with columns n, pi_n0, predicted, ratio for the boundary sequence.

    ``predicted`` uses the reported constant, or the fitted constant when the
    report has none (``oracle.constant_source`` records which).

    Raises:
        NoOracleError: no oracle comparison is attached or the solution is missing
    """
    if report.oracle is None or ts is None:
        raise NoOracleError("Plot data needs an oracle run (--verify)")
    seq = boundary_sequence(ts)
    if seq.size == 0:
        raise NoOracleError("Oracle boundary sequence is empty")
    form = report.tail_forms["pi_n0"]
    if form.constant is None:
        form = form.model_copy(update={"constant": report.oracle.fit.c_hat})

    rows = []
    for n, value in enumerate(seq, start=1):
        predicted = form.predict(n)
        ratio = float(value) / predicted if predicted > 0 else math.nan
        rows.append((n, float(value), float(predicted), ratio))
    return csv_text(["n", "pi_n0", "predicted", "ratio"], rows)


def summary_dict(report: SingularityReport) -> Dict[str, Any]:
    """Compact case/rate/power view used by the CLI progress line."""
    primary = report.primary_tail
    return {
        "family": report.family,
        "case": report.case.get("case_id"),
        "rate": primary.rate,
        "power": primary.power,
        "constant": primary.constant,
    }
