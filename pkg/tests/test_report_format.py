import json

import pytest

from generators.analysis_generator import AnalysisGenerator
from models.report_models import AnalysisOptions
from processors.oracle import boundary_sequence
from processors.report_builder import emit_plot_data, format_tail, render_json, render_text, summary_dict
from utils.exceptions import NoOracleError

from conftest import product_form_dict


@pytest.fixture(scope="module")
def verified_product_run():
    options = AnalysisOptions(verify=True, truncation=60, oracle_method="qbd")
    return AnalysisGenerator(options).run(product_form_dict())


def test_json_report_is_deterministic(case1_walk):
    generator = AnalysisGenerator()
    first = render_json(generator.analyze(case1_walk))
    second = render_json(generator.analyze(case1_walk))
    assert first == second
    document = json.loads(first)
    assert document["family"] == "rwqp"
    assert document["case"]["case_id"] == 1
    assert document["tail_forms"]["pi_n0"]["constant"] == pytest.approx(2.0 / 15.0)
    assert document["metadata"]["pipeline"] == "WalkPipeline"


def test_text_report(case1_walk):
    text = render_text(AnalysisGenerator().analyze(case1_walk))
    assert "Case 1" in text
    assert "pi_n0 ~" in text
    assert "closed_form" in text


def test_format_tail_without_constant(case3_walk):
    report = AnalysisGenerator().analyze(case3_walk)
    line = format_tail("pi_n0", report.primary_tail)
    assert line.startswith("pi_n0 ~ C * n^-1.5")
    assert any("constant unavailable" in w for w in report.warnings)


def test_plot_data_needs_an_oracle(case1_walk):
    report, ts = AnalysisGenerator().run(case1_walk)
    assert ts is None
    with pytest.raises(NoOracleError):
        emit_plot_data(report, ts)


def test_verified_product_form(verified_product_run):
    report, ts = verified_product_run
    form = report.primary_tail
    assert report.case["case_id"] == 1
    assert form.rate == pytest.approx(0.6, rel=1e-9)
    assert form.provenance == "numeric_estimate"
    assert form.constant == pytest.approx(0.12, rel=1e-3)

    oracle = report.oracle
    assert oracle is not None
    assert oracle.method == "qbd"
    assert oracle.theta_pass and oracle.alpha_pass
    assert oracle.constant_source == "report"
    assert oracle.passed


def test_plot_data_csv(verified_product_run):
    report, ts = verified_product_run
    lines = emit_plot_data(report, ts).splitlines()
    assert lines[0] == "n,pi_n0,predicted,ratio"
    assert len(lines) == 1 + boundary_sequence(ts).size
    ratio = float(lines[10].split(",")[3])
    assert ratio == pytest.approx(1.0, rel=1e-2)


def test_summary_dict(verified_product_run):
    report, _ = verified_product_run
    summary = summary_dict(report)
    assert summary["family"] == "rwqp"
    assert summary["case"] == 1
    assert summary["rate"] == pytest.approx(0.6)
    assert summary["power"] == 0.0


def test_fluid_report(fluid_raw):
    report = AnalysisGenerator().analyze(fluid_raw)
    assert set(report.tail_forms) == {"density", "boundary", "marginal"}
    assert report.case["case_id"] == 1
    assert report.pole_candidates["alpha_star"] == pytest.approx(1.0 / 3.0)
    assert report.pole_candidates["mm1_constants"]["C"] == pytest.approx(5.0 / 36.0, rel=1e-6)
    assert report.metadata["name"] == fluid_raw["name"]


def test_srbm_report_skips_verification(srbm_raw):
    report, ts = AnalysisGenerator(AnalysisOptions(verify=True)).run(srbm_raw)
    assert ts is None
    assert report.oracle is None
    assert report.tail_forms["V2"].rate == pytest.approx(2.0)
    assert any("verification skipped" in w for w in report.warnings)


@pytest.mark.slow
def test_verified_case3_walk(case3_walk):
    options = AnalysisOptions(verify=True, truncation=400, oracle_method="qbd")
    report, ts = AnalysisGenerator(options).run(case3_walk)
    form = report.primary_tail
    assert report.case["case_id"] == 3
    assert form.power == pytest.approx(-1.5)
    # with a truncated solution the constant is no longer unavailable
    assert form.provenance == "numeric_estimate"
    assert form.constant == pytest.approx(1.18, rel=0.02)
    assert not any("constant unavailable" in w for w in report.warnings)

    oracle = report.oracle
    assert oracle.fit.theta_hat == pytest.approx(form.rate, abs=1e-3)
    assert oracle.constant_source == "report"
    # the single-point ratio at the end of the window still carries the 1/n correction
    n1 = oracle.fit.window[1]
    assert boundary_sequence(ts)[n1 - 1] / form.predict(n1) < 0.96
    assert oracle.constant_ratio == pytest.approx(1.0, abs=0.05)
    assert oracle.constant_pass
    assert oracle.passed


@pytest.mark.slow
def test_verified_case2_walk(case2_walk):
    options = AnalysisOptions(verify=True, truncation=400, oracle_method="qbd")
    report, _ = AnalysisGenerator(options).run(case2_walk)
    assert report.case["case_id"] == 2
    assert report.primary_tail.provenance == "closed_form"

    oracle = report.oracle
    assert oracle.fit.theta_hat == pytest.approx(0.5, abs=1e-3)
    assert oracle.fit.alpha_hat == pytest.approx(-0.5, abs=0.15)
    assert oracle.constant_ratio == pytest.approx(1.0, abs=0.05)
    assert oracle.passed
