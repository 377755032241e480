#!/usr/bin/env python3
"""
Simple usage examples for the kernel-method tail analysis

This script shows how to call the analysis from your own code. Run it from
the repository root: python example/usage_examples.py
"""
import json
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from generators.analysis_generator import AnalysisGenerator
from models.report_models import AnalysisOptions
from processors.model_processor import two_demand_walk
from processors.report_builder import format_tail, render_text
from tools.fluid import mm1_case_scan

MODELS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "models")


def load(name):
    with open(os.path.join(MODELS_DIR, name), "r", encoding="utf-8") as f:
        return json.load(f)


def example_two_demand_cases():
    """Example: the three cases of the 2-demand walk"""
    print("📋 Example 1: 2-demand walk")
    print("-" * 40)

    generator = AnalysisGenerator()
    for lam, mu1, mu2 in [(0.2, 0.3, 0.5), (0.2, 0.4, 0.4), (0.2, 0.5, 0.3)]:
        report = generator.analyze(two_demand_walk(lam, mu1, mu2))
        print(f"🎯 lam={lam}, mu1={mu1}, mu2={mu2} → Case {report.case['case_id']}")
        print(f"   {format_tail('pi_n0', report.primary_tail)}")


def example_verify_product_form():
    """Example: compare the prediction with the truncated chain"""
    print("\n📋 Example 2: Oracle verification")
    print("-" * 40)

    options = AnalysisOptions(verify=True, truncation=80, oracle_method="qbd")
    report, _ = AnalysisGenerator(options).run(load("product_form.json"))
    print(render_text(report))


def example_srbm_and_fluid():
    """Example: continuous models"""
    print("\n📋 Example 3: SRBM and fluid queue")
    print("-" * 40)

    generator = AnalysisGenerator()
    for name in ("srbm_independent.json", "fluid_mm1_case1.json", "fluid_mm2_case3.json"):
        report = generator.analyze(load(name))
        print(f"🎯 {report.metadata['name']} → Case {report.case['case_id']}")
        for key, form in report.tail_forms.items():
            print(f"   {format_tail(key, form)}")


def example_fill_rate_scan():
    """Example: the case label of the M/M/1 fluid queue as r grows"""
    print("\n📋 Example 4: Fill-rate scan (lam=1, mu=4)")
    print("-" * 40)

    for row in mm1_case_scan(1.0, 4.0, [0.25, 0.5, 1.0, 1.5, 2.0]):
        gap = row["alpha_star"] - row["alpha1"]
        print(f"   r={row['r']:<5} Case {row['case_id']}  alpha* - alpha1 = {gap:+.4f}")


def main():
    """Run all examples"""
    print("🚀 KERNEL-METHOD TAIL ASYMPTOTICS - USAGE EXAMPLES")
    print("=" * 60)

    example_two_demand_cases()
    example_verify_product_form()
    example_srbm_and_fluid()
    example_fill_rate_scan()

    print("\n✅ All examples completed!")
    print("\n🔧 Command-line equivalents:")
    print("• python main.py analyze --model example/models/two_demand_case1.json")
    print("• python main.py verify --model example/models/product_form.json --format text")
    print("• python main.py dump-kernel --model example/models/fluid_mm1_case1.json")


if __name__ == "__main__":
    main()
