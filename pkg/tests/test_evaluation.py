import numpy as np
import pytest

from gafuzzy.errors import EmptyInput, FingerprintMismatch, LengthMismatch
from gafuzzy.evaluation import (
    BaselineRun,
    ConfusionMatrix,
    baseline_from_dict,
    baseline_to_dict,
    build_report,
    emit_plot_data,
    format_report,
    load_baseline,
    save_baseline,
    save_report,
    score,
)
from gafuzzy.ga import GAParams, GenerationStats
from gafuzzy.rule_learning import InductionConfig
from gafuzzy.selector import (
    FitnessConfig,
    Provenance,
    SelectionResult,
)


def test_score_examples():
    labels = [1, 0, 1, 0, 1]
    acc, matrix = score(labels, labels)
    assert acc == 1.0
    assert (matrix.tp, matrix.tn, matrix.fp, matrix.fn) == (3, 2, 0, 0)
    flipped = [1 - v for v in labels]
    acc, matrix = score(flipped, labels)
    assert acc == 0.0
    assert (matrix.fp, matrix.fn) == (2, 3)


def test_score_reference_percentages():
    # the shape of the two report rows: 69% and 87% of 100 records
    labels = [1] * 50 + [0] * 50
    baseline_preds = [1] * 35 + [0] * 15 + [0] * 34 + [1] * 16
    acc, _ = score(baseline_preds, labels)
    assert acc == pytest.approx(0.69)
    selected_preds = [1] * 44 + [0] * 6 + [0] * 43 + [1] * 7
    acc, _ = score(selected_preds, labels)
    assert acc == pytest.approx(0.87)


def test_score_errors():
    with pytest.raises(LengthMismatch):
        score([1, 0], [1])
    with pytest.raises(EmptyInput):
        score([], [])


def test_confusion_consistency_random():
    rng = np.random.default_rng(15)
    for _ in range(100):
        n = int(rng.integers(1, 50))
        preds = rng.integers(0, 2, n)
        labels = rng.integers(0, 2, n)
        acc, matrix = score(preds, labels)
        assert matrix.total == n
        assert acc == matrix.accuracy == float(np.mean(preds == labels))


def make_result(fingerprint, mask=(0, 1, 0, 0, 0, 1, 0, 1), accuracy=0.85,
                cost=18.0, master=7):
    fcfg = FitnessConfig.from_master_seed(master)
    trace = [
        GenerationStats(0, 0.5, 0.4, mask),
        GenerationStats(1, 0.6, 0.5, mask),
    ]
    provenance = Provenance(
        GAParams(seed=1), fcfg, InductionConfig(), fingerprint, 768, master
    )
    names = tuple(f"f{i}" for i, b in enumerate(mask) if b)
    return SelectionResult(mask, names, accuracy, cost, 0.6, trace,
                           provenance, model=None)


def make_baseline(fingerprint, master=7, accuracy=0.72):
    fcfg = FitnessConfig.from_master_seed(master)
    return BaselineRun(
        accuracy=accuracy,
        confusion=ConfusionMatrix(40, 15, 70, 29),
        feature_count=8,
        cost=46.0,
        dataset_fingerprint=fingerprint,
        report_seed=fcfg.resolved_report_plan().seed,
    )


def test_build_report_rows():
    baseline = make_baseline("abc")
    result = make_result("abc")
    report = build_report(baseline, result)
    without, with_sel = report.rows
    assert without.condition == "without selection"
    assert without.cost == 46.0  # full cost
    assert without.selected_count == without.original_feature_count == 8
    assert with_sel.cost == 18.0
    assert with_sel.selected_count == 3
    assert with_sel.selected_count <= with_sel.original_feature_count


def test_build_report_fingerprint_mismatch():
    with pytest.raises(FingerprintMismatch):
        build_report(make_baseline("abc"), make_result("xyz"))
    # same data, different reporting split
    with pytest.raises(FingerprintMismatch):
        build_report(make_baseline("abc", master=7), make_result("abc", master=8))


def test_format_report_one_decimal():
    report = build_report(make_baseline("abc", accuracy=0.6912),
                          make_result("abc", accuracy=0.8749))
    text = format_report(report)
    assert "69.1%" in text
    assert "87.5%" in text
    assert text.count("\n") == 2  # header + two rows


def test_emit_plot_data(tmp_path):
    baseline = make_baseline("abc")
    result = make_result("abc")
    report = build_report(baseline, result)
    cost_path, trace_path = emit_plot_data(report, result.trace, tmp_path)
    cost_lines = cost_path.read_text().splitlines()
    assert cost_lines[0] == "series,label,value"
    assert len(cost_lines) == 3
    full_value = float(cost_lines[1].split(",")[2])
    selected_value = float(cost_lines[2].split(",")[2])
    assert selected_value < full_value
    trace_lines = trace_path.read_text().splitlines()
    assert trace_lines[0] == "generation,best_fitness,mean_fitness"
    assert len(trace_lines) == len(result.trace) + 1
    # byte-identical on re-emit
    second = tmp_path / "again"
    cost2, trace2 = emit_plot_data(report, result.trace, second)
    assert cost2.read_bytes() == cost_path.read_bytes()
    assert trace2.read_bytes() == trace_path.read_bytes()


def test_baseline_roundtrip(tmp_path):
    baseline = make_baseline("fp")
    path = tmp_path / "baseline.json"
    save_baseline(baseline, path)
    assert load_baseline(path) == baseline
    assert baseline_from_dict(baseline_to_dict(baseline)) == baseline


def test_save_report_deterministic(tmp_path):
    report = build_report(make_baseline("abc"), make_result("abc"))
    save_report(report, tmp_path / "a.json")
    save_report(report, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
