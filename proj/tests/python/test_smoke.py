import json
import math

import pytest

import aquarius


def test_classify_report_negated():
    label = aquarius.classify_report("FINDINGS: No acute hemorrhage. IMPRESSION: Normal.")
    assert label["label"] == "NEGATIVE"
    [span] = label["evidence"]
    assert span["polarity"] == "NEGATED"
    assert span["matched_term"].lower() == "hemorrhage"


def test_classify_report_positive_and_sections():
    assert aquarius.classify_report("Small acute subdural hematoma.")["label"] == "POSITIVE"
    sections = aquarius.segment_sections("FINDINGS: a. IMPRESSION: b.")
    assert [(s[0], s[2], s[3]) for s in sections] == [("FINDINGS", 0, 13), ("IMPRESSION", 13, 27)]
    assert len(aquarius.split_sentences("One. Two.")) == 2


def test_stats_helpers():
    assert aquarius.fisher_exact_2x2(0, 10, 0, 10) == pytest.approx(1.0)
    assert aquarius.fisher_exact_2x2(1, 189, 5, 186) == pytest.approx(0.21504935953049192, rel=1e-10)
    lo, hi = aquarius.wilson_interval(1, 190)
    assert 0.0 < lo < 1 / 190 < hi < 1.0
    assert aquarius.effort_reduction(29, 1936) == pytest.approx(0.985021, abs=1e-6)
    assert aquarius.hash_flagged("s", "x") == aquarius.hash_flagged("s", "x")


def test_fixture_pipeline_end_to_end(tmp_path):
    aquarius.write_fixture(str(tmp_path))
    p = aquarius.Pipeline(str(tmp_path / "events.jsonl"))
    for name in ("studies", "findings", "reports"):
        summary = p.ingest_file(str(tmp_path / f"{name}.jsonl"))
        assert summary["accepted"] == 1936 and summary["rejected"] == 0
    assert p.study_count == 1936
    assert len(p.queue()) == 29
    with pytest.raises(aquarius.AquariusError, match="IncompleteAdjudication"):
        p.metrics()
    assert p.apply_script(str(tmp_path / "adjudications.jsonl"))["applied"] == 29
    m = p.metrics()
    assert m["missed_rate_flagged"] == pytest.approx(1 / 190, abs=1e-9)
    assert m["missed_rate_nonflagged"] == pytest.approx(5 / 191, abs=1e-9)
    assert m["p_value"] > 0.05
    assert p.metrics("CONFIRMED_POSITIVE")["denominator_flagged"] == 182

    reopened = aquarius.Pipeline(str(tmp_path / "events.jsonl"))
    assert reopened.event_count == p.event_count
    assert reopened.metrics() == m


def test_ingest_and_adjudicate_in_memory():
    p = aquarius.Pipeline()
    assert p.ingest("studies", {"study_id": "A", "acquired_at": "2021-01-04T07:00:00Z",
                                "scanner_id": "CT-1", "exam_type": "HEAD_CT_NONCONTRAST"})[0] == "accepted"
    bad = {"study_id": "A", "finding_code": "ICH", "ai_positive": True, "ai_score": 1.7,
           "model_version": "m", "received_at": "2021-01-04T07:05:00Z"}
    status, message = p.ingest("findings", bad)
    assert status == "rejected" and "ai_score" in message
    p.ingest("findings", dict(bad, ai_score=0.9))
    p.ingest("reports", {"study_id": "A", "text": "No hemorrhage.",
                         "finalized_at": "2021-01-04T08:00:00Z"})
    [item] = p.queue()
    assert item["concordance"] == "AI_POS_NLP_NEG"
    assert p.adjudicate("A", "TRUE_POSITIVE_MISSED")["status"] == "ADJUDICATED"
    with pytest.raises(aquarius.AquariusError, match="UnknownItem"):
        p.adjudicate("B", "OTHER")


def test_simulate_and_baseline(tmp_path):
    aquarius.simulate({"n_studies": 500, "seed": "py"}, str(tmp_path))
    lines = (tmp_path / "sidecar.jsonl").read_text().splitlines()
    assert len(lines) == 500 and json.loads(lines[0])["study_id"] == "SIM-0001"
    report = aquarius.random_review_baseline(str(tmp_path / "sidecar.jsonl"), 1.0, trials=50)
    assert report["mean_detected"] == report["true_misses"]
    assert math.isclose(report["mean_fraction_detected"], 1.0) or report["true_misses"] == 0
