"""AQUARIUS radiology QA engine."""

from ._core import (
    AquariusError,
    Pipeline,
    classify_report,
    effort_reduction,
    fisher_exact_2x2,
    hash_flagged,
    random_review_baseline,
    segment_sections,
    simulate,
    split_sentences,
    wilson_interval,
    write_fixture,
)

__all__ = [
    "AquariusError",
    "Pipeline",
    "classify_report",
    "effort_reduction",
    "fisher_exact_2x2",
    "hash_flagged",
    "random_review_baseline",
    "segment_sections",
    "simulate",
    "split_sentences",
    "wilson_interval",
    "write_fixture",
]

__version__ = "0.3.0"
