"""
Corpus-level evaluation reports: per-document ROUGE tables, a side-by-side
summary block, per-length-bucket tables and optional plotly charts
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

import pandas as pd
import plotly.express as px

from evaluation.abstractiveness import novel_ngram_ratio
from evaluation.buckets import bucket_name
from evaluation.rouge import rouge_all
from utils.errors import UnmatchedIdsError
from utils.sentences import SentenceSplitter

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ("rouge_1_f1", "rouge_2_f1", "rouge_l_f1")
METRIC_LABELS = {"rouge_1_f1": "ROUGE-1", "rouge_2_f1": "ROUGE-2", "rouge_l_f1": "ROUGE-L"}


@dataclass
class EvalReport:
    """Scores of one system over a corpus"""
    system: str
    per_document: pd.DataFrame
    bucket_table: Optional[pd.DataFrame] = None
    abstractiveness: Dict[str, float] = field(default_factory=dict)

    @property
    def means(self) -> Dict[str, float]:
        if self.per_document.empty:
            return {column: 0.0 for column in METRIC_COLUMNS}
        return {column: float(self.per_document[column].mean()) for column in METRIC_COLUMNS}

    def summary_row(self) -> Dict[str, object]:
        return {"system": self.system, "documents": len(self.per_document), **self.means,
                **self.abstractiveness}


def match_ids(candidates: Mapping[str, str], references: Mapping[str, str]) -> List[str]:
    """
    Ids present on both sides, in reference order

    Raises:
        UnmatchedIdsError: an id appears on one side only
    """
    missing_candidates = [i for i in references if i not in candidates]
    missing_references = [i for i in candidates if i not in references]
    if missing_candidates or missing_references:
        raise UnmatchedIdsError(missing_candidates, missing_references)
    return list(references)


def score_corpus(candidates: Mapping[str, str], references: Mapping[str, str], system: str = "candidate",
                 documents: Optional[Mapping[str, str]] = None,
                 boundaries: Optional[Tuple[int, int]] = None,
                 summary_level: bool = True) -> EvalReport:
    """
    Score every candidate against its reference

    Args:
        candidates / references: id -> summary text, matched by id
        documents: id -> source text, enables buckets and novel n-gram ratios
        boundaries: (low, high) sentence counts for the length-bucket table
        summary_level: union-LCS ROUGE-L; False scores one LCS over the whole text
    """
    ids = match_ids(candidates, references)
    rows = []
    for doc_id in ids:
        r1, r2, rl = rouge_all(candidates[doc_id], references[doc_id], summary_level=summary_level)
        row = {"id": doc_id, "rouge_1_f1": r1.f1, "rouge_2_f1": r2.f1, "rouge_l_f1": rl.f1}
        if documents is not None and doc_id in documents:
            document = documents[doc_id]
            if boundaries is not None:
                row["bucket"] = bucket_name(SentenceSplitter.count(document), boundaries)
            row["novel_1"] = novel_ngram_ratio(candidates[doc_id], document, 1)
            row["novel_2"] = novel_ngram_ratio(candidates[doc_id], document, 2)
        rows.append(row)

    per_document = pd.DataFrame(rows, columns=["id", *METRIC_COLUMNS]) if not rows else pd.DataFrame(rows)
    report = EvalReport(system=system, per_document=per_document)
    if "novel_1" in per_document.columns:
        report.abstractiveness = {
            "novel_1": float(per_document["novel_1"].mean()),
            "novel_2": float(per_document["novel_2"].mean()),
        }
    if boundaries is not None and "bucket" in per_document.columns:
        report.bucket_table = bucket_table(per_document, system)
    logger.info(f"scored {len(ids)} documents for {system}")
    return report


def bucket_table(per_document: pd.DataFrame, system: str) -> pd.DataFrame:
    """Mean F1 per length bucket"""
    table = (
        per_document.groupby("bucket", sort=False)[list(METRIC_COLUMNS)]
        .mean()
        .reset_index()
    )
    counts = per_document.groupby("bucket", sort=False).size().reset_index(name="documents")
    table = table.merge(counts, on="bucket")
    table.insert(0, "system", system)
    return table


def summary_table(reports: List[EvalReport]) -> pd.DataFrame:
    return pd.DataFrame([r.summary_row() for r in reports])


def format_summary(reports: List[EvalReport]) -> str:
    """Fixed-width F1 block (x100), one line per system"""
    width = max([len("System")] + [len(r.system) for r in reports])
    header = f"{'System':<{width}}  " + "  ".join(f"{METRIC_LABELS[c]:>8}" for c in METRIC_COLUMNS)
    lines = [header, "-" * len(header)]
    for report in reports:
        means = report.means
        lines.append(f"{report.system:<{width}}  " + "  ".join(f"{100 * means[c]:>8.2f}" for c in METRIC_COLUMNS))
    return "\n".join(lines)


def create_bucket_chart(buckets: pd.DataFrame):
    """Grouped bars of mean F1 per length bucket and system"""
    if buckets is None or buckets.empty:
        return None
    long_form = buckets.melt(id_vars=["system", "bucket"], value_vars=list(METRIC_COLUMNS),
                             var_name="metric", value_name="f1")
    long_form["metric"] = long_form["metric"].map(METRIC_LABELS)
    fig = px.bar(
        long_form,
        x="bucket",
        y="f1",
        color="system",
        facet_col="metric",
        barmode="group",
        title="ROUGE F1 by Document Length",
    )
    fig.update_layout(height=400, margin=dict(l=20, r=20, t=60, b=20))
    return fig


def create_sweep_chart(sweep: pd.DataFrame):
    """ROUGE-L F1 against the number of topics"""
    if sweep is None or sweep.empty:
        return None
    fig = px.line(sweep, x="k", y="rouge_l_f1", title="ROUGE-L F1 vs Number of Topics", markers=True)
    fig.update_layout(xaxis_title="K", yaxis_title="ROUGE-L F1", height=300,
                      margin=dict(l=20, r=20, t=40, b=20))
    return fig


def write_reports(reports: List[EvalReport], output_dir: str, plot: bool = False) -> List[Path]:
    """Write per-document, summary and bucket CSVs (and an HTML chart when asked)"""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for report in reports:
        path = out / f"{report.system}_per_document.csv"
        report.per_document.to_csv(path, index=False)
        written.append(path)
    path = out / "summary.csv"
    summary_table(reports).to_csv(path, index=False)
    written.append(path)

    bucket_frames = [r.bucket_table for r in reports if r.bucket_table is not None]
    if bucket_frames:
        buckets = pd.concat(bucket_frames, ignore_index=True)
        path = out / "buckets.csv"
        buckets.to_csv(path, index=False)
        written.append(path)
        if plot:
            fig = create_bucket_chart(buckets)
            if fig is not None:
                path = out / "buckets.html"
                fig.write_html(str(path))
                written.append(path)
    return written
