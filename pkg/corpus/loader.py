"""
JSONL ingestion of document/summary pairs
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Union

from utils.errors import MalformedRecordError

logger = logging.getLogger(__name__)


@dataclass
class DocumentPair:
    """One source document with its reference summary"""
    document: str
    summary: str = ""
    id: str = ""
    inference_only: bool = False

    def to_dict(self) -> Dict[str, str]:
        data = asdict(self)
        data.pop("inference_only")
        return data


@dataclass
class RejectedRecord:
    line_number: int
    reason: str


@dataclass
class LoadReport:
    """Records rejected while streaming a file"""
    path: str
    rejected: List[RejectedRecord] = field(default_factory=list)


def load_jsonl(path: Union[str, Path], report: Optional[LoadReport] = None) -> Iterator[DocumentPair]:
    """
    Stream DocumentPairs from a UTF-8 JSONL file in file order

    Args:
        path: file with one JSON object per line: document, summary, optional id
        report: collects records rejected for a missing/empty `document`

    Raises:
        MalformedRecordError: a non-blank line is not a JSON object
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecordError(str(path), line_number, f"invalid JSON ({e.msg})")
            if not isinstance(record, dict):
                raise MalformedRecordError(str(path), line_number, "expected a JSON object")

            document = record.get("document")
            if not isinstance(document, str) or not document.strip():
                reason = "missing 'document' field" if document is None else "empty or non-string 'document'"
                logger.warning("%s:%d rejected: %s", path, line_number, reason)
                if report is not None:
                    report.rejected.append(RejectedRecord(line_number, reason))
                continue

            summary = record.get("summary")
            yield DocumentPair(
                document=document,
                summary=summary if isinstance(summary, str) else "",
                id=str(record["id"]) if record.get("id") is not None else str(line_number),
                inference_only=summary is None,
            )


def read_pairs(path: Union[str, Path]) -> List[DocumentPair]:
    report = LoadReport(str(path))
    pairs = list(load_jsonl(path, report))
    if report.rejected:
        logger.warning("%s: %d record(s) rejected", path, len(report.rejected))
    return pairs


def write_jsonl(path: Union[str, Path], records: List[Dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


def read_summaries(path: Union[str, Path]) -> Dict[str, Dict[str, str]]:
    """
    id -> record for candidate/reference files, where `document` is optional

    Raises:
        MalformedRecordError: bad JSON, a non-object line, or a line without a string `summary`
    """
    path = Path(path)
    records: Dict[str, Dict[str, str]] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecordError(str(path), line_number, f"invalid JSON ({e.msg})")
            if not isinstance(record, dict) or not isinstance(record.get("summary"), str):
                raise MalformedRecordError(str(path), line_number, "expected an object with a string 'summary'")
            doc_id = str(record["id"]) if record.get("id") is not None else str(line_number)
            records[doc_id] = {"summary": record["summary"], "document": record.get("document") or ""}
    return records
