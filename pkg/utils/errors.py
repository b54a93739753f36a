"""
Exception hierarchy shared by every package
"""
from typing import Iterable, Sequence, Tuple


class TaasError(Exception):
    """Base class for all summarizer errors"""


class DimensionError(TaasError):
    """Operand shapes are incompatible"""

    def __init__(self, operation: str, *shapes: Tuple[int, ...]):
        self.operation = operation
        self.shapes = shapes
        rendered = " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{operation}: incompatible shapes {rendered}")


class ContractError(TaasError):
    """An operation was called outside its precondition"""


class ConfigValidationError(TaasError):
    """A configuration field failed validation"""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"invalid config field '{field}': {message}")


class CorpusError(TaasError):
    """Problem reading or preparing corpus data"""


class MalformedRecordError(CorpusError):
    """A JSONL line could not be parsed"""

    def __init__(self, path: str, line_number: int, reason: str):
        self.path = path
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"{path}:{line_number}: {reason}")


class EmptyCorpusError(CorpusError):
    """An operation needing at least one record received none"""


class EmptySequenceError(TaasError):
    """Every position of a sequence is masked"""


class SequenceTooLongError(TaasError):
    """Input longer than the model's max_len"""

    def __init__(self, length: int, max_len: int):
        self.length = length
        self.max_len = max_len
        super().__init__(f"sequence length {length} exceeds max_len {max_len}")


class TrainingDivergedError(TaasError):
    """Loss became NaN or infinite during training"""

    def __init__(self, epoch: int, batch: int, values: dict):
        self.epoch = epoch
        self.batch = batch
        self.values = values
        super().__init__(f"training diverged at epoch {epoch}, batch {batch}: {values}")


class CheckpointMismatchError(TaasError):
    """Checkpoint contents do not fit the model/config they are loaded into"""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("checkpoint mismatch:\n  " + "\n  ".join(self.problems))


class UnmatchedIdsError(TaasError):
    """Candidate and reference files do not share the same ids"""

    def __init__(self, missing_candidates: Iterable[str], missing_references: Iterable[str]):
        self.missing_candidates = sorted(missing_candidates)
        self.missing_references = sorted(missing_references)
        parts = []
        if self.missing_candidates:
            parts.append("no candidate for: " + ", ".join(self.missing_candidates))
        if self.missing_references:
            parts.append("no reference for: " + ", ".join(self.missing_references))
        super().__init__("; ".join(parts))


class DecodeError(TaasError):
    """Every next token of a live hypothesis is ruled out by the decoding constraints"""

    def __init__(self, generated: int, config):
        self.generated = generated
        super().__init__(f"no admissible token after {generated} generated tokens "
                         f"(min_len={config.min_len}, no_repeat_ngram_size={config.no_repeat_ngram_size})")
