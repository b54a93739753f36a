"""
Autoregressive summary generation
Decoders work against any scorer that returns next-token log-probabilities
for a stack of equal-length BOS-prefixed prefixes, so toy probability tables
and the trained model plug in the same way.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Protocol, Sequence

import numpy as np

from config import BOS_ID, DECODE_DEFAULTS, EOS_ID
from utils.errors import ConfigValidationError, DecodeError

logger = logging.getLogger(__name__)


class NextTokenScorer(Protocol):
    def next_log_probs(self, prefixes: np.ndarray) -> np.ndarray:
        """(n, T) prefixes -> (n, vocab) log-probabilities of the next token"""
        ...


@dataclass
class DecodeConfig:
    beam_size: int = DECODE_DEFAULTS["beam_size"]
    max_summary_len: int = DECODE_DEFAULTS["max_summary_len"]
    length_norm_exponent: float = DECODE_DEFAULTS["length_norm_exponent"]
    min_len: int = DECODE_DEFAULTS["min_len"]
    no_repeat_ngram_size: int = DECODE_DEFAULTS["no_repeat_ngram_size"]

    def __post_init__(self):
        if self.beam_size < 1:
            raise ConfigValidationError("beam_size", f"must be >= 1, got {self.beam_size}")
        if self.max_summary_len < 1:
            raise ConfigValidationError("max_summary_len", f"must be >= 1, got {self.max_summary_len}")
        if not 0 <= self.min_len <= self.max_summary_len:
            raise ConfigValidationError(
                "min_len", f"must lie in [0, max_summary_len={self.max_summary_len}], got {self.min_len}"
            )
        if self.length_norm_exponent < 0:
            raise ConfigValidationError("length_norm_exponent", "must be >= 0")
        if self.no_repeat_ngram_size < 0:
            raise ConfigValidationError("no_repeat_ngram_size", "must be >= 0 (0 disables blocking)")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class BeamHypothesis:
    ids: List[int]                 # BOS-prefixed
    log_prob: float = 0.0
    finished: bool = False
    eos_id: int = field(default=EOS_ID, repr=False)

    @property
    def length(self) -> int:
        """Generated tokens, EOS included"""
        return len(self.ids) - 1

    @property
    def tokens(self) -> List[int]:
        """Generated tokens without BOS/EOS"""
        body = self.ids[1:]
        return body[:-1] if body and body[-1] == self.eos_id else body

    def score(self, exponent: float) -> float:
        """log P / length^exponent"""
        return self.log_prob / (max(self.length, 1) ** exponent)


def banned_tokens(ids: Sequence[int], ngram_size: int) -> List[int]:
    """Tokens that would complete an n-gram already present in the generated ids"""
    generated = list(ids[1:])
    if ngram_size <= 0 or len(generated) < ngram_size - 1:
        return []
    if ngram_size == 1:
        return sorted(set(generated))
    tail = tuple(generated[len(generated) - ngram_size + 1:])
    banned = set()
    for start in range(len(generated) - ngram_size + 1):
        if tuple(generated[start:start + ngram_size - 1]) == tail:
            banned.add(generated[start + ngram_size - 1])
    return sorted(banned)


def _constrained(row: np.ndarray, ids: Sequence[int], config: DecodeConfig, eos_id: int) -> np.ndarray:
    row = np.array(row, dtype=np.float64)
    if len(ids) - 1 < config.min_len:
        row[eos_id] = -np.inf
    banned = banned_tokens(ids, config.no_repeat_ngram_size)
    if banned:
        row[banned] = -np.inf
    return row


def greedy(scorer: NextTokenScorer, config: DecodeConfig,
           bos_id: int = BOS_ID, eos_id: int = EOS_ID) -> BeamHypothesis:
    """
    Argmax at every step until EOS or max_summary_len; ties go to the lower id

    Raises:
        DecodeError: min_len and n-gram blocking leave no admissible token
    """
    hyp = BeamHypothesis(ids=[bos_id], eos_id=eos_id)
    while hyp.length < config.max_summary_len:
        row = _constrained(scorer.next_log_probs(np.array([hyp.ids]))[0], hyp.ids, config, eos_id)
        token = int(np.argmax(row))
        if not np.isfinite(row[token]):
            raise DecodeError(hyp.length, config)
        hyp.ids.append(token)
        hyp.log_prob += float(row[token])
        if token == eos_id:
            break
    hyp.finished = True
    return hyp


def beam_search(scorer: NextTokenScorer, config: DecodeConfig,
                bos_id: int = BOS_ID, eos_id: int = EOS_ID) -> List[BeamHypothesis]:
    """
    Beam search over running log-probabilities

    Each live hypothesis proposes its top beam_size tokens; the pooled candidates
    are ranked by log-prob (lower token id first on ties). EOS candidates ranked
    inside the top beam_size are finished, the best non-EOS candidates refill the
    live beams. Hypotheses still live at max_summary_len finish by length.

    Returns:
        Up to beam_size finished hypotheses, best normalized score first

    Raises:
        DecodeError: a live hypothesis has no admissible next token
    """
    live = [BeamHypothesis(ids=[bos_id], eos_id=eos_id)]
    finished: List[BeamHypothesis] = []
    width = config.beam_size

    for _ in range(config.max_summary_len):
        if not live:
            break
        log_probs = scorer.next_log_probs(np.array([h.ids for h in live]))
        candidates = []
        for i, hyp in enumerate(live):
            row = _constrained(log_probs[i], hyp.ids, config, eos_id)
            order = np.lexsort((np.arange(row.size), -row))
            proposals = [int(t) for t in order if np.isfinite(row[t])][:width]
            if not proposals:
                raise DecodeError(hyp.length, config)
            for token in proposals:
                candidates.append((hyp.log_prob + float(row[token]), token, i))
        candidates.sort(key=lambda c: (-c[0], c[1], c[2]))

        next_live: List[BeamHypothesis] = []
        for rank, (log_prob, token, i) in enumerate(candidates):
            if len(next_live) >= width:
                break
            extended = BeamHypothesis(ids=live[i].ids + [token], log_prob=log_prob, eos_id=eos_id)
            if token == eos_id:
                if rank < width:
                    extended.finished = True
                    finished.append(extended)
                continue
            next_live.append(extended)
        live = next_live

    for hyp in live:
        hyp.finished = True
        finished.append(hyp)

    exponent = config.length_norm_exponent
    finished.sort(key=lambda h: (-h.score(exponent), h.ids))
    logger.debug(f"beam search kept {len(finished)} finished hypotheses")
    return finished[:width]
