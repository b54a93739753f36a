"""
Topic-Aware Summarizer - Main Orchestrator
Loads a trained run directory (checkpoint, config snapshot, vocabularies) and
turns documents into summaries: beta -> topic embeddings -> encoder states ->
topic attention -> pooled s -> beam search.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import ARTIFACT_NAMES, TOP_ATTENDED_TOKENS, TOP_TOPIC_WORDS
from corpus.batching import encode_document
from corpus.loader import DocumentPair
from corpus.tokenizer import detokenize, tokenize
from corpus.vocab import TopicVocabulary, Vocabulary
from decoding.beam_search import BeamHypothesis, DecodeConfig, beam_search, greedy
from models.taas import TopicAwareModel
from numeric.checkpoint import load_checkpoint, restore_parameters
from numeric.tensor import no_grad
from utils.errors import CheckpointMismatchError
from utils.run_config import RunConfig

logger = logging.getLogger(__name__)


def top_positions(weights: np.ndarray, k: int) -> List[int]:
    """Indices of the k largest weights; earlier positions win ties"""
    return [int(i) for i in np.argsort(-weights, kind="stable")[:k]]


def format_attention_dump(records: Sequence[Dict[str, Any]]) -> str:
    """
    One block per document: a `# id` header, then `token<TAB>alpha_hat` per encoder
    position in input order, blocks separated by a blank line
    """
    blocks = []
    for record in records:
        attention = record["attention"]
        lines = [f"# {record['id']}"]
        lines += [f"{token}\t{weight:.6f}" for token, weight in zip(attention["tokens"], attention["alpha_hat"])]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""


class TopicAwareSummarizer:
    """
    Inference orchestrator
    - Restores model parameters and vocabularies from a run directory
    - Summarizes single documents or JSONL batches with beam or greedy search
    - Reports topics and the tokens topic attention focuses on
    """

    def __init__(self, model: TopicAwareModel, vocab: Vocabulary, topic_vocab: TopicVocabulary,
                 run_config: Optional[RunConfig] = None):
        self.model = model.eval()
        self.vocab = vocab
        self.topic_vocab = topic_vocab
        self.run_config = run_config or RunConfig()

    @classmethod
    def from_checkpoint(cls, checkpoint_path: Union[str, Path],
                        run_dir: Optional[Union[str, Path]] = None) -> "TopicAwareSummarizer":
        """
        Rebuild the model from the config snapshot and vocabularies next to the checkpoint

        Raises:
            CheckpointMismatchError: vocabulary or config does not fit the stored parameters
        """
        checkpoint_path = Path(checkpoint_path)
        run_dir = Path(run_dir) if run_dir is not None else checkpoint_path.parent
        run_config = RunConfig.from_file(run_dir / ARTIFACT_NAMES["config"])
        vocab = Vocabulary.load(run_dir / ARTIFACT_NAMES["vocab"])
        topic_vocab = TopicVocabulary.load(run_dir / ARTIFACT_NAMES["topic_vocab"])
        model = TopicAwareModel(run_config.model_config(len(vocab), len(topic_vocab)))

        checkpoint = load_checkpoint(checkpoint_path)
        if checkpoint.seed != run_config.seed:
            raise CheckpointMismatchError([f"seed {checkpoint.seed} in checkpoint, {run_config.seed} in config"])
        restore_parameters(dict(model.named_parameters()), checkpoint)
        logger.info(f"restored {len(checkpoint.arrays)} parameter tensors from {checkpoint_path}")
        return cls(model, vocab, topic_vocab, run_config)

    # ---- encoding ----
    def encode(self, document: str) -> Tuple[np.ndarray, np.ndarray]:
        ids = np.array([encode_document(document, self.vocab, self.model.config.max_len)], dtype=np.int64)
        return ids, np.ones_like(ids, dtype=bool)

    def surface_tokens(self, document: str) -> List[str]:
        """Encoder positions as readable tokens (CLS first, truncated like the ids)"""
        return ["<cls>"] + tokenize(document)[:self.model.config.max_len - 1]

    def to_text(self, hypothesis: BeamHypothesis) -> str:
        return detokenize(self.vocab.decode(hypothesis.tokens))

    # ---- summarization ----
    def decode(self, document: str, decode_config: DecodeConfig) -> List[BeamHypothesis]:
        ids, mask = self.encode(document)
        return beam_search(self.model.scorer(ids, mask), decode_config)

    def greedy_summary(self, document: str, decode_config: Optional[DecodeConfig] = None) -> str:
        decode_config = decode_config or self.run_config.decode_config()
        ids, mask = self.encode(document)
        return self.to_text(greedy(self.model.scorer(ids, mask), decode_config))

    def summarize(self, document: str, decode_config: Optional[DecodeConfig] = None,
                  dump_attention: bool = False) -> Dict[str, Any]:
        """
        Main summarization method

        Args:
            document: raw source text
            decode_config: beam settings; the run's decoding defaults when omitted
            dump_attention: add the top attended tokens to the result

        Returns:
            Dictionary with the summary and its length-normalized score
        """
        decode_config = decode_config or self.run_config.decode_config()
        best = self.decode(document, decode_config)[0]
        result: Dict[str, Any] = {
            "summary": self.to_text(best),
            "score": best.score(decode_config.length_norm_exponent),
        }
        if dump_attention:
            result["attention"] = self.attention_report(document)
        return result

    def summarize_batch(self, pairs: Sequence[DocumentPair], decode_config: Optional[DecodeConfig] = None,
                        dump_attention: bool = False) -> List[Dict[str, Any]]:
        """One output record per input record, ids preserved"""
        results = []
        for i, pair in enumerate(pairs, start=1):
            logger.debug(f"summarizing {pair.id} ({i}/{len(pairs)})")
            record = {"id": pair.id, **self.summarize(pair.document, decode_config, dump_attention)}
            results.append(record)
        return results

    # ---- reports ----
    def attention_report(self, document: str, top_n: int = TOP_ATTENDED_TOKENS) -> Dict[str, Any]:
        """Per-token topic attention plus the top tokens by topic and by encoder self-attention"""
        ids, mask = self.encode(document)
        alpha_hat, self_profile = self.model.attention_profiles(ids, mask)
        tokens = self.surface_tokens(document)
        alpha_hat, self_profile = alpha_hat[0], self_profile[0]
        return {
            "tokens": tokens,
            "alpha_hat": [float(w) for w in alpha_hat],
            "top_topic_attention": [[tokens[i], float(alpha_hat[i])] for i in top_positions(alpha_hat, top_n)],
            "top_self_attention": [[tokens[i], float(self_profile[i])] for i in top_positions(self_profile, top_n)],
        }

    def topics(self, top_n: int = TOP_TOPIC_WORDS) -> List[List[Tuple[str, float]]]:
        """Top words per topic, highest beta first"""
        with no_grad():
            beta = self.model.ntm.beta().data
        report = []
        for row in beta:
            top = top_positions(row, min(top_n, row.size))
            report.append([(self.topic_vocab.id_to_token[i], float(row[i])) for i in top])
        return report
