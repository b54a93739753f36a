"""
Retrain over several topic counts and score each run
"""

import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from evaluation.rouge import rouge_l
from summarizer import TopicAwareSummarizer
from training.trainer import train
from utils.run_config import RunConfig

logger = logging.getLogger(__name__)


def topic_sweep(base: RunConfig, topic_counts: Sequence[int], output_dir: Union[str, Path],
                progress: bool = False) -> pd.DataFrame:
    """
    One training run per K with everything else (seed, epochs, corpus) fixed

    Greedy summaries of the validation pairs (training pairs when there is no
    validation split) are scored with ROUGE-L F1.

    Returns:
        DataFrame with columns k, rouge_l_f1
    """
    rows = []
    for k in topic_counts:
        settings = base.to_dict()
        settings.update({"topics": int(k), "output_dir": str(Path(output_dir) / f"k{k}")})
        config = RunConfig.from_dict(settings).validate()
        result = train(config, progress=progress)
        summarizer = TopicAwareSummarizer(result.model, result.vocab, result.topic_vocab, config)
        pairs = result.validation_pairs or result.train_pairs
        f1 = float(np.mean([rouge_l(summarizer.greedy_summary(p.document), p.summary).f1 for p in pairs]))
        logger.info(f"K={k}: ROUGE-L F1 {f1:.4f} on {len(pairs)} pairs")
        rows.append({"k": int(k), "rouge_l_f1": f1})
    return pd.DataFrame(rows, columns=["k", "rouge_l_f1"])
