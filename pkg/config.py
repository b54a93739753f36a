"""
Configuration file for the topic-aware summarizer
Contains special tokens, corpus/model/optimizer/decoding defaults and report settings
"""
from dotenv import load_dotenv
load_dotenv()
import os
from pathlib import Path
from typing import Dict, Tuple


# ==================== PATHS & ENVIRONMENT ====================
PROJECT_ROOT = Path(__file__).resolve().parent
OUTPUT_DIR = os.getenv("TAAS_OUTPUT_DIR", "runs")
LOG_LEVEL = os.getenv("TAAS_LOG_LEVEL", "INFO")
STOPWORDS_PATH = os.getenv("TAAS_STOPWORDS", str(PROJECT_ROOT / "corpus" / "stopwords.txt"))

# ==================== SPECIAL TOKENS ====================
# Order fixes ids 0-4 in every seq2seq vocabulary
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
BOS_TOKEN = "<bos>"
EOS_TOKEN = "<eos>"
CLS_TOKEN = "<cls>"
SPECIAL_TOKENS: Tuple[str, ...] = (PAD_TOKEN, UNK_TOKEN, BOS_TOKEN, EOS_TOKEN, CLS_TOKEN)
PAD_ID, UNK_ID, BOS_ID, EOS_ID, CLS_ID = range(len(SPECIAL_TOKENS))

# ==================== CORPUS DEFAULTS ====================
CORPUS_DEFAULTS = {
    "vocab_cap": 10_000,
    "topic_vocab_cap": 2_000,
    "min_count": 1,
    "max_len": 256,          # encoder input, CLS included
    "max_summary_len": 64,   # decoder target, EOS included
    "batch_size": 32,
    "validation_fraction": 0.1,
}

SENTENCE_TERMINATORS = (".", "!", "?")

# ==================== MODEL DEFAULTS ====================
MODEL_DEFAULTS = {
    "hidden": 128,
    "heads": 2,
    "encoder_layers": 2,
    "decoder_layers": 2,
    "ffn_width": 256,
    "dropout": 0.1,
    "pooling_mode": "topic",
    "lambda_": 0.0,
    "freeze_encoder": False,
    "freeze_ntm": True,
    "ntm_pretrain_epochs": 20,
    "topics": 10,
    "latent_dim": None,      # None -> same as topics
    "ntm_hidden": 128,
    "projection_variant": "residual_ln",
    "injection": "memory_slot",
    "position_encoding": True,
    "seed": 13,
}

POOLING_MODES = ("topic", "cls", "sum")
PROJECTION_VARIANTS = ("residual_ln", "post_ln")
PROJECTION_ALIASES = {"paper": "residual_ln"}
INJECTION_MODES = ("memory_slot", "embedding")

LAYER_NORM_EPS = 1e-5
PROBABILITY_FLOOR = 1e-10    # inside log() of the NTM reconstruction

# ==================== OPTIMIZER DEFAULTS ====================
ADAM_DEFAULTS = {
    "learning_rate": 3e-5,
    "beta1": 0.9,
    "beta2": 0.999,
    "epsilon": 1e-8,
}

# ==================== DECODING DEFAULTS ====================
DECODE_DEFAULTS = {
    "beam_size": 4,
    "max_summary_len": 64,
    "length_norm_exponent": 1.0,
    "min_len": 5,
    "no_repeat_ngram_size": 0,
}

# ==================== EVALUATION SETTINGS ====================
LENGTH_BUCKETS: Tuple[int, int] = (19, 30)
BUCKET_NAMES = ("short", "medium", "long")
TOP_ATTENDED_TOKENS = 5
TOP_TOPIC_WORDS = 10

# ==================== GRADIENT CHECK SETTINGS ====================
GRADCHECK_CONFIG = {
    "step": 1e-4,
    "tolerance": 1e-3,
    "max_coordinates": 50,
    "magnitude_floor": 1e-7,
}

# ==================== ARTIFACT NAMES ====================
ARTIFACT_NAMES: Dict[str, str] = {
    "checkpoint": "model.ckpt",
    "config": "config.json",
    "vocab": "vocab.txt",
    "topic_vocab": "topic_vocab.txt",
    "metrics": "metrics.csv",
    "sweep": "topic_sweep.csv",
}

# ==================== CLI EXIT CODES ====================
EXIT_CODES = {
    "success": 0,
    "validation_error": 1,
    "runtime_failure": 2,
}
