"""
Run configuration: one flat JSON object, overridable from the command line,
snapshotted next to every artifact so a run can be repeated from it
"""

import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from config import CORPUS_DEFAULTS, MODEL_DEFAULTS, OUTPUT_DIR, STOPWORDS_PATH
from decoding.beam_search import DecodeConfig
from models.config import ModelConfig
from numeric.optim import AdamConfig
from utils.errors import ConfigValidationError
from utils.validators import ConfigValidator

logger = logging.getLogger(__name__)

T = TypeVar("T")

# ModelConfig fields the run owns or derives from the corpus
_DERIVED_MODEL_FIELDS = {"vocab_size", "topic_vocab_size", "max_len", "max_summary_len", "seed"}
MODEL_KEYS = tuple(f.name for f in fields(ModelConfig) if f.name not in _DERIVED_MODEL_FIELDS)
ADAM_KEYS = tuple(f.name for f in fields(AdamConfig))
DECODE_KEYS = tuple(f.name for f in fields(DecodeConfig) if f.name != "max_summary_len")


@dataclass
class RunConfig:
    train_path: str = ""
    validation_path: Optional[str] = None
    output_dir: str = OUTPUT_DIR
    epochs: int = 10
    seed: int = MODEL_DEFAULTS["seed"]
    batch_size: int = CORPUS_DEFAULTS["batch_size"]
    vocab_cap: int = CORPUS_DEFAULTS["vocab_cap"]
    topic_vocab_cap: int = CORPUS_DEFAULTS["topic_vocab_cap"]
    min_count: int = CORPUS_DEFAULTS["min_count"]
    max_len: int = CORPUS_DEFAULTS["max_len"]
    max_summary_len: int = CORPUS_DEFAULTS["max_summary_len"]
    validation_fraction: float = CORPUS_DEFAULTS["validation_fraction"]
    stopwords_path: str = STOPWORDS_PATH
    model: Dict[str, Any] = field(default_factory=dict)
    adam: Dict[str, Any] = field(default_factory=dict)
    decode: Dict[str, Any] = field(default_factory=dict)

    # ---- construction ----
    @classmethod
    def run_keys(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls) if f.name not in ("model", "adam", "decode"))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        """Split a flat mapping into run, model, optimizer and decoding groups"""
        ConfigValidator.validate_keys(data, cls.run_keys() + MODEL_KEYS + ADAM_KEYS + DECODE_KEYS)
        config = cls(**{k: v for k, v in data.items() if k in cls.run_keys()})
        config.model = {k: v for k, v in data.items() if k in MODEL_KEYS}
        config.adam = {k: v for k, v in data.items() if k in ADAM_KEYS}
        config.decode = {k: v for k, v in data.items() if k in DECODE_KEYS}
        return config

    @classmethod
    def from_file(cls, path: Union[str, Path], overrides: Optional[Mapping[str, Any]] = None) -> "RunConfig":
        """
        Read the JSON config, then apply non-None overrides

        Raises:
            ConfigValidationError: unreadable file, unknown key or bad value
        """
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigValidationError("config", f"config file does not exist: {path}")
        except json.JSONDecodeError as e:
            raise ConfigValidationError("config", f"not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ConfigValidationError("config", "expected one flat JSON object")
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        flat = {k: getattr(self, k) for k in self.run_keys()}
        flat.update(self.model)
        flat.update(self.adam)
        flat.update(self.decode)
        return flat

    def snapshot(self, path: Union[str, Path]) -> Path:
        """Write the flat config; the file alone reproduces the run"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    # ---- typed views ----
    def model_config(self, vocab_size: int, topic_vocab_size: int) -> ModelConfig:
        return ModelConfig(
            vocab_size=vocab_size,
            topic_vocab_size=topic_vocab_size,
            max_len=self.max_len,
            max_summary_len=self.max_summary_len,
            seed=self.seed,
            **self.model,
        )

    def adam_config(self) -> AdamConfig:
        return AdamConfig(**self.adam)

    def decode_config(self, **overrides) -> DecodeConfig:
        settings = {"max_summary_len": self.max_summary_len, **self.decode}
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return DecodeConfig(**settings)

    # ---- validation ----
    def validate(self) -> "RunConfig":
        """Check every field before any data is touched"""
        ConfigValidator.validate_path("train_path", self.train_path)
        ConfigValidator.validate_path("validation_path", self.validation_path, required=False)
        ConfigValidator.validate_path("stopwords_path", self.stopwords_path)
        for name in ("epochs", "batch_size", "vocab_cap", "topic_vocab_cap", "min_count",
                     "max_len", "max_summary_len"):
            ConfigValidator.validate_positive_int(name, getattr(self, name))
        ConfigValidator.validate_non_negative_int("seed", self.seed)
        ConfigValidator.validate_fraction("validation_fraction", self.validation_fraction)
        # typed configs validate their own fields
        self.model_config(vocab_size=1, topic_vocab_size=1)
        self.adam_config()
        self.decode_config()
        return self


def split_validation(items: Sequence[T], fraction: float, seed: int) -> Tuple[List[T], List[T]]:
    """Seeded shuffle, then hold out int(fraction * n) items (none for tiny corpora)"""
    held = int(fraction * len(items))
    if held == 0:
        return list(items), []
    order = np.random.default_rng(seed).permutation(len(items))
    validation = [items[i] for i in sorted(order[:held])]
    train = [items[i] for i in sorted(order[held:])]
    logger.info(f"held out {held} of {len(items)} pairs for validation")
    return train, validation
