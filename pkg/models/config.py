"""
Architecture and training-objective settings shared by every model component
"""

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional

from config import (CORPUS_DEFAULTS, INJECTION_MODES, MODEL_DEFAULTS, POOLING_MODES, PROJECTION_ALIASES,
                    PROJECTION_VARIANTS)
from utils.errors import ConfigValidationError


@dataclass
class ModelConfig:
    """Shapes, regularization and objective weighting of the joint model"""
    vocab_size: int
    topic_vocab_size: int
    hidden: int = MODEL_DEFAULTS["hidden"]
    heads: int = MODEL_DEFAULTS["heads"]
    encoder_layers: int = MODEL_DEFAULTS["encoder_layers"]
    decoder_layers: int = MODEL_DEFAULTS["decoder_layers"]
    ffn_width: int = MODEL_DEFAULTS["ffn_width"]
    max_len: int = CORPUS_DEFAULTS["max_len"]
    max_summary_len: int = CORPUS_DEFAULTS["max_summary_len"]
    dropout: float = MODEL_DEFAULTS["dropout"]
    pooling_mode: str = MODEL_DEFAULTS["pooling_mode"]
    lambda_: float = MODEL_DEFAULTS["lambda_"]
    freeze_encoder: bool = MODEL_DEFAULTS["freeze_encoder"]
    freeze_ntm: bool = MODEL_DEFAULTS["freeze_ntm"]
    ntm_pretrain_epochs: int = MODEL_DEFAULTS["ntm_pretrain_epochs"]
    topics: int = MODEL_DEFAULTS["topics"]
    latent_dim: Optional[int] = MODEL_DEFAULTS["latent_dim"]
    ntm_hidden: int = MODEL_DEFAULTS["ntm_hidden"]
    projection_variant: str = MODEL_DEFAULTS["projection_variant"]
    injection: str = MODEL_DEFAULTS["injection"]
    position_encoding: bool = MODEL_DEFAULTS["position_encoding"]
    seed: int = MODEL_DEFAULTS["seed"]

    def __post_init__(self):
        if self.latent_dim is None:
            self.latent_dim = self.topics
        self.projection_variant = PROJECTION_ALIASES.get(self.projection_variant, self.projection_variant)
        self.validate()

    @property
    def head_width(self) -> int:
        return self.hidden // self.heads

    def validate(self) -> None:
        for name in ("vocab_size", "topic_vocab_size", "hidden", "heads", "encoder_layers",
                     "decoder_layers", "ffn_width", "max_len", "max_summary_len", "latent_dim", "ntm_hidden"):
            if getattr(self, name) < 1:
                raise ConfigValidationError(name, f"must be >= 1, got {getattr(self, name)}")
        if self.topics < 2:
            raise ConfigValidationError("topics", f"need at least 2 topics, got {self.topics}")
        if self.hidden % self.heads:
            raise ConfigValidationError("heads", f"hidden {self.hidden} is not divisible by {self.heads} heads")
        if not 0.0 <= self.lambda_ <= 1.0:
            raise ConfigValidationError("lambda_", f"must lie in [0, 1], got {self.lambda_}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigValidationError("dropout", f"must lie in [0, 1), got {self.dropout}")
        if self.ntm_pretrain_epochs < 0:
            raise ConfigValidationError("ntm_pretrain_epochs", "must be >= 0")
        if self.pooling_mode not in POOLING_MODES:
            raise ConfigValidationError("pooling_mode", f"expected one of {POOLING_MODES}, got '{self.pooling_mode}'")
        if self.projection_variant not in PROJECTION_VARIANTS:
            raise ConfigValidationError("projection_variant", f"expected one of {PROJECTION_VARIANTS}")
        if self.injection not in INJECTION_MODES:
            raise ConfigValidationError("injection", f"expected one of {INJECTION_MODES}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})
