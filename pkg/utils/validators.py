# Validators
import os
from typing import Any, Iterable, Mapping, Optional

from utils.errors import ConfigValidationError


class ConfigValidator:
    """Validates run configuration values before any work starts"""

    @staticmethod
    def validate_keys(data: Mapping[str, Any], allowed: Iterable[str]) -> None:
        """Reject keys the run configuration does not know"""
        allowed = set(allowed)
        for key in data:
            if key not in allowed:
                raise ConfigValidationError(key, "unknown configuration key")

    @staticmethod
    def validate_path(field: str, path: Optional[str], required: bool = True) -> None:
        """Path must be given (when required) and exist"""
        if not path:
            if required:
                raise ConfigValidationError(field, "path is required")
            return
        if not os.path.exists(path):
            raise ConfigValidationError(field, f"path does not exist: {path}")

    @staticmethod
    def validate_positive_int(field: str, value: Any) -> None:
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigValidationError(field, f"must be a positive integer, got {value!r}")

    @staticmethod
    def validate_non_negative_int(field: str, value: Any) -> None:
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ConfigValidationError(field, f"must be a non-negative integer, got {value!r}")

    @staticmethod
    def validate_fraction(field: str, value: Any) -> None:
        """Value in [0, 1)"""
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ConfigValidationError(field, f"must be a number, got {value!r}")
        if not 0.0 <= number < 1.0:
            raise ConfigValidationError(field, f"must lie in [0, 1), got {value}")

    @staticmethod
    def parse_int_list(field: str, text: str) -> list:
        """'5,10,20' -> [5, 10, 20]"""
        try:
            values = [int(part) for part in text.split(",") if part.strip()]
        except ValueError:
            raise ConfigValidationError(field, f"expected comma-separated integers, got '{text}'")
        if not values:
            raise ConfigValidationError(field, "expected at least one value")
        return values
