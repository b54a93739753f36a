"""
Utility modules for errors, validation, sentence splitting, logging and run configuration
"""

from .errors import TaasError, ConfigValidationError
from .sentences import SentenceSplitter
from .validators import ConfigValidator

__all__ = ['TaasError', 'ConfigValidationError', 'SentenceSplitter', 'ConfigValidator']
