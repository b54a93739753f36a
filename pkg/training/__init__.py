"""
Training: warm-up and joint epochs, metrics and checkpoints
"""
from .trainer import Trainer, TrainingResult, build_vocabularies, train

__all__ = ['Trainer', 'TrainingResult', 'build_vocabularies', 'train']
