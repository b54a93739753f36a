"""
Models: topic model, topic attention, pooling, transformer and the joint model
"""
from .config import ModelConfig
from .ntm import NeuralTopicModel, DocTopicSample
from .topic_attention import TopicAttention, TopicAttentionWeights, project_topics, score, pool_and_normalize
from .pooling import EncoderOutput, pool, POOLERS
from .transformer import Seq2SeqTransformer, MultiHeadAttention
from .taas import TopicAwareModel, LossBreakdown, DocumentScorer, combine_losses

__all__ = [
    'ModelConfig', 'NeuralTopicModel', 'DocTopicSample',
    'TopicAttention', 'TopicAttentionWeights', 'project_topics', 'score', 'pool_and_normalize',
    'EncoderOutput', 'pool', 'POOLERS',
    'Seq2SeqTransformer', 'MultiHeadAttention',
    'TopicAwareModel', 'LossBreakdown', 'DocumentScorer', 'combine_losses',
]
