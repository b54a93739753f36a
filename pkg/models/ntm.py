"""
VAE neural topic model over the bag-of-words view
Inference net f -> (g1, g2) gives a diagonal Gaussian over omega; the
generative side maps omega to topic proportions z_d and reconstructs the BoW
through the mixture z_d^T beta.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from config import PROBABILITY_FLOOR
from numeric import functional as F
from numeric.layers import Linear, glorot_uniform
from numeric.module import Module
from numeric.optim import Parameter
from numeric.tensor import Tensor, as_tensor


@dataclass
class DocTopicSample:
    omega: Tensor    # (B, G)
    z: Tensor        # (B, K), rows sum to 1
    mu: Tensor       # (B, G)
    logvar: Tensor   # (B, G)


class InferenceNet(Module):
    """f: softplus hidden layer over the BoW; g1/g2: mean and log-variance heads"""

    def __init__(self, topic_vocab_size: int, hidden: int, latent_dim: int, rng: np.random.Generator):
        super().__init__()
        self.f = Linear(topic_vocab_size, hidden, rng, name="ntm.f")
        self.g1 = Linear(hidden, latent_dim, rng, name="ntm.g1")
        self.g2 = Linear(hidden, latent_dim, rng, name="ntm.g2")

    def forward(self, bow: Tensor):
        hidden = F.softplus(self.f(bow))
        return self.g1(hidden), self.g2(hidden)


class GenerativeNet(Module):
    """W_omega, b_omega: omega -> topic logits; W_dec row k parameterizes topic k"""

    def __init__(self, latent_dim: int, topics: int, topic_vocab_size: int, rng: np.random.Generator):
        super().__init__()
        self.w_omega = Linear(latent_dim, topics, rng, name="ntm.w_omega")
        self.w_dec = Parameter(glorot_uniform(rng, topics, topic_vocab_size), name="ntm.w_dec")

    def forward(self, omega: Tensor) -> Tensor:
        return F.softmax(self.w_omega(omega), axis=-1)


class NeuralTopicModel(Module):
    """Topic model state: inference + generative nets, prior N(0, I)"""

    def __init__(self, topic_vocab_size: int, topics: int, latent_dim: int, hidden: int,
                 rng: np.random.Generator):
        super().__init__()
        self.topics = topics
        self.latent_dim = latent_dim
        self.topic_vocab_size = topic_vocab_size
        self.rng = rng
        self.inference = InferenceNet(topic_vocab_size, hidden, latent_dim, rng)
        self.generative = GenerativeNet(latent_dim, topics, topic_vocab_size, rng)

    def infer(self, bow, sample: bool, noise: Optional[np.ndarray] = None) -> DocTopicSample:
        """
        Posterior parameters and topic proportions for a batch of BoW rows

        Args:
            bow: (B, V_topics) counts
            sample: reparameterized draw omega = mu + sigma * eps; otherwise omega = mu
            noise: fixed eps (B, G) instead of drawing from the model generator
        """
        bow = as_tensor(bow)
        mu, logvar = self.inference(bow)
        if sample:
            eps = noise if noise is not None else self.rng.standard_normal(mu.shape)
            omega = mu + F.exp(logvar * 0.5) * eps
        else:
            omega = mu
        return DocTopicSample(omega=omega, z=self.generative(omega), mu=mu, logvar=logvar)

    def beta(self) -> Tensor:
        """Topic-word distribution (K, V_topics); recomputed from W_dec on every call"""
        return F.softmax(self.generative.w_dec, axis=-1)

    def forward(self, bow, sample: bool = True, noise: Optional[np.ndarray] = None) -> Tensor:
        return self.loss(bow, sample=sample, noise=noise)

    def loss(self, bow, sample: bool = True, noise: Optional[np.ndarray] = None) -> Tensor:
        """L_NTM: batch mean of KL(q || N(0, I)) minus the reconstruction log-likelihood"""
        bow = as_tensor(bow)
        draw = self.infer(bow, sample=sample, noise=noise)
        kl = kl_divergence(draw.mu, draw.logvar)
        ll = reconstruct_log_likelihood(draw.z, bow, self.beta())
        return F.mean(kl - ll)


def reconstruct_log_likelihood(z, bow, beta) -> Tensor:
    """Per-document sum_w count(w) * log((z^T beta)_w + floor); shape (B,)"""
    z, bow, beta = as_tensor(z), as_tensor(bow), as_tensor(beta)
    word_probs = F.matmul(z, beta)
    return F.sum(bow * F.log(word_probs + PROBABILITY_FLOOR), axis=-1)


def kl_divergence(mu, logvar) -> Tensor:
    """KL(N(mu, exp(logvar)) || N(0, I)) summed over the latent axis; shape (B,)"""
    mu, logvar = as_tensor(mu), as_tensor(logvar)
    return F.sum(F.exp(logvar) + F.square(mu) - 1.0 - logvar, axis=-1) * 0.5
