"""
Ancestral sampling from RBM and DBN models.

The top layer is drawn by inverse CDF over its exact marginal; each
directed layer is then sampled unit by unit. Every stage draws from its
own PCG64 stream spawned from one SeedSequence, so a seed fixes the whole
sample sequence.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import expit

from ..core.bitvector import BitVector, bits_of, indices_of
from ..core.distribution import DiscreteDistribution
from ..core.models import DbnModel, RbmModel
from ..systems.error_handling import ArgumentError, synthesis_step
from ..utils.constants import DEFAULT_SEED, GENERATOR_NAME
from .exact import layer_activations, rbm_marginal

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """
    Samples drawn from a model, in draw order.

    Attributes:
        n: Number of visible units
        indices: Read-only array of visible state indices
        metadata: Generator identity and seed
    """

    n: int
    indices: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        indices = np.array(self.indices, dtype=np.int64)
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def states(self) -> list[BitVector]:
        return [BitVector(self.n, int(index)) for index in self.indices]

    def counts(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=1 << self.n)

    def empirical(self) -> DiscreteDistribution:
        return DiscreteDistribution(self.n, self.counts() / len(self))


def _generators(seed: int, streams: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(streams)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def _inverse_cdf(
    marginal: DiscreteDistribution, uniforms: np.ndarray
) -> np.ndarray:
    cdf = np.cumsum(marginal.probs)
    cdf /= cdf[-1]
    picks = np.searchsorted(cdf, uniforms, side="right")
    return np.minimum(picks, marginal.size - 1)


@synthesis_step("ancestral_sample")
def ancestral_sample(
    model: DbnModel | RbmModel, count: int, seed: int = DEFAULT_SEED
) -> SampleSet:
    """
    Draw count visible samples from a model.

    Args:
        model: A DBN, or an RBM treated as a DBN without directed layers
        count: Number of samples, at least one
        seed: Seed for the spawned generator streams

    Returns:
        The samples with generator metadata

    Raises:
        ArgumentError: If count is below one or seed is negative
    """
    if count < 1:
        raise ArgumentError(f"sample count must be at least 1, got {count}")
    if seed < 0:
        raise ArgumentError(f"seed must be non-negative, got {seed}")
    if isinstance(model, RbmModel):
        model = DbnModel(model)
    generators = _generators(seed, 1 + len(model.layers))
    indices = _inverse_cdf(rbm_marginal(model.top), generators[0].random(count))
    for layer, generator in zip(model.layers, generators[1:], strict=True):
        on = expit(layer_activations(layer, bits_of(indices, layer.n_in)))
        draws = generator.random(on.shape) < on
        indices = indices_of(draws)
    logger.debug(f"Drew {count} samples through {len(model.layers)} layers")
    return SampleSet(
        model.width,
        indices,
        {
            "generator": GENERATOR_NAME,
            "numpy": np.__version__,
            "seed": seed,
            "streams": len(generators),
        },
    )
