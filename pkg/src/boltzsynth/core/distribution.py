"""
Dense probability tables over {0,1}^n.

This module defines DiscreteDistribution, indexed by BitVector.index,
and the divergence arithmetic used to judge every synthesis result.
"""

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr

from ..systems.error_handling import (
    DegenerateDistributionError,
    DimensionError,
    NumericError,
)
from ..utils.constants import SUPPORT_EPSILON
from .bitvector import BitVector, check_width


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """
    A non-negative table of 2**n masses.

    The table is copied and frozen on construction. Entries need not sum
    to one; use normalize() to rescale.

    Attributes:
        n: Number of units
        probs: Read-only float64 array of length 2**n
    """

    n: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        check_width(self.n)
        table = np.array(self.probs, dtype=np.float64)
        if table.ndim != 1 or table.shape[0] != (1 << self.n):
            raise DimensionError(
                f"expected {1 << self.n} entries for n={self.n}, "
                f"got shape {table.shape}"
            )
        if not np.all(np.isfinite(table)):
            raise NumericError("distribution contains non-finite entries")
        if np.any(table < 0.0):
            raise NumericError("distribution contains negative entries")
        table.setflags(write=False)
        object.__setattr__(self, "probs", table)

    @classmethod
    def uniform(cls, n: int) -> "DiscreteDistribution":
        size = 1 << n
        return cls(n, np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, n: int, index: int) -> "DiscreteDistribution":
        table = np.zeros(1 << n)
        table[BitVector(n, index).index] = 1.0
        return cls(n, table)

    @classmethod
    def from_weights(cls, weights: Iterable[float]) -> "DiscreteDistribution":
        """Normalize a table whose length is a power of two."""
        table = np.asarray(list(weights), dtype=np.float64)
        size = table.shape[0]
        if size < 2 or size & (size - 1):
            raise DimensionError(f"table length {size} is not a power of two")
        return normalize(cls(size.bit_length() - 1, table))

    @classmethod
    def from_mapping(
        cls, n: int, masses: Mapping[int, float]
    ) -> "DiscreteDistribution":
        """Normalize a sparse {index: mass} mapping into a dense table."""
        table = np.zeros(1 << n)
        for index, mass in masses.items():
            table[BitVector(n, index).index] = mass
        return normalize(cls(n, table))

    @property
    def size(self) -> int:
        return 1 << self.n

    def total(self) -> float:
        return math.fsum(self.probs)

    def mass(self, state: BitVector | int) -> float:
        index = state.index if isinstance(state, BitVector) else state
        return float(self.probs[index])

    def support_indices(self, epsilon: float = SUPPORT_EPSILON) -> np.ndarray:
        return np.flatnonzero(self.probs > epsilon)

    def support(self, epsilon: float = SUPPORT_EPSILON) -> tuple[BitVector, ...]:
        """States whose mass exceeds epsilon, in ascending index order."""
        return tuple(
            BitVector(self.n, int(index)) for index in self.support_indices(epsilon)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.probs, other.probs))

    def __hash__(self) -> int:
        return hash((self.n, self.probs.tobytes()))


def _check_same_width(p: DiscreteDistribution, q: DiscreteDistribution) -> None:
    if p.n != q.n:
        raise DimensionError(f"length mismatch: n={p.n} vs n={q.n}")


def normalize(d: DiscreteDistribution) -> DiscreteDistribution:
    """
    Scale a table to unit total mass.

    Raises:
        DegenerateDistributionError: If every entry is zero
    """
    total = d.total()
    if total <= 0.0:
        raise DegenerateDistributionError("cannot normalize an all-zero table")
    return DiscreteDistribution(d.n, d.probs / total)


def floor_and_normalize(d: DiscreteDistribution, floor: float) -> DiscreteDistribution:
    """Raise every entry to at least floor, then renormalize."""
    return normalize(DiscreteDistribution(d.n, np.maximum(d.probs, floor)))


def kl_divergence(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """
    Kullback-Leibler divergence KL(p || q) in nats.

    Terms with p(v) = 0 contribute nothing. Returns math.inf when q
    vanishes somewhere p does not.
    """
    _check_same_width(p, q)
    terms = rel_entr(p.probs, q.probs)
    if np.isinf(terms).any():
        return math.inf
    return max(0.0, math.fsum(terms))


def total_variation(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Half the L1 distance between two tables."""
    _check_same_width(p, q)
    distance = 0.5 * math.fsum(np.abs(p.probs - q.probs))
    return min(1.0, max(0.0, distance))
