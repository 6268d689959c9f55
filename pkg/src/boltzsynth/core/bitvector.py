"""
Bit vectors over {0,1}^n.

Unit i (1-based) of a BitVector is bit (i - 1) of its integer index. The
string form lists unit 1 first, so "100" is the state with index 1.
"""

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from ..systems.error_handling import ArgumentError, DimensionError, SizeError
from ..utils.constants import MAX_UNITS


def check_width(n: int, limit: int = MAX_UNITS) -> None:
    """
    Validate a unit count against the dense enumeration cap.

    Raises:
        DimensionError: If n is below one
        SizeError: If n exceeds the cap
    """
    if n < 1:
        raise DimensionError(f"width must be at least 1, got {n}")
    if n > limit:
        raise SizeError(f"width {n} exceeds the cap of {limit} units")


@dataclass(frozen=True, order=True)
class BitVector:
    """
    A point of {0,1}^n stored as an unsigned state index.

    Attributes:
        n: Number of units
        index: State index in [0, 2**n)
    """

    n: int
    index: int

    def __post_init__(self) -> None:
        check_width(self.n)
        if not 0 <= self.index < (1 << self.n):
            raise DimensionError(
                f"index {self.index} out of range for {self.n} units"
            )

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        return cls(n, (1 << n) - 1)

    @classmethod
    def basis(cls, n: int, j: int) -> "BitVector":
        """The j-th standard basis vector e_j."""
        return cls(n, 0).flip(j)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        """Build from unit values listed unit 1 first."""
        values = [int(bit) for bit in bits]
        if any(bit not in (0, 1) for bit in values):
            raise ArgumentError(f"bits must be 0 or 1, got {values}")
        index = sum(bit << position for position, bit in enumerate(values))
        return cls(len(values), index)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parse a string such as "0110" (unit 1 first)."""
        if not text or set(text) - {"0", "1"}:
            raise ArgumentError(f"not a bit string: {text!r}")
        return cls.from_bits(int(char) for char in text)

    def _check_unit(self, j: int) -> None:
        if not 1 <= j <= self.n:
            raise DimensionError(f"unit {j} out of range 1..{self.n}")

    def unit(self, j: int) -> int:
        """Value of unit j."""
        self._check_unit(j)
        return (self.index >> (j - 1)) & 1

    def flip(self, j: int) -> "BitVector":
        """Return the vector with unit j inverted."""
        self._check_unit(j)
        return BitVector(self.n, self.index ^ (1 << (j - 1)))

    def cleared(self, j: int) -> "BitVector":
        """Return the vector with unit j set to zero."""
        self._check_unit(j)
        return BitVector(self.n, self.index & ~(1 << (j - 1)))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.index >> position) & 1 for position in range(self.n))

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.float64)

    def popcount(self) -> int:
        return self.index.bit_count()

    def __str__(self) -> str:
        return "".join(str(bit) for bit in self.bits)


def hamming(u: BitVector, v: BitVector) -> int:
    """
    Hamming distance between two vectors of equal length.

    Raises:
        DimensionError: If the lengths differ
    """
    if u.n != v.n:
        raise DimensionError(f"length mismatch: {u.n} vs {v.n}")
    return (u.index ^ v.index).bit_count()


def flipped_unit(u: BitVector, v: BitVector) -> int:
    """
    The single unit in which two Hamming-1 neighbours differ.

    Raises:
        ArgumentError: If the vectors are not at Hamming distance one
    """
    if hamming(u, v) != 1:
        raise ArgumentError(f"{u} and {v} do not differ in exactly one unit")
    return (u.index ^ v.index).bit_length()


def state_matrix(n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """
    Unit values of the states start..stop-1 as a float matrix.

    Row r holds state start + r; column i - 1 holds unit i.
    """
    if stop is None:
        stop = 1 << n
    indices = np.arange(start, stop, dtype=np.int64)
    return bits_of(indices, n)


def bits_of(indices: np.ndarray, n: int) -> np.ndarray:
    """Unit values of an array of state indices, one row per index."""
    shifts = np.arange(n, dtype=np.int64)
    return ((indices[:, None] >> shifts) & 1).astype(np.float64)


def indices_of(bits: np.ndarray) -> np.ndarray:
    """Inverse of bits_of for a 0/1 matrix."""
    n = bits.shape[1]
    weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
    return (bits.astype(np.int64) * weights).sum(axis=1)
