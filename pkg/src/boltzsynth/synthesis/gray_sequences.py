"""
Gray-code sequence families.

For a prefix width b with n = 2**(b - 1) + b, build_family produces
a = 2**b sequences S_0 .. S_{a-1}. Sequence i carries the binary form of i
in units 1..b (most significant bit in unit 1) and walks a Gray code on
units b+1..n whose columns are rotated i mod (n - b) places. The family
partitions {0,1}^n, every sequence moves one unit per step, and two
sequences flip the same unit at the same row only when their rows are
Hamming neighbours.

Rows are 0-based here: row 0 holds the first entries S_{i,1}. States are
kept as index arrays; BitVectors are built only when asked for.
"""

import csv
import logging
from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any, TextIO

import numpy as np

from ..core.bitvector import BitVector, bits_of, indices_of
from ..systems.error_handling import ArgumentError, DimensionError, synthesis_step
from ..utils.constants import MAX_PREFIX_WIDTH, MAX_UNITS, MIN_PREFIX_WIDTH

logger = logging.getLogger(__name__)


def _frozen(values: Any) -> np.ndarray:
    array = np.array(values, dtype=np.int64)
    array.setflags(write=False)
    return array


def _single_flip(xor: np.ndarray) -> np.ndarray:
    """True where an index difference has exactly one bit set."""
    return (xor != 0) & ((xor & (xor - 1)) == 0)


def _flip_units(indices: np.ndarray) -> np.ndarray:
    """The unit switched between consecutive rows, 0 where nothing changed."""
    xor = indices[:, :-1] ^ indices[:, 1:]
    # frexp's exponent is the bit length of an integer-valued float.
    return np.frexp(xor.astype(np.float64))[1].astype(np.int64)


@dataclass(frozen=True, eq=False)
class GrayCode:
    """
    An ordering of {0,1}^width with Hamming-1 steps.

    Attributes:
        width: Number of columns
        indices: Read-only array of code words, column c stored as unit c + 1
    """

    width: int
    indices: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", _frozen(self.indices))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayCode):
            return NotImplemented
        return self.width == other.width and bool(
            np.array_equal(self.indices, other.indices)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def rows(self) -> tuple[BitVector, ...]:
        return tuple(BitVector(self.width, int(index)) for index in self.indices)


def reflected_gray(width: int) -> GrayCode:
    """
    The reflected binary Gray code starting at all-zeros.

    Column 0 is the most significant digit of the conventional code, so
    width 2 reads 00, 01, 11, 10 column by column.

    Raises:
        ArgumentError: If width is below one
    """
    if width < 1:
        raise ArgumentError(f"Gray code width must be at least 1, got {width}")
    if width > MAX_UNITS:
        raise ArgumentError(f"Gray code width {width} exceeds {MAX_UNITS}")
    k = np.arange(1 << width, dtype=np.int64)
    code = k ^ (k >> 1)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return GrayCode(width, indices_of((code[:, None] >> shifts) & 1))


def rotate_columns(code: GrayCode, shift: int) -> GrayCode:
    """
    Cyclically rotate the columns of a code to the left.

    Column c of the result is column (c + shift) mod width of the input.

    Raises:
        ArgumentError: If shift is outside [0, width)
    """
    if not 0 <= shift < code.width:
        raise ArgumentError(f"shift {shift} outside [0, {code.width})")
    columns = bits_of(code.indices, code.width)
    return GrayCode(code.width, indices_of(np.roll(columns, -shift, axis=1)))


@dataclass(frozen=True, eq=False)
class SequenceFamily:
    """
    The a = 2**b prefix-tagged sequences over {0,1}^n.

    Attributes:
        b: Prefix width
        indices: indices[i, k] is the state index of S_{i,k}, an
            a x 2**(n - b) read-only array
        flips: flips[i, k] is the unit flipped between rows k and k + 1
            of sequence i (1-based unit number)
    """

    b: int
    indices: np.ndarray
    flips: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", _frozen(self.indices))
        object.__setattr__(self, "flips", _frozen(self.flips))
        if self.indices.shape != (self.a, self.length):
            raise DimensionError(
                f"family b={self.b} needs {self.a}x{self.length} states, "
                f"got {self.indices.shape}"
            )
        if self.flips.shape != (self.a, self.length - 1):
            raise DimensionError(
                f"family b={self.b} needs {self.a}x{self.length - 1} flips, "
                f"got {self.flips.shape}"
            )

    @property
    def n(self) -> int:
        return 2 ** (self.b - 1) + self.b

    @property
    def a(self) -> int:
        return 2**self.b

    @property
    def length(self) -> int:
        """Entries per sequence, 2**(n - b)."""
        return 2 ** (self.n - self.b)

    @property
    def partner_offset(self) -> int:
        """Sequence i shares its flips with sequence i + a/2."""
        return self.a // 2

    def state(self, i: int, row: int) -> BitVector:
        return BitVector(self.n, int(self.indices[i, row]))

    def flip(self, i: int, row: int) -> int:
        return int(self.flips[i, row])

    def sequence(self, i: int) -> tuple[BitVector, ...]:
        return tuple(BitVector(self.n, int(index)) for index in self.indices[i])


def prefix_index(i: int, b: int) -> int:
    """Index bits for units 1..b holding i, most significant bit in unit 1."""
    return sum(((i >> (b - t)) & 1) << (t - 1) for t in range(1, b + 1))


def _prefixes(b: int) -> np.ndarray:
    return np.array([prefix_index(i, b) for i in range(2**b)], dtype=np.int64)


@synthesis_step("build_family")
def build_family(b: int) -> SequenceFamily:
    """
    Build the sequence family for prefix width b.

    Raises:
        ArgumentError: If b is outside 1..5
    """
    if not MIN_PREFIX_WIDTH <= b <= MAX_PREFIX_WIDTH:
        raise ArgumentError(
            f"prefix width b={b} outside {MIN_PREFIX_WIDTH}..{MAX_PREFIX_WIDTH}"
        )
    width = 2 ** (b - 1)
    base = reflected_gray(width)
    rotations = np.stack(
        [rotate_columns(base, shift).indices for shift in range(width)]
    )
    a = 2**b
    indices = _prefixes(b)[:, None] | (rotations[np.arange(a) % width] << b)
    family = SequenceFamily(b, indices, _flip_units(indices))
    logger.debug(
        f"Built family b={b}: n={family.n}, a={family.a}, length={family.length}"
    )
    return family


@dataclass(frozen=True)
class FamilyReport:
    """
    Outcome of the exhaustive family checks.

    Each check carries a pass flag and, on failure, a description of the
    first counterexample found.
    """

    partition: bool
    chain: bool
    flips: bool
    prefix: bool
    balance: bool
    partition_witness: str | None = None
    chain_witness: str | None = None
    flips_witness: str | None = None
    prefix_witness: str | None = None
    balance_witness: str | None = None

    @property
    def passed(self) -> bool:
        return all(
            (self.partition, self.chain, self.flips, self.prefix, self.balance)
        )

    def to_dict(self) -> dict[str, Any]:
        checks = ("partition", "chain", "flips", "prefix", "balance")
        return {
            "passed": self.passed,
            "checks": {
                name: {
                    "passed": getattr(self, name),
                    "witness": getattr(self, f"{name}_witness"),
                }
                for name in checks
            },
        }


def _describe(family: SequenceFamily, i: int, row: int) -> str:
    index = int(family.indices[i, row])
    if 0 <= index < 1 << family.n:
        return str(BitVector(family.n, index))
    return f"index {index}"


def _check_partition(family: SequenceFamily) -> str | None:
    flat = family.indices.ravel()
    if flat.min() < 0 or flat.max() >= 1 << family.n:
        position = int(np.argmax((flat < 0) | (flat >= 1 << family.n)))
        i, row = divmod(position, family.length)
        state = _describe(family, i, row)
        return f"S[{i}][{row}] = {state} is not a state of {family.n} units"
    order = np.argsort(flat, kind="stable")
    ordered = flat[order]
    repeats = np.flatnonzero(ordered[1:] == ordered[:-1])
    if repeats.size:
        first = divmod(int(order[repeats[0]]), family.length)
        second = divmod(int(order[repeats[0] + 1]), family.length)
        state = BitVector(family.n, int(ordered[repeats[0]]))
        return (
            f"state {state} appears at S[{first[0]}][{first[1]}] "
            f"and S[{second[0]}][{second[1]}]"
        )
    if flat.size != 1 << family.n:
        missing = np.setdiff1d(np.arange(1 << family.n), flat)[0]
        return f"state {BitVector(family.n, int(missing))} is not covered"
    return None


def _check_chain(family: SequenceFamily) -> str | None:
    broken = ~_single_flip(family.indices[:, :-1] ^ family.indices[:, 1:])
    if broken.any():
        i, row = (int(x) for x in np.argwhere(broken)[0])
        return f"S[{i}][{row}] -> S[{i}][{row + 1}] is not a single flip"
    return None


def _check_flips(family: SequenceFamily) -> str | None:
    # The unit switched between S_{i,k} and S_{i,k+1}.
    actual = _flip_units(family.indices)
    mismatched = np.any(family.flips != actual, axis=1)
    if mismatched.any():
        i = int(np.argmax(mismatched))
        return f"recorded flips of sequence {i} disagree with its states"
    states = family.indices[:, :-1]
    first: tuple[int, int, int, int] | None = None
    for i in range(family.a):
        for j in range(i + 1, family.a):
            clash = (actual[i] == actual[j]) & ~_single_flip(states[i] ^ states[j])
            if clash.any():
                row = int(np.argmax(clash))
                found = (row, int(actual[i, row]), i, j)
                first = found if first is None else min(first, found)
    if first is not None:
        row, unit, i, j = first
        return (
            f"sequences {i} and {j} both flip unit {unit} "
            f"at row {row} but are not neighbours"
        )
    return None


def _check_prefix(family: SequenceFamily) -> str | None:
    mask = (1 << family.b) - 1
    wrong = (family.indices & mask) != _prefixes(family.b)[:, None]
    if wrong.any():
        i, row = (int(x) for x in np.argwhere(wrong)[0])
        return (
            f"S[{i}][{row}] = {_describe(family, i, row)} "
            f"does not start with prefix {i}"
        )
    return None


def _check_balance(family: SequenceFamily) -> str | None:
    half = family.partner_offset
    flips = family.flips
    # Each free unit flips exactly twice per row.
    expected = np.repeat(np.arange(family.b + 1, family.n + 1), 2)
    unbalanced = np.any(np.sort(flips, axis=0) != expected[:, None], axis=0)
    split = flips[:half] != flips[half:]
    apart = ~_single_flip(family.indices[:half, :-1] ^ family.indices[half:, :-1])
    bad = unbalanced | np.any(split | apart, axis=0)
    if not bad.any():
        return None
    row = int(np.argmax(bad))
    if unbalanced[row]:
        counts = Counter(flips[:, row].tolist())
        return f"row {row} flips {dict(sorted(counts.items()))}"
    i = int(np.argmax(split[:, row] | apart[:, row]))
    if split[i, row]:
        return f"sequences {i} and {i + half} flip different units at row {row}"
    return f"S[{i}][{row}] and S[{i + half}][{row}] are not neighbours"


def verify_family(family: SequenceFamily) -> FamilyReport:
    """Run every family check exhaustively."""
    witnesses = {
        "partition": _check_partition(family),
        "chain": _check_chain(family),
        "flips": _check_flips(family),
        "prefix": _check_prefix(family),
        "balance": _check_balance(family),
    }
    report = FamilyReport(
        **{name: witness is None for name, witness in witnesses.items()},
        **{f"{name}_witness": witness for name, witness in witnesses.items()},
    )
    if not report.passed:
        failed = [name for name, witness in witnesses.items() if witness]
        logger.warning(f"Family b={family.b} failed checks: {failed}")
    return report


def family_rows(family: SequenceFamily) -> Iterator[tuple[int, int, str, str]]:
    """(sequence, row, state_bits, flipped_coordinate) for every entry."""
    last = family.length - 1
    for i in range(family.a):
        for row in range(family.length):
            flipped = str(family.flip(i, row)) if row < last else ""
            yield i, row, str(family.state(i, row)), flipped


def write_family_csv(family: SequenceFamily, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["sequence", "row", "state_bits", "flipped_coordinate"])
    writer.writerows(family_rows(family))
