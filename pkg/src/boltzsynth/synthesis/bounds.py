"""
Size and parameter-count formulas.

Hidden-unit counts for universal RBMs, hidden-layer counts for universal
DBNs, the counting lower bound on DBN depth and the parameter counts the
comparisons rest on. Everything is exact integer or rational arithmetic.
"""

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, TextIO

from ..systems.error_handling import ArgumentError, SizeError
from ..utils.constants import MAX_BOUNDS_N

TABLE_FIELDS = (
    "n",
    "b",
    "s",
    "rbm_hidden_corollary",
    "rbm_hidden_theorem_a",
    "dbn_layers_theorem2",
    "dbn_layers_theorem_b",
    "dbn_total_layers_theorem_b",
    "dbn_lower_bound",
    "dbn_lower_bound_rational",
    "dbn_params_theorem2",
    "dbn_params_theorem_b",
    "rbm_params_conclusion",
    "rbm_params_exact",
)

INAPPLICABLE = "-"


def _check_n(n: int) -> None:
    if n < 1:
        raise ArgumentError(f"n must be at least 1, got {n}")


def dbn_lower_bound_exact(n: int) -> Fraction:
    """(2**n - 1 - n) / (n(n + 1)): layers needed just to hold enough parameters."""
    _check_n(n)
    return Fraction(2**n - 1 - n, n * (n + 1))


def dbn_lower_bound(n: int) -> int:
    """Ceiling of dbn_lower_bound_exact."""
    bound = dbn_lower_bound_exact(n)
    return -(-bound.numerator // bound.denominator)


def dbn_param_count(n: int, hidden_layers: int) -> int:
    """k(n**2 + n) + n parameters for k hidden layers of width n."""
    if n < 0 or hidden_layers < 0:
        raise ArgumentError(
            f"counts must be non-negative, got n={n}, k={hidden_layers}"
        )
    return hidden_layers * (n * n + n) + n


def rbm_param_count(n: int, hidden_units: int) -> int:
    """Weights plus both bias vectors: n·m + n + m."""
    if n < 0 or hidden_units < 0:
        raise ArgumentError(
            f"counts must be non-negative, got n={n}, m={hidden_units}"
        )
    return n * hidden_units + n + hidden_units


def rbm_hidden_corollary(n: int) -> int:
    """Hidden units of a universal RBM built from a perfect matching."""
    _check_n(n)
    return 2 ** (n - 1) - 1


def rbm_hidden_theorem_a(s: int) -> int:
    """Hidden units of the one-unit-per-support-state construction."""
    if s < 0:
        raise ArgumentError(f"support size must be non-negative, got {s}")
    return s + 1


def rbm_params_conclusion(n: int) -> int:
    """(2**n / 2)·n + 2**n / 2, the count that leaves out visible biases."""
    _check_n(n)
    half = 2 ** (n - 1)
    return half * n + half


def rbm_params_exact(n: int) -> int:
    return rbm_param_count(n, rbm_hidden_corollary(n))


def admissible_prefix_width(n: int) -> int | None:
    """The b with n = 2**(b - 1) + b, or None."""
    b = 1
    while 2 ** (b - 1) + b <= n:
        if 2 ** (b - 1) + b == n:
            return b
        b += 1
    return None


def dbn_layers_theorem2(n: int, b: int) -> int | None:
    """2**n / (2(n - b)) hidden layers; None unless n = 2**(b - 1) + b."""
    if b < 1 or n != 2 ** (b - 1) + b:
        return None
    return 2**n // (2 * (n - b))


def dbn_layers_theorem_b(n: int) -> int | None:
    """2**n / n hidden layers; None unless n is a power of two."""
    if n < 1 or n & (n - 1):
        return None
    return 2**n // n


@dataclass(frozen=True)
class SizeTable:
    """
    Every size formula evaluated at one n.

    Entries that do not apply to n are None.
    """

    n: int
    b: int | None
    s: int
    rbm_hidden_corollary: int
    rbm_hidden_theorem_a: int
    dbn_layers_theorem2: int | None
    dbn_layers_theorem_b: int | None
    dbn_total_layers_theorem_b: int | None
    dbn_lower_bound: int
    dbn_lower_bound_rational: Fraction
    dbn_params_theorem2: int | None
    dbn_params_theorem_b: int | None
    rbm_params_conclusion: int
    rbm_params_exact: int


def size_summary(n: int, b: int | None = None, s: int | None = None) -> SizeTable:
    """
    Evaluate every formula at n.

    Args:
        n: Number of visible units
        b: Prefix width; inferred when n is admissible
        s: Support size for the one-unit-per-state count; defaults to 2**n

    Raises:
        SizeError: If n exceeds the table cap
    """
    _check_n(n)
    if n > MAX_BOUNDS_N:
        raise SizeError(f"n={n} exceeds the table cap of {MAX_BOUNDS_N}")
    if b is None:
        b = admissible_prefix_width(n)
    if s is None:
        s = 2**n
    layers2 = dbn_layers_theorem2(n, b) if b is not None else None
    layers_b = dbn_layers_theorem_b(n)
    return SizeTable(
        n=n,
        b=b,
        s=s,
        rbm_hidden_corollary=rbm_hidden_corollary(n),
        rbm_hidden_theorem_a=rbm_hidden_theorem_a(s),
        dbn_layers_theorem2=layers2,
        dbn_layers_theorem_b=layers_b,
        dbn_total_layers_theorem_b=None if layers_b is None else layers_b + 1,
        dbn_lower_bound=dbn_lower_bound(n),
        dbn_lower_bound_rational=dbn_lower_bound_exact(n),
        dbn_params_theorem2=None if layers2 is None else dbn_param_count(n, layers2),
        dbn_params_theorem_b=(
            None if layers_b is None else dbn_param_count(n, layers_b)
        ),
        rbm_params_conclusion=rbm_params_conclusion(n),
        rbm_params_exact=rbm_params_exact(n),
    )


def _cell(value: Any, missing: str) -> str:
    if value is None:
        return missing
    return str(value)


def table_rows(tables: list[SizeTable], missing: str = "") -> list[list[str]]:
    """String cells for every table, in TABLE_FIELDS order."""
    return [
        [_cell(getattr(table, name), missing) for name in TABLE_FIELDS]
        for table in tables
    ]


def format_text(tables: list[SizeTable]) -> str:
    """Right-aligned columns with a header row."""
    rows = [list(TABLE_FIELDS), *table_rows(tables, INAPPLICABLE)]
    widths = [max(len(row[column]) for row in rows) for column in range(len(rows[0]))]
    lines = [
        "  ".join(cell.rjust(width) for cell, width in zip(row, widths, strict=True))
        for row in rows
    ]
    return "\n".join(lines) + "\n"


def write_csv(tables: list[SizeTable], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TABLE_FIELDS)
    writer.writerows(table_rows(tables))
