"""
Tests for the size and parameter-count formulas.
"""

import csv
import io
from fractions import Fraction

import pytest

from boltzsynth.synthesis.bounds import (
    INAPPLICABLE,
    TABLE_FIELDS,
    admissible_prefix_width,
    dbn_layers_theorem2,
    dbn_layers_theorem_b,
    dbn_lower_bound,
    dbn_lower_bound_exact,
    dbn_param_count,
    format_text,
    rbm_param_count,
    rbm_params_conclusion,
    rbm_params_exact,
    size_summary,
    write_csv,
)
from boltzsynth.systems.error_handling import ArgumentError, SizeError


class TestLowerBound:
    """Test cases for the counting lower bound."""

    def test_small_values(self):
        assert dbn_lower_bound_exact(4) == Fraction(11, 20)
        assert dbn_lower_bound(4) == 1
        assert dbn_lower_bound(2) == 1

    def test_exact_division_is_not_rounded_up(self):
        # 2**1 - 1 - 1 = 0
        assert dbn_lower_bound(1) == 0

    def test_order_of_growth(self):
        ratio = dbn_lower_bound_exact(20) / Fraction(2**20, 20**2)
        assert abs(ratio - 1) < Fraction(1, 10)

    def test_rejects_zero(self):
        with pytest.raises(ArgumentError):
            dbn_lower_bound(0)


class TestParameterCounts:
    """Test cases for the parameter-count formulas."""

    def test_dbn_params(self):
        assert dbn_param_count(4, 4) == 84
        assert dbn_param_count(5, 0) == 5

    def test_lower_bound_layers_hold_enough_parameters(self):
        assert dbn_param_count(4, dbn_lower_bound(4)) == 24 >= 2**4 - 1
        for n in range(2, 30):
            assert dbn_param_count(n, dbn_lower_bound(n)) >= 2**n - 1

    def test_rbm_params(self):
        assert rbm_param_count(4, 7) == 4 * 7 + 4 + 7
        assert rbm_params_exact(4) == 39
        assert rbm_params_conclusion(4) == 8 * 4 + 8
        assert rbm_params_conclusion(4) - rbm_params_exact(4) == 1

    def test_negative_counts(self):
        with pytest.raises(ArgumentError):
            dbn_param_count(4, -1)
        with pytest.raises(ArgumentError):
            rbm_param_count(-1, 2)


class TestLayerCounts:
    """Test cases for the DBN layer formulas."""

    def test_admissible_widths(self):
        assert [admissible_prefix_width(n) for n in (2, 4, 7, 12, 21, 38)] == [
            1, 2, 3, 4, 5, 6,
        ]
        assert admissible_prefix_width(5) is None
        assert admissible_prefix_width(8) is None

    def test_theorem2(self):
        assert dbn_layers_theorem2(2, 1) == 2
        assert dbn_layers_theorem2(4, 2) == 4
        assert dbn_layers_theorem2(7, 3) == 16
        assert dbn_layers_theorem2(8, 3) is None

    def test_theorem_b(self):
        assert dbn_layers_theorem_b(4) == 4
        assert dbn_layers_theorem_b(8) == 32
        assert dbn_layers_theorem_b(7) is None

    @pytest.mark.parametrize("b", range(1, 11))
    def test_never_below_lower_bound(self, b):
        n = 2 ** (b - 1) + b
        assert dbn_layers_theorem2(n, b) >= dbn_lower_bound(n)

    @pytest.mark.parametrize("b", range(3, 11))
    def test_sharing_beats_one_flip_per_layer(self, b):
        n = 2 ** (b - 1) + b
        sharing = Fraction(2**n, 2 * (n - b))
        single = Fraction(2**n, n)
        assert sharing < single


class TestSizeSummary:
    """Test cases for size_summary and its text and CSV forms."""

    def test_four_units(self):
        table = size_summary(4, b=2, s=16)
        assert table.rbm_hidden_corollary == 7
        assert table.rbm_hidden_theorem_a == 17
        assert table.dbn_layers_theorem2 == 4
        assert table.dbn_layers_theorem_b == 4
        assert table.dbn_total_layers_theorem_b == 5
        assert table.dbn_lower_bound == 1
        assert table.dbn_params_theorem2 == 84

    def test_defaults(self):
        table = size_summary(4)
        assert table.b == 2
        assert table.s == 16

    def test_eight_units_has_no_prefix_construction(self):
        table = size_summary(8)
        assert table.b is None
        assert table.dbn_layers_theorem2 is None
        assert table.dbn_params_theorem2 is None
        assert table.dbn_layers_theorem_b == 32

    def test_seven_units(self):
        table = size_summary(7, b=3)
        assert table.dbn_layers_theorem2 == 16
        assert table.dbn_layers_theorem_b is None

    def test_formula_only_widths(self):
        table = size_summary(64)
        assert table.rbm_hidden_corollary == 2**63 - 1
        with pytest.raises(SizeError):
            size_summary(65)

    def test_text_and_csv_agree(self):
        tables = [size_summary(n) for n in range(2, 9)]
        text_rows = [line.split() for line in format_text(tables).splitlines()]
        stream = io.StringIO()
        write_csv(tables, stream)
        csv_rows = list(csv.reader(io.StringIO(stream.getvalue())))
        assert text_rows[0] == csv_rows[0] == list(TABLE_FIELDS)
        for text_row, csv_row in zip(text_rows[1:], csv_rows[1:], strict=True):
            assert [cell or INAPPLICABLE for cell in csv_row] == text_row
