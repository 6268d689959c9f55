"""
Tests for Gray codes and the prefix-tagged sequence families.
"""

import csv
import dataclasses
import io

import numpy as np
import pytest

from boltzsynth.core.bitvector import BitVector, hamming
from boltzsynth.synthesis.gray_sequences import (
    GrayCode,
    build_family,
    family_rows,
    prefix_index,
    reflected_gray,
    rotate_columns,
    verify_family,
    write_family_csv,
)
from boltzsynth.systems.error_handling import ArgumentError, DimensionError


def code_strings(code: GrayCode) -> list[str]:
    return [str(row) for row in code.rows]


class TestGrayCode:
    """Test cases for reflected_gray and rotate_columns."""

    def test_width_one(self):
        assert code_strings(reflected_gray(1)) == ["0", "1"]

    def test_width_two(self):
        assert code_strings(reflected_gray(2)) == ["00", "01", "11", "10"]

    def test_width_three_is_gray(self):
        code = reflected_gray(3)
        assert len(code.rows) == 8
        assert str(code.rows[0]) == "000"
        assert len({row.index for row in code.rows}) == 8
        for current, following in zip(code.rows, code.rows[1:]):
            assert hamming(current, following) == 1

    def test_width_checked(self):
        with pytest.raises(ArgumentError):
            reflected_gray(0)

    def test_rotation_identity(self):
        code = reflected_gray(3)
        assert rotate_columns(code, 0) == code

    def test_rotation_swaps_two_columns(self):
        rotated = rotate_columns(reflected_gray(2), 1)
        assert code_strings(rotated) == ["00", "10", "11", "01"]

    def test_rotation_keeps_gray_property(self):
        code = reflected_gray(4)
        for shift in range(4):
            rotated = rotate_columns(code, shift)
            assert len({row.index for row in rotated.rows}) == 16
            for current, following in zip(rotated.rows, rotated.rows[1:]):
                assert hamming(current, following) == 1

    def test_rotation_range(self):
        with pytest.raises(ArgumentError):
            rotate_columns(reflected_gray(2), 2)


class TestBuildFamily:
    """Test cases for build_family."""

    def test_b1(self):
        family = build_family(1)
        assert (family.n, family.a, family.length) == (2, 2, 2)
        assert [str(s) for s in family.sequence(0)] == ["00", "01"]
        assert [str(s) for s in family.sequence(1)] == ["10", "11"]

    def test_b2_partners_share_flips(self):
        family = build_family(2)
        assert (family.n, family.a, family.length) == (4, 4, 4)
        for row in range(family.length):
            assert hamming(family.state(0, row), family.state(2, row)) == 1
            assert family.state(0, row).unit(1) != family.state(2, row).unit(1)
        np.testing.assert_array_equal(family.flips[0], family.flips[2])

    def test_b3_partitions_the_cube(self):
        family = build_family(3)
        assert family.n == 7
        assert family.indices.shape == (8, 16)
        assert family.flips.shape == (8, 15)
        assert set(family.indices.ravel().tolist()) == set(range(128))

    def test_prefix_bits(self):
        assert prefix_index(1, 2) == 0b10
        assert prefix_index(2, 2) == 0b01
        family = build_family(3)
        assert str(family.state(4, 5))[:3] == "100"

    def test_first_entries_differ_only_in_prefix(self):
        family = build_family(3)
        for i in range(family.a):
            assert family.state(i, 0).index >> family.b == 0

    @pytest.mark.parametrize("b", [0, 6])
    def test_range_checked(self, b):
        with pytest.raises(ArgumentError):
            build_family(b)


class TestVerifyFamily:
    """Test cases for verify_family and the CSV dump."""

    @pytest.mark.parametrize("b", [1, 2, 3, 4])
    def test_constructed_families_pass(self, b):
        report = verify_family(build_family(b))
        assert report.passed
        assert report.to_dict()["passed"] is True

    @pytest.mark.slow
    def test_widest_family_passes(self):
        assert verify_family(build_family(5)).passed

    def test_each_row_flips_every_free_unit_twice(self):
        family = build_family(3)
        for row in range(family.length - 1):
            flips = sorted(family.flip(i, row) for i in range(family.a))
            assert flips == sorted(list(range(family.b + 1, family.n + 1)) * 2)

    def test_duplicate_state_reported(self):
        family = build_family(2)
        indices = family.indices.copy()
        indices[0, 1] = indices[1, 1]
        broken = dataclasses.replace(family, indices=indices)
        report = verify_family(broken)
        assert not report.partition
        assert str(family.state(1, 1)) in report.partition_witness
        assert "S[0][1] and S[1][1]" in report.partition_witness
        assert not report.passed

    def test_reversed_sequence_reported(self):
        family = build_family(2)
        indices = family.indices.copy()
        indices[1] = indices[1, ::-1]
        report = verify_family(dataclasses.replace(family, indices=indices))
        assert report.partition
        assert not (report.flips and report.balance)
        assert report.to_dict()["checks"]["flips"]["witness"] is not None

    def test_broken_chain_reported(self):
        family = build_family(2)
        indices = family.indices.copy()
        indices[0, [1, 2]] = indices[0, [2, 1]]
        report = verify_family(dataclasses.replace(family, indices=indices))
        assert not report.chain
        assert "S[0]" in report.chain_witness

    def test_swapped_prefix_reported(self):
        family = build_family(2)
        indices = family.indices[[1, 0, 2, 3]]
        report = verify_family(dataclasses.replace(family, indices=indices))
        assert not report.prefix
        assert "S[0][0]" in report.prefix_witness

    def test_out_of_range_state_reported(self):
        family = build_family(1)
        indices = family.indices.copy()
        indices[1, 1] = 4
        report = verify_family(dataclasses.replace(family, indices=indices))
        assert not report.partition
        assert "S[1][1]" in report.partition_witness

    def test_shape_checked(self):
        family = build_family(2)
        with pytest.raises(DimensionError):
            dataclasses.replace(family, indices=family.indices[:2])
        with pytest.raises(DimensionError):
            dataclasses.replace(family, flips=family.flips[:, :1])

    def test_widest_family_is_array_backed(self):
        family = build_family(5)
        assert family.indices.shape == (32, 2**16)
        assert not family.indices.flags.writeable
        assert family.state(31, 2**16 - 1).n == 21

    def test_csv(self):
        family = build_family(1)
        stream = io.StringIO()
        write_family_csv(family, stream)
        rows = list(csv.reader(io.StringIO(stream.getvalue())))
        assert rows[0] == ["sequence", "row", "state_bits", "flipped_coordinate"]
        assert rows[1:] == [
            ["0", "0", "00", "2"],
            ["0", "1", "01", ""],
            ["1", "0", "10", "2"],
            ["1", "1", "11", ""],
        ]
        assert len(list(family_rows(build_family(2)))) == 16

    def test_bit_string_width(self):
        family = build_family(2)
        assert all(len(row[2]) == 4 for row in family_rows(family))
        assert BitVector.from_string(next(family_rows(family))[2]).index == 0
