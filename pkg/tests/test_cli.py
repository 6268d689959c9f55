"""
Tests for the command-line commands, run through main().
"""

import csv
import io
import json
import tempfile
from pathlib import Path

import numpy as np
import pytest

from boltzsynth.cli.commands import parse_n_range, report_path
from boltzsynth.cli.manifest import file_digest, manifest_path
from boltzsynth.core.bitvector import BitVector
from boltzsynth.core.distribution import (
    DiscreteDistribution,
    floor_and_normalize,
    kl_divergence,
)
from boltzsynth.core.models import RbmModel
from boltzsynth.core.serialization import (
    dumps_document,
    read_distribution,
    support_to_dict,
    write_distribution,
    write_model,
)
from boltzsynth.main import main
from boltzsynth.synthesis.pair_cover import minimal_pair_cover
from boltzsynth.systems.error_handling import ArgumentError
from boltzsynth.utils.constants import (
    EXIT_DEGENERATE,
    EXIT_DOMAIN,
    EXIT_INPUT,
    EXIT_NUMERIC,
    EXIT_OK,
)


@pytest.mark.integration
class TestCommands:
    """End-to-end runs of every subcommand."""

    @pytest.fixture
    def workdir(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            yield Path(temp_dir)

    @pytest.fixture
    def run(self, workdir, capsys):
        """Run main with an empty config root; returns (code, stdout, stderr)."""

        def _run(*argv: str) -> tuple[int, str, str]:
            code = main(["--config", str(workdir / "config"), *argv])
            captured = capsys.readouterr()
            return code, captured.out, captured.err

        return _run

    @pytest.fixture
    def random_target(self, workdir):
        path = workdir / "target.json"
        rng = np.random.default_rng(42)
        write_distribution(DiscreteDistribution.from_weights(rng.random(16) + 0.05), path)
        return path

    def test_pair_cover_full_support(self, run, workdir):
        path = workdir / "uniform.json"
        write_distribution(DiscreteDistribution.uniform(4), path)
        code, out, _ = run("pair-cover", "--dist", str(path))
        assert code == EXIT_OK
        assert json.loads(out)["k"] == 8

    def test_pair_cover_matches_library(self, run, workdir):
        rng = np.random.default_rng(3)
        target = DiscreteDistribution.from_mapping(
            4, {int(i): 1.0 for i in rng.choice(16, size=5, replace=False)}
        )
        path = workdir / "sparse.json"
        write_distribution(target, path)
        _, out, _ = run("pair-cover", "--dist", str(path))
        assert out == dumps_document(minimal_pair_cover(target).to_dict())

    def test_pair_cover_support_file(self, run, workdir):
        path = workdir / "support.json"
        path.write_text(json.dumps(support_to_dict(4, [BitVector(4, 9)])))
        out_path = workdir / "cover.json"
        code, out, _ = run("pair-cover", "--support", str(path), "--out", str(out_path))
        assert code == EXIT_OK
        assert out.strip() == "k=1"
        assert json.loads(out_path.read_text())["pairs"] == [[8, 9]]
        manifest = json.loads(manifest_path(out_path).read_text())
        assert manifest["command"] == "pair-cover"
        assert manifest["inputs"] == {str(path): file_digest(path)}

    def test_pair_cover_empty_support(self, run, workdir):
        path = workdir / "empty.json"
        path.write_text(json.dumps({"schema": "support/1", "n": 3, "states": []}))
        code, _, err = run("pair-cover", "--support", str(path))
        assert code == EXIT_DEGENERATE
        assert "error:" in err

    def test_pair_cover_zero_distribution(self, run, workdir):
        path = workdir / "zero.json"
        path.write_text(json.dumps({"schema": "dist/1", "n": 1, "probs": [0.0, 0.0]}))
        code, _, _ = run("pair-cover", "--dist", str(path))
        assert code == EXIT_DEGENERATE

    def test_malformed_input(self, run, workdir):
        path = workdir / "bad.json"
        path.write_text("{ nope")
        code, _, err = run("pair-cover", "--dist", str(path))
        assert code == EXIT_INPUT
        assert "invalid JSON" in err

    @pytest.mark.parametrize(
        "document",
        [
            {"schema": "dist/1", "n": 1, "probs": ["x", 1]},
            {"schema": "dist/1", "n": None, "probs": [0.5, 0.5]},
            {"schema": "support/1", "n": 2, "states": ["1"]},
        ],
    )
    def test_bad_field_values(self, run, workdir, document):
        path = workdir / "bad.json"
        path.write_text(json.dumps(document))
        flag = "--support" if document["schema"] == "support/1" else "--dist"
        code, _, err = run("pair-cover", flag, str(path))
        assert code == EXIT_INPUT
        assert "error:" in err

    def test_ragged_model_weights(self, run, workdir):
        path = workdir / "ragged.json"
        path.write_text(
            json.dumps(
                {
                    "schema": "rbm/1",
                    "n_visible": 2,
                    "n_hidden": 2,
                    "W": [[0.0, 1.0], [0.0]],
                    "B": [0.0, 0.0],
                    "C": [0.0, 0.0],
                }
            )
        )
        code, _, _ = run("eval", "--model", str(path))
        assert code == EXIT_INPUT

    def test_negative_seed(self, run, workdir):
        path = workdir / "model.json"
        write_model(RbmModel.zeros(2), path)
        code, _, _ = run("eval", "--model", str(path), "--samples", "5", "--seed", "-1")
        assert code == EXIT_INPUT

    def test_missing_input(self, run, workdir):
        code, _, _ = run(
            "synth-rbm",
            "--target",
            str(workdir / "absent.json"),
            "--out",
            str(workdir / "m.json"),
        )
        assert code == EXIT_INPUT

    def test_synth_rbm_two_point(self, run, workdir):
        path = workdir / "two.json"
        write_distribution(DiscreteDistribution.from_mapping(3, {0: 1.0, 4: 1.0}), path)
        out_path = workdir / "model.json"
        code, out, _ = run("synth-rbm", "--target", str(path), "--out", str(out_path))
        assert code == EXIT_OK
        assert "hidden_units=0" in out.splitlines()
        assert json.loads(out_path.read_text())["n_hidden"] == 0

    def test_synth_rbm_report_and_eval_agree(self, run, workdir, random_target):
        out_path = workdir / "model.json"
        code, out, _ = run(
            "synth-rbm", "--target", str(random_target), "--out", str(out_path)
        )
        assert code == EXIT_OK
        assert "hidden_units=7" in out
        report = json.loads(report_path(out_path).read_text())
        assert report["hidden_units"] == 7
        assert manifest_path(out_path).exists()
        assert manifest_path(report_path(out_path)).exists()

        marginal_path = workdir / "marginal.json"
        code, _, _ = run("eval", "--model", str(out_path), "--out", str(marginal_path))
        assert code == EXIT_OK
        target = floor_and_normalize(read_distribution(random_target), 1e-9)
        kl = kl_divergence(target, read_distribution(marginal_path))
        assert kl == pytest.approx(report["kl"], abs=1e-12)

    def test_synth_rbm_is_deterministic(self, run, workdir, random_target):
        first, second = workdir / "a.json", workdir / "b.json"
        run("synth-rbm", "--target", str(random_target), "--out", str(first))
        run("synth-rbm", "--target", str(random_target), "--out", str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_synth_rbm_calibration_failure(self, run, workdir):
        config = workdir / "config"
        config.mkdir()
        (config / "synthesis.json").write_text(
            json.dumps({"calibration": {"max_sweeps": 1, "tolerance": 1e-300}})
        )
        path = workdir / "target.json"
        write_distribution(DiscreteDistribution(2, [0.1, 0.2, 0.3, 0.4]), path)
        code, _, err = run(
            "synth-rbm", "--target", str(path), "--sharpness", "10",
            "--out", str(workdir / "m.json"),
        )
        assert code == EXIT_NUMERIC
        residuals = json.loads(err.strip().splitlines()[-1])["residuals"]
        assert residuals

    def test_synth_dbn(self, run, workdir, random_target):
        out_path = workdir / "dbn.json"
        trace_path = workdir / "trace.csv"
        code, out, _ = run(
            "synth-dbn", "--target", str(random_target), "--b", "2",
            "--copy-sharpness", "40", "--trace", str(trace_path),
            "--out", str(out_path),
        )
        assert code == EXIT_OK
        assert "layers=4" in out.splitlines()
        report = json.loads(report_path(out_path).read_text())
        assert report["layers"] == 4
        assert report["T"] == 40.0
        assert report["tv"] <= 1e-2
        header = trace_path.read_text().splitlines()[0]
        assert header == "row,state,mass_before,mass_after"
        assert manifest_path(trace_path).exists()

    def test_synth_dbn_point_mass(self, run, workdir):
        path = workdir / "point.json"
        write_distribution(DiscreteDistribution.point_mass(2, 3), path)
        code, out, _ = run(
            "synth-dbn", "--target", str(path), "--out", str(workdir / "dbn.json")
        )
        assert code == EXIT_OK
        tv = float(next(line for line in out.splitlines() if line.startswith("tv="))[3:])
        assert tv <= 1e-6

    def test_synth_dbn_uses_configured_clamp_delta(self, run, workdir):
        path = workdir / "point.json"
        write_distribution(DiscreteDistribution.point_mass(2, 3), path)
        default_out, clamped_out = workdir / "default.json", workdir / "clamped.json"
        run("synth-dbn", "--target", str(path), "--out", str(default_out))
        config = workdir / "config"
        config.mkdir()
        (config / "synthesis.json").write_text(json.dumps({"clamp_delta": 1e-3}))
        code, _, _ = run("synth-dbn", "--target", str(path), "--out", str(clamped_out))
        assert code == EXIT_OK
        default_layer = json.loads(default_out.read_text())["layers"][0]
        clamped_layer = json.loads(clamped_out.read_text())["layers"][0]
        assert default_layer["offsets"] != clamped_layer["offsets"]

    def test_synth_dbn_inadmissible(self, run, workdir):
        path = workdir / "five.json"
        write_distribution(DiscreteDistribution.uniform(5), path)
        code, _, err = run(
            "synth-dbn",
            "--target",
            str(path),
            "--b",
            "2",
            "--out",
            str(workdir / "dbn.json"),
        )
        assert code == EXIT_DOMAIN
        assert "{2, 4, 7, 12, 21}" in err

    def test_eval_zero_rbm(self, run, workdir):
        path = workdir / "zero.json"
        write_model(RbmModel.zeros(2, 1), path)
        code, out, _ = run("eval", "--model", str(path))
        assert code == EXIT_OK
        assert json.loads(out)["probs"] == pytest.approx([0.25] * 4, rel=1e-15)

    def test_eval_rejects_distribution(self, run, workdir):
        path = workdir / "dist.json"
        write_distribution(DiscreteDistribution.uniform(2), path)
        code, _, _ = run("eval", "--model", str(path))
        assert code == EXIT_INPUT

    def test_eval_samples_are_reproducible(self, run, workdir):
        path = workdir / "model.json"
        write_model(RbmModel(np.ones((1, 3)), np.zeros(3), np.zeros(1)), path)
        _, first, _ = run("eval", "--model", str(path), "--samples", "50", "--seed", "8")
        _, second, _ = run("eval", "--model", str(path), "--samples", "50", "--seed", "8")
        assert first == second
        lines = first.splitlines()
        assert lines[0].startswith("# generator=numpy.random.PCG64")
        rows = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
        assert rows[0] == ["sample", "index", "state_bits"]
        assert len(rows) == 51

    def test_eval_samples_record_seed(self, run, workdir):
        path = workdir / "model.json"
        write_model(RbmModel.zeros(2), path)
        out_path = workdir / "samples.csv"
        run("eval", "--model", str(path), "--samples", "5", "--out", str(out_path))
        assert json.loads(manifest_path(out_path).read_text())["seed"] == 1234

    def test_bounds_text_and_csv(self, run):
        _, text, _ = run("bounds", "--n-range", "2..6")
        _, table, _ = run("bounds", "--n-range", "2..6", "--format", "csv")
        text_rows = [line.split() for line in text.splitlines()]
        csv_rows = list(csv.reader(io.StringIO(table)))
        assert len(text_rows) == len(csv_rows) == 6
        for text_row, csv_row in zip(text_rows, csv_rows, strict=True):
            assert [cell or "-" for cell in csv_row] == text_row

    def test_bounds_four_units(self, run):
        _, table, _ = run("bounds", "--n-range", "4", "--format", "csv")
        row = dict(zip(*csv.reader(io.StringIO(table)), strict=True))
        assert row["rbm_hidden_corollary"] == "7"
        assert row["rbm_hidden_theorem_a"] == "17"
        assert row["dbn_layers_theorem2"] == "4"
        assert row["dbn_layers_theorem_b"] == "4"
        assert row["dbn_lower_bound"] == "1"

    def test_bounds_single_row(self, run):
        _, text, _ = run("bounds", "--n-range", "2..2")
        assert len(text.splitlines()) == 2

    def test_bounds_bad_range(self, run):
        code, _, _ = run("bounds", "--n-range", "9..3")
        assert code == EXIT_INPUT

    def test_gray_dump(self, run):
        code, out, _ = run("gray", "--b", "1")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) == 1 + 2 * 2
        assert {row[0] for row in rows[1:]} == {"0", "1"}

    def test_gray_verify(self, run, workdir):
        out_path = workdir / "gray.csv"
        code, _, err = run("gray", "--b", "3", "--verify", "--out", str(out_path))
        assert code == EXIT_OK
        assert json.loads(err[err.index("{"):])["passed"] is True
        assert len(out_path.read_text().splitlines()) == 1 + 128

    def test_gray_out_of_range(self, run):
        code, _, _ = run("gray", "--b", "6")
        assert code == EXIT_INPUT


class TestParseNRange:
    """Test cases for parse_n_range."""

    def test_range(self):
        assert parse_n_range("2..5") == (2, 5)

    def test_single(self):
        assert parse_n_range("7") == (7, 7)

    @pytest.mark.parametrize("text", ["0..3", "5..2", "1..65", "a..b", ""])
    def test_invalid(self, text):
        with pytest.raises(ArgumentError):
            parse_n_range(text)
