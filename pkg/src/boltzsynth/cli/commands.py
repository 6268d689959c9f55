"""
Command implementations.

Each command reads its inputs, calls one library entry point and writes
the result. Commands return a process exit code; errors propagate as
SynthesisError subclasses and are mapped to exit codes by main.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import TextIO

from ..core.serialization import (
    distribution_to_dict,
    dump_document,
    dumps_document,
    read_distribution,
    read_model,
    read_support,
    write_distribution,
    write_model,
)
from ..inference.exact import model_marginal
from ..inference.sampling import SampleSet, ancestral_sample
from ..synthesis.bounds import format_text, size_summary, write_csv
from ..synthesis.dbn_synthesis import TraceRecord, synthesize_dbn, write_trace_csv
from ..synthesis.gray_sequences import build_family, verify_family, write_family_csv
from ..synthesis.pair_cover import (
    PairCover,
    minimal_pair_cover,
    pair_cover_for_support,
    write_cover,
)
from ..synthesis.rbm_synthesis import synthesize_rbm
from ..systems.config_manager import SynthesisSettings
from ..systems.error_handling import (
    ArgumentError,
    DegenerateDistributionError,
    get_metrics,
)
from ..utils.constants import EXIT_FAILURE, EXIT_OK, MAX_BOUNDS_N
from .manifest import RunManifest

logger = logging.getLogger(__name__)

REPORT_SUFFIX = ".report.json"


def report_path(output: str | Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + REPORT_SUFFIX)


def _manifest(args: argparse.Namespace, command: str) -> RunManifest:
    return RunManifest(command=command, arguments=list(getattr(args, "argv", [])))


def _finish(manifest: RunManifest, outputs: list[Path]) -> None:
    manifest.duration_seconds = get_metrics().last_duration(manifest.command)
    for output in outputs:
        manifest.write_for(output)


def _emit(text: str, out: str | None, outputs: list[Path]) -> None:
    """Write text to a file when out is given, otherwise to standard output."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    outputs.append(path)


def cmd_pair_cover(args: argparse.Namespace, settings: SynthesisSettings) -> int:
    """Minimal pair cover of a distribution's or support file's support."""
    manifest = _manifest(args, "pair-cover")
    outputs: list[Path] = []
    with get_metrics().operation_timer(manifest.command):
        cover: PairCover
        if args.dist is not None:
            target = read_distribution(args.dist)
            manifest.add_input(args.dist)
            cover = minimal_pair_cover(target)
        else:
            states = read_support(args.support)
            manifest.add_input(args.support)
            if not states:
                raise DegenerateDistributionError(f"{args.support} lists no states")
            cover = pair_cover_for_support(states[0].n, states)
        if args.out is None:
            sys.stdout.write(dumps_document(cover.to_dict()))
        else:
            write_cover(cover, args.out)
            outputs.append(Path(args.out))
            print(f"k={cover.k}")
    _finish(manifest, outputs)
    return EXIT_OK


def cmd_synth_rbm(args: argparse.Namespace, settings: SynthesisSettings) -> int:
    """Synthesize an RBM for a target distribution."""
    manifest = _manifest(args, "synth-rbm")
    sharpness = settings.sharpness if args.sharpness is None else args.sharpness
    with get_metrics().operation_timer(manifest.command):
        target = read_distribution(args.target)
        manifest.add_input(args.target)
        model, report = synthesize_rbm(
            target,
            sharpness=sharpness,
            calibrate=not args.no_calibrate,
            floor=settings.target_floor,
            tolerance=settings.calibration_tolerance,
            max_sweeps=settings.max_sweeps,
        )
        write_model(model, args.out)
        dump_document(report.to_dict(), report_path(args.out))
        print(f"hidden_units={report.hidden_units}")
        print(f"kl={report.kl!r}")
    _finish(manifest, [Path(args.out), report_path(args.out)])
    return EXIT_OK


def cmd_synth_dbn(args: argparse.Namespace, settings: SynthesisSettings) -> int:
    """Synthesize a DBN for a target distribution."""
    manifest = _manifest(args, "synth-dbn")
    copy_sharpness = (
        settings.copy_sharpness if args.copy_sharpness is None else args.copy_sharpness
    )
    sharpness = settings.sharpness if args.sharpness is None else args.sharpness
    outputs = [Path(args.out), report_path(args.out)]
    with get_metrics().operation_timer(manifest.command):
        target = read_distribution(args.target)
        manifest.add_input(args.target)
        trace: list[TraceRecord] | None = [] if args.trace else None
        model, report = synthesize_dbn(
            target,
            args.b,
            copy_sharpness=copy_sharpness,
            sharpness=sharpness,
            calibrate=not args.no_calibrate,
            trace=trace,
            delta=settings.clamp_delta,
        )
        write_model(model, args.out)
        dump_document(report.to_dict(), report_path(args.out))
        if trace is not None:
            buffer = io.StringIO()
            write_trace_csv(trace, buffer)
            _emit(buffer.getvalue(), args.trace, outputs)
        print(f"layers={report.hidden_layers}")
        print(f"tv={report.tv!r}")
        print(f"kl={report.kl!r}")
    _finish(manifest, outputs)
    return EXIT_OK


def write_samples_csv(samples: SampleSet, stream: TextIO) -> None:
    """Samples as sample,index,state_bits after a generator comment line."""
    metadata = " ".join(f"{key}={value}" for key, value in samples.metadata.items())
    stream.write(f"# {metadata}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["sample", "index", "state_bits"])
    for position, state in enumerate(samples.states()):
        writer.writerow([position, state.index, str(state)])


def cmd_eval(args: argparse.Namespace, settings: SynthesisSettings) -> int:
    """Exact marginal or ancestral samples of a model file."""
    manifest = _manifest(args, "eval")
    outputs: list[Path] = []
    with get_metrics().operation_timer(manifest.command):
        model = read_model(args.model)
        manifest.add_input(args.model)
        if args.samples is None:
            marginal = model_marginal(model)
            if args.out is None:
                sys.stdout.write(dumps_document(distribution_to_dict(marginal)))
            else:
                write_distribution(marginal, args.out)
                outputs.append(Path(args.out))
        else:
            seed = settings.seed if args.seed is None else args.seed
            manifest.seed = seed
            samples = ancestral_sample(model, args.samples, seed)
            buffer = io.StringIO()
            write_samples_csv(samples, buffer)
            _emit(buffer.getvalue(), args.out, outputs)
    _finish(manifest, outputs)
    return EXIT_OK


def parse_n_range(text: str) -> tuple[int, int]:
    """
    Parse "LO..HI" or a single "N".

    Raises:
        ArgumentError: If the range is malformed, empty or out of bounds
    """
    low_text, separator, high_text = text.partition("..")
    try:
        low = int(low_text)
        high = int(high_text) if separator else low
    except ValueError as e:
        raise ArgumentError(f"invalid n range {text!r}; expected LO..HI") from e
    if not 1 <= low <= high <= MAX_BOUNDS_N:
        raise ArgumentError(
            f"n range {low}..{high} must satisfy 1 <= LO <= HI <= {MAX_BOUNDS_N}"
        )
    return low, high


def cmd_bounds(args: argparse.Namespace, settings: SynthesisSettings) -> int:
    """Size table over a range of n."""
    manifest = _manifest(args, "bounds")
    outputs: list[Path] = []
    with get_metrics().operation_timer(manifest.command):
        low, high = parse_n_range(args.n_range)
        tables = [size_summary(n, args.b, args.s) for n in range(low, high + 1)]
        if args.format == "csv":
            buffer = io.StringIO()
            write_csv(tables, buffer)
            text = buffer.getvalue()
        else:
            text = format_text(tables)
        _emit(text, args.out, outputs)
    _finish(manifest, outputs)
    return EXIT_OK


def cmd_gray(args: argparse.Namespace, settings: SynthesisSettings) -> int:
    """Dump a sequence family and optionally verify it."""
    manifest = _manifest(args, "gray")
    outputs: list[Path] = []
    with get_metrics().operation_timer(manifest.command):
        family = build_family(args.b)
        buffer = io.StringIO()
        write_family_csv(family, buffer)
        _emit(buffer.getvalue(), args.out, outputs)
        passed = True
        if args.verify:
            report = verify_family(family)
            passed = report.passed
            sys.stderr.write(json.dumps(report.to_dict(), indent=2) + "\n")
    _finish(manifest, outputs)
    return EXIT_OK if passed else EXIT_FAILURE
