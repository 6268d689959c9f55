"""
DBN synthesis over a Gray-code sequence family.

The top RBM places the total mass of every sequence on its first entry.
Each directed layer then moves mass one row down the sequences: the mass
on S_{i,k} stays with the share p*(S_{i,k}) / tail and moves to S_{i,k+1}
with the rest, where tail is the target mass left in the sequence from
row k on. Every layer overlays n - b sharing units, one per pair of
sequences that flip the same unit, and copies every other unit.

Rows are 0-based, as in the sequence family.
"""

import csv
import logging
import math
from dataclasses import dataclass
from typing import Any, TextIO

import numpy as np
from scipy.special import logit

from ..core.bitvector import BitVector, flipped_unit, hamming
from ..core.distribution import DiscreteDistribution, kl_divergence, total_variation
from ..core.models import DbnModel, SigmoidLayer
from ..inference.exact import dbn_marginal
from ..systems.error_handling import (
    AdmissibilityError,
    ArgumentError,
    DimensionError,
    synthesis_step,
)
from ..utils.constants import (
    ADMISSIBLE_WIDTHS,
    CLAMP_DELTA,
    DEFAULT_COPY_SHARPNESS,
    DEFAULT_SHARPNESS,
    MAX_PREFIX_WIDTH,
    MIN_PREFIX_WIDTH,
)
from .bounds import admissible_prefix_width
from .gray_sequences import SequenceFamily, build_family
from .pair_cover import PairCover
from .rbm_synthesis import SynthesisReport, synthesize_rbm

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransferSchedule:
    """
    Stay and move fractions for every sequence and row.

    Attributes:
        family: The sequence family the schedule walks
        p_star: The target distribution
        stay: a×(L-1) array; stay[i, k] keeps mass on S_{i,k}
        move: a×(L-1) array; move[i, k] sends mass to S_{i,k+1}
        top_masses: Total target mass of every sequence
    """

    family: SequenceFamily
    p_star: DiscreteDistribution
    stay: np.ndarray
    move: np.ndarray
    top_masses: np.ndarray

    def __post_init__(self) -> None:
        for name in ("stay", "move", "top_masses"):
            array = np.array(getattr(self, name), dtype=np.float64)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def rows(self) -> int:
        """Number of transfer rows, one per directed layer."""
        return self.family.length - 1

    def top_distribution(self) -> DiscreteDistribution:
        """The top-layer distribution: sequence masses on first entries."""
        probs = np.zeros(1 << self.family.n)
        probs[self.family.indices[:, 0]] = self.top_masses
        return DiscreteDistribution(self.family.n, probs)


@synthesis_step("build_schedule")
def build_schedule(
    p_star: DiscreteDistribution, family: SequenceFamily
) -> TransferSchedule:
    """
    Compute the transfer fractions of p_star along a family.

    Rows whose remaining tail mass is zero get move = 1 and stay = 0;
    no mass ever reaches them.

    Raises:
        DimensionError: If p_star does not have the family's width
    """
    if p_star.n != family.n:
        raise DimensionError(
            f"target has {p_star.n} units, family b={family.b} has {family.n}"
        )
    masses = p_star.probs[family.indices]
    tails = np.cumsum(masses[:, ::-1], axis=1)[:, ::-1]
    live = tails[:, :-1] > 0.0
    stay = np.divide(
        masses[:, :-1], tails[:, :-1], out=np.zeros(live.shape), where=live
    )
    move = np.divide(
        tails[:, 1:], tails[:, :-1], out=np.ones(live.shape), where=live
    )
    return TransferSchedule(family, p_star, stay, move, tails[:, 0])


@dataclass(frozen=True)
class TraceRecord:
    """One state touched by a push-forward row."""

    row: int
    state: BitVector
    mass_before: float
    mass_after: float


@synthesis_step("ideal_pushforward")
def ideal_pushforward(
    schedule: TransferSchedule, trace: list[TraceRecord] | None = None
) -> DiscreteDistribution:
    """
    Apply the schedule in exact arithmetic, layer by layer.

    States off the current row are copied unchanged, so the result
    telescopes back to p_star.

    Args:
        schedule: The transfer schedule
        trace: If given, receives a record for every state each row
            touches
    """
    family = schedule.family
    probs = schedule.top_distribution().probs.copy()
    for k in range(schedule.rows):
        # Sources and targets of one row are distinct states.
        sources = family.indices[:, k]
        targets = family.indices[:, k + 1]
        mass = probs[sources]
        before = probs[targets]
        probs[sources] = mass * schedule.stay[:, k]
        probs[targets] = before + mass * schedule.move[:, k]
        if trace is not None:
            for i in range(family.a):
                source, target = int(sources[i]), int(targets[i])
                trace.append(
                    TraceRecord(
                        k,
                        BitVector(family.n, source),
                        float(mass[i]),
                        float(probs[source]),
                    )
                )
                trace.append(
                    TraceRecord(
                        k,
                        BitVector(family.n, target),
                        float(before[i]),
                        float(probs[target]),
                    )
                )
    return DiscreteDistribution(family.n, probs)


def write_trace_csv(trace: list[TraceRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["row", "state", "mass_before", "mass_after"])
    for record in trace:
        writer.writerow(
            [
                record.row,
                str(record.state),
                repr(record.mass_before),
                repr(record.mass_after),
            ]
        )


@dataclass(frozen=True)
class SharingUnitSpec:
    """
    One output unit that copies its input except at two exception states.

    Attributes:
        unit: The output unit l (1-based)
        a_vec: First exception state
        b_vec: Second exception state, a Hamming neighbour of a_vec
        p_a: Target P(v_l = 1 | h = a_vec)
        p_b: Target P(v_l = 1 | h = b_vec)
        sharpness: Copy margin T
    """

    unit: int
    a_vec: BitVector
    b_vec: BitVector
    p_a: float
    p_b: float
    sharpness: float

    def __post_init__(self) -> None:
        if hamming(self.a_vec, self.b_vec) != 1:
            raise ArgumentError(
                f"exceptions {self.a_vec} and {self.b_vec} are not neighbours"
            )
        if self.unit == self.j:
            raise ArgumentError(
                f"unit {self.unit} is the unit the exceptions differ in"
            )
        if not 1 <= self.unit <= self.a_vec.n:
            raise ArgumentError(f"unit {self.unit} outside 1..{self.a_vec.n}")
        for name in ("p_a", "p_b"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ArgumentError(f"{name}={value} is not a probability")
        if not (math.isfinite(self.sharpness) and self.sharpness > 0.0):
            raise ArgumentError(
                f"copy sharpness must be positive and finite, got {self.sharpness}"
            )

    @property
    def j(self) -> int:
        """The unit in which the exception states differ."""
        return flipped_unit(self.a_vec, self.b_vec)

    @property
    def n(self) -> int:
        return self.a_vec.n


def _clamped_logit(p: float, delta: float) -> float:
    return float(logit(min(max(p, delta), 1.0 - delta)))


def realize_sharing_unit(
    spec: SharingUnitSpec, delta: float = CLAMP_DELTA
) -> tuple[np.ndarray, float]:
    """
    Weights into output unit l that realize a sharing spec.

    Every input unit other than l and j carries a penalty of magnitude
    Q = T + |g_a| + |g_b| + |g_b - g_a| against disagreeing with a_vec;
    the diagonal weight P = T + (n - 2)Q + |g_a| + |g_b| dominates the
    sum of all penalties. The weight on j and the offset are then solved
    exactly so the activations at a_vec and b_vec are g_a and g_b.

    Args:
        spec: The sharing spec
        delta: Targets are clamped to [delta, 1 - delta] before the logit

    Returns:
        (column, offset): the length-n input weights and the offset of l
    """
    l, j = spec.unit, spec.j
    g_a = _clamped_logit(spec.p_a, delta)
    g_b = _clamped_logit(spec.p_b, delta)
    a_bits = spec.a_vec.as_array()
    b_bits = spec.b_vec.as_array()
    orientation = 2.0 * a_bits[l - 1] - 1.0
    penalty = spec.sharpness + abs(g_a) + abs(g_b) + abs(g_b - g_a)
    column = np.where(a_bits == 0.0, orientation * penalty, -orientation * penalty)
    column[l - 1] = spec.sharpness + (spec.n - 2) * penalty + abs(g_a) + abs(g_b)
    column[j - 1] = (g_a - g_b) / (a_bits[j - 1] - b_bits[j - 1])
    offset = g_a - float(column @ a_bits)
    return column, offset


def _share_target(schedule: TransferSchedule, i: int, row: int, unit: int) -> float:
    """P(v_unit = 1) at S_{i,row}: the move share when that moves the unit to 1."""
    if schedule.family.state(i, row).unit(unit):
        return float(schedule.stay[i, row])
    return float(schedule.move[i, row])


def sharing_specs(
    row: int, schedule: TransferSchedule, sharpness: float
) -> list[SharingUnitSpec]:
    """
    The n - b sharing units of one row.

    Sequences i and i + a/2 flip the same unit at every row and differ
    only in unit 1, so each such pair becomes one spec.
    """
    family = schedule.family
    half = family.partner_offset
    specs = []
    for i in range(half):
        unit = family.flip(i, row)
        specs.append(
            SharingUnitSpec(
                unit=unit,
                a_vec=family.state(i, row),
                b_vec=family.state(i + half, row),
                p_a=_share_target(schedule, i, row, unit),
                p_b=_share_target(schedule, i + half, row, unit),
                sharpness=sharpness,
            )
        )
    return specs


@synthesis_step("build_layer")
def build_layer(
    row: int,
    schedule: TransferSchedule,
    family: SequenceFamily,
    sharpness: float = DEFAULT_COPY_SHARPNESS,
    delta: float = CLAMP_DELTA,
) -> SigmoidLayer:
    """
    The directed layer that moves mass from row to row + 1.

    Sharing units come from sharing_specs; every other unit copies its
    input with diagonal 2T_c and offset -T_c, where T_c exceeds the
    largest sharing diagonal by T. Sharing targets are clamped to
    [delta, 1 - delta].

    Raises:
        ArgumentError: If the schedule was built on another family, row
            is out of range, or two groups flip the same unit
    """
    if schedule.family.b != family.b:
        raise ArgumentError(
            f"schedule was built for b={schedule.family.b}, family has b={family.b}"
        )
    if not 0 <= row < schedule.rows:
        raise ArgumentError(f"row {row} outside 0..{schedule.rows - 1}")
    specs = sharing_specs(row, schedule, sharpness)
    units = [spec.unit for spec in specs]
    if len(set(units)) != len(units):
        raise ArgumentError(f"sharing units collide at row {row}: {units}")

    n = family.n
    weights = np.zeros((n, n))
    offsets = np.zeros(n)
    diagonals = []
    for spec in specs:
        column, offset = realize_sharing_unit(spec, delta)
        weights[:, spec.unit - 1] = column
        offsets[spec.unit - 1] = offset
        diagonals.append(column[spec.unit - 1])
    copy_sharpness = max(diagonals, default=0.0) + sharpness
    for unit in range(1, n + 1):
        if unit not in units:
            weights[unit - 1, unit - 1] = 2.0 * copy_sharpness
            offsets[unit - 1] = -copy_sharpness
    logger.debug(f"Built layer for row {row}: sharing units {units}")
    return SigmoidLayer(weights, offsets)


def ideal_layer_conditional(
    schedule: TransferSchedule, row: int, h: BitVector
) -> np.ndarray:
    """P(v_l = 1 | h) for every unit under the exact transfer at row."""
    family = schedule.family
    conditional = h.as_array()
    for i in range(family.a):
        if family.state(i, row) == h:
            unit = family.flip(i, row)
            conditional[unit - 1] = _share_target(schedule, i, row, unit)
    return conditional


def prefix_block_cover(family: SequenceFamily) -> PairCover:
    """Pairs (S_{i,1}, S_{i+a/2,1}): first entries differing in unit 1."""
    half = family.partner_offset
    pairs = sorted(
        tuple(
            sorted(
                (family.state(i, 0), family.state(i + half, 0)),
                key=lambda state: state.index,
            )
        )
        for i in range(half)
    )
    return PairCover(family.n, tuple(pairs))


@dataclass(frozen=True)
class DbnSynthesisReport:
    """
    Outcome of a DBN synthesis.

    Attributes:
        achieved: Exact visible marginal of the synthesized DBN
        tv: Total variation to the target
        kl: KL(target || achieved)
        ideal_tv: Total variation of the exact schedule to the target
        hidden_layers: Hidden layers above the visible layer
        directed_layers: Number of directed layers
        copy_sharpness: Copy margin T
        sharpness: Base scale of the top RBM
        top: Report of the top RBM synthesis
    """

    achieved: DiscreteDistribution
    tv: float
    kl: float
    ideal_tv: float
    hidden_layers: int
    directed_layers: int
    copy_sharpness: float
    sharpness: float
    top: SynthesisReport

    @property
    def top_hidden_units(self) -> int:
        return self.top.hidden_units

    def to_dict(self) -> dict[str, Any]:
        return {
            "tv": self.tv,
            "kl": self.kl,
            "ideal_tv": self.ideal_tv,
            "layers": self.hidden_layers,
            "directed_layers": self.directed_layers,
            "T": self.copy_sharpness,
            "sharpness": self.sharpness,
            "top_hidden_units": self.top_hidden_units,
            "top": self.top.to_dict(),
        }


def _prefix_width(n: int, b: int | None) -> int:
    inferred = admissible_prefix_width(n)
    if inferred is None or (b is not None and b != inferred):
        raise AdmissibilityError(n, ADMISSIBLE_WIDTHS)
    return inferred


@synthesis_step("synthesize_dbn")
def synthesize_dbn(
    p_star: DiscreteDistribution,
    b: int | None = None,
    copy_sharpness: float = DEFAULT_COPY_SHARPNESS,
    sharpness: float = DEFAULT_SHARPNESS,
    calibrate: bool = True,
    *,
    trace: list[TraceRecord] | None = None,
    delta: float = CLAMP_DELTA,
) -> tuple[DbnModel, DbnSynthesisReport]:
    """
    Synthesize a width-n DBN whose visible marginal approximates p_star.

    Args:
        p_star: Target over n = 2**(b - 1) + b units
        b: Prefix width; inferred from n when omitted
        copy_sharpness: Copy margin T of the directed layers
        sharpness: Base scale of the top RBM
        calibrate: Calibrate the top RBM
        trace: If given, receives the exact push-forward trace
        delta: Clamp applied to the sharing targets of every layer

    Returns:
        The model and its synthesis report

    Raises:
        ArgumentError: If b is outside 1..5 or T is not positive
        AdmissibilityError: If n is not 2**(b - 1) + b
    """
    if b is not None and not MIN_PREFIX_WIDTH <= b <= MAX_PREFIX_WIDTH:
        raise ArgumentError(
            f"prefix width b={b} outside {MIN_PREFIX_WIDTH}..{MAX_PREFIX_WIDTH}"
        )
    n = p_star.n
    b = _prefix_width(n, b)
    family = build_family(b)
    schedule = build_schedule(p_star, family)
    ideal = ideal_pushforward(schedule, trace)

    top_target = schedule.top_distribution()
    top, top_report = synthesize_rbm(
        top_target, prefix_block_cover(family), sharpness, calibrate
    )
    top = top.padded(n)
    layers = tuple(
        build_layer(row, schedule, family, copy_sharpness, delta)
        for row in range(schedule.rows)
    )
    model = DbnModel(top, layers)
    achieved = dbn_marginal(model)
    report = DbnSynthesisReport(
        achieved=achieved,
        tv=total_variation(p_star, achieved),
        kl=kl_divergence(p_star, achieved),
        ideal_tv=total_variation(p_star, ideal),
        hidden_layers=model.hidden_layer_count,
        directed_layers=len(model.layers),
        copy_sharpness=copy_sharpness,
        sharpness=sharpness,
        top=top_report,
    )
    logger.info(
        f"Synthesized DBN: n={n}, b={b}, layers={report.hidden_layers}, "
        f"TV={report.tv:.3e}"
    )
    return model, report
