"""
RBM synthesis from a pair cover.

The first pair of the cover is carried by the visible biases of an RBM
without hidden units. Every further pair adds one hidden unit whose
factor 1 + exp(w·v + c) equals 1 + e^λ1 on the pair's lower member,
1 + e^λ2 on its upper member and stays close to one everywhere else.
The λ values are solved in closed form against the exact marginal and
then refined by sweeps until every pair member carries its target share.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.special import logsumexp

from ..core.bitvector import BitVector, flipped_unit
from ..core.distribution import (
    DiscreteDistribution,
    floor_and_normalize,
    kl_divergence,
)
from ..core.models import RbmModel
from ..inference.exact import rbm_log_weights, rbm_marginal, unit_log_factors
from ..systems.error_handling import (
    ArgumentError,
    CalibrationError,
    DegenerateDistributionError,
    DimensionError,
    synthesis_step,
)
from ..utils.constants import (
    CALIBRATION_TOLERANCE,
    DEFAULT_SHARPNESS,
    MAX_CALIBRATION_SWEEPS,
    TARGET_FLOOR,
)
from .pair_cover import PairCover, minimal_pair_cover

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrientedPair:
    """
    A Hamming-1 pair with its flip unit.

    Attributes:
        upper: The member with unit j set
        lower: The member with unit j cleared
        j: The unit in which the members differ (1-based)
    """

    upper: BitVector
    lower: BitVector
    j: int

    def __post_init__(self) -> None:
        if flipped_unit(self.upper, self.lower) != self.j:
            raise ArgumentError(
                f"{self.upper} and {self.lower} do not differ in unit {self.j}"
            )
        if self.upper.unit(self.j) != 1:
            raise ArgumentError(f"upper member {self.upper} has unit {self.j} cleared")

    @property
    def n(self) -> int:
        return self.upper.n

    @property
    def members(self) -> tuple[BitVector, BitVector]:
        """(lower, upper), in index order."""
        return self.lower, self.upper


def orient_pair(u: BitVector, v: BitVector) -> OrientedPair:
    """
    Orient a Hamming-1 pair.

    Raises:
        ArgumentError: If u and v are not Hamming neighbours
    """
    j = flipped_unit(u, v)
    if u.unit(j):
        return OrientedPair(u, v, j)
    return OrientedPair(v, u, j)


def _as_oriented(pair: OrientedPair | tuple[BitVector, BitVector]) -> OrientedPair:
    if isinstance(pair, OrientedPair):
        return pair
    return orient_pair(*pair)


def _check_sharpness(sharpness: float) -> None:
    if not (math.isfinite(sharpness) and sharpness > 0.0):
        raise ArgumentError(f"sharpness must be positive and finite, got {sharpness}")


def pair_direction(pair: OrientedPair) -> np.ndarray:
    """ṽ_ĵ - ½𝟙_ĵ: the lower member centred, with unit j zeroed."""
    direction = pair.lower.as_array() - 0.5
    direction[pair.j - 1] = 0.0
    return direction


def init_rbm0(
    pair: OrientedPair | tuple[BitVector, BitVector],
    mass_ratio: float,
    sharpness: float = DEFAULT_SHARPNESS,
) -> RbmModel:
    """
    An RBM without hidden units concentrated on one pair.

    The visible biases are a·(ṽ_ĵ - ½𝟙_ĵ) + log(mass_ratio)·e_j, so the
    upper member carries exactly mass_ratio times the lower member's
    mass and every other state is suppressed by e^(-a/2) per unit of
    Hamming distance from the pair.

    Args:
        pair: The pair, oriented or as two neighbouring states
        mass_ratio: p(upper) / p(lower), positive and finite
        sharpness: The scale a

    Raises:
        ArgumentError: If the pair is not Hamming-1 or a parameter is
            out of range
    """
    oriented = _as_oriented(pair)
    _check_sharpness(sharpness)
    if not (math.isfinite(mass_ratio) and mass_ratio > 0.0):
        raise ArgumentError(f"mass ratio must be positive and finite, got {mass_ratio}")
    bias = sharpness * pair_direction(oriented)
    bias[oriented.j - 1] = math.log(mass_ratio)
    return RbmModel.from_biases(bias)


@dataclass(frozen=True)
class PairUnitWeights:
    """
    A hidden unit that reweights one pair.

    Attributes:
        pair: The pair the unit targets
        sharpness: Scale of the unit's weights
        lambda1: Log of (factor - 1) at the lower member
        lambda2: Log of (factor - 1) at the upper member
    """

    pair: OrientedPair
    sharpness: float
    lambda1: float
    lambda2: float

    def __post_init__(self) -> None:
        _check_sharpness(self.sharpness)
        if not (math.isfinite(self.lambda1) and math.isfinite(self.lambda2)):
            raise ArgumentError(
                f"lambda values must be finite, got ({self.lambda1}, {self.lambda2})"
            )

    @property
    def weights(self) -> np.ndarray:
        """w̄ = a(ṽ_ĵ - ½𝟙_ĵ) + (λ2 - λ1)e_j."""
        weights = self.sharpness * pair_direction(self.pair)
        weights[self.pair.j - 1] = self.lambda2 - self.lambda1
        return weights

    @property
    def bias(self) -> float:
        """c̄ = -a(ṽ_ĵ - ½𝟙_ĵ)·ṽ_ĵ + λ1."""
        lower = self.pair.lower.as_array()
        offset = pair_direction(self.pair) @ lower
        return float(-self.sharpness * offset + self.lambda1)

    def log_factor(self, v: BitVector) -> float:
        """log(1 + exp(w̄·v + c̄))."""
        return float(np.logaddexp(0.0, self.weights @ v.as_array() + self.bias))

    def factor(self, v: BitVector) -> float:
        return math.exp(self.log_factor(v))


def add_pair_unit(model: RbmModel, unit: PairUnitWeights) -> RbmModel:
    """
    Extend a model by one pair unit.

    The new marginal is the old one reweighted state by state by the
    unit's factor and renormalized.

    Raises:
        DimensionError: If the unit's pair does not match the visible width
    """
    if unit.pair.n != model.n_visible:
        raise DimensionError(
            f"pair has {unit.pair.n} units, model has {model.n_visible} visible units"
        )
    return model.with_hidden_unit(unit.weights, unit.bias)


def order_pairs(cover: PairCover, target: DiscreteDistribution) -> list[OrientedPair]:
    """Pairs by descending combined target mass, ties by member indices."""
    ranked = sorted(
        cover.pairs,
        key=lambda pair: (
            -(target.mass(pair[0]) + target.mass(pair[1])),
            min(pair[0].index, pair[1].index),
            max(pair[0].index, pair[1].index),
        ),
    )
    return [orient_pair(u, v) for u, v in ranked]


def _log_expm1(x: float) -> float:
    """log(e^x - 1) for x > 0 without overflow."""
    return x + math.log(-math.expm1(-x))


@dataclass(frozen=True)
class SynthesisReport:
    """
    Outcome of an RBM synthesis.

    Attributes:
        target: The floored, renormalized target
        achieved: Exact marginal of the synthesized model
        kl: KL(target || achieved)
        sharpness: The base scale a
        unit_sharpness: Scale of every hidden unit, in pair order
        lambdas: (λ1, λ2) of every hidden unit, in pair order
        pairs: The cover pairs, in the order they were placed
        baseline_log_ratio: Final visible bias on the first pair's flip unit
        calibrated: Whether refinement sweeps were requested
        calibration_sweeps: Number of refinement sweeps run
        residual: Largest anchored mass residual over calibrated members
    """

    target: DiscreteDistribution
    achieved: DiscreteDistribution
    kl: float
    sharpness: float
    unit_sharpness: tuple[float, ...]
    lambdas: tuple[tuple[float, float], ...]
    pairs: tuple[OrientedPair, ...]
    baseline_log_ratio: float
    calibrated: bool
    calibration_sweeps: int
    residual: float

    @property
    def hidden_units(self) -> int:
        return len(self.lambdas)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kl": self.kl,
            "sharpness": self.sharpness,
            "unit_sharpness": list(self.unit_sharpness),
            "lambdas": [list(values) for values in self.lambdas],
            "pairs": [[p.lower.index, p.upper.index] for p in self.pairs],
            "baseline_log_ratio": self.baseline_log_ratio,
            "calibrated": self.calibrated,
            "calibration_sweeps": self.calibration_sweeps,
            "residual": self.residual,
            "hidden_units": self.hidden_units,
        }


class _Calibrator:
    """
    Holds the model under construction and solves its λ values.

    Every member u of a placed pair should carry mass t(u)·s, where s is
    fixed by the lower member of the first pair. A unit's own factor at
    its member is exactly 1 + e^λ, so the solve for λ is closed form
    given the log mass R(u) contributed by everything else.
    """

    def __init__(
        self,
        target: DiscreteDistribution,
        pairs: list[OrientedPair],
        sharpness: float,
    ) -> None:
        self.n = target.n
        self.pairs = pairs
        self.sharpness = sharpness
        with np.errstate(divide="ignore"):
            self.log_target = np.log(target.probs)
        first = pairs[0]
        ratio = target.mass(first.upper) / target.mass(first.lower)
        self.visible_bias = np.array(init_rbm0(first, ratio, sharpness).visible_bias)
        self.units: list[PairUnitWeights] = []
        self.pinned: set[int] = set()

    def model(self) -> RbmModel:
        model = RbmModel.from_biases(self.visible_bias)
        for unit in self.units:
            model = add_pair_unit(model, unit)
        return model

    def _log_anchor(self, log_weights: np.ndarray) -> float:
        anchor = self.pairs[0].lower.index
        return float(log_weights[anchor] - self.log_target[anchor])

    def _solve(self, log_rest: np.ndarray, log_anchor: float, state: int) -> float:
        x = log_anchor + self.log_target[state] - log_rest[state]
        if x <= 0.0:
            # already heavy enough with a unit factor
            self.pinned.add(state)
            return -self.sharpness / 2.0
        return _log_expm1(float(x))

    def _fit(self, pair: OrientedPair, log_rest: np.ndarray) -> PairUnitWeights:
        log_anchor = self._log_anchor(log_rest)
        lambda1 = self._solve(log_rest, log_anchor, pair.lower.index)
        lambda2 = self._solve(log_rest, log_anchor, pair.upper.index)
        unit_sharpness = self.sharpness + 2.0 * max(lambda1, lambda2, 0.0)
        return PairUnitWeights(pair, unit_sharpness, lambda1, lambda2)

    def _fix_ratio(self, log_weights: np.ndarray) -> np.ndarray:
        first = self.pairs[0]
        desired = (
            self.log_target[first.upper.index] - self.log_target[first.lower.index]
        )
        current = log_weights[first.upper.index] - log_weights[first.lower.index]
        shift = float(desired - current)
        self.visible_bias[first.j - 1] += shift
        on = (np.arange(log_weights.shape[0]) >> (first.j - 1)) & 1
        return log_weights + shift * on

    def initial_pass(self) -> None:
        """Place pairs 2..k one at a time against the model built so far."""
        self.pinned.clear()
        log_weights = rbm_log_weights(self.model())
        for pair in self.pairs[1:]:
            unit = self._fit(pair, log_weights)
            log_weights = log_weights + unit_log_factors(unit.weights, unit.bias)
            self.units.append(unit)

    def sweep(self) -> None:
        """Re-solve every λ once against the current exact marginal."""
        self.pinned.clear()
        log_weights = self._fix_ratio(rbm_log_weights(self.model()))
        for position, unit in enumerate(self.units):
            log_rest = log_weights - unit_log_factors(unit.weights, unit.bias)
            refit = self._fit(unit.pair, log_rest)
            log_weights = log_rest + unit_log_factors(refit.weights, refit.bias)
            self.units[position] = refit

    def residuals(self) -> dict[int, float]:
        """|p(u) - t(u)·p(anchor)/t(anchor)| for every unpinned member."""
        log_weights = rbm_log_weights(self.model())
        log_probs = log_weights - logsumexp(log_weights)
        log_anchor = self._log_anchor(log_probs)
        residuals: dict[int, float] = {}
        for pair in self.pairs:
            for member in pair.members:
                state = member.index
                if state in self.pinned:
                    continue
                expected = math.exp(log_anchor + self.log_target[state])
                residuals[state] = abs(math.exp(log_probs[state]) - expected)
        return residuals


@synthesis_step("synthesize_rbm")
def synthesize_rbm(
    target: DiscreteDistribution,
    cover: PairCover | None = None,
    sharpness: float = DEFAULT_SHARPNESS,
    calibrate: bool = True,
    *,
    floor: float = TARGET_FLOOR,
    tolerance: float = CALIBRATION_TOLERANCE,
    max_sweeps: int = MAX_CALIBRATION_SWEEPS,
) -> tuple[RbmModel, SynthesisReport]:
    """
    Synthesize an RBM with k - 1 hidden units approximating target.

    Args:
        target: Distribution to approximate
        cover: Pair cover of the target's support; a minimal one is
            computed when omitted
        sharpness: Base scale a of the weights
        calibrate: Run refinement sweeps after the closed-form pass
        floor: Masses below this are raised to it before synthesis
        tolerance: Largest accepted anchored mass residual
        max_sweeps: Sweep budget for calibration

    Returns:
        The model and its synthesis report

    Raises:
        DegenerateDistributionError: If the target has empty support
        ArgumentError: If the cover misses part of the support or a
            parameter is out of range
        CalibrationError: If the sweeps do not reach the tolerance
    """
    _check_sharpness(sharpness)
    support = target.support()
    if not support:
        raise DegenerateDistributionError("target has empty support")
    if cover is None:
        cover = minimal_pair_cover(target)
    if cover.n != target.n:
        raise DimensionError(f"cover has {cover.n} units, target has {target.n}")
    if not cover.covers(support):
        raise ArgumentError("cover does not contain the target's support")

    floored = floor_and_normalize(target, floor)
    pairs = order_pairs(cover, floored)
    calibrator = _Calibrator(floored, pairs, sharpness)
    calibrator.initial_pass()
    residuals = calibrator.residuals()
    residual = max(residuals.values(), default=0.0)
    sweeps = 0
    if calibrate:
        while residual >= tolerance:
            if sweeps >= max_sweeps:
                logger.warning(
                    f"Calibration stopped after {sweeps} sweeps "
                    f"at residual {residual:.3e}"
                )
                raise CalibrationError(
                    f"calibration did not reach {tolerance:g} within {max_sweeps} "
                    f"sweeps (residual {residual:.3e})",
                    residuals,
                )
            calibrator.sweep()
            sweeps += 1
            residuals = calibrator.residuals()
            residual = max(residuals.values(), default=0.0)
            logger.debug(f"Calibration sweep {sweeps}: residual {residual:.3e}")

    model = calibrator.model()
    achieved = rbm_marginal(model)
    report = SynthesisReport(
        target=floored,
        achieved=achieved,
        kl=kl_divergence(floored, achieved),
        sharpness=sharpness,
        unit_sharpness=tuple(unit.sharpness for unit in calibrator.units),
        lambdas=tuple((unit.lambda1, unit.lambda2) for unit in calibrator.units),
        pairs=tuple(pairs),
        baseline_log_ratio=float(model.visible_bias[pairs[0].j - 1]),
        calibrated=calibrate,
        calibration_sweeps=sweeps,
        residual=residual,
    )
    logger.info(
        f"Synthesized RBM: n={target.n}, k={cover.k}, "
        f"hidden={model.n_hidden}, KL={report.kl:.3e}"
    )
    return model, report
