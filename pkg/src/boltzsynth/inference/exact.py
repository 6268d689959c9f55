"""
Exact inference by enumeration.

Every mass is handled in natural-log space and reduced with log-sum-exp.
States are visited in ascending index order in fixed-size blocks, so the
results are reproducible to the bit.
"""

import logging

import numpy as np
from scipy.special import expit, log_expit, logsumexp

from ..core.bitvector import BitVector, bits_of, check_width, state_matrix
from ..core.distribution import DiscreteDistribution
from ..core.models import DbnModel, RbmModel, SigmoidLayer
from ..systems.error_handling import DimensionError, SizeError, synthesis_step
from ..utils.constants import MATERIALIZE_LIMIT, MAX_UNITS, TRANSITION_BLOCK_ELEMENTS

logger = logging.getLogger(__name__)


def _block_rows(row_width: int) -> int:
    return max(1, TRANSITION_BLOCK_ELEMENTS // max(1, row_width))


def distribution_from_log(n: int, log_weights: np.ndarray) -> DiscreteDistribution:
    """Normalize a table of log weights into a distribution."""
    probs = np.exp(log_weights - logsumexp(log_weights))
    return DiscreteDistribution(n, probs / probs.sum())


def rbm_log_weights(model: RbmModel) -> np.ndarray:
    """
    Log of the unnormalized visible marginal of an RBM.

    Entry v is B·v + Σ_k log(1 + exp(w_k·v + c_k)), the analytic sum over
    hidden states of exp(hᵀWv + B·v + C·h).

    Raises:
        SizeError: If the visible layer exceeds the enumeration cap
    """
    n = model.n_visible
    check_width(n)
    total = 1 << n
    log_weights = np.empty(total)
    block = _block_rows(n + model.n_hidden)
    for start in range(0, total, block):
        stop = min(total, start + block)
        states = state_matrix(n, start, stop)
        values = states @ model.visible_bias
        if model.n_hidden:
            activations = states @ model.weights.T + model.hidden_bias
            values = values + np.logaddexp(0.0, activations).sum(axis=1)
        log_weights[start:stop] = values
    return log_weights


def unit_log_factors(weights: np.ndarray, bias: float) -> np.ndarray:
    """log(1 + exp(w·v + c)) at every visible state v, for one hidden unit."""
    n = weights.shape[0]
    check_width(n)
    total = 1 << n
    factors = np.empty(total)
    block = _block_rows(n)
    for start in range(0, total, block):
        stop = min(total, start + block)
        activations = state_matrix(n, start, stop) @ weights + bias
        factors[start:stop] = np.logaddexp(0.0, activations)
    return factors


@synthesis_step("rbm_marginal")
def rbm_marginal(model: RbmModel) -> DiscreteDistribution:
    """Exact visible marginal of an RBM."""
    return distribution_from_log(model.n_visible, rbm_log_weights(model))


def rbm_joint_bruteforce(model: RbmModel) -> DiscreteDistribution:
    """
    Exact joint table over (v, h) by direct enumeration.

    The joint state index is v | (h << n_visible), so reshaping the table
    to (2**m, 2**n) puts hidden states on rows and visible states on
    columns.

    Raises:
        SizeError: If n_visible + n_hidden exceeds the enumeration cap
    """
    n, m = model.n_visible, model.n_hidden
    if n + m > MAX_UNITS:
        raise SizeError(f"joint width {n + m} exceeds the cap of {MAX_UNITS} units")
    visible = state_matrix(n)
    hidden = state_matrix(m) if m else np.zeros((1, 0))
    log_joint = (
        (hidden @ model.weights) @ visible.T
        + (visible @ model.visible_bias)[None, :]
        + (hidden @ model.hidden_bias)[:, None]
    )
    return distribution_from_log(n + m, log_joint.ravel())


def marginalize_hidden(joint: DiscreteDistribution, n_visible: int) -> np.ndarray:
    """Sum a joint table from rbm_joint_bruteforce over its hidden states."""
    if not 1 <= n_visible <= joint.n:
        raise DimensionError(f"cannot split {joint.n} units at {n_visible}")
    return joint.probs.reshape(-1, 1 << n_visible).sum(axis=0)


def layer_activations(layer: SigmoidLayer, inputs: np.ndarray) -> np.ndarray:
    """Pre-sigmoid activations for a matrix of input unit values."""
    return inputs @ layer.weights + layer.offsets


def layer_conditional(layer: SigmoidLayer, h: BitVector) -> np.ndarray:
    """
    P(v_l = 1 | h) for every output unit l.

    Raises:
        DimensionError: If h does not match the layer's input width
    """
    if h.n != layer.n_in:
        raise DimensionError(f"input has {h.n} units, layer expects {layer.n_in}")
    return np.asarray(expit(layer_activations(layer, h.as_array()[None, :])[0]))


def _log_transition_rows(
    layer: SigmoidLayer, inputs: np.ndarray, outputs: np.ndarray
) -> np.ndarray:
    """log P(v | h) for each input row h against every output state v."""
    activations = layer_activations(layer, inputs)
    return log_expit(activations) @ outputs.T + log_expit(-activations) @ (
        1.0 - outputs
    ).T


def _log_product_row(log_on: np.ndarray, log_off: np.ndarray) -> np.ndarray:
    """Log table of a product distribution, unit 1 in the lowest bit."""
    table = np.zeros(1)
    for on, off in zip(log_on, log_off, strict=True):
        table = np.concatenate([table + off, table + on])
    return table


def propagate_log(log_probs: np.ndarray, layer: SigmoidLayer) -> np.ndarray:
    """
    Push log masses over the layer inputs through the layer.

    Inputs with zero mass are skipped. Layers up to MATERIALIZE_LIMIT
    output units use blocks of the transition matrix; wider layers
    build each input's factorized output row on its own.

    Returns:
        Unnormalized log masses over the layer outputs
    """
    n_in, n_out = layer.n_in, layer.n_out
    check_width(n_out)
    if log_probs.shape[0] != (1 << n_in):
        raise DimensionError(
            f"expected {1 << n_in} input masses, got {log_probs.shape[0]}"
        )
    live = np.flatnonzero(np.isfinite(log_probs))
    result = np.full(1 << n_out, -np.inf)
    if n_out <= MATERIALIZE_LIMIT:
        outputs = state_matrix(n_out)
        block = _block_rows(1 << n_out)
        for start in range(0, live.shape[0], block):
            rows = live[start : start + block]
            inputs = bits_of(rows, n_in)
            log_rows = _log_transition_rows(layer, inputs, outputs)
            log_rows += log_probs[rows, None]
            result = np.logaddexp(result, logsumexp(log_rows, axis=0))
        return result
    for row in live:
        activations = layer_activations(layer, bits_of(np.array([row]), n_in))[0]
        table = _log_product_row(log_expit(activations), log_expit(-activations))
        result = np.logaddexp(result, table + log_probs[row])
    return result


@synthesis_step("dbn_marginal")
def dbn_marginal(model: DbnModel) -> DiscreteDistribution:
    """
    Exact visible marginal of a DBN.

    The top RBM's marginal is propagated through each directed layer in
    log space and normalized once at the end.
    """
    log_probs = rbm_log_weights(model.top)
    log_probs = log_probs - logsumexp(log_probs)
    for position, layer in enumerate(model.layers):
        log_probs = propagate_log(log_probs, layer)
        logger.debug(f"Propagated layer {position + 1}/{len(model.layers)}")
    return distribution_from_log(model.width, log_probs)


def model_marginal(model: RbmModel | DbnModel) -> DiscreteDistribution:
    """Exact visible marginal of either model kind."""
    if isinstance(model, DbnModel):
        return dbn_marginal(model)
    return rbm_marginal(model)
