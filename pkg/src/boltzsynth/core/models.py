"""
Model definitions for boltzsynth.

This module defines the restricted Boltzmann machine, the directed sigmoid
layer and the deep belief network assembled from them. All models are
immutable; builders return new instances.
"""

from dataclasses import dataclass, field

import numpy as np

from ..systems.error_handling import DimensionError, NumericError
from .bitvector import check_width


def _frozen(values: object, ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    if array.ndim != ndim:
        raise DimensionError(f"{name} must have {ndim} dimension(s), got {array.ndim}")
    if not np.all(np.isfinite(array)):
        raise NumericError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class RbmModel:
    """
    A restricted Boltzmann machine p(v, h) ∝ exp(hᵀWv + B·v + C·h).

    Attributes:
        weights: m×n matrix W; row k couples hidden unit k to the visibles
        visible_bias: Length-n vector B
        hidden_bias: Length-m vector C
    """

    weights: np.ndarray
    visible_bias: np.ndarray
    hidden_bias: np.ndarray

    def __post_init__(self) -> None:
        visible_bias = _frozen(self.visible_bias, 1, "visible_bias")
        check_width(visible_bias.shape[0])
        hidden_bias = _frozen(self.hidden_bias, 1, "hidden_bias")
        weights = np.array(self.weights, dtype=np.float64)
        if weights.size == 0:
            weights = np.zeros((hidden_bias.shape[0], visible_bias.shape[0]))
        weights = _frozen(weights, 2, "weights")
        if weights.shape != (hidden_bias.shape[0], visible_bias.shape[0]):
            raise DimensionError(
                f"weights shape {weights.shape} does not match "
                f"{hidden_bias.shape[0]} hidden and "
                f"{visible_bias.shape[0]} visible units"
            )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "visible_bias", visible_bias)
        object.__setattr__(self, "hidden_bias", hidden_bias)

    @classmethod
    def from_biases(cls, visible_bias: np.ndarray) -> "RbmModel":
        """An RBM with no hidden units (RBM⁰)."""
        n = len(visible_bias)
        return cls(np.zeros((0, n)), visible_bias, np.zeros(0))

    @classmethod
    def zeros(cls, n_visible: int, n_hidden: int = 0) -> "RbmModel":
        return cls(
            np.zeros((n_hidden, n_visible)), np.zeros(n_visible), np.zeros(n_hidden)
        )

    @property
    def n_visible(self) -> int:
        return int(self.visible_bias.shape[0])

    @property
    def n_hidden(self) -> int:
        return int(self.hidden_bias.shape[0])

    def with_hidden_unit(self, weights: np.ndarray, bias: float) -> "RbmModel":
        """Return a copy extended by one hidden unit."""
        row = np.asarray(weights, dtype=np.float64).reshape(1, -1)
        if row.shape[1] != self.n_visible:
            raise DimensionError(
                f"hidden unit has {row.shape[1]} weights, "
                f"model has {self.n_visible} visible units"
            )
        return RbmModel(
            np.vstack([self.weights, row]),
            self.visible_bias,
            np.append(self.hidden_bias, bias),
        )

    def padded(self, n_hidden: int) -> "RbmModel":
        """
        Append zero-weight hidden units up to n_hidden.

        A zero unit scales every state by the same factor 2, so the
        visible marginal is unchanged.
        """
        extra = n_hidden - self.n_hidden
        if extra < 0:
            raise DimensionError(
                f"cannot pad {self.n_hidden} hidden units down to {n_hidden}"
            )
        return RbmModel(
            np.vstack([self.weights, np.zeros((extra, self.n_visible))]),
            self.visible_bias,
            np.append(self.hidden_bias, np.zeros(extra)),
        )


@dataclass(frozen=True, eq=False)
class SigmoidLayer:
    """
    A directed layer with P(v_l = 1 | h) = logistic(c_l + Σ_k w_kl h_k).

    Attributes:
        weights: n_in×n_out matrix; weights[k, l] couples input k to output l
        offsets: Length-n_out vector of output offsets
    """

    weights: np.ndarray
    offsets: np.ndarray

    def __post_init__(self) -> None:
        weights = _frozen(self.weights, 2, "weights")
        offsets = _frozen(self.offsets, 1, "offsets")
        if weights.shape[1] != offsets.shape[0]:
            raise DimensionError(
                f"weights shape {weights.shape} does not match "
                f"{offsets.shape[0]} offsets"
            )
        check_width(weights.shape[0])
        check_width(offsets.shape[0])
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def copy_layer(cls, n: int, sharpness: float) -> "SigmoidLayer":
        """Identity wiring: w_ll = 2T and c_l = -T on every unit."""
        return cls(np.eye(n) * (2.0 * sharpness), np.full(n, -sharpness))

    @property
    def n_in(self) -> int:
        return int(self.weights.shape[0])

    @property
    def n_out(self) -> int:
        return int(self.weights.shape[1])


@dataclass(frozen=True, eq=False)
class DbnModel:
    """
    A deep belief network: a top RBM followed by directed layers.

    The top RBM's visible layer is the first layer fed to the directed
    stack; layers are applied in order toward the visible layer.

    Attributes:
        top: RBM coupling the two highest layers
        layers: Directed layers, top first
    """

    top: RbmModel
    layers: tuple[SigmoidLayer, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        layers = tuple(self.layers)
        width = self.top.n_visible
        for position, layer in enumerate(layers):
            if layer.n_in != width or layer.n_out != width:
                raise DimensionError(
                    f"layer {position} is {layer.n_in}->{layer.n_out}, "
                    f"expected {width}->{width}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def width(self) -> int:
        return self.top.n_visible

    @property
    def hidden_layer_count(self) -> int:
        """Hidden layers above the visible layer: the top pair adds one."""
        return len(self.layers) + 1
