"""Minimal dense feed-forward network engine with hand-derived gradients.

Everything runs on float64 numpy arrays. Matrices are row-major
(samples, features). The engine supports relu hidden layers and linear
output layers, which is all the autoencoders in this package need.

forward/backward are pure functions; AdamState is mutated only by
adam_step, so a single training loop owns it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Array = np.ndarray

ACTIVATIONS = ("relu", "linear")


def as_matrix(values, name: str = "matrix") -> Array:
    """Coerce to a finite 2-D float64 array."""
    out = np.asarray(values, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {out.shape}")
    if not np.isfinite(out).all():
        raise ValueError(f"{name} contains non-finite entries")
    return out


def relu(x: Array) -> Array:
    return np.maximum(x, 0.0)


@dataclass
class Layer:
    weight: Array  # (fan_in, fan_out)
    bias: Array    # (fan_out,)
    activation: str

    def __post_init__(self) -> None:
        if self.activation not in ACTIVATIONS:
            raise ValueError(
                f"unknown activation {self.activation!r}, expected one of {ACTIVATIONS}"
            )
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weight.ndim != 2:
            raise ValueError(f"layer weight must be 2-D, got shape {self.weight.shape}")
        if self.bias.shape != (self.weight.shape[1],):
            raise ValueError(
                f"bias shape {self.bias.shape} does not match weight fan-out "
                f"{self.weight.shape[1]}"
            )
        if not (np.isfinite(self.weight).all() and np.isfinite(self.bias).all()):
            raise ValueError("layer parameters contain non-finite entries")


@dataclass
class DenseNet:
    layers: list[Layer]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValueError("DenseNet needs at least one layer")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.weight.shape[1] != nxt.weight.shape[0]:
                raise ValueError(
                    f"layer dimensions do not chain: {prev.weight.shape[1]} -> "
                    f"{nxt.weight.shape[0]}"
                )

    @property
    def input_dim(self) -> int:
        return self.layers[0].weight.shape[0]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].weight.shape[1]


def init_dense_net(
    dims: list[int] | tuple[int, ...],
    rng: np.random.Generator,
    output_activation: str = "linear",
) -> DenseNet:
    """Build a relu net with the given dimension chain.

    Weights are uniform in +-1/sqrt(fan_in), biases zero; hidden layers use
    relu and the last layer uses `output_activation`.
    """
    if len(dims) < 2:
        raise ValueError("need an input and an output dimension")
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(dims, dims[1:])):
        bound = 1.0 / np.sqrt(fan_in)
        weight = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        act = output_activation if i == len(dims) - 2 else "relu"
        layers.append(Layer(weight, np.zeros(fan_out), act))
    return DenseNet(layers)


def _apply(activation: str, z: Array) -> Array:
    return relu(z) if activation == "relu" else z


def _forward_cached(net: DenseNet, x: Array) -> tuple[Array, list[Array], list[Array]]:
    """Forward pass keeping per-layer inputs and pre-activations."""
    inputs = [x]
    pre = []
    a = x
    for layer in net.layers:
        z = a @ layer.weight + layer.bias
        pre.append(z)
        a = _apply(layer.activation, z)
        inputs.append(a)
    return a, inputs, pre


def forward(net: DenseNet, x: Array) -> Array:
    """Evaluate the network on a batch, returning the final activations."""
    x = as_matrix(x, "input")
    if x.shape[1] != net.input_dim:
        raise ValueError(
            f"input has {x.shape[1]} columns but the first layer expects {net.input_dim}"
        )
    out, _, _ = _forward_cached(net, x)
    return out


def backward(net: DenseNet, x: Array, loss_grad: Array) -> tuple[list[Array], Array]:
    """Backpropagate `loss_grad` (dL/d output) through the network.

    Returns (param_grads, input_grad) where param_grads is the flat list
    [dW0, db0, dW1, db1, ...] matching net_params(net), and input_grad is
    dL/dx for chaining into an upstream network.
    """
    x = as_matrix(x, "input")
    if x.shape[1] != net.input_dim:
        raise ValueError(
            f"input has {x.shape[1]} columns but the first layer expects {net.input_dim}"
        )
    loss_grad = np.asarray(loss_grad, dtype=np.float64)
    out, inputs, pre = _forward_cached(net, x)
    if loss_grad.shape != out.shape:
        raise ValueError(
            f"loss gradient shape {loss_grad.shape} does not match output shape {out.shape}"
        )
    grads: list[Array] = [np.empty(0)] * (2 * len(net.layers))
    delta = loss_grad
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        if layer.activation == "relu":
            delta = delta * (pre[i] > 0)
        grads[2 * i] = inputs[i].T @ delta
        grads[2 * i + 1] = delta.sum(axis=0)
        delta = delta @ layer.weight.T
    return grads, delta


def net_params(net: DenseNet) -> list[Array]:
    """Flat list of parameter arrays, [W0, b0, W1, b1, ...], by reference."""
    out: list[Array] = []
    for layer in net.layers:
        out.append(layer.weight)
        out.append(layer.bias)
    return out


def net_param_names(net: DenseNet, prefix: str = "net") -> list[str]:
    names = []
    for i in range(len(net.layers)):
        names.append(f"{prefix}.layer{i}.weight")
        names.append(f"{prefix}.layer{i}.bias")
    return names


@dataclass
class AdamState:
    """Bias-corrected adaptive-moment optimizer state for a parameter list."""

    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    first_moment: list[Array] = field(default_factory=list)
    second_moment: list[Array] = field(default_factory=list)


def init_adam(params: list[Array], learning_rate: float, **kwargs) -> AdamState:
    state = AdamState(learning_rate=learning_rate, **kwargs)
    state.first_moment = [np.zeros_like(p) for p in params]
    state.second_moment = [np.zeros_like(p) for p in params]
    return state


def adam_step(
    params: list[Array],
    grads: list[Array],
    state: AdamState,
    names: list[str] | None = None,
) -> None:
    """Apply one in-place update to every parameter array."""
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise ValueError("parameter, gradient and state lists must have equal length")
    for i, g in enumerate(grads):
        if not np.isfinite(g).all():
            name = names[i] if names is not None else f"parameter {i}"
            raise FloatingPointError(f"non-finite gradient for {name}")
        if g.shape != params[i].shape:
            raise ValueError(
                f"gradient shape {g.shape} does not match parameter shape {params[i].shape}"
            )
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * np.square(g)
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        p -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
