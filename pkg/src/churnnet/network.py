"""Feed-forward sigmoid network trained by online back-propagation with momentum.

Everything here is written out explicitly: forward signal propagation,
error signals per node, and the momentum weight/threshold update rule.
``numeric_gradient`` provides an independent central-difference gradient
used by the tests to verify the analytic updates.

Layer indexing convention: ``layer_sizes = [n_in, h1, ..., n_out]``.
``weights[k]`` has shape ``(layer_sizes[k], layer_sizes[k+1])`` and maps
activations of layer ``k`` to pre-activations of layer ``k+1``;
``thresholds[k]`` is the additive bias vector of layer ``k+1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError

# Pre-activations are clamped to this magnitude before exponentiation so the
# transfer function saturates instead of overflowing.
SIGMOID_CLAMP = 500.0


def sigmoid(x):
    """Logistic transfer function 1 / (1 + e^-x); accepts scalars or arrays."""
    z = np.clip(x, -SIGMOID_CLAMP, SIGMOID_CLAMP)
    return 1.0 / (1.0 + np.exp(-z))


@dataclass
class Network:
    """Weights, biases and the previous-update buffers used by momentum.

    ``prev_weight_update`` / ``prev_threshold_update`` hold the total change
    applied to each parameter by the most recent update step; a freshly
    initialized network has them at zero.
    """

    layer_sizes: list[int]
    weights: list[np.ndarray]
    thresholds: list[np.ndarray]
    prev_weight_update: list[np.ndarray] = field(default_factory=list)
    prev_threshold_update: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not self.prev_weight_update:
            self.prev_weight_update = [np.zeros_like(w) for w in self.weights]
        if not self.prev_threshold_update:
            self.prev_threshold_update = [np.zeros_like(t) for t in self.thresholds]

    @property
    def n_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(t.size for t in self.thresholds)

    def copy(self) -> "Network":
        """Deep copy, momentum buffers included."""
        return Network(
            list(self.layer_sizes),
            [w.copy() for w in self.weights],
            [t.copy() for t in self.thresholds],
            [w.copy() for w in self.prev_weight_update],
            [t.copy() for t in self.prev_threshold_update],
        )

    def all_finite(self) -> bool:
        return all(np.isfinite(w).all() for w in self.weights) and all(
            np.isfinite(t).all() for t in self.thresholds
        )


@dataclass
class Activations:
    """Per-layer node outputs of one forward pass; ``layers[0]`` is the input."""

    layers: list[np.ndarray]

    @property
    def output(self) -> np.ndarray:
        return self.layers[-1]


@dataclass
class Deltas:
    """Per-node error signals for every non-input layer, plus the target.

    ``layers[k]`` belongs to network layer ``k + 1`` (same alignment as
    ``Network.weights``).
    """

    layers: list[np.ndarray]
    target: np.ndarray


@dataclass
class LearningParams:
    """Learning rate and momentum constant for the update rule."""

    eta: float = 0.3
    alpha: float = 0.9

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError(f"eta must be in (0, 1], got {self.eta}")
        if not 0.0 <= self.alpha < 1.0:
            raise ConfigError(f"alpha must be in [0, 1), got {self.alpha}")


def init_network(layer_sizes, seed: int) -> Network:
    """Build a network with weights and thresholds drawn uniform on [-0.5, 0.5].

    The draw order is fixed (per layer: weight matrix, then thresholds) so a
    given seed always produces the identical network.
    """
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ConfigError(f"need at least input and output layers, got {sizes}")
    if any(s < 1 for s in sizes):
        raise ConfigError(f"layer sizes must be positive, got {sizes}")
    rng = np.random.default_rng(seed)
    weights, thresholds = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.uniform(-0.5, 0.5, size=(n_in, n_out)))
        thresholds.append(rng.uniform(-0.5, 0.5, size=n_out))
    return Network(sizes, weights, thresholds)


def forward(net: Network, inputs) -> Activations:
    """Propagate one input vector through every layer."""
    x = np.asarray(inputs, dtype=float)
    if x.shape != (net.layer_sizes[0],):
        raise ShapeError(
            f"input has shape {x.shape}, network expects ({net.layer_sizes[0]},)"
        )
    layers = [x]
    for w, th in zip(net.weights, net.thresholds):
        layers.append(sigmoid(layers[-1] @ w + th))
    return Activations(layers)


def forward_batch(net: Network, x) -> np.ndarray:
    """Forward pass for a whole matrix of inputs, one row per example.

    Returns the output-layer activations, shape ``(n_rows, n_out)``. Used for
    scoring and evaluation; training always goes through :func:`forward`.
    """
    a = np.asarray(x, dtype=float)
    if a.ndim != 2 or a.shape[1] != net.layer_sizes[0]:
        raise ShapeError(
            f"batch has shape {a.shape}, network expects (*, {net.layer_sizes[0]})"
        )
    for w, th in zip(net.weights, net.thresholds):
        a = sigmoid(a @ w + th)
    return a


def output_deltas(acts: Activations, target) -> np.ndarray:
    """Error signal of each output node: y (1 - y) (target - y)."""
    t = np.asarray(target, dtype=float)
    y = acts.output
    if t.shape != y.shape:
        raise ShapeError(f"target has shape {t.shape}, output is {y.shape}")
    return y * (1.0 - y) * (t - y)


def hidden_deltas(net: Network, acts: Activations, downstream, layer: int) -> np.ndarray:
    """Error signal for hidden ``layer`` given the deltas of ``layer + 1``.

    The transfer-function derivative is taken from the stored activation,
    y (1 - y), so no pre-activation values need to be kept around.
    """
    d = np.asarray(downstream, dtype=float)
    w = net.weights[layer]
    if d.shape != (w.shape[1],):
        raise ShapeError(
            f"downstream deltas have shape {d.shape}, expected ({w.shape[1]},)"
        )
    y = acts.layers[layer]
    return y * (1.0 - y) * (w @ d)


def backward(net: Network, acts: Activations, target) -> Deltas:
    """Compute deltas for every non-input layer, output first, then backward."""
    t = np.asarray(target, dtype=float)
    per_layer = [output_deltas(acts, t)]
    for layer in range(len(net.layer_sizes) - 2, 0, -1):
        per_layer.insert(0, hidden_deltas(net, acts, per_layer[0], layer))
    return Deltas(per_layer, t)


def apply_updates(net: Network, acts: Activations, deltas: Deltas, params: LearningParams) -> Network:
    """Apply the momentum update to every weight and threshold, in place.

    Each parameter moves by eta * delta * upstream_activation plus alpha times
    whatever it moved last step; the buffers then record the total change just
    applied. All deltas were computed from the pre-update weights, so the
    whole network updates as one step.
    """
    for k in range(len(net.weights)):
        dw = params.eta * np.outer(acts.layers[k], deltas.layers[k])
        dw += params.alpha * net.prev_weight_update[k]
        net.weights[k] += dw
        net.prev_weight_update[k] = dw

        dt = params.eta * deltas.layers[k] + params.alpha * net.prev_threshold_update[k]
        net.thresholds[k] += dt
        net.prev_threshold_update[k] = dt
    return net


def squared_error(output, target) -> float:
    """Half the summed squared difference between target and output."""
    d = np.asarray(target, dtype=float) - np.asarray(output, dtype=float)
    return 0.5 * float(d @ d)


def train_example(net: Network, inputs, target, params: LearningParams) -> float:
    """One full learning step on a single example; returns its squared error.

    Forward pass, output and hidden error signals, then the momentum update.
    The returned error is measured on the pre-update forward pass.
    """
    acts = forward(net, inputs)
    err = squared_error(acts.output, target)
    deltas = backward(net, acts, target)
    apply_updates(net, acts, deltas, params)
    return err


def numeric_gradient(net: Network, inputs, target, epsilon: float = 1e-5):
    """Central-difference gradient of the squared error for every parameter.

    Returns ``(weight_grads, threshold_grads)`` mirroring the shapes of
    ``net.weights`` and ``net.thresholds``. Purely a verification oracle:
    it perturbs each parameter by +/- epsilon and never uses the deltas.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ConfigError(f"epsilon must be in [1e-7, 1e-3], got {epsilon}")

    def loss() -> float:
        return squared_error(forward(net, inputs).output, target)

    weight_grads = []
    for w in net.weights:
        g = np.zeros_like(w)
        it = np.nditer(w, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            orig = w[i]
            w[i] = orig + epsilon
            hi = loss()
            w[i] = orig - epsilon
            lo = loss()
            w[i] = orig
            g[i] = (hi - lo) / (2.0 * epsilon)
        weight_grads.append(g)

    threshold_grads = []
    for t in net.thresholds:
        g = np.zeros_like(t)
        for i in range(t.size):
            orig = t[i]
            t[i] = orig + epsilon
            hi = loss()
            t[i] = orig - epsilon
            lo = loss()
            t[i] = orig
            g[i] = (hi - lo) / (2.0 * epsilon)
        threshold_grads.append(g)

    return weight_grads, threshold_grads
