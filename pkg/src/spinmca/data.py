"""Datasets, offline training, weight quantization and the weight-file format.

Weight file
-----------
A JSON document::

    {
      "format": "spinmca-weights",
      "version": 1,
      "topology": [784, 500, 10],
      "bias": true,
      "metadata": {"seed": 0, "epochs": 20, ...},
      "layers": [
        {"shape": [785, 500], "w_max": 0.83,
         "weights": [[...], ...],          # float, rows = inputs (+ bias row last)
         "levels": [[...], ...] | null}    # signed levels -31..31
      ]
    }

Floats are written with ``repr`` precision, so a save/load round trip is exact.
"""
import gzip
import json
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .crossbar import quantize_array
from .errors import ArgumentError, ParseError, RangeError, UnsupportedVersionError
from .network import Topology

FORMAT_NAME = "spinmca-weights"
FORMAT_VERSION = 1
IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
CIFAR_RECORD = 1 + 3 * 1024
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass
class Dataset:
    images: np.ndarray   # (N, width) float32 in [0, 1]
    labels: np.ndarray   # (N,) int64
    n_classes: int = 10

    def __post_init__(self):
        if self.images.ndim != 2 or len(self.images) != len(self.labels):
            raise ArgumentError("images must be (N, width) with one label per row")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise RangeError(f"labels outside 0..{self.n_classes - 1}")

    @property
    def width(self):
        return self.images.shape[1]

    def __len__(self):
        return len(self.labels)

    def head(self, n):
        return Dataset(self.images[:n], self.labels[:n], self.n_classes)


def _read_bytes(path):
    path = Path(path)
    data = path.read_bytes()
    if path.suffix == ".gz":
        data = gzip.decompress(data)
    return data


def load_mnist(images_path, labels_path):
    """Parse an IDX image/label file pair; pixels are scaled by 1/255."""
    raw = _read_bytes(images_path)
    if len(raw) < 16:
        raise ParseError(f"{images_path}: truncated IDX header")
    magic, count, rows, cols = struct.unpack(">IIII", raw[:16])
    if magic != IDX_IMAGES_MAGIC:
        raise ParseError(f"{images_path}: bad magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}")
    size = count * rows * cols
    if len(raw) - 16 != size:
        raise ParseError(f"{images_path}: expected {size} pixel bytes, found {len(raw) - 16}")
    pixels = np.frombuffer(raw, dtype=np.uint8, offset=16).reshape(count, rows * cols)

    raw = _read_bytes(labels_path)
    if len(raw) < 8:
        raise ParseError(f"{labels_path}: truncated IDX header")
    magic, n_labels = struct.unpack(">II", raw[:8])
    if magic != IDX_LABELS_MAGIC:
        raise ParseError(f"{labels_path}: bad magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}")
    if len(raw) - 8 != n_labels:
        raise ParseError(f"{labels_path}: expected {n_labels} label bytes, found {len(raw) - 8}")
    if n_labels != count:
        raise ParseError(f"{count} images but {n_labels} labels")
    labels = np.frombuffer(raw, dtype=np.uint8, offset=8).astype(np.int64)
    if labels.size and labels.max() > 9:
        raise ParseError(f"{labels_path}: label {labels.max()} outside 0..9")
    return Dataset((pixels / np.float32(255.0)).astype(np.float32), labels)


def load_cifar10_grayscale(batch_paths):
    """Parse CIFAR-10 binary batches and convert every image to luminance."""
    if isinstance(batch_paths, (str, Path)):
        batch_paths = [batch_paths]
    images, labels = [], []
    for path in batch_paths:
        raw = _read_bytes(path)
        if len(raw) == 0 or len(raw) % CIFAR_RECORD:
            raise ParseError(f"{path}: size {len(raw)} is not a multiple of the {CIFAR_RECORD}-byte record")
        rec = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR_RECORD)
        lab = rec[:, 0].astype(np.int64)
        if lab.max() > 9:
            raise RangeError(f"{path}: label {lab.max()} outside 0..9")
        rgb = rec[:, 1:].reshape(-1, 3, 1024).astype(np.float64)
        gray = (GRAY_WEIGHTS[0] * rgb[:, 0] + GRAY_WEIGHTS[1] * rgb[:, 1] + GRAY_WEIGHTS[2] * rgb[:, 2]) / 255.0
        images.append(np.clip(gray, 0.0, 1.0).astype(np.float32))
        labels.append(lab)
    return Dataset(np.concatenate(images), np.concatenate(labels))


MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}
CIFAR_FILES = {
    "train": [f"data_batch_{i}.bin" for i in range(1, 6)],
    "test": ["test_batch.bin"],
}


def _resolve(directory, name):
    p = Path(directory) / name
    if p.exists():
        return p
    gz = p.with_name(p.name + ".gz")
    if gz.exists():
        return gz
    raise FileNotFoundError(f"missing dataset file {p}")


def load_split(dataset, directory, split):
    """Load ``"train"`` or ``"test"`` for ``"mnist"`` / ``"cifar10"`` from standard file names."""
    if dataset == "mnist":
        img, lab = MNIST_FILES[split]
        return load_mnist(_resolve(directory, img), _resolve(directory, lab))
    if dataset == "cifar10":
        return load_cifar10_grayscale([_resolve(directory, f) for f in CIFAR_FILES[split]])
    raise ArgumentError(f"unknown dataset {dataset!r}")


@dataclass
class LayerWeights:
    weights: np.ndarray               # (inputs [+1 bias row], neurons) float64
    w_max: float = 0.0
    levels: np.ndarray = None         # (inputs [+1], neurons) int8, or None


@dataclass
class WeightFile:
    topology: tuple
    layers: list
    bias: bool = True
    metadata: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def __post_init__(self):
        topo = Topology(tuple(self.topology))
        self.topology = topo.sizes
        if len(self.layers) != len(topo.sizes) - 1:
            raise ParseError("layer count does not match topology")
        extra = 1 if self.bias else 0
        for (n, m), layer in zip(topo.layer_shapes, self.layers):
            if layer.weights.shape != (n + extra, m):
                raise ParseError(f"layer shape {layer.weights.shape} inconsistent with topology ({n + extra}, {m})")
            if layer.levels is not None and layer.levels.shape != layer.weights.shape:
                raise ParseError("levels shape differs from weights shape")

    @property
    def quantized(self):
        return all(layer.levels is not None for layer in self.layers)

    def to_json(self):
        doc = {
            "format": FORMAT_NAME,
            "version": self.version,
            "topology": list(self.topology),
            "bias": self.bias,
            "metadata": self.metadata,
            "layers": [{
                "shape": list(layer.weights.shape),
                "w_max": float(layer.w_max),
                "weights": layer.weights.astype(np.float64).tolist(),
                "levels": None if layer.levels is None else layer.levels.astype(int).tolist(),
            } for layer in self.layers],
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed weight file: {exc}") from None
        if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
            raise ParseError("not a spinmca weight file")
        if doc.get("version") != FORMAT_VERSION:
            raise UnsupportedVersionError(f"unsupported weight-file version {doc.get('version')!r} "
                                          f"(this build reads version {FORMAT_VERSION})")
        try:
            layers = []
            for entry in doc["layers"]:
                weights = np.array(entry["weights"], dtype=np.float64)
                if list(weights.shape) != list(entry["shape"]):
                    raise ParseError(f"weights shape {weights.shape} differs from declared {entry['shape']}")
                levels = entry.get("levels")
                if levels is not None:
                    levels = np.array(levels, dtype=np.int64)
                    if levels.shape != weights.shape or np.abs(levels).max(initial=0) > 31:
                        raise ParseError("corrupt level grid")
                    levels = levels.astype(np.int8)
                w_max = float(entry["w_max"])
                if levels is not None and not w_max > 0:
                    raise ParseError("w_max must be positive")
                layers.append(LayerWeights(weights, w_max, levels))
            return cls(tuple(doc["topology"]), layers, bool(doc["bias"]), doc.get("metadata", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"corrupt weight file: {exc!r}") from None


def save_weights(wf, path):
    Path(path).write_text(wf.to_json())


def load_weights(path):
    return WeightFile.from_json(Path(path).read_text())


def quantize_weights(wf):
    """Return a copy with per-layer ``w_max = max|w|`` and signed 31-level grids filled in."""
    layers = []
    for idx, layer in enumerate(wf.layers):
        w_max = float(np.abs(layer.weights).max()) if layer.weights.size else 0.0
        if w_max == 0.0:
            warnings.warn(f"layer {idx} is all zeros; using w_max = 1", UserWarning, stacklevel=2)
            w_max = 1.0
        layers.append(LayerWeights(layer.weights.copy(), w_max, quantize_array(layer.weights, w_max)))
    return WeightFile(wf.topology, layers, wf.bias, dict(wf.metadata))


def dequantized_weights(wf):
    from .crossbar import dequantize
    return [dequantize(layer.levels, layer.w_max) for layer in wf.layers]


# ---------------------------------------------------------------------------
# training

def _sigmoid(a):
    return 0.5 * (1.0 + np.tanh(0.5 * a))


def float_forward(weights, x, bias=True):
    """Float reference forward pass; returns the output-layer pre-activations."""
    h = np.asarray(x)
    for idx, w in enumerate(weights):
        a = h @ w[:-1] + w[-1] if bias else h @ w
        if idx == len(weights) - 1:
            return a
        h = _sigmoid(a)


def float_accuracy(weights, dataset, bias=True, batch_size=2000):
    hits = 0
    for s in range(0, len(dataset), batch_size):
        logits = float_forward(weights, dataset.images[s:s + batch_size], bias)
        if logits.shape[1] == 1:
            pred = (logits[:, 0] > 0).astype(np.int64)
        else:
            pred = np.argmax(logits, axis=1)
        hits += int((pred == dataset.labels[s:s + batch_size]).sum())
    return hits / len(dataset)


def train_mlp(topology, dataset, lr=0.1, epochs=20, batch=64, seed=0, momentum=0.9,
              bias=True, log=None):
    """Minibatch SGD with momentum for a sigmoid MLP.

    Hidden layers use the logistic sigmoid. The loss head is softmax
    cross-entropy, or logistic cross-entropy when the output width is 1.
    Returns a :class:`WeightFile` whose metadata holds per-epoch mean losses.
    """
    topo = topology if isinstance(topology, Topology) else Topology(tuple(topology))
    if dataset.width != topo.sizes[0]:
        raise ArgumentError(f"dataset width {dataset.width} does not match input layer {topo.sizes[0]}")
    if len(dataset) == 0:
        raise ArgumentError("empty training set")
    rng = np.random.default_rng(seed)
    dtype = np.float32
    weights = []
    for n, m in topo.layer_shapes:
        limit = np.sqrt(6.0 / (n + m))
        w = rng.uniform(-limit, limit, size=(n + (1 if bias else 0), m)).astype(dtype)
        if bias:
            w[-1] = 0
        weights.append(w)
    velocity = [np.zeros_like(w) for w in weights]
    x_all = dataset.images.astype(dtype, copy=False)
    y_all = dataset.labels
    binary = topo.sizes[-1] == 1
    losses = []
    for epoch in range(epochs):
        order = rng.permutation(len(dataset))
        total = 0.0
        for start in range(0, len(order), batch):
            idx = order[start:start + batch]
            xb, yb = x_all[idx], y_all[idx]
            acts = [xb]
            for li, w in enumerate(weights):
                a = acts[-1] @ w[:-1] + w[-1] if bias else acts[-1] @ w
                acts.append(a if li == len(weights) - 1 else _sigmoid(a))
            logits = acts[-1]
            if binary:
                p = _sigmoid(logits[:, 0])
                t = yb.astype(dtype)
                eps = 1e-12
                total += float(-np.sum(t * np.log(p + eps) + (1 - t) * np.log(1 - p + eps)))
                delta = ((p - t) / len(idx))[:, None].astype(dtype)
            else:
                z = logits - logits.max(axis=1, keepdims=True)
                ez = np.exp(z)
                probs = ez / ez.sum(axis=1, keepdims=True)
                total += float(-np.sum(np.log(probs[np.arange(len(idx)), yb] + 1e-12)))
                probs[np.arange(len(idx)), yb] -= 1
                delta = (probs / len(idx)).astype(dtype)
            for li in range(len(weights) - 1, -1, -1):
                h = acts[li]
                grad = np.empty_like(weights[li])
                if bias:
                    grad[:-1] = h.T @ delta
                    grad[-1] = delta.sum(axis=0)
                    back = delta @ weights[li][:-1].T
                else:
                    grad[:] = h.T @ delta
                    back = delta @ weights[li].T
                if li > 0:
                    delta = back * h * (1 - h)
                velocity[li] *= momentum
                velocity[li] -= lr * grad
                weights[li] += velocity[li]
        losses.append(total / len(order))
        if log:
            log(epoch + 1, losses[-1])
    layers = [LayerWeights(w.astype(np.float64)) for w in weights]
    meta = {"seed": seed, "epochs": epochs, "lr": lr, "batch": batch, "momentum": momentum,
            "losses": losses}
    return WeightFile(topo.sizes, layers, bias, meta)
