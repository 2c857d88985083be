import gzip
import json
import struct
import warnings

import numpy as np
import pytest

from spinmca.data import (CIFAR_RECORD, Dataset, LayerWeights, WeightFile, dequantized_weights,
                          float_accuracy, float_forward, load_cifar10_grayscale, load_mnist, load_split,
                          load_weights, quantize_weights, save_weights, train_mlp)
from spinmca.errors import ArgumentError, ParseError, RangeError, UnsupportedVersionError


def write_idx(tmp_path, images, labels, img_magic=0x803, lab_magic=0x801, gz=False):
    n, r, c = images.shape
    img = struct.pack(">IIII", img_magic, n, r, c) + images.astype(np.uint8).tobytes()
    lab = struct.pack(">II", lab_magic, len(labels)) + np.asarray(labels, np.uint8).tobytes()
    suffix = ".gz" if gz else ""
    pi, pl = tmp_path / f"img{suffix}", tmp_path / f"lab{suffix}"
    pi.write_bytes(gzip.compress(img) if gz else img)
    pl.write_bytes(gzip.compress(lab) if gz else lab)
    return pi, pl


@pytest.mark.parametrize("gz", [False, True])
def test_load_mnist(tmp_path, gz):
    rng = np.random.default_rng(0)
    images = rng.integers(0, 256, (5, 3, 4))
    images[0, 0, 0] = 255
    pi, pl = write_idx(tmp_path, images, [0, 1, 2, 9, 4], gz=gz)
    ds = load_mnist(pi, pl)
    assert ds.images.shape == (5, 12) and ds.images.dtype == np.float32
    np.testing.assert_allclose(ds.images, images.reshape(5, 12) / 255.0, rtol=1e-6)
    assert ds.images[0, 0] == 1.0
    assert ds.labels.tolist() == [0, 1, 2, 9, 4]


def test_mnist_errors(tmp_path):
    images = np.zeros((2, 2, 2))
    with pytest.raises(ParseError, match="magic"):
        load_mnist(*write_idx(tmp_path, images, [0, 1], img_magic=0x801))
    with pytest.raises(ParseError, match="magic"):
        load_mnist(*write_idx(tmp_path, images, [0, 1], lab_magic=0x803))
    with pytest.raises(ParseError):
        load_mnist(*write_idx(tmp_path, images, [0, 1, 2]))
    with pytest.raises(ParseError):
        load_mnist(*write_idx(tmp_path, images, [0, 12]))
    pi, pl = write_idx(tmp_path, images, [0, 1])
    pi.write_bytes(pi.read_bytes()[:-1])
    with pytest.raises(ParseError, match="pixel bytes"):
        load_mnist(pi, pl)
    pi.write_bytes(b"\x00\x00")
    with pytest.raises(ParseError, match="header"):
        load_mnist(pi, pl)


def _cifar_bytes(labels, rgb):
    return b"".join(bytes([lab]) + img.astype(np.uint8).tobytes() for lab, img in zip(labels, rgb))


def test_load_cifar_grayscale(tmp_path):
    rgb = np.zeros((3, 3, 1024), np.uint8)
    rgb[0] = 255
    rgb[1, 0] = 255
    rgb[2, 2] = 100
    p = tmp_path / "b.bin"
    p.write_bytes(_cifar_bytes([3, 0, 9], rgb))
    ds = load_cifar10_grayscale(p)
    assert ds.images.shape == (3, 1024)
    assert (ds.images[0] == 1.0).all()
    assert ds.images[1, 0] == pytest.approx(0.299)
    assert ds.images[2, 0] == pytest.approx(0.114 * 100 / 255)
    assert ds.labels.tolist() == [3, 0, 9]
    two = load_cifar10_grayscale([p, p])
    assert len(two) == 6


def test_cifar_errors(tmp_path):
    p = tmp_path / "b.bin"
    p.write_bytes(b"\x00" * (CIFAR_RECORD - 1))
    with pytest.raises(ParseError):
        load_cifar10_grayscale(p)
    p.write_bytes(_cifar_bytes([10], np.zeros((1, 3, 1024))))
    with pytest.raises(RangeError):
        load_cifar10_grayscale(p)


def test_load_split_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_split("mnist", tmp_path, "test")
    with pytest.raises(ArgumentError):
        load_split("svhn", tmp_path, "test")


def test_dataset_validation():
    with pytest.raises(RangeError):
        Dataset(np.zeros((1, 2), np.float32), np.array([11]))
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((2, 2), np.float32), np.array([1]))


XOR = Dataset(np.array([[0, 0], [0, 1], [1, 0], [1, 1]], np.float32), np.array([0, 1, 1, 0]), n_classes=2)


def test_train_xor():
    wf = train_mlp((2, 4, 1), XOR, lr=0.5, epochs=2000, batch=4, seed=1)
    assert float_accuracy([layer.weights for layer in wf.layers], XOR) == 1.0
    assert wf.metadata["losses"][-1] < wf.metadata["losses"][0]


def test_train_deterministic_and_lr_zero():
    a = train_mlp((2, 3, 2), XOR, epochs=5, seed=3)
    b = train_mlp((2, 3, 2), XOR, epochs=5, seed=3)
    for la, lb in zip(a.layers, b.layers):
        np.testing.assert_array_equal(la.weights, lb.weights)
    frozen = train_mlp((2, 3, 2), XOR, lr=0.0, epochs=0, seed=3)
    idle = train_mlp((2, 3, 2), XOR, lr=0.0, epochs=4, seed=3)
    for la, lb in zip(frozen.layers, idle.layers):
        np.testing.assert_array_equal(la.weights, lb.weights)


def test_train_width_mismatch():
    with pytest.raises(ArgumentError):
        train_mlp((3, 2), XOR)


def test_float_forward_no_bias():
    w = [np.eye(2), np.array([[1.0], [-1.0]])]
    out = float_forward(w, np.array([[1.0, 0.0]]), bias=False)
    assert out[0, 0] == pytest.approx(1 / (1 + np.exp(-1)) - 0.5)


def _random_wf(rng, quantized=True):
    wf = WeightFile((3, 4, 2), [LayerWeights(rng.normal(size=(4, 4))), LayerWeights(rng.normal(size=(5, 2)))],
                    metadata={"seed": 1})
    return quantize_weights(wf) if quantized else wf


@pytest.mark.parametrize("quantized", [True, False])
def test_weight_roundtrip(tmp_path, quantized):
    wf = _random_wf(np.random.default_rng(2), quantized)
    save_weights(wf, tmp_path / "w.json")
    back = load_weights(tmp_path / "w.json")
    assert back.topology == wf.topology and back.metadata == wf.metadata
    for a, b in zip(wf.layers, back.layers):
        np.testing.assert_array_equal(a.weights, b.weights)
        assert a.w_max == b.w_max
        if quantized:
            np.testing.assert_array_equal(a.levels, b.levels)
        else:
            assert b.levels is None


def test_quantize_bound_and_zero_layer():
    wf = _random_wf(np.random.default_rng(3))
    for deq, layer in zip(dequantized_weights(wf), wf.layers):
        assert np.abs(deq - layer.weights).max() <= layer.w_max / 62 + 1e-15
    zero = WeightFile((2, 1), [LayerWeights(np.zeros((3, 1)))])
    with pytest.warns(UserWarning):
        q = quantize_weights(zero)
    assert q.layers[0].w_max == 1.0


def test_weight_file_errors(tmp_path):
    doc = json.loads(_random_wf(np.random.default_rng(4)).to_json())
    with pytest.raises(ParseError):
        WeightFile.from_json("{not json")
    with pytest.raises(ParseError):
        WeightFile.from_json(json.dumps({"format": "other"}))
    bad = dict(doc, version=2)
    with pytest.raises(UnsupportedVersionError):
        WeightFile.from_json(json.dumps(bad))
    corrupt = json.loads(json.dumps(doc))
    corrupt["layers"][0]["levels"][0][0] = 99
    with pytest.raises(ParseError):
        WeightFile.from_json(json.dumps(corrupt))
    corrupt = json.loads(json.dumps(doc))
    corrupt["layers"][0]["shape"] = [9, 9]
    with pytest.raises(ParseError):
        WeightFile.from_json(json.dumps(corrupt))
    corrupt = json.loads(json.dumps(doc))
    del corrupt["layers"][1]["w_max"]
    with pytest.raises(ParseError):
        WeightFile.from_json(json.dumps(corrupt))
    with pytest.raises(ParseError):
        WeightFile((3, 4, 2), [LayerWeights(np.zeros((4, 4)))])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        WeightFile.from_json(json.dumps(doc))
