"""Convert the tfjs-cifar10 PNG sprite sheets into CIFAR-10 binary batches.

The npm package ``tfjs-cifar10`` ships each batch as a 1024x10000 RGB PNG
(one image per row, pixels row-major with interleaved RGB) plus JSON label
lists.  The output files follow the published binary layout: one label byte
followed by the 1024 red, 1024 green and 1024 blue bytes of each image.

    python tools/cifar_png_to_bin.py <package_dir> <out_dir>
"""
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image


def convert(png_path, labels, out_path):
    pixels = np.asarray(Image.open(png_path).convert("RGB"), dtype=np.uint8)
    n = pixels.shape[0]
    assert pixels.shape == (n, 1024, 3) and len(labels) == n
    planes = pixels.transpose(0, 2, 1).reshape(n, 3072)
    records = np.empty((n, 3073), dtype=np.uint8)
    records[:, 0] = labels
    records[:, 1:] = planes
    out_path.write_bytes(records.tobytes())


def main(src, out):
    src, out = Path(src), Path(out)
    out.mkdir(parents=True, exist_ok=True)
    train = json.loads((src / "train_lables.json").read_text())
    test = json.loads((src / "test_lables.json").read_text())
    for b in range(5):
        convert(src / f"data_batch_{b + 1}.png", train[b * 10000:(b + 1) * 10000],
                out / f"data_batch_{b + 1}.bin")
    convert(src / "test_batch.png", test, out / "test_batch.bin")


if __name__ == "__main__":
    main(*sys.argv[1:3])
