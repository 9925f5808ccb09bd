#!/usr/bin/env python3
"""Convert the per-digit JSON files of the `mnist` npm package to IDX files.

The package ships about 1000 real MNIST digits per class as 28x28 images with
intensities already divided by 255 and rounded to three decimals; multiplying
by 255 and rounding recovers the original bytes exactly.

All samples of digits 0 and 1 are kept (first 80% of each class for training,
the rest for testing). A few samples of every other digit are added so the
two-class filter has something to drop.
"""
import argparse
import json
import pathlib
import struct

import numpy as np

SIDE = 28
OTHER_TRAIN = 20
OTHER_TEST = 10


def load_digit(digits_dir, digit):
    raw = json.loads((digits_dir / f"{digit}.json").read_text())["data"]
    images = np.asarray(raw, dtype=np.float64).reshape(-1, SIDE, SIDE)
    return np.rint(images * 255.0).clip(0, 255).astype(np.uint8)


def interleave(groups):
    """Round-robin over (digit, images) groups so classes are mixed."""
    out_images, out_labels = [], []
    longest = max(len(images) for _, images in groups)
    for i in range(longest):
        for digit, images in groups:
            if i < len(images):
                out_images.append(images[i])
                out_labels.append(digit)
    return np.stack(out_images), np.asarray(out_labels, dtype=np.uint8)


def write_idx(out_dir, prefix, images, labels):
    with open(out_dir / f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), SIDE, SIDE))
        f.write(images.tobytes())
    with open(out_dir / f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.tobytes())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("digits_dir", type=pathlib.Path, help="package/src/digits of the npm package")
    parser.add_argument("out_dir", type=pathlib.Path)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    train, test = [], []
    for digit in range(10):
        images = load_digit(args.digits_dir, digit)
        if digit <= 1:
            cut = (4 * len(images)) // 5
            train.append((digit, images[:cut]))
            test.append((digit, images[cut:]))
        else:
            train.append((digit, images[:OTHER_TRAIN]))
            test.append((digit, images[OTHER_TRAIN:OTHER_TRAIN + OTHER_TEST]))

    write_idx(args.out_dir, "train", *interleave(train))
    write_idx(args.out_dir, "t10k", *interleave(test))


if __name__ == "__main__":
    main()
