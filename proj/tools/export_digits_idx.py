#!/usr/bin/env python3
"""Write the scikit-learn 8x8 handwritten digits as MNIST-style IDX files.

The output directory gets the four canonical MNIST file names so the same
loader and CLI can run on it. Pixel intensities 0..16 are rescaled to 0..255.
The first two thirds of the rows (in the original order) form the training
split, the rest the test split.
"""
import argparse
import pathlib
import struct

import numpy as np
from sklearn.datasets import load_digits


def write_images(path, images):
    count, rows, cols = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, count, rows, cols))
        f.write(images.astype(np.uint8).tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out_dir", type=pathlib.Path)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    digits = load_digits()
    images = np.rint(digits.images * (255.0 / 16.0)).clip(0, 255)
    labels = digits.target
    split = (2 * len(labels)) // 3

    write_images(args.out_dir / "train-images-idx3-ubyte", images[:split])
    write_labels(args.out_dir / "train-labels-idx1-ubyte", labels[:split])
    write_images(args.out_dir / "t10k-images-idx3-ubyte", images[split:])
    write_labels(args.out_dir / "t10k-labels-idx1-ubyte", labels[split:])


if __name__ == "__main__":
    main()
