"""Shared fixtures.

Real MNIST/FMNIST/CIFAR-10 files are used when present under the directory
named by QPGA_DATA_ROOT. Otherwise the fixtures synthesize stand-in datasets
with the same binary layouts (IDX / CIFAR batch) so the genuine parsers are
exercised end to end. The MNIST stand-in renders jittered 28x28 rings
(zeros) and slanted strokes (ones); the FMNIST stand-in renders filled
silhouettes for its classes 0 and 7; the CIFAR stand-in is synthetic
structured 32x32 imagery (blobs vs gratings).
"""
from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np
import pytest

DATA_ROOT = os.environ.get("QPGA_DATA_ROOT")


def write_idx_images(path, images: np.ndarray) -> None:
    images = np.asarray(images, dtype=np.uint8)
    n, h, w = images.shape
    Path(path).write_bytes(struct.pack(">IIII", 0x803, n, h, w) + images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    Path(path).write_bytes(struct.pack(">II", 0x801, labels.shape[0]) + labels.tobytes())


def write_cifar_batch(path, images: np.ndarray, labels: np.ndarray) -> None:
    """images (n, 32, 32, 3) uint8, channel-last -> CIFAR binary layout."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    planes = images.transpose(0, 3, 1, 2).reshape(images.shape[0], -1)
    records = np.concatenate([labels[:, None], planes], axis=1)
    Path(path).write_bytes(records.tobytes())


def _ring(rng, yy, xx):
    """Thick jittered ellipse outline (handwritten-zero stand-in)."""
    cy, cx = 13.5 + rng.uniform(-1.5, 1.5, 2)
    ry = rng.uniform(7, 10)
    rx = rng.uniform(4.5, 7.5)
    th = rng.uniform(1.2, 2.2)
    r = np.sqrt(((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2)
    return np.exp(-((r - 1.0) ** 2) * (2.2 / th) ** 2 * 4)


def _stroke(rng, yy, xx):
    """Slanted vertical bar (handwritten-one stand-in)."""
    cx = 13.5 + rng.uniform(-2, 2)
    slant = rng.uniform(-0.25, 0.25)
    w = rng.uniform(1.0, 2.0)
    top, bot = rng.uniform(3, 6), rng.uniform(21, 25)
    d = np.abs(xx - (cx + slant * (yy - 13.5)))
    return np.exp(-((d / w) ** 2) * 2) * ((yy >= top) & (yy <= bot))


def _blob(rng, yy, xx):
    """Filled ellipse (t-shirt-like solid silhouette); deliberately a tight
    family so its latent energy concentrates on few components."""
    cy, cx = 13.5 + rng.uniform(-0.7, 0.7, 2)
    ry = rng.uniform(7.5, 9.0)
    rx = rng.uniform(6.5, 8.0)
    r = np.sqrt(((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2)
    return 1.0 / (1.0 + np.exp((r - 1.0) * 7.0))


def _wedge(rng, yy, xx):
    """Horizontal wedge (sneaker-like silhouette) with wide pose variation,
    spreading its latent energy across several components."""
    cy = 14.0 + rng.uniform(-6, 6)
    h = rng.uniform(1.5, 5.0)
    tilt = rng.uniform(-0.3, 0.3)
    d = np.abs(yy - (cy + tilt * (xx - 13.5)))
    body = np.exp(-((d / h) ** 2) * 2)
    left, right = rng.uniform(1, 8), rng.uniform(20, 27)
    return body * ((xx >= left) & (xx <= right))


def _render_shapes(shape_fns, per_class: int, seed: int):
    """28x28 uint8 images: one jittered, lightly noised shape family per
    entry of ``shape_fns`` ({label: draw function})."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:28, 0:28].astype(float)
    images, labels = [], []
    for lab, draw in shape_fns.items():
        for _ in range(per_class):
            img = 255.0 * np.clip(draw(rng, yy, xx) * rng.uniform(0.85, 1.0), 0, 1)
            img = img + rng.normal(0, 6.0, (28, 28))
            images.append(np.clip(img, 0, 255))
            labels.append(lab)
    return np.stack(images).astype(np.uint8), np.asarray(labels, dtype=np.uint8)


def _real_idx_pair(subdir):
    if not DATA_ROOT:
        return None
    base = Path(DATA_ROOT) / subdir
    images = base / "train-images-idx3-ubyte"
    labels = base / "train-labels-idx1-ubyte"
    if images.exists() and labels.exists():
        return {"images": images, "labels": labels, "resize": 8}
    return None


@pytest.fixture(scope="session")
def mnist_files(tmp_path_factory):
    """{'images': path, 'labels': path, 'resize': side} for MNIST classes 0/1."""
    real = _real_idx_pair("mnist")
    if real is not None:
        return real
    root = tmp_path_factory.mktemp("mnist")
    images, labels = _render_shapes({0: _ring, 1: _stroke}, per_class=700, seed=5)
    write_idx_images(root / "train-images-idx3-ubyte", images)
    write_idx_labels(root / "train-labels-idx1-ubyte", labels)
    return {
        "images": root / "train-images-idx3-ubyte",
        "labels": root / "train-labels-idx1-ubyte",
        "resize": 8,
    }


@pytest.fixture(scope="session")
def fmnist_files(tmp_path_factory):
    """FMNIST classes 0 and 7 (silhouette stand-ins when offline)."""
    real = _real_idx_pair("fmnist")
    if real is not None:
        return real
    root = tmp_path_factory.mktemp("fmnist")
    images, labels = _render_shapes({0: _blob, 7: _wedge}, per_class=300, seed=23)
    write_idx_images(root / "train-images-idx3-ubyte", images)
    write_idx_labels(root / "train-labels-idx1-ubyte", labels)
    return {
        "images": root / "train-images-idx3-ubyte",
        "labels": root / "train-labels-idx1-ubyte",
        "resize": 8,
    }


def _synthetic_cifar(n_per_class: int, seed: int):
    """Two visually structured classes: low-frequency blobs vs gratings."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:32, 0:32]
    images, labels = [], []
    for _ in range(n_per_class):
        cy, cx = rng.uniform(6, 26, size=2)
        s = rng.uniform(3, 9)
        blob = np.exp(-(((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * s * s)))
        img = 255.0 * blob + rng.normal(0, 8, size=(32, 32))
        images.append(img)
        labels.append(0)
    for _ in range(n_per_class):
        freq = rng.uniform(0.2, 0.9)
        phase = rng.uniform(0, 2 * np.pi)
        angle = rng.uniform(0, np.pi)
        wave = np.sin(freq * (np.cos(angle) * xx + np.sin(angle) * yy) + phase)
        img = 127.5 * (1.0 + wave) + rng.normal(0, 8, size=(32, 32))
        images.append(img)
        labels.append(1)
    gray = np.clip(np.stack(images), 0, 255).astype(np.uint8)
    rgb = np.repeat(gray[..., None], 3, axis=3)
    return rgb, np.asarray(labels, dtype=np.uint8)


@pytest.fixture(scope="session")
def cifar_files(tmp_path_factory):
    if DATA_ROOT:
        base = Path(DATA_ROOT) / "cifar-10-batches-bin"
        batch = base / "data_batch_1.bin"
        if batch.exists():
            return {"batches": [batch]}
    root = tmp_path_factory.mktemp("cifar")
    images, labels = _synthetic_cifar(n_per_class=550, seed=37)
    write_cifar_batch(root / "data_batch_1.bin", images, labels)
    return {"batches": [root / "data_batch_1.bin"]}


def ingest_idx(files, classes, per_class, seed=0):
    from qpga import dataio

    return dataio.ingest(
        "mnist",
        {"images": files["images"], "labels": files["labels"]},
        classes,
        per_class,
        resize=files["resize"],
        seed=seed,
    )


@pytest.fixture(scope="session")
def mnist_1200(mnist_files):
    """1200 balanced MNIST 0/1 rows at 8x8 (the paper-scale working set)."""
    return ingest_idx(mnist_files, (0, 1), 600, seed=0)
