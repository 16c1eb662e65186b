"""Dataset ingestion and persistence.

Readers for IDX (big-endian, magic 0x803 images / 0x801 labels) and the
CIFAR-10 binary batch layout (1 label byte + 3072 pixel bytes per record),
plus balanced fold splitting and a little-endian float64 matrix container
with a JSON manifest sidecar.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    IoFailureError,
    ManifestMismatchError,
    NotEnoughSamplesError,
    TooFewSamplesError,
    TruncatedFileError,
    UnknownClassError,
)

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
CIFAR_RECORD = 1 + 3072
LUMA = np.array([0.299, 0.587, 0.114])  # BT.601 grayscale weights

DATASETS = ("mnist", "fmnist", "cifar10")


@dataclass(frozen=True)
class ImageBatch:
    rows: np.ndarray      # (samples, pixels), values in [0, 1]
    labels: np.ndarray    # integer labels
    source: dict          # provenance: dataset, classes, resize, seed


@dataclass(frozen=True)
class FoldedDataset:
    folds: list            # per fold: (train_indices, test_indices)
    k: int
    seed: int

    def __iter__(self):
        return iter(self.folds)


# ---------------------------------------------------------------------------
# Raw file parsing


def read_idx_images(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise TruncatedFileError(f"{path}: too short for an IDX image header")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IDX_IMAGES_MAGIC:
        raise BadMagicError(f"{path}: magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}")
    need = 16 + count * rows * cols
    if len(data) < need:
        raise TruncatedFileError(f"{path}: {len(data)} bytes, need {need}")
    return np.frombuffer(data, dtype=np.uint8, count=count * rows * cols, offset=16).reshape(
        count, rows, cols
    )


def read_idx_labels(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise TruncatedFileError(f"{path}: too short for an IDX label header")
    magic, count = struct.unpack(">II", data[:8])
    if magic != IDX_LABELS_MAGIC:
        raise BadMagicError(f"{path}: magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}")
    if len(data) < 8 + count:
        raise TruncatedFileError(f"{path}: {len(data)} bytes, need {8 + count}")
    return np.frombuffer(data, dtype=np.uint8, count=count, offset=8).astype(np.int64)


def read_cifar10_batch(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (images (n, 32, 32, 3) uint8, labels (n,))."""
    data = Path(path).read_bytes()
    if len(data) == 0 or len(data) % CIFAR_RECORD != 0:
        raise TruncatedFileError(f"{path}: size {len(data)} is not a multiple of {CIFAR_RECORD}")
    raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, CIFAR_RECORD)
    labels = raw[:, 0].astype(np.int64)
    images = raw[:, 1:].reshape(-1, 3, 32, 32).transpose(0, 2, 3, 1)
    return images, labels


# ---------------------------------------------------------------------------
# Preprocessing


def to_grayscale(images: np.ndarray) -> np.ndarray:
    """(n, h, w, 3) -> (n, h, w) via BT.601 luma weights."""
    return images.astype(float) @ LUMA


def bilinear_resize(images: np.ndarray, side: int) -> np.ndarray:
    """Resize (n, h, w) stacks to (n, side, side) with pixel-center-aligned
    bilinear sampling."""
    images = np.asarray(images, dtype=float)
    n, h, w = images.shape
    ys = (np.arange(side) + 0.5) * (h / side) - 0.5
    xs = (np.arange(side) + 0.5) * (w / side) - 0.5
    ys = np.clip(ys, 0, h - 1)
    xs = np.clip(xs, 0, w - 1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0)[None, :, None]
    wx = (xs - x0)[None, None, :]
    tl = images[:, y0][:, :, x0]
    tr = images[:, y0][:, :, x1]
    bl = images[:, y1][:, :, x0]
    br = images[:, y1][:, :, x1]
    top = tl * (1 - wx) + tr * wx
    bottom = bl * (1 - wx) + br * wx
    return top * (1 - wy) + bottom * wy


def ingest(
    dataset: str,
    paths: dict,
    classes: tuple[int, int],
    samples_per_class: int,
    resize: int | None = None,
    seed: int = 0,
) -> ImageBatch:
    """Load, filter to two classes, preprocess, and flatten.

    ``paths`` holds ``images``/``labels`` file paths for IDX datasets, or
    ``batches`` (list of files) for cifar10. After a seeded shuffle, the
    first samples_per_class rows of each class are kept.
    """
    if dataset not in DATASETS:
        raise ValueError(f"unknown dataset {dataset!r}")
    if len(set(classes)) != 2:
        raise UnknownClassError("need two distinct classes")
    if dataset == "cifar10":
        images_list, labels_list = [], []
        for p in paths["batches"]:
            imgs, labs = read_cifar10_batch(p)
            images_list.append(imgs)
            labels_list.append(labs)
        images = to_grayscale(np.concatenate(images_list))
        labels = np.concatenate(labels_list)
    else:
        images = read_idx_images(paths["images"]).astype(float)
        labels = read_idx_labels(paths["labels"])
        if images.shape[0] != labels.shape[0]:
            raise TruncatedFileError("image and label counts differ")
    if np.any(~np.isin(np.asarray(classes), np.unique(labels))):
        raise UnknownClassError(f"classes {classes} not all present in the data")

    rng = np.random.default_rng(seed)
    order = rng.permutation(labels.shape[0])
    keep = []
    counts = {c: 0 for c in classes}
    for idx in order:
        lab = int(labels[idx])
        if lab in counts and counts[lab] < samples_per_class:
            keep.append(idx)
            counts[lab] += 1
    if any(v < samples_per_class for v in counts.values()):
        raise NotEnoughSamplesError(f"per-class counts {counts} < {samples_per_class}")
    keep = np.asarray(keep)
    images = images[keep]
    labels = labels[keep]
    if resize is not None:
        images = bilinear_resize(images, resize)
    rows = images.reshape(images.shape[0], -1) / 255.0
    return ImageBatch(
        rows=rows,
        labels=labels,
        source={
            "dataset": dataset,
            "classes": [int(c) for c in classes],
            "samples_per_class": samples_per_class,
            "resize": resize,
            "seed": seed,
        },
    )


def make_folds(batch: ImageBatch, k: int = 5, train_fraction: float = 0.8, seed: int = 0) -> FoldedDataset:
    """Stratified k-fold split: per fold, one disjoint test chunk (1/k of
    each class) and a train set of train_fraction of the remainder."""
    if k < 2:
        raise TooFewSamplesError("need k >= 2 folds")
    labels = batch.labels
    n = labels.shape[0]
    rng = np.random.default_rng(seed)
    chunks: list[list[int]] = [[] for _ in range(k)]
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        if idx.size < k:
            raise TooFewSamplesError(f"class {lab} has fewer than k samples")
        idx = rng.permutation(idx)
        for pos, sample in enumerate(idx):
            chunks[pos % k].append(int(sample))
    folds = []
    for i in range(k):
        test = np.sort(np.asarray(chunks[i], dtype=int))
        rest = np.sort(np.concatenate([np.asarray(chunks[j], dtype=int) for j in range(k) if j != i]))
        n_train = int(round(train_fraction / (1.0 - 1.0 / k) * rest.size)) if train_fraction < (k - 1) / k else rest.size
        n_train = min(n_train, rest.size)
        train = rest if n_train == rest.size else np.sort(rng.permutation(rest)[:n_train])
        folds.append((train, test))
    return FoldedDataset(folds=folds, k=k, seed=seed)


# ---------------------------------------------------------------------------
# Matrix container

_MAGIC = b"QPGM"


def save_matrix(path, matrix: np.ndarray, manifest: dict | None = None) -> None:
    """Write a 2-D float64 matrix (little-endian) plus a JSON manifest
    sidecar at <path>.json. Round-trips bit-exactly."""
    path = Path(path)
    matrix = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    if matrix.ndim != 2:
        raise IoFailureError("matrix container only stores 2-D arrays")
    header = _MAGIC + struct.pack("<II", *matrix.shape)
    try:
        path.write_bytes(header + matrix.tobytes())
        full = dict(manifest or {})
        full["shape"] = list(matrix.shape)
        Path(str(path) + ".json").write_text(json.dumps(full, indent=2, sort_keys=True))
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


def load_matrix(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    try:
        data = path.read_bytes()
        manifest = json.loads(Path(str(path) + ".json").read_text())
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc
    if len(data) < 12 or data[:4] != _MAGIC:
        raise BadMagicError(f"{path}: not a matrix container")
    rows, cols = struct.unpack("<II", data[4:12])
    need = 12 + rows * cols * 8
    if len(data) < need:
        raise TruncatedFileError(f"{path}: {len(data)} bytes, need {need}")
    if manifest.get("shape") != [rows, cols]:
        raise ManifestMismatchError(
            f"{path}: manifest shape {manifest.get('shape')} != payload shape {[rows, cols]}"
        )
    matrix = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=12).reshape(rows, cols)
    return matrix.copy(), manifest
