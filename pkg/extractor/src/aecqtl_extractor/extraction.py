"""Frozen-backbone feature extraction for binary image-classification tasks.

A pretrained torchvision network with its classifier head removed maps each
image to its pooled feature vector (512 for resnet18, 1024 for densenet121,
2048 for resnet50 — the layer that fed the removed head). Selected samples
are written as AEFV v1 files consumable by the aecqtl trainer.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn
from torchvision import models
from torchvision.transforms import functional as TF

FEATURE_DIMS = {"resnet18": 512, "densenet121": 1024, "resnet50": 2048}
DATASETS = ("mnist", "fashion-mnist", "cifar10")

# ImageNet preprocessing statistics published with the torchvision weights
IMAGENET_MEAN = [0.485, 0.456, 0.406]
IMAGENET_STD = [0.229, 0.224, 0.225]


@dataclass(frozen=True)
class ExtractionSpec:
    dataset: str
    class_pair: tuple[int, int]
    source_model: str
    train_out: str
    test_out: str
    per_class_train: int = 256
    per_class_test: int = 128
    seed: int = 1
    data_root: str = "./datasets"

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ValueError(f"dataset must be one of {DATASETS}, got {self.dataset!r}")
        if self.source_model not in FEATURE_DIMS:
            raise ValueError(f"source_model must be one of {tuple(FEATURE_DIMS)}, got {self.source_model!r}")
        if self.class_pair[0] == self.class_pair[1]:
            raise ValueError("class pair must name two distinct classes")
        if self.per_class_train < 1 or self.per_class_test < 1:
            raise ValueError("per-class counts must be >= 1")


def build_backbone(name: str, pretrained: bool = True) -> nn.Module:
    """Source network with the classifier head replaced by identity, frozen."""
    if name == "resnet18":
        net = models.resnet18(weights=models.ResNet18_Weights.IMAGENET1K_V1 if pretrained else None)
        net.fc = nn.Identity()
    elif name == "resnet50":
        net = models.resnet50(weights=models.ResNet50_Weights.IMAGENET1K_V1 if pretrained else None)
        net.fc = nn.Identity()
    elif name == "densenet121":
        net = models.densenet121(weights=models.DenseNet121_Weights.IMAGENET1K_V1 if pretrained else None)
        net.classifier = nn.Identity()
    else:
        raise ValueError(f"unknown source model {name!r}")
    net.eval()
    for p in net.parameters():
        p.requires_grad_(False)
    return net


def preprocess(image: np.ndarray) -> torch.Tensor:
    """uint8 HxW or HxWx3 image -> normalized float tensor (3, 224, 224).

    Grayscale inputs are replicated to 3 channels to meet the backbone's
    input contract.
    """
    arr = np.asarray(image)
    if arr.ndim == 2:
        arr = np.stack([arr] * 3, axis=-1)
    if arr.ndim != 3 or arr.shape[-1] != 3:
        raise ValueError(f"expected HxW or HxWx3 image, got shape {arr.shape}")
    tensor = torch.from_numpy(np.ascontiguousarray(arr)).permute(2, 0, 1).float() / 255.0
    tensor = TF.resize(tensor, [224, 224], antialias=True)
    return TF.normalize(tensor, IMAGENET_MEAN, IMAGENET_STD)


def extract_features(backbone: nn.Module, images: np.ndarray,
                     batch_size: int = 32) -> np.ndarray:
    """Pooled feature vectors for a stack of images, float64 (N, dim)."""
    chunks = []
    with torch.no_grad():
        for start in range(0, len(images), batch_size):
            batch = torch.stack([preprocess(img) for img in images[start:start + batch_size]])
            chunks.append(backbone(batch).cpu().numpy())
    return np.concatenate(chunks).astype(np.float64)


def select_per_class(labels: np.ndarray, wanted_class: int, count: int,
                     rng: np.random.Generator) -> np.ndarray:
    members = np.flatnonzero(np.asarray(labels) == wanted_class)
    if members.shape[0] < count:
        raise ValueError(f"class {wanted_class} has {members.shape[0]} samples, need {count}")
    return members[rng.permutation(members.shape[0])[:count]]


def write_aefv(path, labels: np.ndarray, features: np.ndarray, class_count: int = 2) -> None:
    """AEFV v1 writer (text, LF, shortest round-trip decimals)."""
    n, dim = features.shape
    lines = [f"aefv,1,{dim},{n},{class_count}"]
    for i in range(n):
        lines.append(f"{int(labels[i])}," + ",".join(repr(float(v)) for v in features[i]))
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def load_dataset(name: str, root: str, train: bool) -> tuple[np.ndarray, np.ndarray]:
    """(images, labels) for one split, images as uint8 arrays."""
    from torchvision import datasets
    if name == "mnist":
        ds = datasets.MNIST(root, train=train, download=True)
        return ds.data.numpy(), ds.targets.numpy()
    if name == "fashion-mnist":
        ds = datasets.FashionMNIST(root, train=train, download=True)
        return ds.data.numpy(), ds.targets.numpy()
    ds = datasets.CIFAR10(root, train=train, download=True)
    return ds.data, np.asarray(ds.targets)


def extract_split(backbone: nn.Module, images: np.ndarray, labels: np.ndarray,
                  class_pair: tuple[int, int], per_class: int,
                  rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Features and 0/1 labels for a balanced per-class selection."""
    picked, relabeled = [], []
    for new_label, wanted in enumerate(class_pair):
        idx = select_per_class(labels, wanted, per_class, rng)
        picked.append(idx)
        relabeled.append(np.full(per_class, new_label, dtype=np.int64))
    order = np.concatenate(picked)
    feats = extract_features(backbone, images[order])
    return np.concatenate(relabeled), feats


def extract(spec: ExtractionSpec, backbone: nn.Module | None = None,
            splits: tuple | None = None) -> tuple[int, int]:
    """Run the full pipeline; returns (train samples, test samples) written.

    ``backbone`` and ``splits`` exist for injection in tests; by default the
    pretrained network and the real dataset splits are loaded (train samples
    come from the dataset's train split, test samples from its test split).
    """
    if backbone is None:
        backbone = build_backbone(spec.source_model, pretrained=True)
    if splits is None:
        splits = (load_dataset(spec.dataset, spec.data_root, train=True),
                  load_dataset(spec.dataset, spec.data_root, train=False))
    (train_images, train_labels), (test_images, test_labels) = splits
    rng = np.random.default_rng(spec.seed)
    labels, feats = extract_split(backbone, train_images, train_labels,
                                  spec.class_pair, spec.per_class_train, rng)
    expected = FEATURE_DIMS[spec.source_model]
    if feats.shape[1] != expected:
        raise RuntimeError(f"{spec.source_model} produced dim {feats.shape[1]}, expected {expected}")
    write_aefv(spec.train_out, labels, feats)
    n_train = feats.shape[0]
    labels, feats = extract_split(backbone, test_images, test_labels,
                                  spec.class_pair, spec.per_class_test, rng)
    write_aefv(spec.test_out, labels, feats)
    return n_train, feats.shape[0]
