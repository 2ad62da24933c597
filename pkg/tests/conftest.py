"""Shared fixtures: synthetic datasets, ARFF writers, and Mulan file discovery.

Real Mulan datasets are never vendored. Tests that need them look under
$LDFM_DATA_DIR (or ./data) for each dataset's train/test ARFF files and XML
header, and skip with download instructions when the files are absent.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from ldfm.datasets import DatasetPair, MultiLabelDataset, dataset_to_arff, load_mulan_pair

MULAN_URL = "https://mulan.sourceforge.net/datasets-mlc.html"
DATASET_NAMES = ("scene", "emotions", "reference", "computers")


def synthetic_dataset(
    n: int,
    d: int,
    k: int,
    seed: int,
    n_signal: int | None = None,
    label_density: float = 0.35,
    noise: float = 0.25,
) -> MultiLabelDataset:
    """Multi-label data where the first ``n_signal`` features carry the labels.

    Labels are random binary with guaranteed coverage; informative features
    are noisy mixtures of per-label prototypes, the rest pure noise. The same
    seed always produces the same dataset.
    """
    rng = np.random.default_rng(seed)
    if n_signal is None:
        n_signal = d
    labels = (rng.random((k, n)) < label_density).astype(np.float64)
    for j in range(k):  # every label needs positives for stable statistics
        while labels[j].sum() < 2:
            labels[j, rng.integers(n)] = 1.0
    prototypes = rng.normal(size=(n_signal, k))
    signal = prototypes @ labels + noise * rng.normal(size=(n_signal, n))
    if d > n_signal:
        features = np.vstack([signal, rng.normal(size=(d - n_signal, n))])
    else:
        features = signal
    return MultiLabelDataset(
        features=features,
        labels=labels,
        feature_names=tuple(f"f{i}" for i in range(d)),
        label_names=tuple(f"label{j}" for j in range(k)),
    )


def synthetic_pair(
    n_train=60, n_test=40, d=12, k=3, seed=0, n_signal=None, noise=0.25
) -> DatasetPair:
    train = synthetic_dataset(n_train, d, k, seed, n_signal=n_signal, noise=noise)
    test = synthetic_dataset(n_test, d, k, seed + 1, n_signal=n_signal, noise=noise)
    return DatasetPair(train=train, test=test, name="synthetic")


def label_header_xml(label_names) -> str:
    entries = "\n".join(f'  <label name="{name}"></label>' for name in label_names)
    return (
        '<?xml version="1.0" encoding="utf-8"?>\n'
        '<labels xmlns="http://mulan.sourceforge.net/labels">\n'
        f"{entries}\n"
        "</labels>\n"
    )


def write_mulan_triple(directory: Path, name: str, pair: DatasetPair):
    """Write a DatasetPair as the three Mulan-style files; returns their paths."""
    directory.mkdir(parents=True, exist_ok=True)
    train_path = directory / f"{name}-train.arff"
    test_path = directory / f"{name}-test.arff"
    xml_path = directory / f"{name}.xml"
    train_path.write_text(dataset_to_arff(pair.train, relation=name))
    test_path.write_text(dataset_to_arff(pair.test, relation=name))
    xml_path.write_text(label_header_xml(pair.train.label_names))
    return train_path, test_path, xml_path


def _data_roots():
    roots = []
    env = os.environ.get("LDFM_DATA_DIR")
    if env:
        roots.append(Path(env))
    roots.append(Path(__file__).resolve().parent.parent / "data")
    roots.append(Path("data"))
    return [root for root in roots if root.is_dir()]


def locate_mulan_files(name: str):
    """Find <name>'s train/test ARFF and XML header under the data roots."""
    for root in _data_roots():
        arffs = sorted(root.rglob("*.arff"))
        xmls = sorted(root.rglob("*.xml"))
        train = [p for p in arffs if name in p.name.lower() and "train" in p.name.lower()]
        test = [p for p in arffs if name in p.name.lower() and "test" in p.name.lower()]
        xml = [p for p in xmls if name in p.name.lower()]
        if train and test and xml:
            pick = lambda paths: min(paths, key=lambda p: len(p.name))
            return pick(train), pick(test), pick(xml)
    return None


def require_mulan_pair(name: str) -> DatasetPair:
    found = locate_mulan_files(name)
    if found is None:
        pytest.skip(
            f"Mulan dataset {name!r} not found; download it from {MULAN_URL} "
            f"and unpack under $LDFM_DATA_DIR or ./data (see README)"
        )
    train, test, xml = found
    return load_mulan_pair(train, test, xml, name=name)


@pytest.fixture(scope="session")
def mulan_pair():
    cache: dict[str, DatasetPair] = {}

    def loader(name: str) -> DatasetPair:
        if name not in cache:
            cache[name] = require_mulan_pair(name)
        return cache[name]

    return loader
