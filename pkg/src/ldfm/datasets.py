"""Mulan-style multi-label dataset handling.

A dataset pairs an ARFF data file with an XML header naming which attributes
are labels. The parser supports dense and sparse @data rows, numeric and
{0,1}-nominal attributes, and rejects missing values outright: none of the
supported datasets contain them, so a "?" means a corrupt file, not something
to impute.

Matrices are column-per-instance: features d x n, labels k x n.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ArffSyntaxError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownLabelNameError(ValueError):
    pass


class MissingValueError(ValueError):
    pass


class NonBinaryLabelError(ValueError):
    pass


class MalformedXmlError(ValueError):
    pass


class EmptyLabelSetError(ValueError):
    pass


class SchemaMismatchError(ValueError):
    pass


class OutOfRangeError(ValueError):
    pass


@dataclass(frozen=True)
class MultiLabelDataset:
    """Feature matrix (d x n), binary label matrix (k x n), and their names."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    label_names: tuple[str, ...]

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.float64)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "label_names", tuple(self.label_names))
        if features.ndim != 2 or labels.ndim != 2:
            raise ValueError("features and labels must be 2-D matrices")
        if features.shape[1] != labels.shape[1]:
            raise ValueError(
                f"instance count mismatch: {features.shape[1]} feature columns "
                f"vs {labels.shape[1]} label columns"
            )
        if features.shape[0] != len(self.feature_names):
            raise ValueError("feature row count does not match feature_names")
        if labels.shape[0] != len(self.label_names):
            raise ValueError("label row count does not match label_names")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("duplicate feature names")
        if len(set(self.label_names)) != len(self.label_names):
            raise ValueError("duplicate label names")
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite entries")
        if not np.all((labels == 0.0) | (labels == 1.0)):
            raise NonBinaryLabelError("label entries must be exactly 0 or 1")
        features.flags.writeable = False
        labels.flags.writeable = False

    @property
    def n_features(self) -> int:
        return self.features.shape[0]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[0]

    @property
    def n_instances(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class DatasetPair:
    train: MultiLabelDataset
    test: MultiLabelDataset
    name: str

    def __post_init__(self):
        if self.train.feature_names != self.test.feature_names:
            raise SchemaMismatchError("train/test feature names disagree")
        if self.train.label_names != self.test.label_names:
            raise SchemaMismatchError("train/test label names disagree")


_ATTRIBUTE_RE = re.compile(
    r"""@attribute\s+('(?P<q1>[^']*)'|"(?P<q2>[^"]*)"|(?P<bare>\S+))\s+(?P<type>.+)$""",
    re.IGNORECASE,
)
_NUMERIC_TYPES = {"numeric", "real", "integer"}


def _split_with_columns(line: str, sep: str = ","):
    """Split on sep, yielding (token, 1-based column of token start)."""
    out = []
    start = 0
    for part in line.split(sep):
        stripped = part.strip()
        offset = part.index(stripped) if stripped else 0
        out.append((stripped, start + offset + 1))
        start += len(part) + 1
    return out


def _strip_value_quotes(token: str) -> str:
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def parse_arff(text, label_names) -> MultiLabelDataset:
    """Parse ARFF text into a dataset, splitting attributes into features and labels.

    ``label_names`` selects which attributes are labels; those become label
    rows in ``label_names`` order, all remaining attributes become feature
    rows in file order. Sparse rows ("{index value, ...}") default unlisted
    attributes to 0.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    label_names = list(label_names)

    attr_names: list[str] = []
    attr_nominal: list[bool] = []
    in_data = False
    data_rows: list[np.ndarray] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not in_data:
            lowered = line.lower()
            if lowered.startswith("@relation"):
                continue
            if lowered.startswith("@attribute"):
                match = _ATTRIBUTE_RE.match(line)
                if match is None:
                    raise ArffSyntaxError(lineno, 1, "malformed @attribute line")
                name = match["q1"] or match["q2"] or match["bare"]
                if name in attr_names:
                    raise ArffSyntaxError(lineno, 1, f"duplicate attribute name {name!r}")
                type_spec = match["type"].strip()
                if type_spec.startswith("{"):
                    if not type_spec.endswith("}"):
                        raise ArffSyntaxError(lineno, 1, "unterminated nominal value list")
                    values = {
                        _strip_value_quotes(v.strip())
                        for v in type_spec[1:-1].split(",")
                    }
                    if not values <= {"0", "1"}:
                        raise ArffSyntaxError(
                            lineno, 1, f"only {{0,1}} nominal attributes supported, got {type_spec}"
                        )
                    attr_nominal.append(True)
                elif type_spec.lower() in _NUMERIC_TYPES:
                    attr_nominal.append(False)
                else:
                    raise ArffSyntaxError(
                        lineno, 1, f"unsupported attribute type {type_spec!r}"
                    )
                attr_names.append(name)
            elif lowered.startswith("@data"):
                if not attr_names:
                    raise ArffSyntaxError(lineno, 1, "@data before any @attribute")
                in_data = True
            else:
                raise ArffSyntaxError(lineno, 1, f"unrecognized directive {line.split()[0]!r}")
        else:
            data_rows.append(
                _parse_data_row(line, lineno, len(attr_names), attr_nominal)
            )

    if not in_data:
        raise ArffSyntaxError(0, 0, "missing @data section")

    for name in label_names:
        if name not in attr_names:
            raise UnknownLabelNameError(f"label {name!r} is not an ARFF attribute")

    n = len(data_rows)
    values = (
        np.stack(data_rows, axis=1)
        if n
        else np.zeros((len(attr_names), 0), dtype=np.float64)
    )

    label_set = set(label_names)
    feature_idx = [i for i, a in enumerate(attr_names) if a not in label_set]
    label_idx = [attr_names.index(name) for name in label_names]

    label_values = values[label_idx] if label_idx else np.zeros((0, n))
    if not np.all((label_values == 0.0) | (label_values == 1.0)):
        bad = np.argwhere((label_values != 0.0) & (label_values != 1.0))
        j, i = bad[0]
        raise NonBinaryLabelError(
            f"label {label_names[j]!r} has non-binary value "
            f"{label_values[j, i]} at instance {i}"
        )

    return MultiLabelDataset(
        features=values[feature_idx] if feature_idx else np.zeros((0, n)),
        labels=label_values,
        feature_names=tuple(attr_names[i] for i in feature_idx),
        label_names=tuple(label_names),
    )


def _parse_value(token: str, nominal: bool, lineno: int, column: int) -> float:
    token = _strip_value_quotes(token)
    if token == "?":
        raise MissingValueError(
            f"line {lineno}, column {column}: missing value '?' is not supported"
        )
    if nominal:
        if token == "0":
            return 0.0
        if token == "1":
            return 1.0
        raise ArffSyntaxError(lineno, column, f"nominal value must be 0 or 1, got {token!r}")
    try:
        return float(token)
    except ValueError:
        raise ArffSyntaxError(lineno, column, f"invalid numeric value {token!r}") from None


def _parse_data_row(line: str, lineno: int, n_attrs: int, attr_nominal) -> np.ndarray:
    row = np.zeros(n_attrs, dtype=np.float64)
    if line.startswith("{"):
        if not line.endswith("}"):
            raise ArffSyntaxError(lineno, len(line), "unterminated sparse row")
        inner = line[1:-1].strip()
        if not inner:
            return row
        seen = set()
        for token, column in _split_with_columns(inner):
            parts = token.split(None, 1)
            if len(parts) != 2:
                raise ArffSyntaxError(lineno, column + 1, f"sparse entry {token!r} needs 'index value'")
            try:
                idx = int(parts[0])
            except ValueError:
                raise ArffSyntaxError(lineno, column + 1, f"invalid sparse index {parts[0]!r}") from None
            if not 0 <= idx < n_attrs:
                raise ArffSyntaxError(lineno, column + 1, f"sparse index {idx} out of range")
            if idx in seen:
                raise ArffSyntaxError(lineno, column + 1, f"duplicate sparse index {idx}")
            seen.add(idx)
            row[idx] = _parse_value(parts[1], attr_nominal[idx], lineno, column + 1)
        return row
    tokens = _split_with_columns(line)
    if len(tokens) != n_attrs:
        raise ArffSyntaxError(
            lineno, 1, f"expected {n_attrs} values, got {len(tokens)}"
        )
    for idx, (token, column) in enumerate(tokens):
        row[idx] = _parse_value(token, attr_nominal[idx], lineno, column)
    return row


def parse_label_header(xml) -> list[str]:
    """Extract label names, in document order, from a Mulan XML label header."""
    if isinstance(xml, (bytes, bytearray)):
        xml = xml.decode("utf-8")
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"invalid XML: {exc}") from exc

    def local_tag(tag: str) -> str:
        return tag.rsplit("}", 1)[-1]

    if local_tag(root.tag) != "labels":
        raise MalformedXmlError(f"root element must be <labels>, got <{local_tag(root.tag)}>")
    names = []
    for element in root.iter():
        if local_tag(element.tag) == "label":
            name = element.get("name")
            if name is None:
                raise MalformedXmlError("<label> element without a name attribute")
            names.append(name)
    if not names:
        raise EmptyLabelSetError("label header declares no labels")
    return names


def load_mulan_pair(train_path, test_path, xml_path, name: str | None = None) -> DatasetPair:
    """Load a train/test ARFF pair plus its XML label header."""
    label_names = parse_label_header(Path(xml_path).read_bytes())
    train = parse_arff(Path(train_path).read_bytes(), label_names)
    test = parse_arff(Path(test_path).read_bytes(), label_names)
    if name is None:
        stem = Path(train_path).stem
        name = re.sub(r"[-_.]train$", "", stem, flags=re.IGNORECASE)
    return DatasetPair(train=train, test=test, name=name)


def corrupt_labels(dataset: MultiLabelDataset, proportion: float, seed: int) -> MultiLabelDataset:
    """Remove a fixed fraction of positive label entries, chosen by a seeded RNG.

    Exactly floor(proportion * #positives) entries flip 1 -> 0, drawn uniformly
    without replacement. Features are shared with the input dataset; the input
    itself is never modified.
    """
    if not 0.0 <= proportion <= 1.0:
        raise OutOfRangeError(f"proportion must be in [0, 1], got {proportion}")
    labels = np.array(dataset.labels)  # writeable copy
    positives = np.argwhere(labels == 1.0)
    n_remove = int(np.floor(proportion * len(positives)))
    if n_remove:
        rng = np.random.default_rng(seed)
        chosen = rng.choice(len(positives), size=n_remove, replace=False)
        rows, cols = positives[chosen].T
        labels[rows, cols] = 0.0
    return MultiLabelDataset(
        features=dataset.features,
        labels=labels,
        feature_names=dataset.feature_names,
        label_names=dataset.label_names,
    )


def _quote_name(name: str) -> str:
    if re.fullmatch(r"[^\s,'\"{}%]+", name):
        return name
    if "'" in name:
        raise ValueError(f"cannot serialize attribute name containing a quote: {name!r}")
    return f"'{name}'"


def dataset_to_arff(dataset: MultiLabelDataset, relation: str = "multilabel") -> str:
    """Serialize to dense ARFF (features numeric, labels {0,1} nominal).

    Feature values are written with shortest round-trip formatting, so
    parse(serialize(ds)) reproduces ds exactly.
    """
    lines = [f"@relation {_quote_name(relation)}", ""]
    for name in dataset.feature_names:
        lines.append(f"@attribute {_quote_name(name)} numeric")
    for name in dataset.label_names:
        lines.append(f"@attribute {_quote_name(name)} {{0,1}}")
    lines.append("")
    lines.append("@data")
    for i in range(dataset.n_instances):
        feats = [repr(float(v)) for v in dataset.features[:, i]]
        labs = [str(int(v)) for v in dataset.labels[:, i]]
        lines.append(",".join(feats + labs))
    return "\n".join(lines) + "\n"
