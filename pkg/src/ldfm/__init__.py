"""LDFM: multi-label feature selection through a linear encoder-decoder.

A projection W maps features into a learned numeric label space and its
transpose maps back; features are ranked by how much the trained encoder
relies on them. Ships with Mulan dataset loading, PCA preprocessing, an
ML-KNN evaluator, and a reproducible experiment CLI.
"""

from .datasets import (
    DatasetPair,
    MultiLabelDataset,
    corrupt_labels,
    dataset_to_arff,
    load_mulan_pair,
    parse_arff,
    parse_label_header,
)
from .evaluation import (
    MetricsReport,
    MlknnModel,
    average_precision,
    friedman_test,
    hamming_loss,
    micro_f1,
    mlknn_predict,
    mlknn_train,
)
from .labels import init_numeric_labels, jaccard_correlation
from .linalg import solve_spd, solve_sylvester_kron, solve_sylvester_sympsd, sym_eigen
from .model import (
    LdfmConfig,
    LdfmModel,
    decode,
    encode,
    fit,
    load_model,
    objective,
    rank_features,
    reconstruction_error,
    save_model,
    update_w,
    update_y,
)
from .pca import PcaModel, apply_pca, fit_pca

__version__ = "0.1.0"

__all__ = [
    "DatasetPair",
    "LdfmConfig",
    "LdfmModel",
    "MetricsReport",
    "MlknnModel",
    "MultiLabelDataset",
    "PcaModel",
    "apply_pca",
    "average_precision",
    "corrupt_labels",
    "dataset_to_arff",
    "decode",
    "encode",
    "fit",
    "fit_pca",
    "friedman_test",
    "hamming_loss",
    "init_numeric_labels",
    "jaccard_correlation",
    "load_model",
    "load_mulan_pair",
    "micro_f1",
    "mlknn_predict",
    "mlknn_train",
    "objective",
    "parse_arff",
    "parse_label_header",
    "rank_features",
    "reconstruction_error",
    "save_model",
    "solve_spd",
    "solve_sylvester_kron",
    "solve_sylvester_sympsd",
    "sym_eigen",
    "update_w",
    "update_y",
]
