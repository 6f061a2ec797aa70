"""Local-mean pseudo nearest neighbor classification with harmonic mean distance."""

from .classifiers import (
    ALL_KINDS,
    ClassifierKind,
    FittedModel,
    KNCNClassifier,
    KNNClassifier,
    LMKHNNClassifier,
    LMKNCNClassifier,
    LMKNNClassifier,
    LMPHNNClassifier,
    LMPNNClassifier,
    PNNClassifier,
    class_scores,
    fit_dataset,
    fit_model,
    make_classifier,
    predict_one,
)
from .dataset import (
    Dataset,
    DatasetError,
    FeatureScaler,
    SplitPair,
    load_csv,
    normalize,
    stratified_split,
)
from .evaluation import (
    ConfusionMatrix,
    MetricsReport,
    SweepResult,
    confusion_matrix,
    k_sensitivity,
    macro_metrics,
    run_sweep,
)

__all__ = [
    "ALL_KINDS",
    "ClassifierKind",
    "ConfusionMatrix",
    "Dataset",
    "DatasetError",
    "FeatureScaler",
    "FittedModel",
    "KNCNClassifier",
    "KNNClassifier",
    "LMKHNNClassifier",
    "LMKNCNClassifier",
    "LMKNNClassifier",
    "LMPHNNClassifier",
    "LMPNNClassifier",
    "MetricsReport",
    "PNNClassifier",
    "SplitPair",
    "SweepResult",
    "class_scores",
    "confusion_matrix",
    "fit_dataset",
    "fit_model",
    "k_sensitivity",
    "load_csv",
    "macro_metrics",
    "make_classifier",
    "normalize",
    "predict_one",
    "run_sweep",
    "stratified_split",
]
