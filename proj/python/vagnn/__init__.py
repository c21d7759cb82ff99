"""Vlogger-augmented micro-video recommendation."""

from ._core import (
    Dataset,
    IoError,
    Model,
    NumericError,
    ValidationError,
    __version__,
    evaluate,
    generate_synthetic,
    preprocess,
    recommend,
    train,
)

__all__ = [
    "Dataset",
    "IoError",
    "Model",
    "NumericError",
    "ValidationError",
    "__version__",
    "evaluate",
    "generate_synthetic",
    "preprocess",
    "recommend",
    "train",
]
