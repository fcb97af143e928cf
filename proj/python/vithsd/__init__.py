"""Python bindings for the vithsd C++ core."""

from ._core import (
    Model,
    VithsdError,
    cohen_kappa,
    dataset_stats,
    fleiss_kappa,
    format_label_list,
    label_codes,
    latency_stats,
    load_dataset,
    parse_label_list,
    preprocess_text,
    prf,
    terms_from_codes,
    tokenize,
    window_counts,
)

__all__ = [
    "Model",
    "VithsdError",
    "cohen_kappa",
    "dataset_stats",
    "fleiss_kappa",
    "format_label_list",
    "label_codes",
    "latency_stats",
    "load_dataset",
    "parse_label_list",
    "preprocess_text",
    "prf",
    "terms_from_codes",
    "tokenize",
    "window_counts",
]
