"""Selective bitplane encryption with rich-model tampering detection."""

from ._planeguard import (
    FEATURE_DIM,
    DegenerateInput,
    Error,
    InvalidArgument,
    InvalidInput,
    InvalidSplit,
    InvalidTrainingSet,
    RidgeModel,
    encrypt_planes,
    evaluate,
    extract_features,
    keystream_bits,
    keystream_bytes,
    lsmr_solve,
    nonce_from_index,
    predict,
    privacy_index,
    roster,
    roster_hash,
    shift_planes,
    synthesize_dataset,
    to_luminance,
    train,
    zero_planes,
)

__version__ = "0.1.0"

__all__ = [
    "FEATURE_DIM",
    "DegenerateInput",
    "Error",
    "InvalidArgument",
    "InvalidInput",
    "InvalidSplit",
    "InvalidTrainingSet",
    "RidgeModel",
    "encrypt_planes",
    "evaluate",
    "extract_features",
    "keystream_bits",
    "keystream_bytes",
    "lsmr_solve",
    "nonce_from_index",
    "predict",
    "privacy_index",
    "roster",
    "roster_hash",
    "shift_planes",
    "synthesize_dataset",
    "to_luminance",
    "train",
    "zero_planes",
]
