"""Synthesis of inconsistent vulnerability descriptions into digest labels."""

from .model import (
    ASPECT_ORDER,
    AspectSet,
    AspectType,
    BasicInfo,
    DigestLabel,
    EvaluationScores,
    KeyAspect,
    Tvd,
    parse_cve_id,
)
from .providers import CompletionRequest, MockCompletionProvider, MockEmbedder, Providers, ProviderScript, cosine
from .service import LabelStore, PipelineConfig, generate_label

__all__ = [
    "ASPECT_ORDER",
    "AspectSet",
    "AspectType",
    "BasicInfo",
    "CompletionRequest",
    "DigestLabel",
    "EvaluationScores",
    "KeyAspect",
    "LabelStore",
    "MockCompletionProvider",
    "MockEmbedder",
    "PipelineConfig",
    "Providers",
    "ProviderScript",
    "Tvd",
    "cosine",
    "generate_label",
    "parse_cve_id",
]

__version__ = "0.1.0"
