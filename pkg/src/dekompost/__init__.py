"""German compound splitting and idiomaticity detection."""

from .corpus import (
    AnnotatedCompound,
    BoundaryLabel,
    CompoundEntry,
    CorpusError,
    Lexicon,
    UnalignableError,
    derive_boundary,
    parse_annotated_file,
    parse_split_file,
    partition,
)
from .splitters import FrequencySplitter, NeuralSplitter, NgramSplitter, SplitResult
from .tokenization import BpeModel, bpe_encode, bpe_train, char_tokenize, project_labels

__version__ = "0.1.0"

__all__ = [
    "AnnotatedCompound",
    "BoundaryLabel",
    "BpeModel",
    "CompoundEntry",
    "CorpusError",
    "FrequencySplitter",
    "Lexicon",
    "NeuralSplitter",
    "NgramSplitter",
    "SplitResult",
    "UnalignableError",
    "bpe_encode",
    "bpe_train",
    "char_tokenize",
    "derive_boundary",
    "parse_annotated_file",
    "parse_split_file",
    "partition",
    "project_labels",
]
