"""Scores how well image embeddings capture human tag-annotated similarity.

The score of a dataset is the mean, over items, of the Pearson correlation
between the item's cosine-similarity profile in embedding space and in
(entropy-weighted) tag space. The package also ships the chance-level
control baselines, exact top-k retrieval, a synthetic dataset generator for
verification, and a CLI.
"""

from .controls import (
    CONTROL_KINDS,
    ControlSpec,
    random_embeddings,
    random_tags,
    shuffle_assignment,
)
from .errors import CorrEmbedError, DataError, DegenerateInputError
from .retrieval import NeighborList, top_k
from .simcore import (
    CorrEmbedResult,
    EmbeddingSet,
    SimilarityProfile,
    TagSet,
    corr_embed,
    cosine,
    pearson,
    similarity_profile,
)
from .synthgen import SynthDataset, SynthSpec, generate
from .tagspace import (
    DEFAULT_DROPPED_CATEGORIES,
    ItemAnnotation,
    ItemTagVector,
    TagVocabulary,
    build_tag_set,
    build_vocabulary,
    encode,
    vocabulary_from_pairs,
)
from .weighting import (
    CategoryEntropy,
    CategoryWeights,
    RentalHistory,
    category_entropy,
    entropies_by_category,
    tag_weights,
    tag_weights_theoretical,
)

__version__ = "0.1.0"

__all__ = [
    "CONTROL_KINDS",
    "CategoryEntropy",
    "CategoryWeights",
    "ControlSpec",
    "CorrEmbedError",
    "CorrEmbedResult",
    "DEFAULT_DROPPED_CATEGORIES",
    "DataError",
    "DegenerateInputError",
    "EmbeddingSet",
    "ItemAnnotation",
    "ItemTagVector",
    "NeighborList",
    "RentalHistory",
    "SimilarityProfile",
    "SynthDataset",
    "SynthSpec",
    "TagSet",
    "TagVocabulary",
    "build_tag_set",
    "build_vocabulary",
    "category_entropy",
    "corr_embed",
    "cosine",
    "encode",
    "entropies_by_category",
    "generate",
    "pearson",
    "random_embeddings",
    "random_tags",
    "shuffle_assignment",
    "similarity_profile",
    "tag_weights",
    "tag_weights_theoretical",
    "top_k",
    "vocabulary_from_pairs",
]
