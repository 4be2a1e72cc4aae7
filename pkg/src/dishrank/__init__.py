"""dishrank: learning-to-rank for restaurant menus by nutritional keys.

The pipeline: parse a plain-text menu, encode dish names as padded word
index triples, run a single self-attention pass conditioned on a search
key, and read the ranking off the per-dish scores.  Training data is
generated synthetically from a bundled nutrition lexicon.
"""

from .datagen import (
    DatasetSpec,
    Lexicon,
    MenuSample,
    NutritionRecord,
    generate_dataset,
    ground_truth_rank,
    load_bundled_lexicon,
    load_lexicon,
    make_unseen_test,
)
from .encoding import (
    MenuTensor,
    Vocabulary,
    build_vocabulary,
    encode_dish,
    pack_menu,
    pad_menus,
    parse_menu_text,
    standardize_dish,
)
from .metrics import ndcg, pairwise_accuracy, pairwise_cross_entropy, pairwise_loss
from .model import RankerModel, load_model, save_model
from .ranker import RankerConfig, RankerParams, RankOutput, forward, rank
from .training import MetricsReport, TrainConfig, evaluate, train

__version__ = "0.1.0"

__all__ = [
    "DatasetSpec",
    "Lexicon",
    "MenuSample",
    "MenuTensor",
    "MetricsReport",
    "NutritionRecord",
    "RankOutput",
    "RankerConfig",
    "RankerModel",
    "RankerParams",
    "TrainConfig",
    "Vocabulary",
    "build_vocabulary",
    "encode_dish",
    "evaluate",
    "forward",
    "generate_dataset",
    "ground_truth_rank",
    "load_bundled_lexicon",
    "load_lexicon",
    "load_model",
    "make_unseen_test",
    "ndcg",
    "pack_menu",
    "pad_menus",
    "pairwise_accuracy",
    "pairwise_cross_entropy",
    "pairwise_loss",
    "parse_menu_text",
    "rank",
    "save_model",
    "standardize_dish",
    "train",
]
