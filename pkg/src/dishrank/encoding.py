"""Dish-name standardisation, the word vocabulary, and menu packing.

A dish name is standardised to at most three lowercase word tokens, each
token mapped to a vocabulary index, and the resulting triple zero-padded.
A menu is a stack of those triples plus a validity mask, so menus of
different lengths can be padded to a common height when batched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

PAD_INDEX = 0
UNK_INDEX = 1
DISH_WORDS = 3
MENU_CAPACITY = 64

_NON_WORD = re.compile(r"[^\w\s]|_", re.UNICODE)


class InvalidDishError(ValueError):
    """Dish name contains no usable words."""


class EmptyMenuError(ValueError):
    """Menu contains no dishes."""


class MenuCapacityError(ValueError):
    """Menu exceeds the supported number of dishes."""


def standardize_dish(raw_name: str) -> list[str]:
    """Lowercase, strip punctuation, and keep the first three word tokens."""
    tokens = _NON_WORD.sub(" ", raw_name.lower()).split()
    if not tokens:
        raise InvalidDishError(f"dish name has no usable words: {raw_name!r}")
    return tokens[:DISH_WORDS]


class Vocabulary:
    """Injective word -> index map with indices 0 and 1 reserved.

    Index 0 is padding, index 1 is the unknown-word bucket; real words get
    dense indices from 2 upward in first-seen order.
    """

    def __init__(self, word_to_index: dict[str, int]):
        indices = sorted(word_to_index.values())
        if indices != list(range(2, 2 + len(word_to_index))):
            raise ValueError("vocabulary indices must be dense and contiguous from 2")
        self._word_to_index = dict(word_to_index)

    @property
    def size(self) -> int:
        """Total index count, including PAD and UNK."""
        return len(self._word_to_index) + 2

    def index(self, word: str) -> int:
        return self._word_to_index.get(word, UNK_INDEX)

    def __contains__(self, word: str) -> bool:
        return word in self._word_to_index

    def __len__(self) -> int:
        return len(self._word_to_index)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._word_to_index == other._word_to_index

    def to_dict(self) -> dict[str, int]:
        return dict(self._word_to_index)

    @classmethod
    def from_dict(cls, mapping: dict[str, int]) -> "Vocabulary":
        return cls({str(w): int(i) for w, i in mapping.items()})


def build_vocabulary(lexicon: Iterable) -> Vocabulary:
    """Collect every token of every standardised dish name, first-seen order.

    Accepts nutrition records (anything with a ``name`` attribute) or bare
    dish-name strings.
    """
    names = [getattr(entry, "name", entry) for entry in lexicon]
    if not names:
        raise ValueError("cannot build a vocabulary from an empty lexicon")
    mapping: dict[str, int] = {}
    for name in names:
        for token in standardize_dish(name):
            if token not in mapping:
                mapping[token] = 2 + len(mapping)
    return Vocabulary(mapping)


def encode_dish(raw_name: str, vocab: Vocabulary) -> np.ndarray:
    """Standardised tokens mapped through the vocabulary, PAD-filled to 3."""
    tokens = standardize_dish(raw_name)
    indices = np.full(DISH_WORDS, PAD_INDEX, dtype=np.int64)
    for i, token in enumerate(tokens):
        indices[i] = vocab.index(token)
    return indices


@dataclass(frozen=True, eq=False)
class MenuTensor:
    """Padded word-index matrix for one menu plus a validity mask."""

    indices: np.ndarray  # (M, 3) int64
    mask: np.ndarray  # (M,) bool

    def __post_init__(self):
        if self.indices.shape != (self.mask.shape[0], DISH_WORDS):
            raise ValueError(f"indices shape {self.indices.shape} does not match mask of {self.mask.shape[0]} dishes")

    @property
    def height(self) -> int:
        """Row count, padding rows included."""
        return self.mask.shape[0]

    @property
    def dish_count(self) -> int:
        return int(self.mask.sum())


def pack_menu(dish_names: Sequence[str], vocab: Vocabulary) -> MenuTensor:
    """Encode a menu into an M x 3 index matrix with an all-true mask."""
    if len(dish_names) == 0:
        raise EmptyMenuError("menu has no dishes")
    if len(dish_names) > MENU_CAPACITY:
        raise MenuCapacityError(f"menu has {len(dish_names)} dishes, capacity is {MENU_CAPACITY}")
    rows = np.stack([encode_dish(name, vocab) for name in dish_names])
    return MenuTensor(indices=rows, mask=np.ones(len(dish_names), dtype=bool))


def pad_menus(menus: Sequence[MenuTensor]) -> list[MenuTensor]:
    """Pad a batch of menus to the tallest member with mask-false rows."""
    if not menus:
        return []
    target = max(menu.height for menu in menus)
    padded = []
    for menu in menus:
        extra = target - menu.height
        if extra == 0:
            padded.append(menu)
            continue
        indices = np.vstack([menu.indices, np.full((extra, DISH_WORDS), PAD_INDEX, dtype=np.int64)])
        mask = np.concatenate([menu.mask, np.zeros(extra, dtype=bool)])
        padded.append(MenuTensor(indices=indices, mask=mask))
    return padded


def parse_menu_text(document: str) -> list[str]:
    """One dish per non-empty line; '#' lines are comments; order kept."""
    dishes = []
    for line in document.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        dishes.append(stripped)
    if not dishes:
        raise EmptyMenuError("menu text contains no dish lines")
    return dishes
