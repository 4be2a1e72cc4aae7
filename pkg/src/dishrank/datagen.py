"""Synthetic menu dataset generation with nutrition ground truth.

Menus of 7-15 distinct dishes are drawn from the seen portion of a
nutrition lexicon; each (menu, search key) pair becomes one labelled
sample whose ground-truth permutation sorts dishes by the key's nutrient
value (ascending by default, so rank 1 is the lightest choice).  Reduced
"seen fraction" test sets swap part of every menu for held-out dishes
that share vocabulary words with the seen ones.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .encoding import standardize_dish

NUTRIENT_KEYS = ("calories", "protein", "sugar")
MENU_SIZE_MIN = 7
MENU_SIZE_MAX = 15


class UnknownDishError(ValueError):
    """Dish name not present in the lexicon."""


class InsufficientLexiconError(ValueError):
    """Lexicon too small for the requested menus."""


class LexiconFormatError(ValueError):
    """Malformed lexicon CSV; message carries the line number."""


@dataclass(frozen=True)
class NutritionRecord:
    """One dish with its per-serving nutrient values."""

    name: str
    calories: float
    protein: float
    sugar: float

    def __post_init__(self):
        for key in NUTRIENT_KEYS:
            value = getattr(self, key)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{key} of {self.name!r} must be finite and >= 0, got {value}")

    def value(self, key: str) -> float:
        if key not in NUTRIENT_KEYS:
            raise ValueError(f"unknown nutrient key {key!r}; expected one of {NUTRIENT_KEYS}")
        return float(getattr(self, key))


def _std_name(name: str) -> str:
    return " ".join(standardize_dish(name))


class Lexicon:
    """Nutrition records split into a seen pool and a held-out unseen pool."""

    def __init__(
        self,
        records: Sequence[NutritionRecord],
        seen_names: Iterable[str],
        directions: dict[str, str] | None = None,
    ):
        if not records:
            raise ValueError("lexicon has no records")
        self.records = tuple(records)
        self._by_std_name: dict[str, NutritionRecord] = {}
        for record in self.records:
            std = _std_name(record.name)
            if std in self._by_std_name:
                raise ValueError(f"duplicate dish name after standardisation: {std!r}")
            self._by_std_name[std] = record

        seen_std = []
        for name in seen_names:
            std = _std_name(name)
            if std not in self._by_std_name:
                raise ValueError(f"seen list names a dish missing from the lexicon: {name!r}")
            if std in seen_std:
                raise ValueError(f"seen list repeats {name!r}")
            seen_std.append(std)
        if not seen_std:
            raise ValueError("seen set is empty")
        self._seen_std = tuple(seen_std)
        self._unseen_std = tuple(s for s in self._by_std_name if s not in set(seen_std))

        self.directions = {key: "asc" for key in NUTRIENT_KEYS}
        for key, direction in (directions or {}).items():
            if key not in NUTRIENT_KEYS:
                raise ValueError(f"direction given for unknown key {key!r}")
            if direction not in ("asc", "desc"):
                raise ValueError(f"direction must be 'asc' or 'desc', got {direction!r}")
            self.directions[key] = direction

        seen_words = {w for s in self._seen_std for w in s.split()}
        for std in self._unseen_std:
            if not seen_words.intersection(std.split()):
                raise ValueError(f"unseen dish {std!r} shares no word with any seen dish")

    @property
    def seen(self) -> tuple[NutritionRecord, ...]:
        return tuple(self._by_std_name[s] for s in self._seen_std)

    @property
    def unseen(self) -> tuple[NutritionRecord, ...]:
        return tuple(self._by_std_name[s] for s in self._unseen_std)

    @property
    def seen_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.seen)

    @property
    def unseen_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.unseen)

    def record(self, dish_name: str) -> NutritionRecord:
        std = _std_name(dish_name)
        if std not in self._by_std_name:
            raise UnknownDishError(f"dish {dish_name!r} is not in the lexicon")
        return self._by_std_name[std]

    def direction(self, key: str) -> str:
        if key not in NUTRIENT_KEYS:
            raise ValueError(f"unknown nutrient key {key!r}")
        return self.directions[key]


def _parse_directives(lines: list[tuple[int, str]]) -> dict[str, str]:
    directions: dict[str, str] = {}
    for lineno, line in lines:
        body = line[2:].strip()
        if not body.startswith("direction:"):
            raise LexiconFormatError(f"line {lineno}: unknown directive {line!r}")
        for part in body[len("direction:"):].split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise LexiconFormatError(f"line {lineno}: directive entry {part!r} is not key=asc|desc")
            key, _, direction = part.partition("=")
            directions[key.strip()] = direction.strip()
    return directions


def parse_lexicon_csv(text: str) -> tuple[list[NutritionRecord], dict[str, str]]:
    """Parse lexicon CSV text; '#' lines are comments, '#!' lines directives."""
    data_lines: list[tuple[int, str]] = []
    directive_lines: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#!"):
            directive_lines.append((lineno, stripped))
        elif stripped.startswith("#"):
            continue
        else:
            data_lines.append((lineno, line))
    if not data_lines:
        raise LexiconFormatError("lexicon CSV has no data rows")

    header_lineno, header_line = data_lines[0]
    reader = csv.reader(io.StringIO(header_line))
    header = [h.strip() for h in next(reader)]
    for column in ("name", *NUTRIENT_KEYS):
        if column not in header:
            raise LexiconFormatError(f"line {header_lineno}: missing column {column!r}")

    records = []
    for lineno, line in data_lines[1:]:
        row = next(csv.reader(io.StringIO(line)))
        if len(row) != len(header):
            raise LexiconFormatError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        entry = dict(zip(header, (f.strip() for f in row)))
        try:
            record = NutritionRecord(
                name=entry["name"],
                calories=float(entry["calories"]),
                protein=float(entry["protein"]),
                sugar=float(entry["sugar"]),
            )
        except ValueError as exc:
            raise LexiconFormatError(f"line {lineno}: {exc}") from exc
        records.append(record)
    return records, _parse_directives(directive_lines)


def parse_seen_list(text: str) -> list[str]:
    names = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            names.append(stripped)
    return names


def load_lexicon(csv_path: str | Path, seen_path: str | Path) -> Lexicon:
    records, directions = parse_lexicon_csv(Path(csv_path).read_text(encoding="utf-8"))
    seen = parse_seen_list(Path(seen_path).read_text(encoding="utf-8"))
    return Lexicon(records, seen, directions)


def load_bundled_lexicon() -> Lexicon:
    """The packaged 60-dish lexicon: 38 seen dishes plus 22 held-out ones."""
    data = resources.files("dishrank.data")
    records, directions = parse_lexicon_csv((data / "lexicon.csv").read_text(encoding="utf-8"))
    seen = parse_seen_list((data / "seen_dishes.txt").read_text(encoding="utf-8"))
    return Lexicon(records, seen, directions)


@dataclass(frozen=True)
class MenuSample:
    """One labelled example: a menu, a search key, and the true ordering."""

    dish_names: tuple[str, ...]
    key: str
    truth: tuple[int, ...]
    menu_id: int


@dataclass(frozen=True)
class DatasetSpec:
    n_menus: int = 5625
    train_fraction: float = 0.8
    keys: tuple[str, ...] = ("calories",)
    seed: int = 0
    seen_fraction: float = 1.0

    def __post_init__(self):
        if self.n_menus < 1:
            raise ValueError(f"n_menus must be >= 1, got {self.n_menus}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must sit in (0, 1), got {self.train_fraction}")
        if not self.keys:
            raise ValueError("keys must name at least one nutrient")
        for key in self.keys:
            if key not in NUTRIENT_KEYS:
                raise ValueError(f"unknown nutrient key {key!r}; expected one of {NUTRIENT_KEYS}")
        if not 0.0 < self.seen_fraction <= 1.0:
            raise ValueError(f"seen_fraction must sit in (0, 1], got {self.seen_fraction}")

    @property
    def n_train_menus(self) -> int:
        return int(self.n_menus * self.train_fraction)

    @property
    def n_test_menus(self) -> int:
        return self.n_menus - self.n_train_menus


class DatasetBundle(NamedTuple):
    train: list[MenuSample]
    test: list[MenuSample]
    seed: int  # effective seed after any coverage retries


def ground_truth_rank(dish_names: Sequence[str], key: str, lexicon: Lexicon) -> np.ndarray:
    """Dish indices sorted by the key's nutrient value.

    Ascending (or descending when the lexicon says so) by value, then by
    standardised name, then by original index, so the ordering is total.
    """
    sign = 1.0 if lexicon.direction(key) == "asc" else -1.0
    decorated = []
    for i, name in enumerate(dish_names):
        record = lexicon.record(name)
        decorated.append((sign * record.value(key), _std_name(name), i))
    decorated.sort()
    return np.array([i for _, _, i in decorated], dtype=np.int64)


def _draw_menu(rng: np.random.Generator, pool: tuple[str, ...]) -> tuple[str, ...]:
    size = int(rng.integers(MENU_SIZE_MIN, MENU_SIZE_MAX + 1))
    picks = rng.choice(len(pool), size=size, replace=False)
    return tuple(pool[i] for i in picks)


def _samples_for_menus(
    menus: Sequence[tuple[str, ...]],
    keys: Sequence[str],
    lexicon: Lexicon,
    first_menu_id: int = 0,
) -> list[MenuSample]:
    samples = []
    for offset, names in enumerate(menus):
        for key in keys:
            truth = tuple(int(i) for i in ground_truth_rank(names, key, lexicon))
            samples.append(MenuSample(dish_names=names, key=key, truth=truth, menu_id=first_menu_id + offset))
    return samples


def generate_dataset(lexicon: Lexicon, spec: DatasetSpec) -> DatasetBundle:
    """Draw the full menu corpus and split it 80:20 by menu.

    Menus are distinct as ordered tuples, so no menu straddles the split.
    If some seen dish never lands in a training menu the whole corpus is
    redrawn with the next seed; the seed actually used is returned.
    """
    pool = lexicon.seen_names
    if len(pool) < MENU_SIZE_MAX:
        raise InsufficientLexiconError(
            f"need at least {MENU_SIZE_MAX} seen dishes for menus of up to {MENU_SIZE_MAX}, have {len(pool)}"
        )

    seed = spec.seed
    while True:
        rng = np.random.default_rng(seed)
        menus: list[tuple[str, ...]] = []
        taken: set[tuple[str, ...]] = set()
        while len(menus) < spec.n_menus:
            menu = _draw_menu(rng, pool)
            if menu in taken:
                continue
            taken.add(menu)
            menus.append(menu)
        train_menus = menus[: spec.n_train_menus]
        covered = {name for menu in train_menus for name in menu}
        if covered.issuperset(pool):
            break
        seed += 1

    train = _samples_for_menus(train_menus, spec.keys, lexicon, first_menu_id=0)
    test = _samples_for_menus(menus[spec.n_train_menus :], spec.keys, lexicon, first_menu_id=spec.n_train_menus)
    return DatasetBundle(train=train, test=test, seed=seed)


def make_unseen_test(lexicon: Lexicon, spec: DatasetSpec, seen_fraction: float | None = None) -> list[MenuSample]:
    """Test menus where only ceil(fraction * M) dishes come from the seen pool."""
    fraction = spec.seen_fraction if seen_fraction is None else seen_fraction
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"seen_fraction must sit in (0, 1], got {fraction}")
    if fraction < 1.0 and not lexicon.unseen_names:
        raise InsufficientLexiconError("lexicon has no unseen dishes for a reduced-seen test set")

    seen_pool = lexicon.seen_names
    unseen_pool = lexicon.unseen_names
    # Stream is keyed off (seed, fraction) so the three variants differ.
    rng = np.random.default_rng((spec.seed, int(round(fraction * 1000))))
    menus = []
    for _ in range(spec.n_test_menus):
        size = int(rng.integers(MENU_SIZE_MIN, MENU_SIZE_MAX + 1))
        n_seen = math.ceil(fraction * size - 1e-9)
        n_unseen = size - n_seen
        if n_seen > len(seen_pool):
            raise InsufficientLexiconError(f"menu needs {n_seen} seen dishes, pool has {len(seen_pool)}")
        if n_unseen > len(unseen_pool):
            raise InsufficientLexiconError(f"menu needs {n_unseen} unseen dishes, pool has {len(unseen_pool)}")
        picks = [seen_pool[i] for i in rng.choice(len(seen_pool), size=n_seen, replace=False)]
        if n_unseen:
            picks += [unseen_pool[i] for i in rng.choice(len(unseen_pool), size=n_unseen, replace=False)]
        order = rng.permutation(len(picks))
        menus.append(tuple(picks[i] for i in order))
    return _samples_for_menus(menus, spec.keys, lexicon)


def write_samples_jsonl(path: str | Path, samples: Iterable[MenuSample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(
                json.dumps(
                    {
                        "dishes": list(sample.dish_names),
                        "key": sample.key,
                        "truth": list(sample.truth),
                        "menu_id": sample.menu_id,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_samples_jsonl(path: str | Path) -> list[MenuSample]:
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            samples.append(
                MenuSample(
                    dish_names=tuple(obj["dishes"]),
                    key=str(obj["key"]),
                    truth=tuple(int(i) for i in obj["truth"]),
                    menu_id=int(obj["menu_id"]),
                )
            )
    return samples
