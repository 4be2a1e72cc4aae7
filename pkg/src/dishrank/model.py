"""Trained-model bundle and its versioned binary container.

A model file is self-contained: magic bytes, a format version, one
length-prefixed JSON header (ranker config, vocabulary, key-name map,
array shapes), then the raw little-endian float64 parameter blocks in
declared order.  Loading needs nothing but the file and round-trips
bit-exactly.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .autodiff import Array
from .encoding import Vocabulary, pack_menu
from .ranker import ARRAY_NAMES, RankerConfig, RankerParams, RankOutput, UnknownKeyError, forward

MAGIC = b"DISHRANK"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Model file is missing, corrupt, or from an incompatible version."""


@dataclass
class RankerModel:
    """Everything needed to rank a menu: params, vocabulary, key names."""

    config: RankerConfig
    params: RankerParams
    vocab: Vocabulary
    key_ids: dict[str, int]

    def __post_init__(self):
        if self.config.vocab_size != self.vocab.size:
            raise ValueError(f"config says vocab_size={self.config.vocab_size}, vocabulary has {self.vocab.size}")
        if sorted(self.key_ids.values()) != list(range(self.config.num_keys)):
            raise ValueError("key ids must be dense 0..num_keys-1")

    @property
    def key_names(self) -> list[str]:
        """Key names in id order."""
        return [name for name, _ in sorted(self.key_ids.items(), key=lambda kv: kv[1])]

    def key_id(self, key_name: str) -> int:
        if key_name not in self.key_ids:
            raise UnknownKeyError(f"unknown search key {key_name!r}; available: {', '.join(self.key_names)}")
        return self.key_ids[key_name]

    def rank_menu(self, dish_names, key_name: str) -> RankOutput:
        menu = pack_menu(dish_names, self.vocab)
        return forward(menu, self.key_id(key_name), self.params)

    def score_menu(self, dish_names, key_name: str) -> Array:
        return self.rank_menu(dish_names, key_name).scores

    def ranked_dishes(self, dish_names, key_name: str) -> list[dict]:
        """Rank-ordered entries: {dish, score, rank} with ranks 1..M."""
        out = self.rank_menu(dish_names, key_name)
        return [
            {"dish": dish_names[i], "score": float(out.scores[i]), "rank": rank}
            for rank, i in enumerate(out.permutation, start=1)
        ]

    def metadata(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "vocab_size": self.config.vocab_size,
            "embed_dim": self.config.embed_dim,
            "keys": self.key_names,
        }


def save_model(model: RankerModel, path: str | Path) -> None:
    """Write the container atomically (temp file + rename)."""
    header = {
        "format_version": FORMAT_VERSION,
        "ranker_config": {
            "vocab_size": model.config.vocab_size,
            "num_keys": model.config.num_keys,
            "embed_dim": model.config.embed_dim,
        },
        "vocabulary": model.vocab.to_dict(),
        "keys": model.key_ids,
        "arrays": [
            {"name": name, "rows": arr.shape[0], "cols": arr.shape[1]}
            for name, arr in model.params.as_dict().items()
        ],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")

    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", FORMAT_VERSION, len(header_bytes)))
            fh.write(header_bytes)
            for name in ARRAY_NAMES:
                block = np.ascontiguousarray(getattr(model.params, name), dtype="<f8")
                fh.write(block.tobytes())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_model(path: str | Path) -> RankerModel:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 8 or raw[: len(MAGIC)] != MAGIC:
        raise ModelFormatError(f"{path}: not a dishrank model file")
    version, header_len = struct.unpack_from("<II", raw, len(MAGIC))
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: format version {version} unsupported (expected {FORMAT_VERSION})")
    offset = len(MAGIC) + 8
    try:
        header = json.loads(raw[offset : offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: corrupt header ({exc})") from exc
    offset += header_len

    try:
        config = RankerConfig(**header["ranker_config"])
        declared = {entry["name"]: (int(entry["rows"]), int(entry["cols"])) for entry in header["arrays"]}
        vocab = Vocabulary.from_dict(header["vocabulary"])
        key_ids = {str(k): int(v) for k, v in header["keys"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed header ({exc})") from exc
    if set(declared) != set(ARRAY_NAMES):
        raise ModelFormatError(f"{path}: header declares unexpected arrays")

    arrays = {}
    for name in ARRAY_NAMES:
        rows, cols = declared[name]
        count = rows * cols
        if offset + count * 8 > len(raw):
            raise ModelFormatError(f"{path}: truncated block for {name!r}")
        block = np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
        arrays[name] = block.reshape(rows, cols).astype(np.float64)
        offset += count * 8
    if offset != len(raw):
        raise ModelFormatError(f"{path}: {len(raw) - offset} trailing bytes")

    return RankerModel(config=config, params=RankerParams.from_dict(arrays), vocab=vocab, key_ids=key_ids)
