"""Model bundle persistence: bit-exact round trips and format guards."""

import struct

import numpy as np
import pytest

from dishrank.encoding import build_vocabulary
from dishrank.model import FORMAT_VERSION, MAGIC, ModelFormatError, RankerModel, load_model, save_model
from dishrank.ranker import RankerConfig, RankerParams, UnknownKeyError


@pytest.fixture()
def model():
    vocab = build_vocabulary(["green tea", "fried rice", "cheese burger", "fish soup"])
    config = RankerConfig(vocab_size=vocab.size, num_keys=2, embed_dim=8)
    return RankerModel(
        config=config,
        params=RankerParams.initialize(config, seed=21),
        vocab=vocab,
        key_ids={"calories": 0, "protein": 1},
    )


class TestRoundTrip:
    def test_bit_exact(self, model, tmp_path):
        path = tmp_path / "model.drk"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.config == model.config
        assert loaded.vocab == model.vocab
        assert loaded.key_ids == model.key_ids
        for name, arr in model.params.as_dict().items():
            other = loaded.params.as_dict()[name]
            assert arr.dtype == other.dtype == np.float64
            np.testing.assert_array_equal(arr, other)

    def test_save_load_save_is_byte_stable(self, model, tmp_path):
        first = tmp_path / "a.drk"
        second = tmp_path / "b.drk"
        save_model(model, first)
        save_model(load_model(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_no_temp_files_left_behind(self, model, tmp_path):
        save_model(model, tmp_path / "model.drk")
        assert [p.name for p in tmp_path.iterdir()] == ["model.drk"]


class TestFormatGuards:
    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "bogus.drk"
        path.write_bytes(b"NOTAMODEL" + b"\0" * 32)
        with pytest.raises(ModelFormatError, match="not a dishrank model"):
            load_model(path)

    def test_wrong_version(self, model, tmp_path):
        path = tmp_path / "model.drk"
        save_model(model, path)
        raw = bytearray(path.read_bytes())
        raw[len(MAGIC) : len(MAGIC) + 4] = struct.pack("<I", FORMAT_VERSION + 1)
        path.write_bytes(bytes(raw))
        with pytest.raises(ModelFormatError, match="version"):
            load_model(path)

    def test_truncated_file(self, model, tmp_path):
        path = tmp_path / "model.drk"
        save_model(model, path)
        path.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_trailing_garbage(self, model, tmp_path):
        path = tmp_path / "model.drk"
        save_model(model, path)
        path.write_bytes(path.read_bytes() + b"xx")
        with pytest.raises(ModelFormatError, match="trailing"):
            load_model(path)


class TestRankerModel:
    def test_ranked_dishes_are_dense_rank_order(self, model):
        names = ["green tea", "fried rice", "cheese burger", "fish soup", "rice tea"]
        entries = model.ranked_dishes(names, "calories")
        assert [e["rank"] for e in entries] == [1, 2, 3, 4, 5]
        scores = [e["score"] for e in entries]
        assert scores == sorted(scores, reverse=True)
        assert {e["dish"] for e in entries} == set(names)

    def test_unknown_key_lists_available(self, model):
        with pytest.raises(UnknownKeyError, match="calories, protein"):
            model.rank_menu(["green tea"], "fat")

    def test_metadata_fields(self, model):
        meta = model.metadata()
        assert meta["format_version"] == FORMAT_VERSION
        assert meta["keys"] == ["calories", "protein"]
        assert meta["embed_dim"] == 8

    def test_key_ids_must_be_dense(self, model):
        with pytest.raises(ValueError):
            RankerModel(config=model.config, params=model.params, vocab=model.vocab, key_ids={"calories": 0, "protein": 2})
