import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dishrank import DatasetSpec, build_vocabulary, generate_dataset, load_bundled_lexicon


@pytest.fixture(scope="session")
def lexicon():
    return load_bundled_lexicon()


@pytest.fixture(scope="session")
def vocab(lexicon):
    return build_vocabulary(lexicon.records)


@pytest.fixture(scope="session")
def default_single_dataset(lexicon):
    """The default-size single-key corpus: 4500 train / 1125 test menus."""
    return generate_dataset(lexicon, DatasetSpec(seed=0))
