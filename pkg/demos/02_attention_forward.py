"""One forward pass: dish embeddings, attention weights, scores, ranking."""

import numpy as np

from dishrank import build_vocabulary, load_bundled_lexicon, pack_menu
from dishrank.ranker import RankerConfig, RankerParams, forward

lexicon = load_bundled_lexicon()
vocab = build_vocabulary(lexicon.records)

names = ["green tea", "fried chicken", "caesar salad", "cheese burger", "miso soup"]
menu = pack_menu(names, vocab)

config = RankerConfig(vocab_size=vocab.size, num_keys=1)
params = RankerParams.initialize(config, seed=42)

out = forward(menu, 0, params)
print("scores (untrained, so the spread is tiny and the ordering arbitrary):")
for name, score in zip(names, out.scores):
    print(f"  {name:15} {score:+.9f}")

print("\nattention weights (each row sums to 1; every dish attends to the whole menu):")
with np.printoptions(precision=3, suppress=True):
    print(out.attention)

print("\npermutation, best first:", [names[i] for i in out.permutation])

# The model is a set function: permuting the menu permutes the scores.
perm = np.array([3, 0, 4, 1, 2])
shuffled = forward(pack_menu([names[i] for i in perm], vocab), 0, params)
print("\nequivariance check, max |difference| after permuting the menu:",
      float(np.abs(shuffled.scores - out.scores[perm]).max()))
