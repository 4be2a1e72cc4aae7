"""Build a labelled menu corpus from the bundled nutrition lexicon."""

from pathlib import Path
from tempfile import mkdtemp

from dishrank import DatasetSpec, generate_dataset, ground_truth_rank, load_bundled_lexicon, make_unseen_test
from dishrank.datagen import write_samples_jsonl

lexicon = load_bundled_lexicon()
print(f"lexicon: {len(lexicon.seen)} seen dishes, {len(lexicon.unseen)} held-out dishes")
print("example records:")
for record in lexicon.records[:3]:
    print(f"  {record.name:18} {record.calories:5.0f} kcal  {record.protein:4.1f} g protein  {record.sugar:4.1f} g sugar")

spec = DatasetSpec(n_menus=250, keys=("calories", "protein"), seed=7)
train, test, used_seed = generate_dataset(lexicon, spec)
print(f"\ngenerated {len(train)} train / {len(test)} test samples "
      f"({spec.n_train_menus}:{spec.n_test_menus} menus x {len(spec.keys)} keys, seed {used_seed})")

sample = train[0]
print(f"\nfirst sample (menu {sample.menu_id}, key {sample.key!r}):")
for position, dish_index in enumerate(sample.truth, start=1):
    name = sample.dish_names[dish_index]
    value = lexicon.record(name).value(sample.key)
    print(f"  rank {position:2}  {name:22} {value:6.1f}")

recomputed = ground_truth_rank(sample.dish_names, sample.key, lexicon)
print("label reproducible from the lexicon:", tuple(recomputed) == sample.truth)

reduced = make_unseen_test(lexicon, spec, seen_fraction=0.5)
seen = set(lexicon.seen_names)
fractions = [sum(1 for d in s.dish_names if d in seen) / len(s.dish_names) for s in reduced]
print(f"\n50%-seen variant: {len(reduced)} samples, mean seen fraction {sum(fractions)/len(fractions):.2f}")

out_dir = Path(mkdtemp(prefix="dishrank_demo_"))
write_samples_jsonl(out_dir / "train.jsonl", train)
print(f"\nwrote JSONL to {out_dir/'train.jsonl'}; the CLI equivalent is:")
print("  dishrank datagen --out data/ --n-menus 250 --keys calories,protein --seed 7")
