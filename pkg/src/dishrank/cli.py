"""Command-line surface: datagen, train, eval, rank, serve."""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

from . import datagen
from .datagen import DatasetSpec, load_bundled_lexicon, load_lexicon
from .encoding import build_vocabulary, parse_menu_text
from .model import load_model, save_model
from .training import TrainConfig, evaluate, train, write_history_csv

SEEN_FRACTIONS = {"test_seen50.jsonl": 0.5, "test_seen10.jsonl": 0.1}


def _parse_keys(raw: str) -> tuple[str, ...]:
    keys = tuple(k.strip() for k in raw.split(",") if k.strip())
    if not keys:
        raise argparse.ArgumentTypeError("expected a comma-separated list of keys")
    return keys


def _load_lexicon_args(args) -> datagen.Lexicon:
    if args.lexicon is None and args.seen_list is None:
        return load_bundled_lexicon()
    if args.lexicon is None or args.seen_list is None:
        raise ValueError("--lexicon and --seen-list must be given together")
    return load_lexicon(args.lexicon, args.seen_list)


def cmd_datagen(args) -> int:
    lexicon = _load_lexicon_args(args)
    spec = DatasetSpec(n_menus=args.n_menus, keys=args.keys, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    train_samples, test_samples, used_seed = datagen.generate_dataset(lexicon, spec)
    effective = DatasetSpec(n_menus=args.n_menus, keys=args.keys, seed=used_seed)
    datagen.write_samples_jsonl(out_dir / "train.jsonl", train_samples)
    datagen.write_samples_jsonl(out_dir / "test.jsonl", test_samples)
    counts = {"train.jsonl": spec.n_train_menus, "test.jsonl": spec.n_test_menus}
    for filename, fraction in SEEN_FRACTIONS.items():
        samples = datagen.make_unseen_test(lexicon, effective, seen_fraction=fraction)
        datagen.write_samples_jsonl(out_dir / filename, samples)
        counts[filename] = spec.n_test_menus

    if args.lexicon is not None:
        shutil.copy(args.lexicon, out_dir / "lexicon.csv")
        shutil.copy(args.seen_list, out_dir / "seen_dishes.txt")
    else:
        from importlib import resources

        data = resources.files("dishrank.data")
        (out_dir / "lexicon.csv").write_text((data / "lexicon.csv").read_text(encoding="utf-8"), encoding="utf-8")
        (out_dir / "seen_dishes.txt").write_text(
            (data / "seen_dishes.txt").read_text(encoding="utf-8"), encoding="utf-8"
        )

    manifest = {
        "seed": used_seed,
        "requested_seed": args.seed,
        "n_menus": args.n_menus,
        "keys": list(args.keys),
        "menus_per_file": counts,
        "samples_per_menu": len(args.keys),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {', '.join(sorted(counts))} and manifest.json to {out_dir} (seed {used_seed})")
    return 0


def cmd_train(args) -> int:
    data_dir = Path(args.data)
    train_samples = datagen.read_samples_jsonl(data_dir / "train.jsonl")
    val_path = data_dir / "test.jsonl"
    val_samples = datagen.read_samples_jsonl(val_path) if val_path.exists() else None

    if args.keys is not None:
        keys = args.keys
    else:
        manifest_path = data_dir / "manifest.json"
        if manifest_path.exists():
            keys = tuple(json.loads(manifest_path.read_text(encoding="utf-8"))["keys"])
        else:
            keys = tuple(dict.fromkeys(s.key for s in train_samples))

    lexicon = load_lexicon(data_dir / "lexicon.csv", data_dir / "seen_dishes.txt")
    vocab = build_vocabulary(lexicon.records)

    config = TrainConfig(
        epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr, seed=args.seed, keys=keys
    )
    ranker_config = None
    if args.embed_dim is not None:
        from .ranker import RankerConfig

        ranker_config = RankerConfig(vocab_size=vocab.size, num_keys=len(keys), embed_dim=args.embed_dim)

    model, history = train(config, train_samples, vocab, val_samples=val_samples, ranker_config=ranker_config)
    save_model(model, args.out)
    history_path = Path(args.history) if args.history else Path(args.out).with_suffix(".history.csv")
    write_history_csv(history_path, history)
    last = history[-1] if history else None
    summary = f"final train loss {last.train_loss:.4f}" if last else "no epochs run"
    print(f"saved model to {args.out}, history to {history_path} ({summary})")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    samples = datagen.read_samples_jsonl(args.testset)
    missing = sorted({s.key for s in samples} - set(model.key_names))
    if missing:
        raise ValueError(
            f"model/testset mismatch: testset uses keys {missing} the model was not trained on "
            f"(model keys: {model.key_names})"
        )
    split_name = args.split_name or Path(args.testset).stem
    report = evaluate(model, samples, split_name=split_name)
    print(json.dumps(report.to_json_dict(), indent=2))
    return 0


def cmd_rank(args) -> int:
    model = load_model(args.model)
    dishes = parse_menu_text(Path(args.menu).read_text(encoding="utf-8"))
    entries = model.ranked_dishes(dishes, args.key)
    if args.json:
        print(json.dumps({"key": args.key, "results": entries, "model": model.metadata()}, indent=2))
        return 0
    width = max(len(e["dish"]) for e in entries)
    for entry in entries:
        print(f"{entry['rank']:>4}  {entry['dish']:<{width}}  {entry['score']:+.6f}")
    return 0


def cmd_serve(args) -> int:
    from .server import create_server

    model = load_model(args.model)
    host, _, port = args.bind.rpartition(":")
    server = create_server(model, host=host or "127.0.0.1", port=int(port), cors_origin=args.cors_origin)
    print(f"serving {args.model} on http://{server.server_address[0]}:{server.server_address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dishrank", description="Rank restaurant dishes by a nutritional search key.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("datagen", help="generate train/test menu datasets")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--lexicon", help="lexicon CSV (default: bundled)")
    p.add_argument("--seen-list", help="seen-dish list (default: bundled)")
    p.add_argument("--n-menus", type=int, default=5625)
    p.add_argument("--keys", type=_parse_keys, default=("calories",))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_datagen)

    p = sub.add_parser("train", help="train a ranker on a generated dataset")
    p.add_argument("--data", required=True, help="dataset directory from `dishrank datagen`")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--history", help="history CSV path (default: alongside the model)")
    p.add_argument("--keys", type=_parse_keys, default=None, help="default: keys recorded in the dataset")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embed-dim", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a testset, JSON to stdout")
    p.add_argument("--model", required=True)
    p.add_argument("--testset", required=True)
    p.add_argument("--split-name", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rank", help="rank one menu text file")
    p.add_argument("--model", required=True)
    p.add_argument("--menu", required=True, help="menu text file, one dish per line")
    p.add_argument("--key", required=True)
    p.add_argument("--json", action="store_true", help="emit the rank response as JSON")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("serve", help="serve the HTTP ranking API")
    p.add_argument("--model", required=True)
    p.add_argument("--bind", default="127.0.0.1:8080")
    p.add_argument("--cors-origin", default="*")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"dishrank {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
