"""Persist a model, serve it over HTTP, and rank a menu through the API."""

import json
import threading
import urllib.request
from pathlib import Path
from tempfile import mkdtemp

from dishrank import DatasetSpec, TrainConfig, build_vocabulary, generate_dataset, load_bundled_lexicon, train
from dishrank.model import load_model, save_model
from dishrank.server import create_server

lexicon = load_bundled_lexicon()
vocab = build_vocabulary(lexicon.records)
train_set, _, _ = generate_dataset(lexicon, DatasetSpec(n_menus=300, keys=("calories",), seed=0))
model, _ = train(TrainConfig(epochs=8, seed=0), train_set, vocab)

model_path = Path(mkdtemp(prefix="dishrank_demo_")) / "calories.drk"
save_model(model, model_path)
served = load_model(model_path)
print(f"model round-tripped through {model_path} ({model_path.stat().st_size} bytes)")

server = create_server(served, host="127.0.0.1", port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print(f"serving on {base} (CLI equivalent: dishrank serve --model {model_path})")

with urllib.request.urlopen(base + "/api/keys") as resp:
    print("GET /api/keys ->", resp.read().decode())

menu_text = "green tea\nfried chicken\ncaesar salad\ncheese burger\nmiso soup\n"
request = urllib.request.Request(
    base + "/api/rank",
    data=json.dumps({"menu_text": menu_text, "key": "calories"}).encode(),
    headers={"Content-Type": "application/json"},
)
with urllib.request.urlopen(request) as resp:
    payload = json.loads(resp.read().decode())

print("\nPOST /api/rank, lightest dishes first:")
for entry in payload["results"]:
    print(f"  rank {entry['rank']}  {entry['dish']:15} score {entry['score']:+.4f}")

server.shutdown()
server.server_close()
