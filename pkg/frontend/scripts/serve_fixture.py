"""Stand up a ready-to-review project and serve the API.

Used by the frontend integration test: builds a small synthetic
project (configured, offline table, trained, online queue of 2) under
the given projects root as id "demo", then blocks serving HTTP.

Usage: python3 serve_fixture.py PROJECTS_ROOT PORT
"""

import sys
from pathlib import Path

import uvicorn

from scefis import pipeline, synthdata
from scefis.service import create_app
from scefis.storage import ProjectStore


def main():
    projects_root = Path(sys.argv[1])
    port = int(sys.argv[2])
    store = ProjectStore.create(projects_root / "demo")
    synthdata.generate_dataset(store.images_dir, store.gold_dir, count=8, seed=2024)
    config = store.config()
    sc = pipeline.self_configure(config)
    store.save_selfconfig(sc)
    store.set_phase("configured")
    table = pipeline.offline_optimal(config)
    store.save_thresholds(table)
    store.set_phase("offline-done")
    train_ids = sc.image_ids[:6]
    tstore, rb = pipeline.train(config, sc, table, train_ids)
    store.save_store(tstore)
    store.save_rulebase(rb)
    store.set_phase("trained", train_ids=train_ids, rule_version=rb.version)
    queue = sc.image_ids[6:]
    store.save_online_state({"queue": queue, "position": 0, "results": {}, "trace": []})
    store.set_phase("online")
    print(f"fixture ready: project demo, queue {queue}", flush=True)
    uvicorn.run(create_app(projects_root), host="127.0.0.1", port=port,
                log_level="warning")


if __name__ == "__main__":
    main()
