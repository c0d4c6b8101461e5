"""Directory-per-project persistence.

Everything is JSON, CSV, or PNG inside one project directory, written
atomically (temp file + rename) so a crash never leaves a half-written
artifact.  Layout:

    project/
      config.json  status.json
      images/  gold/
      artifacts/   (self-config, threshold table, stores, rule bases)
      online/      (queue state, feedback events, served segments)
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .fuzzy import RuleBase, TrainingStore
from .pipeline import ProjectConfig

log = logging.getLogger(__name__)

PHASES = ("created", "configured", "offline-done", "trained", "online")


def atomic_write(path, data):
    """Write bytes or text to path via temp-then-rename."""
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    atomic_write(path, json.dumps(obj, indent=2))


def read_json(path):
    with open(path) as f:
        return json.load(f)


def write_matrix_csv(path, matrix, header=None, row_labels=None):
    buf = io.StringIO()
    w = csv.writer(buf)
    if header is not None:
        w.writerow((["id"] if row_labels is not None else []) + list(header))
    for i, row in enumerate(np.atleast_2d(matrix)):
        prefix = [row_labels[i]] if row_labels is not None else []
        w.writerow(prefix + [repr(float(v)) for v in row])
    atomic_write(path, buf.getvalue())


def read_matrix_csv(path, has_header=True, has_labels=True):
    with open(path) as f:
        rows = list(csv.reader(f))
    header = rows.pop(0) if has_header else None
    labels = []
    data = []
    for r in rows:
        if has_labels:
            labels.append(r[0])
            r = r[1:]
        data.append([float(v) for v in r])
    return np.array(data), header, labels


class ProjectStore:
    """One project's on-disk state and phase tracking."""

    def __init__(self, root):
        self.root = Path(root)

    @property
    def images_dir(self):
        return self.root / "images"

    @property
    def gold_dir(self):
        return self.root / "gold"

    @property
    def artifacts(self):
        return self.root / "artifacts"

    @property
    def online_dir(self):
        return self.root / "online"

    @classmethod
    def create(cls, root, config_overrides=None):
        root = Path(root)
        store = cls(root)
        for d in (root, store.images_dir, store.gold_dir, store.artifacts,
                  store.online_dir, store.online_dir / "events",
                  store.online_dir / "segments"):
            d.mkdir(parents=True, exist_ok=True)
        config = ProjectConfig(
            image_dir=store.images_dir, gold_dir=store.gold_dir,
            **(config_overrides or {}),
        )
        write_json(root / "config.json", config.to_dict())
        write_json(root / "status.json", {"phase": "created", "rule_version": None})
        return store

    def exists(self):
        return (self.root / "config.json").exists()

    def config(self):
        return ProjectConfig.from_dict(read_json(self.root / "config.json"))

    def status(self):
        return read_json(self.root / "status.json")

    def set_phase(self, phase, **extra):
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase}")
        st = self.status()
        if PHASES.index(phase) < PHASES.index(st["phase"]):
            raise ValueError(f"phase cannot move back from {st['phase']} to {phase}")
        st["phase"] = phase
        st.update(extra)
        write_json(self.root / "status.json", st)

    def require_phase(self, *allowed):
        phase = self.status()["phase"]
        if phase not in allowed:
            raise ValueError(f"operation requires phase in {allowed}, project is {phase}")

    # -- images ---------------------------------------------------------

    def ingest_images(self, files):
        """Register image (and .gold) PNG payloads.

        files: iterable of (filename, bytes).  A name ending in
        .gold.png lands in gold/.  Re-ingesting a known id is a no-op.
        Returns (new count, per-file errors).
        """
        count = 0
        errors = {}
        for name, payload in files:
            try:
                with Image.open(io.BytesIO(payload)) as im:
                    arr = np.asarray(im.convert("L"), dtype=np.uint8)
            except (UnidentifiedImageError, OSError) as exc:
                errors[name] = f"not a decodable image: {exc}"
                continue
            stem = Path(name).stem
            if stem.endswith(".gold") or name.endswith(".gold.png"):
                image_id = stem.removesuffix(".gold")
                target = self.gold_dir / f"{image_id}.png"
                arr = ((arr > 0) * 255).astype(np.uint8)
            else:
                image_id = stem
                target = self.images_dir / f"{image_id}.png"
            if target.exists():
                log.info("ingest: %s already present, skipped", target.name)
                continue
            buf = io.BytesIO()
            Image.fromarray(arr, mode="L").save(buf, format="PNG")
            atomic_write(target, buf.getvalue())
            count += 1
        return count, errors

    # -- artifacts ------------------------------------------------------

    def save_selfconfig(self, sc):
        names = sc.selected_names
        labels = [
            f"{img}:{s}"
            for img in sc.image_ids
            for s in range(sc.f_star.shape[0] // len(sc.image_ids))
        ]
        write_matrix_csv(self.artifacts / "f_star.csv", sc.f_star,
                         header=names, row_labels=labels)
        write_matrix_csv(self.artifacts / "f3.csv", sc.f3, row_labels=labels,
                         header=[f"c{i}" for i in range(sc.f3.shape[1])])
        write_json(self.artifacts / "selfconfig.json", {
            "z": sc.z,
            "image_ids": sc.image_ids,
            "selected_indices": sc.selected_indices,
            "selected_names": sc.selected_names,
            "report": sc.report.to_dict(),
        })

    def load_selfconfig(self):
        from .pipeline import SelfConfigResult
        from .selection import SelectionReport

        meta = read_json(self.artifacts / "selfconfig.json")
        f_star, _, _ = read_matrix_csv(self.artifacts / "f_star.csv")
        f3, _, _ = read_matrix_csv(self.artifacts / "f3.csv")
        rep = meta["report"]
        report = SelectionReport(
            n_t=rep["widths"]["n_t"], n_t1=rep["widths"]["n_t1"],
            n_t2=rep["widths"]["n_t2"], n_t3=rep["widths"]["n_t3"],
            n_l=rep["widths"]["n_l"],
            per_method=rep["per_method"],
            failed_methods=rep["failed_methods"],
            vote_tally={int(k): v for k, v in rep["vote_tally"].items()},
            dropped_constant=rep["dropped_constant"],
            quorum=rep["quorum"], vote_fallback=rep["vote_fallback"],
        )
        return SelfConfigResult(
            z=meta["z"], image_ids=meta["image_ids"], f3=f3, f_star=f_star,
            selected_indices=meta["selected_indices"],
            selected_names=meta["selected_names"], report=report,
        )

    def save_thresholds(self, table):
        rows = [[t, j] for t, j in table.values()]
        write_matrix_csv(self.artifacts / "thresholds.csv", rows,
                         header=["t_star", "j_max"],
                         row_labels=list(table.keys()))

    def load_thresholds(self):
        data, _, labels = read_matrix_csv(self.artifacts / "thresholds.csv")
        return {lab: (int(row[0]), float(row[1])) for lab, row in zip(labels, data)}

    def save_store(self, store):
        write_matrix_csv(self.artifacts / "store_M.csv", store.inputs,
                         header=[f"x{i}" for i in range(store.inputs.shape[1])])
        write_matrix_csv(self.artifacts / "store_O.csv",
                         store.outputs.reshape(-1, 1), header=["t"])

    def load_store(self):
        m, _, _ = read_matrix_csv(self.artifacts / "store_M.csv", has_labels=False)
        o, _, _ = read_matrix_csv(self.artifacts / "store_O.csv", has_labels=False)
        return TrainingStore(m, o.ravel())

    def save_rulebase(self, rb):
        atomic_write(self.artifacts / f"rules_v{rb.version}.json", rb.dumps())
        self.set_phase(self.status()["phase"], rule_version=rb.version)

    def load_rulebase(self, version=None):
        if version is None:
            version = self.status()["rule_version"]
        with open(self.artifacts / f"rules_v{version}.json") as f:
            return RuleBase.loads(f.read())

    # -- online session -------------------------------------------------

    def save_online_state(self, state):
        write_json(self.online_dir / "session.json", state)

    def load_online_state(self):
        path = self.online_dir / "session.json"
        if not path.exists():
            return None
        return read_json(path)

    def save_segment(self, image_id, mask):
        buf = io.BytesIO()
        Image.fromarray((np.asarray(mask, dtype=np.uint8) * 255), mode="L").save(
            buf, format="PNG"
        )
        atomic_write(self.online_dir / "segments" / f"{image_id}.png", buf.getvalue())

    def load_segment(self, image_id):
        path = self.online_dir / "segments" / f"{image_id}.png"
        with Image.open(path) as im:
            return (np.asarray(im.convert("L")) > 0).astype(np.uint8)

    def save_event(self, event):
        write_json(self.online_dir / "events" / f"{event['image_id']}.json", event)

    def load_events(self):
        events = []
        for p in sorted((self.online_dir / "events").glob("*.json")):
            events.append(read_json(p))
        events.sort(key=lambda e: e["sequence"])
        return events
