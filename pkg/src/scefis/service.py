"""HTTP+JSON API for project management and interactive review.

The review endpoints drive the online/evolving loop: the segment
proposed for the next queued test image is served, the reviewer submits
a corrected mask, and the rule base evolves before the next item.
Feedback handling is serialized per project; reads are concurrent.
"""

import base64
import io
import threading
import time
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, UploadFile
from PIL import Image
from pydantic import BaseModel

from . import fuzzy, pipeline, thresholds
from .metrics import jaccard, maa_search
from .storage import ProjectStore

_locks: dict[str, threading.Lock] = {}
_locks_guard = threading.Lock()


def _lock_for(project_id):
    with _locks_guard:
        return _locks.setdefault(project_id, threading.Lock())


def mask_to_b64png(mask):
    buf = io.BytesIO()
    Image.fromarray((np.asarray(mask, dtype=np.uint8) * 255), mode="L").save(
        buf, format="PNG"
    )
    return base64.b64encode(buf.getvalue()).decode()


def gray_to_b64png(img):
    buf = io.BytesIO()
    Image.fromarray(np.asarray(img, dtype=np.uint8), mode="L").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode()


def b64png_to_mask(data):
    try:
        raw = base64.b64decode(data)
        with Image.open(io.BytesIO(raw)) as im:
            return (np.asarray(im.convert("L")) > 0).astype(np.uint8)
    except Exception as exc:
        raise HTTPException(422, f"mask is not a decodable PNG: {exc}")


class CreateProject(BaseModel):
    config: dict = {}


class FeedbackBody(BaseModel):
    mask_png_b64: str


class PhaseBody(BaseModel):
    train_ids: list[str] | None = None
    test_ids: list[str] | None = None


def create_app(projects_root):
    projects_root = Path(projects_root)
    projects_root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="scefis", version="1")

    def get_store(project_id):
        store = ProjectStore(projects_root / project_id)
        if not store.exists():
            raise HTTPException(404, f"no project {project_id}")
        return store

    def require_phase(store, *allowed):
        try:
            store.require_phase(*allowed)
        except ValueError as exc:
            raise HTTPException(409, str(exc))

    @app.post("/v1/projects")
    def create_project(body: CreateProject):
        project_id = uuid.uuid4().hex[:12]
        try:
            ProjectStore.create(projects_root / project_id, body.config)
        except (TypeError, ValueError) as exc:
            raise HTTPException(422, f"invalid config: {exc}")
        return {"id": project_id, "phase": "created"}

    @app.get("/v1/projects/{project_id}")
    def get_project(project_id: str):
        store = get_store(project_id)
        st = store.status()
        return {"id": project_id, **st, "config": store.config().to_dict()}

    @app.post("/v1/projects/{project_id}/images")
    async def ingest(project_id: str, files: list[UploadFile]):
        store = get_store(project_id)
        payloads = [(f.filename, await f.read()) for f in files]
        count, errors = store.ingest_images(payloads)
        return {"ingested": count, "errors": errors}

    @app.post("/v1/projects/{project_id}/configure")
    def configure(project_id: str):
        store = get_store(project_id)
        with _lock_for(project_id):
            require_phase(store, "created", "configured")
            config = store.config()
            try:
                sc = pipeline.self_configure(config)
            except ValueError as exc:
                raise HTTPException(409, str(exc))
            store.save_selfconfig(sc)
            store.set_phase("configured")
        return {"z": sc.z, "widths": sc.report.to_dict()["widths"]}

    @app.post("/v1/projects/{project_id}/offline")
    def offline(project_id: str):
        store = get_store(project_id)
        with _lock_for(project_id):
            require_phase(store, "configured", "offline-done")
            table = pipeline.offline_optimal(store.config())
            if not table:
                raise HTTPException(409, "no gold standards available")
            store.save_thresholds(table)
            store.set_phase("offline-done")
        return {"images": len(table)}

    @app.post("/v1/projects/{project_id}/train")
    def train(project_id: str, body: PhaseBody):
        store = get_store(project_id)
        with _lock_for(project_id):
            require_phase(store, "offline-done", "trained")
            config = store.config()
            sc = store.load_selfconfig()
            table = store.load_thresholds()
            train_ids = body.train_ids or sorted(table)
            missing = [i for i in train_ids if i not in table]
            if missing:
                raise HTTPException(422, f"no offline entry for {missing}")
            tstore, rb = pipeline.train(config, sc, table, train_ids)
            store.save_store(tstore)
            store.save_rulebase(rb)
            store.set_phase("trained", train_ids=train_ids, rule_version=rb.version)
        return {"rules": len(rb.rules), "store_rows": len(tstore), "version": rb.version}

    @app.post("/v1/projects/{project_id}/online")
    def online(project_id: str, body: PhaseBody):
        store = get_store(project_id)
        with _lock_for(project_id):
            require_phase(store, "trained")
            st = store.status()
            imgs = pipeline.ImageSet(store.config())
            test_ids = body.test_ids or [
                i for i in imgs.ids if i not in st.get("train_ids", [])
            ]
            unknown = [i for i in test_ids if i not in imgs.ids]
            if unknown:
                raise HTTPException(422, f"unknown images {unknown}")
            store.save_online_state(
                {"queue": test_ids, "position": 0, "results": {}, "trace": []}
            )
            store.set_phase("online")
        return {"queue": test_ids}

    @app.get("/v1/projects/{project_id}/review/next")
    def review_next(project_id: str):
        store = get_store(project_id)
        require_phase(store, "online")
        state = store.load_online_state()
        if state["position"] >= len(state["queue"]):
            return {"empty": True}
        image_id = state["queue"][state["position"]]
        config = store.config()
        imgs = pipeline.ImageSet(config)
        img = imgs.image(image_id)
        sc = store.load_selfconfig()
        rb = store.load_rulebase()
        t_star, _ = pipeline.predict_threshold(rb, sc.rows_for(image_id))
        segment = thresholds.apply_threshold(img, t_star, config.dark_object)
        store.save_segment(image_id, segment)
        return {
            "empty": False,
            "image_id": image_id,
            "threshold": t_star,
            "width": int(img.shape[1]),
            "height": int(img.shape[0]),
            "image_png_b64": gray_to_b64png(img),
            "mask_png_b64": mask_to_b64png(segment),
        }

    @app.post("/v1/projects/{project_id}/review/{image_id}/feedback")
    def feedback(project_id: str, image_id: str, body: FeedbackBody):
        store = get_store(project_id)
        with _lock_for(project_id):
            require_phase(store, "online")
            state = store.load_online_state()
            if state["position"] >= len(state["queue"]):
                raise HTTPException(409, "queue exhausted")
            expected = state["queue"][state["position"]]
            if image_id in state["results"]:
                raise HTTPException(409, f"{image_id} already reviewed")
            if image_id != expected:
                raise HTTPException(409, f"expected feedback for {expected}")
            config = store.config()
            imgs = pipeline.ImageSet(config)
            img = imgs.image(image_id)
            gold = b64png_to_mask(body.mask_png_b64)
            if gold.shape != img.shape:
                raise HTTPException(
                    422, f"mask shape {gold.shape} != image shape {img.shape}"
                )
            segment = store.load_segment(image_id)
            score = jaccard(segment, gold)
            t_b = maa_search(img, gold, dark_object=config.dark_object).threshold
            sc = store.load_selfconfig()
            rb = store.load_rulebase()
            tstore = store.load_store()
            rb2, tstore2 = fuzzy.evolve(
                rb, tstore, sc.rows_for(image_id), t_b,
                d_min=config.d_min, radius=config.radius,
            )
            store.save_store(tstore2)
            store.save_rulebase(rb2)
            event = {
                "image_id": image_id,
                "sequence": state["position"],
                "best_threshold": int(t_b),
                "jaccard": score,
                "rule_version": rb2.version,
                "rule_count": len(rb2.rules),
                "mask_png_b64": body.mask_png_b64,
                "timestamp": time.time(),
            }
            store.save_event(event)
            state["results"][image_id] = {"jaccard": score, "threshold_best": int(t_b)}
            state["trace"].append(len(rb2.rules))
            state["position"] += 1
            store.save_online_state(state)
        return {k: v for k, v in event.items() if k != "mask_png_b64"}

    @app.get("/v1/projects/{project_id}/rules")
    def rules(project_id: str):
        store = get_store(project_id)
        if store.status()["rule_version"] is None:
            raise HTTPException(409, "not trained yet")
        return store.load_rulebase().to_dict()

    @app.get("/v1/projects/{project_id}/metrics")
    def metrics(project_id: str):
        store = get_store(project_id)
        state = store.load_online_state() or {"queue": [], "results": {}, "trace": []}
        return {
            "rule_trace": state["trace"],
            "per_image": state["results"],
            "reviewed": len(state["results"]),
            "queued": len(state["queue"]),
        }

    return app
