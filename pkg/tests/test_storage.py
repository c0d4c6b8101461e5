import io

import numpy as np
import pytest
from PIL import Image

from scefis import fuzzy, pipeline, storage


def png_bytes(arr):
    buf = io.BytesIO()
    Image.fromarray(arr.astype(np.uint8), mode="L").save(buf, format="PNG")
    return buf.getvalue()


@pytest.fixture
def project(tmp_path):
    return storage.ProjectStore.create(tmp_path / "proj")


class TestAtomicWrite:
    def test_text_and_bytes(self, tmp_path):
        p = tmp_path / "a.txt"
        storage.atomic_write(p, "hello")
        assert p.read_text() == "hello"
        storage.atomic_write(p, b"\x00\x01")
        assert p.read_bytes() == b"\x00\x01"

    def test_no_temp_left_behind(self, tmp_path):
        storage.atomic_write(tmp_path / "b.json", "{}")
        assert not list(tmp_path.glob(".tmp-*"))


class TestMatrixCsv:
    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        m = rng.normal(0, 1e6, (5, 4))
        p = tmp_path / "m.csv"
        storage.write_matrix_csv(p, m, header=list("abcd"),
                                 row_labels=[f"r{i}" for i in range(5)])
        back, header, labels = storage.read_matrix_csv(p)
        np.testing.assert_array_equal(back, m)  # repr() keeps full precision
        assert header == ["id", "a", "b", "c", "d"]
        assert labels == ["r0", "r1", "r2", "r3", "r4"]


class TestProjectLifecycle:
    def test_create_layout(self, project):
        assert project.exists()
        for d in (project.images_dir, project.gold_dir, project.artifacts,
                  project.online_dir):
            assert d.is_dir()
        assert project.status()["phase"] == "created"

    def test_config_overrides(self, tmp_path):
        p = storage.ProjectStore.create(tmp_path / "p2", {"d_min": 1.5, "seed": 3})
        cfg = p.config()
        assert cfg.d_min == 1.5 and cfg.seed == 3
        assert isinstance(cfg, pipeline.ProjectConfig)

    def test_phase_forward_only(self, project):
        project.set_phase("configured")
        project.set_phase("trained")
        with pytest.raises(ValueError):
            project.set_phase("configured")
        with pytest.raises(ValueError):
            project.set_phase("bogus")

    def test_require_phase(self, project):
        project.require_phase("created")
        with pytest.raises(ValueError):
            project.require_phase("trained", "online")


class TestIngest:
    def test_image_and_gold_routing(self, project):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, (20, 20))
        gold = (rng.integers(0, 2, (20, 20)) * 255)
        count, errors = project.ingest_images([
            ("scan01.png", png_bytes(img)),
            ("scan01.gold.png", png_bytes(gold)),
        ])
        assert count == 2 and errors == {}
        assert (project.images_dir / "scan01.png").exists()
        assert (project.gold_dir / "scan01.png").exists()

    def test_reingest_is_noop(self, project):
        payload = png_bytes(np.zeros((8, 8)))
        assert project.ingest_images([("a.png", payload)])[0] == 1
        assert project.ingest_images([("a.png", payload)])[0] == 0

    def test_bad_payload_reported(self, project):
        count, errors = project.ingest_images([("junk.png", b"not a png")])
        assert count == 0 and "junk.png" in errors

    def test_gold_binarized(self, project):
        gold = np.array([[0, 1], [128, 255]])
        project.ingest_images([("x.gold.png", png_bytes(gold))])
        with Image.open(project.gold_dir / "x.png") as im:
            arr = np.asarray(im)
        assert set(np.unique(arr)) <= {0, 255}
        assert arr[0, 1] == 255  # any nonzero counts as object


class TestArtifacts:
    def test_selfconfig_roundtrip(self, project, selfconfig):
        project.save_selfconfig(selfconfig)
        back = project.load_selfconfig()
        assert back.z == selfconfig.z
        assert back.image_ids == selfconfig.image_ids
        assert back.selected_indices == selfconfig.selected_indices
        assert back.selected_names == selfconfig.selected_names
        np.testing.assert_array_equal(back.f_star, selfconfig.f_star)
        np.testing.assert_array_equal(back.f3, selfconfig.f3)
        assert back.report.to_dict() == selfconfig.report.to_dict()

    def test_thresholds_roundtrip(self, project):
        table = {"img000": (77, 0.93), "img001": (81, 0.88)}
        project.save_thresholds(table)
        assert project.load_thresholds() == table

    def test_store_roundtrip(self, project):
        rng = np.random.default_rng(2)
        st = fuzzy.TrainingStore(rng.normal(0, 1, (6, 3)), rng.uniform(0, 255, 6))
        project.save_store(st)
        back = project.load_store()
        np.testing.assert_array_equal(back.inputs, st.inputs)
        np.testing.assert_array_equal(back.outputs, st.outputs)

    def test_rulebase_versioning(self, project):
        rng = np.random.default_rng(3)
        m = rng.uniform(0, 1, (5, 2))
        rb1 = fuzzy.generate_rules(m, rng.uniform(0, 255, 5), version=1)
        rb2 = fuzzy.generate_rules(m, rng.uniform(0, 255, 5), version=2)
        project.save_rulebase(rb1)
        project.save_rulebase(rb2)
        assert project.status()["rule_version"] == 2
        assert project.load_rulebase().version == 2
        assert project.load_rulebase(version=1).version == 1
        assert (project.artifacts / "rules_v1.json").exists()


class TestOnlineState:
    def test_session_roundtrip(self, project):
        assert project.load_online_state() is None
        state = {"queue": ["a", "b"], "cursor": 0, "sequence": 4}
        project.save_online_state(state)
        assert project.load_online_state() == state

    def test_segment_roundtrip(self, project):
        mask = np.random.default_rng(4).integers(0, 2, (12, 9)).astype(np.uint8)
        project.save_segment("img007", mask)
        np.testing.assert_array_equal(project.load_segment("img007"), mask)

    def test_events_sorted_by_sequence(self, project):
        project.save_event({"image_id": "b", "sequence": 2, "jaccard": 0.5})
        project.save_event({"image_id": "a", "sequence": 1, "jaccard": 0.9})
        events = project.load_events()
        assert [e["sequence"] for e in events] == [1, 2]
        assert events[0]["image_id"] == "a"
