"""Command-line interface for the full phase sequence."""

import json
import logging
import sys
from pathlib import Path

import click

from . import pipeline, reporting, synthdata
from .storage import ProjectStore

log = logging.getLogger(__name__)


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--count", default=synthdata.DEFAULT_COUNT, show_default=True)
@click.option("--seed", default=2024, show_default=True)
def synth(out, count, seed):
    """Generate the synthetic ultrasound-like dataset."""
    ids = synthdata.generate_dataset(out / "images", out / "gold", count, seed)
    click.echo(f"wrote {len(ids)} image/gold pairs under {out}")


def _project(path):
    store = ProjectStore(path)
    if not store.exists():
        raise click.ClickException(f"{path} is not a project (run `scefis configure`)")
    return store


@main.command()
@click.option("--project", type=click.Path(path_type=Path), required=True)
@click.option("--images", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--gold", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--d-min", default=None, type=float, help="pruning distance override")
@click.option("--radius", default=None, type=float, help="clustering radius override")
@click.option("--orientation", type=click.Choice(["dark", "bright"]), default="dark",
              show_default=True)
@click.option("--niblack-window", default=25, show_default=True)
@click.option("--niblack-k", default=-0.2, show_default=True)
@click.option("--seed", default=7, show_default=True)
def configure(project, images, gold, d_min, radius, orientation,
              niblack_window, niblack_k, seed):
    """Create a project and run the self-configuration phase."""
    store = ProjectStore(project)
    if not store.exists():
        store = ProjectStore.create(project)
    config = store.config()
    config.image_dir = Path(images)
    config.gold_dir = Path(gold)
    config.dark_object = orientation == "dark"
    config.niblack_window = niblack_window
    config.niblack_k = niblack_k
    config.seed = seed
    if d_min is not None:
        config.d_min = d_min
    if radius is not None:
        config.radius = radius
    from .storage import write_json

    write_json(store.root / "config.json", config.to_dict())
    sc = pipeline.self_configure(config)
    store.save_selfconfig(sc)
    store.set_phase("configured")
    click.echo(
        f"Z={sc.z}, cascade widths {sc.report.to_dict()['widths']}, "
        f"{len(sc.selected_names)} features selected"
    )


@main.command()
@click.option("--project", type=click.Path(path_type=Path), required=True)
def offline(project):
    """Exhaustive optimal-threshold search against the gold standards."""
    store = _project(project)
    table = pipeline.offline_optimal(store.config())
    store.save_thresholds(table)
    store.set_phase("offline-done")
    click.echo(f"threshold table for {len(table)} images written")


@main.command()
@click.option("--project", type=click.Path(path_type=Path), required=True)
@click.option("--train-ids", default=None, help="comma-separated image ids")
def train(project, train_ids):
    """Build the pruned training store and initial rule base."""
    store = _project(project)
    config = store.config()
    sc = store.load_selfconfig()
    table = store.load_thresholds()
    ids = train_ids.split(",") if train_ids else sorted(table)
    tstore, rb = pipeline.train(config, sc, table, ids)
    store.save_store(tstore)
    store.save_rulebase(rb)
    store.set_phase("trained", train_ids=ids, rule_version=rb.version)
    click.echo(f"{len(rb.rules)} rules from {len(tstore)} store rows")


@main.command()
@click.option("--project", type=click.Path(path_type=Path), required=True)
@click.option("--feedback", type=click.Choice(["replay", "interactive"]),
              default="replay", show_default=True)
@click.option("--test-ids", default=None, help="comma-separated image ids")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def run(project, feedback, test_ids, out):
    """Online/evolving phase over the test images."""
    store = _project(project)
    config = store.config()
    sc = store.load_selfconfig()
    table = store.load_thresholds()
    status = store.status()
    imgs = pipeline.ImageSet(config)
    ids = (
        test_ids.split(",")
        if test_ids
        else [i for i in imgs.ids if i not in status.get("train_ids", [])]
    )
    if feedback == "interactive":
        store.require_phase("trained")
        store.save_online_state({"queue": ids, "position": 0, "results": {}, "trace": []})
        store.set_phase("online")
        click.echo(
            f"online session opened for {len(ids)} images; start the API with "
            f"`scefis serve` and review via the /v1 endpoints or the web UI"
        )
        return
    rb = store.load_rulebase()
    tstore = store.load_store()
    per_j, used, trace, rb, tstore = pipeline.run_online(
        config, sc, rb, tstore, ids, pipeline.ReplayFeedback(imgs), imgs
    )
    store.save_store(tstore)
    store.save_rulebase(rb)
    per_image, summaries = pipeline.compare_baselines(config, ids, per_j, imgs)
    report = pipeline.TrialReport(
        trial=0, train_ids=status.get("train_ids", []), test_ids=ids,
        per_image=per_image, summaries=summaries, rule_trace=trace,
        thresholds_used=used,
    )
    out = out or store.root / "reports"
    reporting.write_reports([report], out)
    click.echo(f"replay run over {len(per_j)} images; reports in {out}")


@main.command()
@click.option("--project", type=click.Path(path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def evaluate(project, out):
    """Baseline comparison on the current online session's results."""
    store = _project(project)
    config = store.config()
    state = store.load_online_state()
    if not state or not state["results"]:
        raise click.ClickException("no reviewed images to evaluate")
    ids = [i for i in state["queue"] if i in state["results"]]
    per_j = {i: state["results"][i]["jaccard"] for i in ids}
    per_image, summaries = pipeline.compare_baselines(config, ids, per_j)
    report = pipeline.TrialReport(
        trial=0, train_ids=store.status().get("train_ids", []), test_ids=ids,
        per_image=per_image, summaries=summaries, rule_trace=state["trace"],
    )
    out = out or store.root / "reports"
    reporting.write_reports([report], out)
    click.echo(f"evaluation over {len(ids)} reviewed images; reports in {out}")


@main.command()
@click.option("--project", type=click.Path(path_type=Path), required=True)
@click.option("--folds", default=10, show_default=True)
@click.option("--seed", default=None, type=int)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def crossval(project, folds, seed, out):
    """Seeded multi-trial replay cross-validation with reports."""
    store = _project(project)
    config = store.config()
    sc = store.load_selfconfig()
    table = store.load_thresholds()
    reports = pipeline.cross_validate(config, sc, table, folds=folds, seed=seed)
    out = out or store.root / "reports"
    reporting.write_reports(reports, out)
    agg = {
        m: sum(r.summaries[m]["mean"] for r in reports) / len(reports)
        for m in reporting.METHOD_ORDER
    }
    click.echo(json.dumps({"aggregate_mean_j": agg}, indent=2))
    click.echo(f"reports in {out}")


@main.command()
@click.option("--projects-root", type=click.Path(path_type=Path), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(projects_root, host, port):
    """Start the HTTP API for interactive review."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(projects_root), host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
