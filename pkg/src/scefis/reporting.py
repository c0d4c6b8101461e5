"""Trial-report rendering: delimited output, a markdown comparison
table, and matplotlib figures written alongside."""

import csv
import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

METHOD_LABELS = {
    "maa": "MAA",
    "sc_efis": "SC-EFIS-THR",
    "niblack": "Niblack (local)",
    "huang": "Huang",
    "kittler": "Kittler",
    "tizhoosh": "Tizhoosh",
    "otsu": "Otsu",
}
METHOD_ORDER = ("maa", "sc_efis", "niblack", "huang", "kittler", "tizhoosh", "otsu")


def markdown_table(reports):
    """Per-trial comparison table: J +/- sigma and the 95% CI."""
    lines = [
        "| Run | Method | J ± σ_J | CI_J | p vs Otsu |",
        "|-----|--------|---------|------|-----------|",
    ]
    for r in reports:
        for m in METHOD_ORDER:
            s = r.summaries[m]
            p = s.get("p_vs_otsu")
            p_txt = "—" if p is None else f"{p:.3g}"
            lines.append(
                f"| {r.trial + 1} | {METHOD_LABELS[m]} | "
                f"{100 * s['mean']:.0f}% ± {100 * s['std']:.0f}% | "
                f"[{100 * s['ci_low']:.0f}% {100 * s['ci_high']:.0f}%] | {p_txt} |"
            )
    return "\n".join(lines) + "\n"


def rule_trace_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["trial", "image_index", "rule_count"])
    for r in reports:
        for i, c in enumerate(r.rule_trace):
            w.writerow([r.trial, i, c])
    return buf.getvalue()


def plot_rule_traces(reports, path):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for r in reports:
        ax.plot(range(1, len(r.rule_trace) + 1), r.rule_trace, marker="o",
                label=f"trial {r.trial + 1}")
    ax.set_xlabel("processed test image")
    ax.set_ylabel("number of rules")
    ax.set_title("Rule evolution across trials")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_method_means(reports, path):
    means = {
        m: [r.summaries[m]["mean"] for r in reports] for m in METHOD_ORDER
    }
    fig, ax = plt.subplots(figsize=(7, 4.5))
    labels = [METHOD_LABELS[m] for m in METHOD_ORDER]
    avg = [sum(v) / len(v) for v in means.values()]
    ax.bar(labels, avg, color="steelblue")
    ax.set_ylabel("mean Jaccard over trials")
    ax.set_ylim(0, 1)
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def write_reports(reports, out_dir):
    """Write JSON, markdown, CSV trace, and figures for a trial set."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trials.json", "w") as f:
        json.dump([r.to_dict() for r in reports], f, indent=2)
    with open(out / "comparison.md", "w") as f:
        f.write(markdown_table(reports))
    with open(out / "rule_trace.csv", "w") as f:
        f.write(rule_trace_csv(reports))
    plot_rule_traces(reports, out / "rule_traces.png")
    plot_method_means(reports, out / "method_means.png")
    return out
