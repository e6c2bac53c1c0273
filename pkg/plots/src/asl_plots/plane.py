"""Control success over the (delta_v, delta_a) plane.

Each representation is one point at its sufficiency gaps, colored by mixed-
policy success rate; baseline representations are annotated by name.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .metrics import BASELINE_IDS, SchemaError, load_many, split_out_stem

REQUIRED = ("delta_v", "delta_a", "success_rate")


def plot_plane(rows: list[dict], out_stem, colormap: str = "viridis", annotate=BASELINE_IDS):
    """Render stem.png and stem.svg; returns (n_points, annotated ids)."""
    dv = [r["delta_v"] for r in rows]
    da = [r["delta_a"] for r in rows]
    success = [r["success_rate"] for r in rows]

    fig, ax = plt.subplots(figsize=(6.4, 5.0))
    sc = ax.scatter(dv, da, c=success, cmap=colormap, s=18, vmin=0.0, vmax=1.0,
                    linewidths=0.2, edgecolors="black", alpha=0.85)
    fig.colorbar(sc, ax=ax, label="control success rate")

    annotated = []
    for r in rows:
        if r.get("spec_id") in annotate:
            annotated.append(r["spec_id"])
            ax.annotate(
                r["spec_id"],
                (r["delta_v"], r["delta_a"]),
                textcoords="offset points",
                xytext=(6, 6),
                fontsize=9,
                fontweight="bold",
            )
    ax.set_xlabel(r"value gap  $\Delta_V$  (nats)")
    ax.set_ylabel(r"action gap  $\Delta_A$  (nats)")
    ax.set_title("Mixed-policy success over the sufficiency plane")
    fig.tight_layout()
    stem = split_out_stem(out_stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(stem.with_suffix(".png"), dpi=200)
    fig.savefig(stem.with_suffix(".svg"))
    plt.close(fig)
    return len(rows), annotated


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv", required=True, nargs="+",
                help="metrics CSV(s), e.g. baselines.csv library.csv")
    ap.add_argument("--out", required=True, help="output stem (writes .png and .svg)")
    ap.add_argument("--colormap", default="viridis")
    ap.add_argument("--annotate", nargs="*", default=list(BASELINE_IDS))
    args = ap.parse_args(argv)
    try:
        rows = load_many(args.csv, REQUIRED)
    except (OSError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    n, annotated = plot_plane(rows, args.out, args.colormap, tuple(args.annotate))
    print(f"plotted {n} representations ({len(annotated)} annotated) -> {split_out_stem(args.out)}.png/.svg")
    return 0


if __name__ == "__main__":
    sys.exit(main())
