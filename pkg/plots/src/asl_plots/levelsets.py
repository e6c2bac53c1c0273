"""Within-level-set disambiguation vs control, for near-value-sufficient specs.

Keeps representations with delta_v below a threshold (default 0.2) and plots
success against I(A;Z|S,V) -- how much the encoding separates optimal actions
among goals of equal value -- colored by the action gap.  The Spearman
correlation between success and I(A;Z|S,V) is printed to stdout.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from scipy.stats import spearmanr

from .metrics import BASELINE_IDS, SchemaError, load_many, split_out_stem

REQUIRED = ("delta_v", "delta_a", "i_az_sv", "success_rate")


def filter_value_sufficient(rows: list[dict], threshold: float) -> list[dict]:
    """Rows with delta_v strictly below the threshold."""
    return [r for r in rows if r["delta_v"] < threshold]


def plot_levelsets(rows: list[dict], out_stem, threshold: float,
                   colormap: str = "plasma", annotate=BASELINE_IDS):
    """Render stem.png/.svg from pre-filtered rows; returns (n, spearman rho)."""
    x = [r["i_az_sv"] for r in rows]
    y = [r["success_rate"] for r in rows]
    color = [r["delta_a"] for r in rows]

    fig, ax = plt.subplots(figsize=(6.4, 5.0))
    sc = ax.scatter(x, y, c=color, cmap=colormap, s=18, linewidths=0.2,
                    edgecolors="black", alpha=0.85)
    fig.colorbar(sc, ax=ax, label=r"action gap  $\Delta_A$  (nats)")
    annotated = []
    for r in rows:
        if r.get("spec_id") in annotate:
            annotated.append(r["spec_id"])
            ax.annotate(r["spec_id"], (r["i_az_sv"], r["success_rate"]),
                        textcoords="offset points", xytext=(6, 6),
                        fontsize=9, fontweight="bold")
    ax.set_xlabel(r"within-level-set disambiguation  $I(A;Z\,|\,S,V)$  (nats)")
    ax.set_ylabel("control success rate")
    ax.set_title(rf"Near-value-sufficient specs ($\Delta_V < {threshold:g}$)")
    fig.tight_layout()
    stem = split_out_stem(out_stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(stem.with_suffix(".png"), dpi=200)
    fig.savefig(stem.with_suffix(".svg"))
    plt.close(fig)

    rho = float(spearmanr(x, y).statistic) if len(rows) > 1 else float("nan")
    return len(rows), rho


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv", required=True, nargs="+",
                help="metrics CSV(s), e.g. baselines.csv library.csv")
    ap.add_argument("--out", required=True, help="output stem (writes .png and .svg)")
    ap.add_argument("--threshold", type=float, default=0.2)
    ap.add_argument("--colormap", default="plasma")
    ap.add_argument("--annotate", nargs="*", default=list(BASELINE_IDS))
    args = ap.parse_args(argv)
    try:
        rows = load_many(args.csv, REQUIRED)
    except (OSError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    kept = filter_value_sufficient(rows, args.threshold)
    if not kept:
        print(f"error: no rows with delta_v < {args.threshold}", file=sys.stderr)
        return 1
    n, rho = plot_levelsets(kept, args.out, args.threshold, args.colormap, tuple(args.annotate))
    print(f"plotted {n} of {len(rows)} representations -> {split_out_stem(args.out)}.png/.svg")
    print(f"spearman(success, I(A;Z|S,V)) = {rho:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
