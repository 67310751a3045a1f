#!/usr/bin/env python3
"""Write the two fidelity sweeps (vs kappa_s/kappa and vs g/kappa) and optionally plot them.

    python scripts/fidelity_curves.py --outdir results [--plot]
"""
import argparse
from pathlib import Path

from qdcnot.analysis import grid, sweep
from qdcnot.cli import sweep_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--ensemble", default="default")
    ap.add_argument("--plot", action="store_true", help="save fidelity_curves.png (needs matplotlib)")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    rows_x = sweep("kappa_s", grid(0.01, 1.99, 0.01), ensemble=args.ensemble)
    rows_g = sweep("g", grid(0.05, 3.0, 0.05), ensemble=args.ensemble)
    (out / "fidelity_vs_kappa_s.csv").write_text(sweep_csv(rows_x), encoding="utf-8")
    (out / "fidelity_vs_g.csv").write_text(sweep_csv(rows_g), encoding="utf-8")
    print(f"wrote {len(rows_x)} + {len(rows_g)} rows to {out}/")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(9, 3.5))
        for ax, rows, label in ((ax_a, rows_x, r"$\kappa_s/\kappa$"), (ax_b, rows_g, r"$g/\kappa$")):
            xs = [r.x for r in rows]
            ax.plot(xs, [r.F_formula for r in rows], label="closed form")
            ax.plot(xs, [r.F_sim for r in rows], "--", label="simulation")
            ax.set_xlabel(label)
            ax.set_ylabel("F")
        ax_a.legend()
        fig.tight_layout()
        fig.savefig(out / "fidelity_curves.png", dpi=150)
        print(f"saved {out / 'fidelity_curves.png'}")


if __name__ == "__main__":
    main()
