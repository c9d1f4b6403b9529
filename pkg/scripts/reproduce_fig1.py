"""Saturation boundaries of the Heisenberg, Ozawa and Branciard relations at chi_t = 1."""

import argparse

import numpy as np

from spectral_edr import edr


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=400)
    parser.add_argument("--plot", help="write a PNG (needs matplotlib)")
    args = parser.parse_args()

    grid = np.linspace(1e-3, 3.0, args.points)
    curves = {kind: edr.saturation_boundary(kind, grid) for kind in edr.BOUNDARY_KINDS}
    for s in (0.25, 0.5, 1.0, 2.0):
        row = [edr.boundary_values(kind, s) for kind in edr.BOUNDARY_KINDS]
        print(f"s_eps_t={s:<5} " + "  ".join(f"{k}={v:.6g}" for k, v in zip(edr.BOUNDARY_KINDS, row)))

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        for kind, curve in curves.items():
            pts = np.array(curve.points)
            ax.plot(pts[:, 0], pts[:, 1], label=kind)
        ax.set(xlim=(0, 3), ylim=(0, 3), xlabel=r"$\tilde S_\epsilon$", ylabel=r"$\tilde S_\eta$")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print("wrote", args.plot)


if __name__ == "__main__":
    main()
