"""Normalized error, disturbance and EDR left-hand sides across frequency for three couplings."""

import argparse

import numpy as np

from spectral_edr import sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rho", type=float, default=0.3)
    parser.add_argument("--plot", help="write a PNG (needs matplotlib)")
    args = parser.parse_args()

    grid = np.linspace(0.1, 3.0, 500)
    sigmas = sweep.fig2_sigmas(args.rho)
    labels = ["sigma_opt/5", "sigma_opt", "20 sigma_opt"]
    results = [sweep.frequency_sweep(args.rho, s, grid) for s in sigmas]
    opt = sweep.optimize_sigma(args.rho)
    print(f"rho={args.rho}  sigma_opt={opt.sigma_opt_closed_form:.9g}  numeric={opt.sigma_opt_numeric:.9g}")
    print(f"min Branciard LHS at x=1: {opt.min_lhs:.10f}  (sqrt 2 = {np.sqrt(2):.10f})")
    for label, res, regime in zip(labels, results, sweep.classify_regimes(args.rho, sigmas)):
        hur = res.column("heisenberg_lhs")
        b = res.column("branciard_lhs")
        bad = grid[hur < 1]
        span = f"[{bad.min():.3f}, {bad.max():.3f}]" if bad.size else "none"
        print(f"{label:>13}: {regime:<22} min Branciard {b.min():.6f} at x={grid[b.argmin()]:.4f}; "
              f"HUR violated on {span}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(1, 3, figsize=(12, 3.6), sharey=True)
        for ax, label, res in zip(axes, labels, results):
            for col in ("s_eps_t", "s_eta_t", "branciard_lhs", "heisenberg_lhs"):
                ax.semilogy(grid, res.column(col), label=col)
            ax.axhline(1.0, color="k", lw=0.5)
            ax.set(title=label, xlabel=r"$\Omega/\omega_m$", ylim=(1e-2, 1e2))
        axes[0].legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print("wrote", args.plot)


if __name__ == "__main__":
    main()
