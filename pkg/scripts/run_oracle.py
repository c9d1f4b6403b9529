"""Time-domain cross-check of S_eps and S_eta for the three figure couplings."""

import argparse
import time

from spectral_edr import oracle, sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rho", type=float, default=0.3)
    parser.add_argument("--seed", type=int, default=oracle.DEFAULT_SEED)
    parser.add_argument("--realizations", type=int, default=32)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    config = oracle.SimulationConfig(seed=args.seed, n_realizations=args.realizations, workers=args.workers)
    for sigma in sweep.fig2_sigmas(args.rho):
        start = time.perf_counter()
        report = oracle.cross_validate(args.rho, sigma, config=config)
        elapsed = time.perf_counter() - start
        cells = [f"{name}: within={c['fraction_within']:.3f} mean_dev={c['mean_rel_dev']:+.4f} "
                 f"z_std={c['z_std']:.2f}" for name, c in report.spectra.items()]
        verdict = "PASS" if report.passed else "FAIL"
        print(f"sigma={sigma:.6g} {verdict} ({elapsed:.1f} s)  " + "  ".join(cells))


if __name__ == "__main__":
    main()
