"""Convergence of filtered moments to bandwidth x spectrum as the band shrinks."""

import argparse

from spectral_edr import filters


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--x0", type=float, default=1.0)
    parser.add_argument("--rho", type=float, default=0.3)
    parser.add_argument("--sigma", type=float, default=0.02)
    parser.add_argument("--shape", choices=filters.SHAPES, default="rectangular")
    parser.add_argument("--widths", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.02, 0.01])
    args = parser.parse_args()

    rows = filters.narrowband_reduction(args.x0, args.rho, args.sigma, args.widths, args.shape)
    names = list(rows[0].ratios)
    print("width    " + "  ".join(f"{n:>12}" for n in names) + "  filtered_margin  spectral_margin")
    for r in rows:
        cells = "  ".join(f"{r.ratios[n] - 1:+12.3e}" for n in names)
        print(f"{r.width:<8} {cells}  {r.filtered_margin:15.9f}  {r.spectral_margin:15.9f}")


if __name__ == "__main__":
    main()
