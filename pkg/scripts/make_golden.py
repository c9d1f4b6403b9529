"""Regenerate the committed figure-data golden files under tests/golden/.

Run only when an intentional change to the emitted numbers has been reviewed;
the golden tests compare reruns against these files byte for byte.
"""

import argparse
import contextlib
import io
import sys
from pathlib import Path

from spectral_edr import cli

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def run(argv):
    with contextlib.redirect_stdout(io.StringIO()):
        code = cli.main(argv)
    if code != 0:
        sys.exit(f"spectral-edr {' '.join(argv)} exited with {code}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dest", type=Path, default=GOLDEN)
    args = parser.parse_args()
    run(["spectra", "--config", str(GOLDEN / "fig2_config.json"), "--out", str(args.dest / "spectra")])
    run(["boundaries", "--config", str(GOLDEN / "boundaries_config.json"), "--out", str(args.dest / "boundaries.csv")])
    for path in sorted(args.dest.rglob("*.csv")):
        print(path.relative_to(args.dest), sum(1 for _ in path.open()) - 1, "rows")


if __name__ == "__main__":
    main()
