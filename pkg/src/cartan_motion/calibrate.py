"""Regenerate the quadrature/asymptotic crossover constants.

Run ``python -m cartan_motion.calibrate [path]``. For each dimension the
crossover is the smallest ``|s| r`` on a geometric scan above which the
quadrature and the leading asymptotic term agree to ``agreement_tol`` for
every probe direction of ``s``.
"""

from __future__ import annotations

import json
import sys
from importlib import resources

import numpy as np

from .spherical import phi_asymptotic, phi_radial

VERSION = "1"
AGREEMENT_TOL = 1e-6
MIN_RE_SR = 10.0
DIMENSIONS = range(2, 9)
PROBE_DIRECTIONS = (1.0, (1 + 1j) / abs(1 + 1j))


def crossover(n: int, tol: float = AGREEMENT_TOL, lo: float = 1.0, hi: float = 1e8,
              per_decade: int = 40) -> float:
    grid = np.geomspace(lo, hi, int(round(np.log10(hi / lo) * per_decade)) + 1)
    ok = np.ones(grid.size, dtype=bool)
    for unit in PROBE_DIRECTIONS:
        for i, x in enumerate(grid):
            r = float(x)
            if unit.real * r < MIN_RE_SR:
                ok[i] = False
                continue
            diff = phi_radial(n, unit, r).relative_difference(phi_asymptotic(n, unit, r))
            ok[i] &= diff <= tol
    bad = np.flatnonzero(~ok)
    if bad.size and bad[-1] == grid.size - 1:
        raise RuntimeError(f"no crossover below |s| r = {hi:g} for n = {n}")
    start = 0 if not bad.size else bad[-1] + 1
    return float(grid[start])


def build_table() -> dict:
    return {
        "version": VERSION,
        "agreement_tol": AGREEMENT_TOL,
        "min_re_sr": MIN_RE_SR,
        "crossover_abs_sr": {str(n): crossover(n) for n in DIMENSIONS},
    }


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    table = build_table()
    text = json.dumps(table, indent=2) + "\n"
    if argv:
        path = argv[0]
    else:
        path = str(resources.files("cartan_motion").joinpath("data/crossover.json"))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(text, end="")


if __name__ == "__main__":
    main()
