"""Acceptance suite: ten criteria, one PASS/FAIL line each.

Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import os
import sys
import time

import numpy as np
import pytest
from scipy.special import jn_zeros

sys.path.insert(0, os.path.dirname(__file__))
import oracles  # noqa: E402

from cartan_motion.eigenspace import (  # noqa: E402
    BesselZeroError,
    EigenFunctionHandle,
    SphereDensity,
    analyze,
    circle_samples,
    ktype_project,
    laplacian_residual,
)
from cartan_motion.groups import transitive_groups  # noqa: E402
from cartan_motion.models import RankOneModel, SLFlatModel  # noqa: E402
from cartan_motion.positivity import bochner_test  # noqa: E402
from cartan_motion.spherical import (  # noqa: E402
    LogComplex,
    Verdict,
    boundedness_classify,
    phi_asymptotic,
    phi_radial,
    psi_monte_carlo,
    subseed,
)

# differences below this are rounding noise, not a trend
MONOTONE_FLOOR = 1e-12


def c1_closed_form_n3():
    worst = 0.0
    for s in (0.5, 1, 2j, 1 + 1j):
        for r in (0.1, 1, 5, 20):
            ref = oracles.log_sinhc(s * r)
            got = phi_radial(3, s, r)
            worst = max(worst, got.relative_difference(LogComplex(ref.real, ref.imag)))
    return worst <= 1e-10, f"max rel err {worst:.2e} (tol 1e-10)", 1.0


def c2_series_n2():
    worst = 0.0
    for r in (0.5, 2, 10):
        worst = max(worst, abs(phi_radial(2, 1j, r).to_complex() - oracles.bessel_series(0, r)))
    return worst <= 1e-9, f"max abs err {worst:.2e} (tol 1e-9)", 1.0


def c3_asymptotic():
    ok, notes = True, []
    for n in (2, 3, 4, 5):
        for s in (1, 1 + 1j):
            d = [phi_radial(n, s, x / abs(s)).relative_difference(phi_asymptotic(n, s, x / abs(s)))
                 for x in (200, 500, 1000, 2000)]
            mono = all(b <= a + MONOTONE_FLOOR for a, b in zip(d, d[1:]))
            ok &= d[-1] <= 1e-3 and mono
            notes.append(f"n={n},s={s}:{d[-1]:.1e}")
    return ok, "endpoint |ratio-1| " + " ".join(notes), 10.0


def c4_classifier():
    grid = [complex(a, b) for a in (0, 0.5, 1, 2) for b in (0, 0.25, -0.25, 1, -1)]
    correct = {}
    for n in (2, 3):
        m = RankOneModel(n)
        correct[n] = sum((boundedness_classify(m, [lam]).verdict == Verdict.BOUNDED) == (lam.imag == 0)
                         for lam in grid)
    sl = SLFlatModel(2)
    sl_cases = [complex(a, b) for a in (0, 0.5, 1, 2) for b in (0, 0.5, -0.5, 1, -1)]
    sl_ok = sum((boundedness_classify(sl, [lam], samples=100_000).verdict == Verdict.BOUNDED) == (lam.imag == 0)
                for lam in sl_cases)
    ok = correct[2] == 20 and correct[3] == 20 and sl_ok == len(sl_cases)
    return ok, f"rank1 n=2 {correct[2]}/20, n=3 {correct[3]}/20, SL(2) {sl_ok}/{len(sl_cases)}", 60.0


def c5_positivity():
    ok, worst = True, math.inf
    nonpd = 0
    for n in (2, 3):
        m = RankOneModel(n)
        for lam in (0.5, 1, 3):
            res = bochner_test(m, [lam], trials=20, m=8, seed=n)
            mins = [r.min_eigenvalue for r in res.reports]
            worst = min(worst, *mins)
            ok &= res.verdict == Verdict.POSITIVE_DEFINITE and min(mins) >= -1e-8 * 8
        for lam in (0.5j, 1 + 1j):
            res = bochner_test(m, [lam], trials=20, m=8, seed=n)
            per_trial = sum(r.verdict == str(Verdict.NOT_POSITIVE_DEFINITE) for r in res.reports)
            nonpd += per_trial
            ok &= res.verdict == Verdict.NOT_POSITIVE_DEFINITE and per_trial == 20
    return ok, f"real min eig {worst:.2e} (floor -8e-8); complex trials NotPD {nonpd}/80", 30.0


def c6_weyl_invariance():
    m = SLFlatModel(3)
    lam = [1.0, 0.3]
    images = m.weyl_orbit(lam)
    rng = np.random.default_rng(6)
    ok, worst = True, 0.0
    for j in range(10):
        Y = m.random_vector(rng)
        base = psi_monte_carlo(m, lam, Y, 200_000, subseed(6, j))
        for i, image in enumerate(images):
            est = psi_monte_carlo(m, image, Y, 200_000, subseed(6, j, i + 1))
            z = abs(est.value - base.value) / math.hypot(est.std_error, base.std_error)
            worst = max(worst, z)
            ok &= z <= 3
    return ok, f"{len(images)} images x 10 Y, max |dpsi|/se {worst:.2f} (tol 3)", 60.0


def c7_eigen_equation():
    rng = np.random.default_rng(7)
    slopes, rel_worst, ok = [], 0.0, True
    for trial in range(50):
        n = (2, 3)[trial % 2]
        lam = (1.0, 2.0)[(trial // 2) % 2]
        h = EigenFunctionHandle(lam, SphereDensity.random(n, subseed(7, trial)))
        x = rng.uniform(-3, 3, n)
        res = [laplacian_residual(h, x, step) for step in (1e-2, 5e-3, 2.5e-3)]
        slope = np.polyfit(np.log([1e-2, 5e-3, 2.5e-3]), np.log(res), 1)[0]
        slopes.append(slope)
        ok &= abs(slope - 2) <= 0.2
        f = h(x)
        if abs(f) >= 0.1:
            rel = laplacian_residual(h, x, 1e-3) / abs(lam**2 * f)
            rel_worst = max(rel_worst, rel)
            ok &= rel <= 1e-4
    return ok, f"slopes in [{min(slopes):.3f}, {max(slopes):.3f}], max rel residual {rel_worst:.1e}", 30.0


def c8_jacobi_anger():
    lam = 1.0
    d = SphereDensity.point_mass(2, [math.cos(0.7), math.sin(0.7)])
    j = int(np.argmax(d.values.real))
    phi0 = math.atan2(d.nodes[j, 1], d.nodes[j, 0])
    h = EigenFunctionHandle(lam, d)
    rand = EigenFunctionHandle(lam, SphereDensity.random(2, 8))
    proj_worst = recon_worst = 0.0
    for r in (0.5, 1, 3):
        ang = 0.4 + r
        x = r * np.array([math.cos(ang), math.sin(ang)])
        for k in range(-8, 9):
            series = oracles.bessel_series(k, lam * r)
            expected = 1j**k * series * np.exp(1j * k * (ang - phi0))
            proj_worst = max(proj_worst, abs(ktype_project(h, k, x) - expected))
        K = math.ceil(lam * r) + 20
        for f in (h, rand):
            total = sum(ktype_project(f, k, x) for k in range(-K, K + 1))
            recon_worst = max(recon_worst, abs(total - f(x)))
    ok = proj_worst <= 1e-8 and recon_worst <= 1e-8
    return ok, f"projection err {proj_worst:.1e}, reconstruction err {recon_worst:.1e} (tol 1e-8)", 10.0


def c9_roundtrip():
    lam, r = 1.0, 2.0
    d = SphereDensity.random(2, 9)
    truth = d.angular_coefficients(8)
    got = analyze(circle_samples(EigenFunctionHandle(lam, d), r), lam, r, 8)
    err = max(abs(got[k] - truth[k]) for k in truth)
    zero = float(jn_zeros(0, 1)[0]) / lam
    try:
        analyze(circle_samples(EigenFunctionHandle(lam, d), zero), lam, zero, 8)
        guard = False
    except BesselZeroError as exc:
        guard = exc.k == 0 and "radius near Bessel zero" in str(exc)
    return err <= 1e-7 and guard, f"|k|<=8 coefficient err {err:.1e} at r=2; J0-zero guard {'fired' if guard else 'silent'}", 5.0


def c10_classification():
    def names(n):
        return {g for e in transitive_groups(n) for g in e.groups} | {e.identity_component for e in transitive_groups(n)}

    checks = []
    for n in range(2, 17):
        checks.append({f"SO({n})", f"O({n})"} <= names(n))
    checks.append({"G2", "G2∪(-I)G2"} <= names(7))
    checks.append("Spin(7)" in names(8))
    spin9 = [e for e in transitive_groups(16) if e.identity_component == "Spin(9)"]
    checks.append(len(spin9) == 1 and [x.label for x in spin9[0].extensions] == ["trivial"])
    four = {e.identity_component: e for e in transitive_groups(4)}
    checks.append([x.label for x in four["SU(2)"].extensions] == ["Z_l", "D_l"])
    checks.append("U(2)" in four)
    checks.append([x.label for x in four["Sp(1)"].extensions] == ["Z_l", "D*_l", "T*", "O*", "I*"])
    checks.append({"Sp(1)U(1)", "(Sp(1)U(1))∪(Sp(1)U(1))β"} <= set(four["Sp(1)U(1)"].groups))
    checks.append("Sp(1)Sp(1)" in four)
    # exceptional cases appear only at their dimension
    for n in range(2, 17):
        exc = {e.case for e in transitive_groups(n)} & {"4", "5", "6"}
        checks.append(exc == {7: {"4"}, 8: {"5"}, 16: {"6"}}.get(n, set()))
    checks.append({e.case for e in transitive_groups(3)} == {"1"})
    return all(checks), f"{sum(checks)}/{len(checks)} table assertions", 1.0


CRITERIA = [
    (1, "closed form n=3", c1_closed_form_n3),
    (2, "Bessel series n=2", c2_series_n2),
    (3, "asymptotic law", c3_asymptotic),
    (4, "boundedness classifier", c4_classifier),
    (5, "positive definiteness", c5_positivity),
    (6, "Weyl invariance", c6_weyl_invariance),
    (7, "eigen-equation", c7_eigen_equation),
    (8, "Jacobi-Anger / K-types", c8_jacobi_anger),
    (9, "analysis roundtrip", c9_roundtrip),
    (10, "classification table", c10_classification),
]


def evaluate(func):
    start = time.perf_counter()
    ok, detail, limit = func()
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < limit
    return ok, f"{detail}; {elapsed:.2f}s (limit {limit:g}s)"


def _line(idx, name, ok, detail):
    return f"ACCEPTANCE {idx:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"


@pytest.mark.parametrize("idx,name,func", CRITERIA, ids=[f"c{i}" for i, _, _ in CRITERIA])
def test_criterion(idx, name, func, capsys):
    ok, detail = evaluate(func)
    with capsys.disabled():
        print("\n" + _line(idx, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for idx, name, func in CRITERIA:
        ok, detail = evaluate(func)
        failures += not ok
        print(_line(idx, name, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
