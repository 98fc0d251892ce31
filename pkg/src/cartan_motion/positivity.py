"""Positive-definiteness tests for spherical kernels.

A function ``psi`` on ``p`` is positive definite when every Gram matrix
``G_ij = psi(Y_i - Y_j)`` is positive semidefinite. ``bochner_test``
combines Gram eigenvalue checks with a sup-norm probe, since a positive
definite spherical function never exceeds one in modulus.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .groups import haar_sample
from .models import MotionModel, RankOneModel, as_spectral
from .spherical import DEFAULT_GRID, Verdict, radial_quadrature, subseed

__all__ = [
    "PointConfig",
    "GramReport",
    "GramError",
    "NotHermitianError",
    "BochnerResult",
    "collinear_config",
    "random_config",
    "gram_matrix",
    "is_positive_semidefinite",
    "gram_report",
    "sup_norm_probe",
    "bochner_test",
]

MC_SAMPLES = 20000
MC_CEILING = 0.05


class GramError(RuntimeError):
    """Monte Carlo error of some Gram entry exceeded the ceiling."""

    def __init__(self, message, worst):
        super().__init__(message)
        self.worst = worst


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class PointConfig:
    points: np.ndarray
    provenance: str = "seeded-random"

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)
        if self.provenance not in ("grid", "seeded-random"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff**2).sum(-1)) + np.eye(len(pts))
        if np.any(dist <= 1e-9):
            raise ValueError("points must be pairwise distinct")

    def __len__(self):
        return len(self.points)


def collinear_config(model: MotionModel, m: int, rng: np.random.Generator) -> PointConfig:
    """Geometrically spaced points along a random direction of the slice."""
    coeffs = rng.standard_normal(model.rank)
    direction = sum(c * d for c, d in zip(coeffs, model.slice_directions()))
    direction = direction / np.linalg.norm(direction)
    first = rng.uniform(0.2, 1.0)
    ratio = rng.uniform(1.1, 1.6)
    ts = first * (ratio ** np.arange(m) - 1.0) / (ratio - 1.0)
    offset = model.random_vector(rng)
    return PointConfig(offset + ts[:, None] * direction, "grid")


def random_config(model: MotionModel, m: int, rng: np.random.Generator) -> PointConfig:
    scale = rng.uniform(0.5, 3.0)
    return PointConfig(np.array([model.random_vector(rng, scale) for _ in range(m)]))


def _quadrature_psi(model: RankOneModel, lam, Y):
    r = float(np.linalg.norm(Y))
    res = radial_quadrature(model.n, 1j * complex(lam[0]), r)
    return res.to_complex(), max(res.err_est * abs(res.to_complex()), 1e-13 if r else 0.0)


def _gram(model, lam, points, samples, seed, ceiling):
    m = len(points)
    lam = as_spectral(lam, model.rank)
    if isinstance(model, RankOneModel):
        G = np.eye(m, dtype=complex)
        err = 0.0
        cache = {}
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                diff = points[i] - points[j]
                r = round(float(np.linalg.norm(diff)), 15)
                if r not in cache:
                    cache[r] = _quadrature_psi(model, lam, diff)
                G[i, j], e = cache[r]
                err = max(err, e)
        return G, err
    # one shared sample set; for real lam the estimate is then exactly PSD
    ks = haar_sample(model.group, seed, samples)
    p = np.stack([model.orbit_pairing(lam, ks, Y) for Y in points])  # (m, N)
    z = 1j * (p[:, None, :] - p[None, :, :])
    shift = z.real.max(axis=-1, keepdims=True)
    f = np.exp(z - shift)
    scale = np.exp(shift[..., 0])
    G = f.mean(axis=-1) * scale
    se = np.sqrt((f.real.var(axis=-1, ddof=1) + f.imag.var(axis=-1, ddof=1)) / samples) * scale
    worst = np.unravel_index(np.argmax(se), se.shape)
    if se[worst] > ceiling:
        raise GramError(
            f"Monte Carlo error {se[worst]:.3g} at entry {tuple(map(int, worst))} exceeds {ceiling}",
            tuple(map(int, worst)),
        )
    return G, float(se.max())


def gram_matrix(model: MotionModel, lam, config: PointConfig, samples: int = MC_SAMPLES,
                seed: int = 0, ceiling: float = MC_CEILING) -> np.ndarray:
    """``G_ij = psi_lam(Y_i - Y_j)``.

    Rank-one models use the radial quadrature; other models use Monte Carlo
    with one Haar sample set shared by all entries.
    """
    return _gram(model, lam, config.points, samples, seed, ceiling)[0]


def _hermitian_part(G, tol=1e-10):
    G = np.asarray(G, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("Gram matrix must be square")
    if np.abs(G - G.conj().T).max(initial=0.0) > tol * max(1.0, np.abs(G).max(initial=0.0)):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    return 0.5 * (G + G.conj().T)


def is_positive_semidefinite(G, tol: float = 1e-10) -> tuple[bool, float]:
    H = _hermitian_part(G)
    eig = np.linalg.eigvalsh(H)
    return bool(eig[0] >= -tol * max(1.0, eig[-1])), float(eig[0])


@dataclass
class GramReport:
    matrix: np.ndarray
    min_eigenvalue: float
    max_eigenvalue: float
    psd: bool
    tolerance_used: float
    verdict: str = ""

    def to_dict(self) -> dict:
        return {
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "psd": self.psd,
            "tolerance_used": self.tolerance_used,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def gram_report(G, tol: float) -> GramReport:
    H = _hermitian_part(G)
    eig = np.linalg.eigvalsh(H)
    psd = bool(eig[0] >= -tol * max(1.0, eig[-1]))
    return GramReport(H, float(eig[0]), float(eig[-1]), psd, tol)


def sup_norm_probe(model: MotionModel, lam, grid=DEFAULT_GRID, samples: int = MC_SAMPLES,
                   seed: int = 0, margin: float = 1e-6):
    """First ``(direction, t, |psi|)`` along the slice with ``|psi| > 1 + margin``.

    Monte Carlo values must clear the bound by three standard errors on top of
    the margin. Returns None when no point exceeds it.
    """
    lam = as_spectral(lam, model.rank)
    dirs = [d for base in model.slice_directions() for d in (base, -base)]
    log_bound = math.log1p(margin)
    for idx, direction in enumerate(dirs):
        if isinstance(model, RankOneModel):
            for t in grid:
                val = radial_quadrature(model.n, 1j * complex(lam[0]), float(t))
                if val.value.log_magnitude > log_bound + 10 * val.err_est:
                    return {"direction": idx, "t": float(t),
                            "log_abs_psi": val.value.log_magnitude, "err": val.err_est}
            continue
        ks = haar_sample(model.group, subseed(seed, idx), samples)
        for t in grid:
            z = 1j * model.orbit_pairing(lam, ks, float(t) * direction)
            shift = float(z.real.max())
            f = np.exp(z - shift)
            mean = abs(f.mean())
            se = math.sqrt((f.real.var(ddof=1) + f.imag.var(ddof=1)) / f.size)
            lower = mean - 3.0 * se
            if lower > 0 and math.log(lower) + shift > log_bound:
                return {"direction": idx, "t": float(t),
                        "log_abs_psi": math.log(mean) + shift, "err": se / mean}
    return None


@dataclass
class BochnerResult:
    verdict: Verdict
    worst: GramReport | None
    witness: dict | None = None
    reports: list[GramReport] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": str(self.verdict),
            "witness": self.witness,
            "worst": None if self.worst is None else self.worst.to_dict(),
            "trials": [
                {"min_eigenvalue": r.min_eigenvalue, "psd": r.psd,
                 "tolerance_used": r.tolerance_used, "verdict": r.verdict}
                for r in self.reports
            ],
        }


def bochner_test(model: MotionModel, lam, trials: int = 20, m: int = 8, seed: int = 0,
                 samples: int = MC_SAMPLES, grid=DEFAULT_GRID) -> BochnerResult:
    """Empirical positive-definiteness verdict for ``psi_lam``.

    Trials alternate collinear and random point clouds, each seeded by
    ``subseed(seed, trial)``. The PSD tolerance is
    ``max(1e-10, 10 * evaluator_error) * m``; a minimum eigenvalue below ten
    times that is decisive. A sup-norm witness ``|psi| > 1`` is decisive as well.
    """
    if trials < 1 or m < 2:
        raise ValueError("need trials >= 1 and m >= 2")
    lam = as_spectral(lam, model.rank)
    is_mc = not isinstance(model, RankOneModel)
    witness = sup_norm_probe(model, lam, grid, samples, subseed(seed, 1 << 20),
                             margin=0.05 if is_mc else 1e-6)
    reports, decisive, all_psd = [], False, True
    for trial in range(trials):
        rng = np.random.default_rng(subseed(seed, trial))
        config = (collinear_config if trial % 2 == 0 else random_config)(model, m, rng)
        try:
            G, err = _gram(model, lam, config.points, samples, subseed(seed, trial, 1), MC_CEILING)
        except GramError:
            if witness is None:
                raise
            # the sup-norm witness already decides; keep the trial on record
            nan = np.full((m, m), math.nan, dtype=complex)
            reports.append(GramReport(nan, math.nan, math.nan, False, math.nan, "mc-error"))
            continue
        tol = max(1e-10, 10.0 * err) * m
        try:
            report = gram_report(G, tol)
        except NotHermitianError:
            # non-real lam gives non-Hermitian kernels; that alone rules out PD
            report = GramReport(G, math.nan, math.nan, False, tol)
            trial_decisive = True
        else:
            trial_decisive = report.min_eigenvalue < -10.0 * tol * max(1.0, report.max_eigenvalue)
        if trial_decisive:
            report.verdict = str(Verdict.NOT_POSITIVE_DEFINITE)
        else:
            report.verdict = str(Verdict.POSITIVE_DEFINITE if report.psd else Verdict.INCONCLUSIVE)
        decisive |= trial_decisive
        all_psd &= report.psd
        reports.append(report)
    if witness is not None or decisive:
        verdict = Verdict.NOT_POSITIVE_DEFINITE
    elif all_psd:
        verdict = Verdict.POSITIVE_DEFINITE
    else:
        verdict = Verdict.INCONCLUSIVE
    # non-Hermitian trials rank first, unusable MC trials last
    def rank(r):
        if r.verdict == "mc-error":
            return math.inf
        return -math.inf if math.isnan(r.min_eigenvalue) else r.min_eigenvalue

    worst = min(reports, key=rank)
    return BochnerResult(verdict, worst, witness, reports)
