"""Spherical functions of the flat models.

Two evaluators are provided. ``psi_monte_carlo`` averages the plane wave
``exp(i lam(Ad(k) Y))`` over Haar samples of ``K`` and works for any model.
``phi_radial`` evaluates the radial function of a sphere-transitive ``K``,

    phi(r, s) = c_n * int_0^pi exp(s r cos t) sin(t)^(n-2) dt,
    c_n = Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2)),

by quadrature. ``phi_asymptotic`` evaluates its leading large-``r`` term.
Radial values grow like ``exp(Re(s) r)``, so they are carried as
``LogComplex``.
"""

from __future__ import annotations

import cmath
import enum
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.special import roots_legendre

from .groups import haar_sample
from .models import MotionModel, as_spectral

__all__ = [
    "LogComplex",
    "MCEstimate",
    "RadialValue",
    "QuadratureAccuracyWarning",
    "Verdict",
    "BoundednessResult",
    "subseed",
    "psi_monte_carlo",
    "radial_quadrature",
    "phi_radial",
    "phi_asymptotic",
    "phi_eval",
    "default_nodes",
    "load_constants",
    "boundedness_classify",
    "DEFAULT_GRID",
]

NODE_CAP = 2**20
ESCALATION_TOL = 1e-10
_PANEL = 32
_BASE_NODES = 64
DEFAULT_GRID = tuple(float(2**j) for j in range(11))
_MAX_EXP = 700.0


class QuadratureAccuracyWarning(UserWarning):
    """Quadrature ran with fewer nodes than the oscillation needs, or hit the cap."""


def _wrap(phase: float) -> float:
    phase = math.remainder(phase, 2.0 * math.pi)
    return math.pi if phase <= -math.pi else phase


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as ``(log|z|, arg z)``; ``-inf`` encodes zero."""

    log_magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phase", _wrap(float(self.phase)))

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(z)), cmath.phase(z))

    @classmethod
    def from_log(cls, w: complex) -> "LogComplex":
        """The number ``exp(w)``."""
        w = complex(w)
        return cls(w.real, w.imag)

    def to_complex(self) -> complex:
        if self.log_magnitude == -math.inf:
            return 0j
        return cmath.rect(math.exp(self.log_magnitude), self.phase)

    def __abs__(self) -> float:
        return math.exp(self.log_magnitude)

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_magnitude + other.log_magnitude, self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_magnitude - other.log_magnitude, self.phase - other.phase)

    def relative_difference(self, other: "LogComplex") -> float:
        """``|self/other - 1|`` evaluated without leaving log space."""
        q = self / other
        return abs(cmath.exp(complex(q.log_magnitude, q.phase)) - 1.0)


ONE = LogComplex(0.0, 0.0)


@dataclass(frozen=True)
class MCEstimate:
    """Estimate ``value * exp(log_scale)`` with standard error ``std_error * exp(log_scale)``.

    ``log_scale`` is zero unless the estimate would overflow a double.
    """

    value: complex
    std_error: float
    samples: int
    log_scale: float = 0.0

    def to_log(self) -> LogComplex:
        v = LogComplex.from_complex(self.value)
        return LogComplex(v.log_magnitude + self.log_scale, v.phase)


def subseed(seed: int, *task) -> int:
    """Per-task seed: a 64-bit word drawn from ``SeedSequence([seed, *task])``."""
    seq = np.random.SeedSequence([int(seed) & (2**64 - 1), *(int(t) for t in task)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _scaled_mc(model, lam, Y, ks):
    """Integrand statistics with the largest modulus factored out.

    Returns ``(shift, mean, std_error)`` with the estimate equal to
    ``exp(shift) * mean``.
    """
    phase = 1j * model.orbit_pairing(lam, ks, Y)
    shift = float(np.max(phase.real))
    f = np.exp(phase - shift)
    count = f.size
    mean = complex(f.mean())
    var = float(f.real.var(ddof=1) + f.imag.var(ddof=1))
    return shift, mean, math.sqrt(var / count)


def psi_monte_carlo(model: MotionModel, lam, Y, samples: int, seed: int) -> MCEstimate:
    """Monte Carlo estimate of ``psi_lam(Y) = int_K exp(i lam(Ad(k) Y)) dk``."""
    if samples < 2:
        raise ValueError("Monte Carlo needs at least 2 samples")
    lam = as_spectral(lam, model.rank)
    ks = haar_sample(model.group, seed, samples)
    shift, mean, se = _scaled_mc(model, lam, np.asarray(Y, dtype=float), ks)
    if shift > _MAX_EXP:
        return MCEstimate(mean, se, samples, shift)
    scale = math.exp(shift)
    return MCEstimate(mean * scale, se * scale, samples)


# -- radial function ----------------------------------------------------------


def _log_norm_constant(n: int) -> float:
    return math.lgamma(n / 2) - 0.5 * math.log(math.pi) - math.lgamma((n - 1) / 2)


@lru_cache(maxsize=None)
def _panel_rule():
    x, w = roots_legendre(_PANEL)
    return x, w


def _composite_rule(a: float, b: float, nodes: int):
    panels = max(1, -(-nodes // _PANEL))
    x, w = _panel_rule()
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


def default_nodes(s: complex, r: float, theta_max: float = math.pi) -> int:
    """Starting node count: about four nodes per radian of phase swept.

    On the full range the phase ``Im(s) r cos(t)`` sweeps ``2 |Im s| r``;
    a truncated range sweeps ``|Im s| r (1 - cos(theta_max))``.
    """
    sweep = abs(complex(s).imag) * r * (1.0 - math.cos(theta_max)) / 2.0
    return max(_BASE_NODES, math.ceil(4.0 * sweep) + 32)


def _theta_max(n, s, r):
    # beyond this angle the scaled integrand is below exp(-cut) of its peak
    sigma_r = s.real * r
    if sigma_r <= 0:
        return math.pi
    cut = 45.0 + 0.5 * (n - 1) * math.log1p(abs(s) * r)
    c = 1.0 - cut / sigma_r
    return math.pi if c <= -1.0 else math.acos(c)


def _scaled_integral(n, s, r, nodes, theta_max):
    t, w = _composite_rule(0.0, theta_max, nodes)
    f = np.exp(s * r * (np.cos(t) - 1.0))
    if n > 2:
        f = f * np.sin(t) ** (n - 2)
    return complex(np.dot(w, f)), float(np.dot(w, np.abs(f)))


@dataclass(frozen=True)
class RadialValue:
    value: LogComplex
    branch: str
    err_est: float
    nodes: int = 0

    def to_complex(self) -> complex:
        return self.value.to_complex()


def _canonical(s: complex) -> complex:
    # phi is even in s; one representative per pair keeps phi(s) == phi(-s) exactly
    return -s if s.real < 0 or (s.real == 0 and s.imag < 0) else s


def _check_radial_args(n, r):
    if int(n) != n or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    if not r >= 0:
        raise ValueError(f"radius must be >= 0, got {r!r}")


def radial_quadrature(n: int, s: complex, r: float, nodes: int | None = None) -> RadialValue:
    """Quadrature of the radial spherical function with an error estimate.

    The exponent is shifted by ``-s r`` so the integrand has modulus at most
    one once ``Re s >= 0`` (``phi`` is even in ``s``); the shift is restored
    in log space. The rule is composite Gauss-Legendre in the angle. With
    ``nodes=None`` the count starts at :func:`default_nodes` and doubles until
    successive answers agree to ``1e-10`` of the integral of the modulus; an
    explicit ``nodes`` runs that rule once.
    """
    _check_radial_args(n, r)
    s = complex(s)
    if r == 0 or s == 0:
        return RadialValue(ONE, "quadrature", 0.0, 0)
    s = _canonical(s)
    theta_max = _theta_max(n, s, r)
    needed = default_nodes(s, r, theta_max)
    if nodes is not None:
        if nodes < 8:
            raise ValueError("quadrature needs at least 8 nodes")
        if nodes < needed:
            warnings.warn(
                f"{nodes} nodes under-resolve |Im s| r = {abs(s.imag) * r:.3g}; "
                f"{needed} recommended",
                QuadratureAccuracyWarning,
                stacklevel=2,
            )
        value, _ = _scaled_integral(n, s, r, nodes, theta_max)
        other, _ = _scaled_integral(n, s, r, max(8, nodes // 2), theta_max)
        used, err = nodes, abs(value - other)
    else:
        used = needed
        prev, _ = _scaled_integral(n, s, r, used, theta_max)
        while True:
            used *= 2
            value, scale = _scaled_integral(n, s, r, used, theta_max)
            err = abs(value - prev)
            if err <= ESCALATION_TOL * scale:
                break
            if used >= NODE_CAP:
                warnings.warn(
                    f"node cap {NODE_CAP} reached without convergence (n={n}, s={s}, r={r})",
                    QuadratureAccuracyWarning,
                    stacklevel=2,
                )
                break
            prev = value
    rel = err / abs(value) if value != 0 else math.inf
    log_value = LogComplex.from_complex(value)
    shifted = LogComplex(
        log_value.log_magnitude + _log_norm_constant(n) + s.real * r,
        log_value.phase + s.imag * r,
    )
    return RadialValue(shifted, "quadrature", rel, used)


def phi_radial(n: int, s: complex, r: float, nodes: int | None = None) -> LogComplex:
    """``phi(r, s)`` as a LogComplex; see :func:`radial_quadrature`."""
    return radial_quadrature(n, s, r, nodes).value


def phi_asymptotic(n: int, s: complex, r: float) -> LogComplex:
    """Leading term ``Gamma(n/2) 2^((n-3)/2) / sqrt(pi) * e^(sr) / (sr)^((n-1)/2)``.

    Principal branch for the power; only meaningful for ``Re s > 0``.
    """
    s = complex(s)
    if int(n) != n or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    if not s.real > 0:
        raise ValueError(f"asymptotic law needs Re s > 0, got s = {s}")
    if not r > 0:
        raise ValueError(f"asymptotic law needs r > 0, got r = {r}")
    log_const = math.lgamma(n / 2) + 0.5 * (n - 3) * math.log(2.0) - 0.5 * math.log(math.pi)
    sr = s * r
    return LogComplex.from_log(log_const + sr - 0.5 * (n - 1) * cmath.log(sr))


# -- hybrid dispatcher ---------------------------------------------------------


@lru_cache(maxsize=None)
def _load_constants(path: str | None) -> dict:
    if path:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(resources.files("cartan_motion").joinpath("data/crossover.json").read_text())


def load_constants() -> dict:
    """Crossover constants; ``MH_CONSTANTS_PATH`` points at a replacement file."""
    return _load_constants(os.environ.get("MH_CONSTANTS_PATH") or None)


def phi_eval(n: int, s: complex, r: float) -> RadialValue:
    """Quadrature below the calibrated crossover, the asymptotic law above it.

    The asymptotic branch is taken when ``|s| r`` exceeds the crossover for
    ``n`` and ``Re(s) r`` is large enough for the far endpoint to be
    negligible; both thresholds come from the constants file. Otherwise the
    escalating quadrature runs, labelled ``quadrature-escalated`` when it
    needed more nodes than the base rule and its first doubling.
    """
    _check_radial_args(n, r)
    s = complex(s)
    s_pos = _canonical(s)
    consts = load_constants()
    crossover = consts["crossover_abs_sr"].get(str(int(n)))
    if (
        crossover is not None
        and r > 0
        and abs(s_pos) * r >= crossover
        and s_pos.real * r >= consts["min_re_sr"]
    ):
        return RadialValue(phi_asymptotic(n, s_pos, r), "asymptotic", consts["agreement_tol"], 0)
    result = radial_quadrature(n, s, r)
    if result.nodes > 2 * _BASE_NODES:
        return RadialValue(result.value, "quadrature-escalated", result.err_est, result.nodes)
    return result


# -- boundedness ---------------------------------------------------------------


class Verdict(str, enum.Enum):
    BOUNDED = "Bounded"
    UNBOUNDED = "Unbounded"
    INCONCLUSIVE = "Inconclusive"
    POSITIVE_DEFINITE = "PositiveDefinite"
    NOT_POSITIVE_DEFINITE = "NotPositiveDefinite"

    def __str__(self):
        return self.value


@dataclass
class BoundednessResult:
    verdict: Verdict
    witness: dict | None
    records: list[dict] = field(default_factory=list)


def boundedness_classify(
    model: MotionModel,
    lam,
    grid=DEFAULT_GRID,
    threshold: float = 1.05,
    samples: int = 20000,
    seed: int = 0,
    se_ceiling: float = 0.1,
) -> BoundednessResult:
    """Decide empirically whether ``psi_lam`` is bounded.

    ``|psi_lam(t Y)|`` is estimated for ``Y`` running over ``±`` the slice
    basis and ``t`` over ``grid``. A value exceeding ``threshold`` by more than
    three standard errors is an unboundedness witness and stops the sweep.
    Points without a witness whose standard error exceeds ``se_ceiling``
    make the verdict Inconclusive instead of Bounded.

    One Haar sample set is drawn per direction, seeded by
    ``subseed(seed, direction_index)``, and shared along the ray.
    """
    if not len(grid):
        raise ValueError("empty grid")
    if threshold <= 1:
        raise ValueError("threshold must exceed 1")
    lam = as_spectral(lam, model.rank)
    records, unresolved = [], False
    log_thr = math.log(threshold)
    dirs = [d for base in model.slice_directions() for d in (base, -base)]
    for idx, direction in enumerate(dirs):
        ks = haar_sample(model.group, subseed(seed, idx), samples)
        for t in grid:
            shift, mean, se = _scaled_mc(model, lam, float(t) * direction, ks)
            lower = abs(mean) - 3.0 * se
            log_abs = math.log(abs(mean)) + shift if mean != 0 else -math.inf
            rec = {
                "direction": idx,
                "t": float(t),
                "log_abs_psi": log_abs,
                "abs_psi": math.exp(log_abs) if log_abs < _MAX_EXP else math.inf,
                "std_error": se * math.exp(shift) if shift < _MAX_EXP else math.inf,
                "exceeds": bool(lower > 0 and math.log(lower) + shift > log_thr),
            }
            records.append(rec)
            if rec["exceeds"]:
                return BoundednessResult(Verdict.UNBOUNDED, rec, records)
            if rec["std_error"] > se_ceiling:
                unresolved = True
    verdict = Verdict.INCONCLUSIVE if unresolved else Verdict.BOUNDED
    return BoundednessResult(verdict, None, records)
