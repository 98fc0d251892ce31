"""Eigenfunctions of the Laplacian on R^2 and R^3 built from sphere densities.

A density ``F`` on the unit sphere synthesizes

    f(x) = int_{S^{n-1}} exp(i lam (x, w)) F(w) dw      (normalized dw)

which solves ``L f = -lam^2 f``. Densities are stored on a fixed quadrature
rule: the N-point trapezoid rule on the circle, or Gauss-Legendre in
``cos(polar)`` times the trapezoid rule in azimuth on the 2-sphere. A rule
built for budget ``B`` integrates plane waves ``exp(i lam (x, w))`` with
``|lam| |x| <= B`` to about machine precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import jv, roots_legendre

__all__ = [
    "SphereDensity",
    "EigenFunctionHandle",
    "ResolutionError",
    "BesselZeroError",
    "sphere_rule",
    "synthesize",
    "laplacian_residual",
    "radial_average",
    "ktype_project",
    "circle_samples",
    "analyze",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 30.0
BESSEL_GUARD = 1e-6


class ResolutionError(ValueError):
    """The density's rule cannot resolve the requested plane waves."""


class BesselZeroError(ValueError):
    """Inversion radius sits too close to a zero of some J_k."""

    def __init__(self, k, value):
        super().__init__(f"radius near Bessel zero: |J_{k}(lam r)| = {abs(value):.3g} < {BESSEL_GUARD:g}")
        self.k = k


def _circle_count(budget):
    return 2 * math.ceil(budget) + 64


def sphere_rule(n: int, budget: float = DEFAULT_BUDGET):
    """``(nodes, weights)`` of the sphere rule resolving ``|lam| |x| <= budget``."""
    if n == 2:
        count = _circle_count(budget)
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)]), np.full(count, 1.0 / count)
    if n == 3:
        n_polar = math.ceil(budget) + 32
        n_az = _circle_count(budget)
        z, wz = roots_legendre(n_polar)
        phi = 2.0 * np.pi * np.arange(n_az) / n_az
        rho = np.sqrt(1.0 - z**2)
        nodes = np.stack(
            [np.outer(rho, np.cos(phi)), np.outer(rho, np.sin(phi)), np.repeat(z[:, None], n_az, 1)],
            axis=-1,
        ).reshape(-1, 3)
        nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
        weights = np.repeat(wz, n_az) / n_az
        return nodes, weights / weights.sum()
    raise ValueError(f"sphere densities are implemented for n in {{2, 3}}, got {n}")


@dataclass(frozen=True)
class SphereDensity:
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    budget: float = DEFAULT_BUDGET

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if values.shape != self.weights.shape or self.nodes.shape != (len(self.weights), self.n):
            raise ValueError("nodes, weights and values disagree in shape")
        if abs(self.weights.sum() - 1.0) > 1e-14 or np.any(self.weights <= 0):
            raise ValueError("weights must be positive and sum to one")

    @classmethod
    def from_function(cls, n, func, budget=DEFAULT_BUDGET):
        """Sample ``func`` (vectorized over an ``(N, n)`` array of unit vectors)."""
        nodes, weights = sphere_rule(n, budget)
        return cls(n, nodes, weights, np.asarray(func(nodes), dtype=complex), budget)

    @classmethod
    def uniform(cls, n, budget=DEFAULT_BUDGET):
        return cls.from_function(n, lambda w: np.ones(len(w)), budget)

    @classmethod
    def point_mass(cls, n, direction, budget=DEFAULT_BUDGET):
        """All mass on the node nearest ``direction``; synthesizes one plane wave."""
        nodes, weights = sphere_rule(n, budget)
        j = int(np.argmax(nodes @ np.asarray(direction, dtype=float)))
        values = np.zeros(len(weights), dtype=complex)
        values[j] = 1.0 / weights[j]
        return cls(n, nodes, weights, values, budget)

    @classmethod
    def random(cls, n, seed, degree=6, budget=DEFAULT_BUDGET):
        """Seeded smooth density: a random complex polynomial of the coordinates."""
        rng = np.random.default_rng(seed)
        nodes, weights = sphere_rule(n, budget)
        if n == 2:
            ks = np.arange(-degree, degree + 1)
            coef = (rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size)) / (1 + np.abs(ks))
            theta = np.arctan2(nodes[:, 1], nodes[:, 0])
            values = np.exp(1j * np.outer(theta, ks)) @ coef
        else:
            powers = [(a, b, c) for a in range(degree + 1) for b in range(degree + 1 - a)
                      for c in range(degree + 1 - a - b)]
            coef = (rng.standard_normal(len(powers)) + 1j * rng.standard_normal(len(powers)))
            coef /= np.array([1.0 + sum(p) for p in powers])
            values = sum(c * nodes[:, 0] ** a * nodes[:, 1] ** b * nodes[:, 2] ** d
                         for c, (a, b, d) in zip(coef, powers))
        return cls(n, nodes, weights, values, budget)

    def with_values(self, values) -> "SphereDensity":
        return replace(self, values=np.asarray(values, dtype=complex))

    def mean(self) -> complex:
        return complex(np.dot(self.weights, self.values))

    def angular_coefficients(self, max_k: int) -> dict[int, complex]:
        """``F_k = (1/2pi) int F(theta) exp(-ik theta) dtheta`` for ``|k| <= max_k`` (n = 2)."""
        if self.n != 2:
            raise ValueError("angular coefficients are defined for n = 2")
        theta = np.arctan2(self.nodes[:, 1], self.nodes[:, 0])
        return {k: complex(np.dot(self.weights, self.values * np.exp(-1j * k * theta)))
                for k in range(-max_k, max_k + 1)}

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
            "values": [[float(v.real), float(v.imag)] for v in self.values],
            "budget": self.budget,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SphereDensity":
        values = np.array([complex(re, im) for re, im in data["values"]])
        return cls(int(data["n"]), np.array(data["nodes"], dtype=float),
                   np.array(data["weights"], dtype=float), values,
                   float(data.get("budget", DEFAULT_BUDGET)))

    @classmethod
    def from_json(cls, text: str) -> "SphereDensity":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class EigenFunctionHandle:
    lam: complex
    density: SphereDensity

    @property
    def n(self):
        return self.density.n

    def __call__(self, x):
        return synthesize(self, x)

    def translated(self, t) -> "EigenFunctionHandle":
        """The handle of ``x -> f(x + t)``: the density times ``exp(i lam (t, w))``."""
        d = self.density
        phase = np.exp(1j * self.lam * (d.nodes @ np.asarray(t, dtype=float)))
        return EigenFunctionHandle(self.lam, d.with_values(d.values * phase))


def synthesize(handle: EigenFunctionHandle, x):
    """``f(x)`` by the density's quadrature rule; ``x`` may be an ``(..., n)`` array."""
    x = np.asarray(x, dtype=float)
    d = handle.density
    if x.shape[-1] != d.n:
        raise ValueError(f"points must have {d.n} coordinates")
    reach = abs(handle.lam) * float(np.linalg.norm(x, axis=-1).max(initial=0.0))
    if reach > d.budget:
        raise ResolutionError(
            f"|lam| |x| = {reach:.3g} exceeds the rule's budget {d.budget:g}; refine the density"
        )
    waves = np.exp(1j * handle.lam * (x @ d.nodes.T))
    out = waves @ (d.weights * d.values)
    return out if out.ndim else complex(out)


def laplacian_residual(handle: EigenFunctionHandle, x, h: float) -> float:
    """``|L_h f(x) + lam^2 f(x)|`` with the second-order central stencil.

    The stencil is linear, so it is applied to each plane wave of the
    synthesis in closed form, ``(2 cos(lam w_i h) - 2) / h^2 = -4 sin^2(lam w_i h / 2) / h^2``.
    This is the same number as differencing ``f`` directly, minus the
    cancellation error of order ``eps / h^2``.
    """
    if not h > 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    d = handle.density
    lam = handle.lam
    synthesize(handle, x)  # resolution check
    reach = abs(lam) * (float(np.linalg.norm(x)) + h)
    if reach > d.budget:
        raise ResolutionError(f"|lam| |x| = {reach:.3g} exceeds the rule's budget {d.budget:g}")
    waves = np.exp(1j * lam * (d.nodes @ x)) * d.weights * d.values
    stencil = (-4.0 * np.sin(0.5 * lam * h * d.nodes) ** 2).sum(axis=1) / h**2
    return float(abs(np.dot(waves, stencil + lam**2)))


def radial_average(handle: EigenFunctionHandle, r: float) -> complex:
    """Average of ``f`` over the rotation orbit of ``r e_1``; equals mean(F) phi_lam(r)."""
    nodes, weights = sphere_rule(handle.n, max(abs(handle.lam) * r, 1.0))
    return complex(np.dot(weights, synthesize(handle, r * nodes)))


def ktype_project(f, k: int, x, nodes: int | None = None) -> complex:
    """``(1/2pi) int exp(ik theta) f(R_{-theta} x) dtheta`` on R^2 (trapezoid rule).

    ``f`` is a handle or any vectorized callable on ``(..., 2)`` arrays; for a
    plain callable pass ``nodes`` or accept the default sized for ``|x| <= 30``.
    """
    if isinstance(f, EigenFunctionHandle):
        if f.n != 2:
            raise NotImplementedError("K-type projection is implemented for n = 2 only")
        reach = abs(f.lam) * float(np.linalg.norm(x))
        func = f
    else:
        reach = DEFAULT_BUDGET
        func = f
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise NotImplementedError("K-type projection is implemented for n = 2 only")
    count = nodes or (2 * math.ceil(reach) + 2 * abs(k) + 64)
    theta = 2.0 * np.pi * np.arange(count) / count
    c, s = np.cos(theta), np.sin(theta)
    # R_{-theta} x
    pts = np.column_stack([c * x[0] + s * x[1], -s * x[0] + c * x[1]])
    return complex(np.mean(np.exp(1j * k * theta) * func(pts)))


def circle_samples(handle: EigenFunctionHandle, r: float, count: int | None = None) -> np.ndarray:
    """``f`` at ``count`` equispaced angles on the circle of radius ``r``."""
    count = count or (2 * math.ceil(abs(handle.lam) * r) + 64)
    alpha = 2.0 * np.pi * np.arange(count) / count
    return synthesize(handle, r * np.column_stack([np.cos(alpha), np.sin(alpha)]))


def analyze(samples, lam: complex, r: float, max_k: int) -> dict[int, complex]:
    """Recover the angular coefficients ``F_k``, ``|k| <= max_k``, from ``f`` on one circle.

    ``samples`` are values of ``f`` at equispaced angles ``2 pi j / M``. With
    ``c_k`` the angular Fourier coefficients of ``f``, ``F_k = c_k / (i^k J_k(lam r))``.
    """
    samples = np.asarray(samples, dtype=complex)
    count = samples.size
    if count < 2 * max_k + 1:
        raise ValueError("need at least 2 max_k + 1 samples")
    ks = np.arange(-max_k, max_k + 1)
    bessel = jv(ks, lam * r)
    small = np.flatnonzero(np.abs(bessel) < BESSEL_GUARD)
    if small.size:
        worst = min(small, key=lambda i: (abs(ks[i]), ks[i] < 0))
        raise BesselZeroError(int(ks[worst]), bessel[worst])
    fft = np.fft.fft(samples) / count
    coeff = fft[ks % count]
    return {int(k): complex(c / (1j**k * b)) for k, c, b in zip(ks, coeff, bessel)}
