"""Flat symmetric-space models K ⋉ p.

A model bundles the compact group ``K``, its linear isometric action on the
vector space ``p``, the abelian slice ``a`` and the complex pairing between a
spectral parameter and a vector of ``p``. Vectors of ``p`` are plain float
arrays of length ``dim_p``; spectral parameters are complex arrays of length
``rank``.
"""

from __future__ import annotations

import itertools
import json
import math

import numpy as np

from .groups import GroupSpec, is_transitive_on_spheres

__all__ = [
    "MotionModel",
    "RankOneModel",
    "SLFlatModel",
    "as_spectral",
    "rank_one_model",
    "sl_flat_model",
    "model_from_string",
]


def as_spectral(lam, rank: int) -> np.ndarray:
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if lam.shape != (rank,):
        raise ValueError(f"spectral parameter needs {rank} component(s), got shape {lam.shape}")
    if not np.all(np.isfinite(lam)):
        raise ValueError("spectral parameter has non-finite entries")
    return lam


class MotionModel:
    """Common interface of the flat models; concrete subclasses fill it in."""

    name: str
    dim_p: int
    rank: int
    group: GroupSpec

    def action(self, k: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """``Ad(k) Y``; ``k`` may be a stack ``(N, n, n)``."""
        raise NotImplementedError

    def embed_a(self, h) -> np.ndarray:
        raise NotImplementedError

    def pairing(self, lam, Y) -> np.ndarray:
        """Complex-linear in ``lam``, real-linear in ``Y``; ``Y`` may be batched."""
        raise NotImplementedError

    def orbit_pairing(self, lam, ks: np.ndarray, Y) -> np.ndarray:
        """``pairing(lam, Ad(k) Y)`` for every ``k`` in the stack ``ks``."""
        return self.pairing(lam, self.action(ks, Y))

    def weyl_action(self, lam) -> list[tuple[np.ndarray, np.ndarray]]:
        """Pairs ``(lam', k0)`` with ``pairing(lam', Y) == pairing(lam, Ad(k0) Y)``."""
        raise NotImplementedError

    def weyl_orbit(self, lam) -> list[np.ndarray]:
        seen, out = set(), []
        for image, _ in self.weyl_action(lam):
            key = tuple(image)
            if key not in seen:
                seen.add(key)
                out.append(image)
        return out

    def slice_directions(self) -> list[np.ndarray]:
        """Unit vectors of ``p`` spanning the slice ``a``."""
        out = []
        for j in range(self.rank):
            h = np.zeros(self.rank)
            h[j] = 1.0
            v = self.embed_a(h)
            out.append(v / np.linalg.norm(v))
        return out

    def random_vector(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        return scale * rng.standard_normal(self.dim_p)

    def descriptor(self) -> dict:
        return {"name": self.name, "dim_p": self.dim_p, "rank": self.rank, "group": str(self.group)}

    def to_json(self) -> str:
        return json.dumps(self.descriptor())

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


class RankOneModel(MotionModel):
    """``p = R^n`` with a sphere-transitive ``K`` acting by matrix multiplication.

    The slice is ``R e_1`` and ``pairing(lam, Y) = lam_1 * Y_1``.
    """

    rank = 1

    def __init__(self, n: int, group: "GroupSpec | str | None" = None):
        group = GroupSpec.parse(group if group is not None else f"SO({n})")
        if group.n != n or not is_transitive_on_spheres(str(group), n):
            raise ValueError(f"{group} is not transitive on the spheres of R^{n}")
        self.n = n
        self.group = group
        self.dim_p = n
        self.name = f"rank1:{n}:{group}"

    def action(self, k, Y):
        return np.matmul(k, np.asarray(Y, dtype=float))

    def embed_a(self, h):
        h = np.atleast_1d(np.asarray(h, dtype=float))
        Y = np.zeros(self.n)
        Y[0] = h[0]
        return Y

    def pairing(self, lam, Y):
        lam = as_spectral(lam, 1)
        return lam[0] * np.asarray(Y, dtype=float)[..., 0]

    def orbit_pairing(self, lam, ks, Y):
        lam = as_spectral(lam, 1)
        return lam[0] * (ks[..., 0, :] @ np.asarray(Y, dtype=float))

    def weyl_action(self, lam):
        lam = as_spectral(lam, 1)
        return [(lam, self.group.identity()), (-lam, self.group.antipodal_element())]


class SLFlatModel(MotionModel):
    """Flat model of SL(n, R)/SO(n).

    ``p`` is the space of symmetric traceless ``n x n`` matrices with the
    Frobenius inner product, stored in an orthonormal basis whose first
    ``n - 1`` elements span the diagonal slice. Slice and spectral coordinates
    are ``(h_1, ..., h_{n-1})`` with ``h_n = -sum(h)``.
    """

    def __init__(self, n: int):
        if int(n) != n or n < 2:
            raise ValueError(f"SL flat model needs n >= 2, got {n!r}")
        self.n = n = int(n)
        self.group = GroupSpec("SO", n)
        self.rank = n - 1
        self.dim_p = n * (n + 1) // 2 - 1
        self.name = f"sl:{n}"
        self.basis = self._basis(n)
        # diag(to_matrix(c)) == self._diag @ c
        self._diag = np.einsum("kii->ik", self.basis)

    @staticmethod
    def _basis(n):
        mats = []
        for k in range(1, n):
            d = np.zeros(n)
            d[:k] = 1.0
            d[k] = -k
            mats.append(np.diag(d / math.sqrt(k * (k + 1))))
        for i, j in itertools.combinations(range(n), 2):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = 1.0 / math.sqrt(2.0)
            mats.append(e)
        return np.array(mats)

    def to_matrix(self, Y) -> np.ndarray:
        return np.tensordot(np.asarray(Y, dtype=float), self.basis, axes=(-1, 0))

    def from_matrix(self, M) -> np.ndarray:
        return np.einsum("kij,...ij->...k", self.basis, M)

    def action(self, k, Y):
        M = self.to_matrix(Y)
        return self.from_matrix(k @ M @ np.swapaxes(k, -1, -2))

    def full_diagonal(self, h) -> np.ndarray:
        h = np.asarray(h)
        return np.concatenate([h, [-h.sum()]])

    def embed_a(self, h):
        h = np.asarray(h, dtype=float)
        if h.shape != (self.rank,):
            raise ValueError(f"slice coordinates need length {self.rank}")
        return self.from_matrix(np.diag(self.full_diagonal(h)))

    def pairing(self, lam, Y):
        lam_full = self.full_diagonal(as_spectral(lam, self.rank))
        diag = np.asarray(Y, dtype=float) @ self._diag.T
        return diag @ lam_full

    def orbit_pairing(self, lam, ks, Y):
        lam_full = self.full_diagonal(as_spectral(lam, self.rank))
        M = self.to_matrix(Y)
        # sum_i lam_i (k M k^T)_ii
        return np.einsum("i,nia,ab,nib->n", lam_full, ks, M, ks)

    def weyl_action(self, lam):
        lam = as_spectral(lam, self.rank)
        lam_full = self.full_diagonal(lam)
        n = self.n
        out = []
        for perm in itertools.permutations(range(n)):
            P = np.zeros((n, n))
            P[list(perm), range(n)] = 1.0
            if np.linalg.det(P) < 0:
                P[:, 0] *= -1.0
            image = lam_full[list(perm)][:-1]
            out.append((image, P))
        return out


def rank_one_model(n: int, spec: "GroupSpec | str | None" = None) -> RankOneModel:
    return RankOneModel(n, spec)


def sl_flat_model(n: int) -> SLFlatModel:
    return SLFlatModel(n)


def model_from_string(text: str) -> MotionModel:
    """Parse ``rank1:<n>[:<group>]`` or ``sl:<n>``."""
    parts = text.split(":")
    try:
        kind, n = parts[0], int(parts[1])
    except (IndexError, ValueError):
        raise ValueError(f"malformed model {text!r}; expected rank1:<n>[:<group>] or sl:<n>") from None
    if kind == "rank1" and len(parts) in (2, 3):
        return RankOneModel(n, parts[2] if len(parts) == 3 else None)
    if kind == "sl" and len(parts) == 2:
        return SLFlatModel(n)
    raise ValueError(f"malformed model {text!r}; expected rank1:<n>[:<group>] or sl:<n>")
