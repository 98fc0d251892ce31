"""Compact rotation groups acting on R^n.

Two things live here: Haar samplers for the classical families, realized as
real orthogonal matrices so that every group acts on the same space R^n, and
the table of closed subgroups of O(n) that are transitive on the spheres
about the origin.

Real realizations
-----------------
U(m), SU(m)
    A complex entry ``a + bi`` becomes the block ``[[a, -b], [b, a]]``; the
    complex coordinate ``z_j`` sits at real coordinates ``(2j, 2j + 1)``.
Sp(m)
    A quaternion entry ``q`` becomes the 4x4 matrix of left multiplication by
    ``q`` in the basis ``1, i, j, k``; quaternionic scalars act on the right.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FAMILIES",
    "GroupSpec",
    "ClassificationEntry",
    "Extension",
    "NoSamplerError",
    "UnknownGroupError",
    "haar_sample",
    "is_transitive_on_spheres",
    "transitive_groups",
    "classification_json",
]

FAMILIES = ("SO", "O", "U", "SU", "Sp")
_DIM_FACTOR = {"SO": 1, "O": 1, "U": 2, "SU": 2, "Sp": 4}


class NoSamplerError(ValueError):
    """Raised when a Haar sampler is requested for a table-only group."""


class UnknownGroupError(ValueError):
    """Raised for a group name outside the classification vocabulary."""


@dataclass(frozen=True)
class GroupSpec:
    """A classical compact group together with its real ambient dimension."""

    family: str
    m: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise NoSamplerError(f"no sampler for family {self.family!r}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"rank parameter must be a positive integer, got {self.m!r}")

    @property
    def n(self) -> int:
        return _DIM_FACTOR[self.family] * self.m

    def __str__(self):
        return f"{self.family}({self.m})"

    @classmethod
    def parse(cls, name: "str | GroupSpec") -> "GroupSpec":
        """Parse ``"SU(2)"`` and friends; table-only names raise NoSamplerError."""
        if isinstance(name, GroupSpec):
            return name
        key = _normalize(name)
        match = re.fullmatch(r"(SO|O|SU|U|Sp)\((\d+)\)", key)
        if match:
            return cls(match.group(1), int(match.group(2)))
        if _in_vocabulary(key):
            raise NoSamplerError(f"no Haar sampler available for {name!r}")
        raise UnknownGroupError(f"unknown group name {name!r}")

    def identity(self) -> np.ndarray:
        return np.eye(self.n)

    def antipodal_element(self) -> np.ndarray:
        """An element ``k`` of the group with first row ``-e_1``.

        Realizes the nontrivial Weyl element of the rank-one models.
        """
        n = self.n
        diag = np.ones(n)
        if self.family in ("SO", "O"):
            if n < 2:
                raise ValueError("SO(1) has no antipodal element")
            diag[:2] = -1.0
        elif self.family == "U":
            diag[:2] = -1.0
        elif self.family == "SU":
            if self.m < 2:
                raise ValueError("SU(1) is trivial")
            diag[:4] = -1.0
        else:
            diag[:4] = -1.0
        return np.diag(diag)


def _as_seed(seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed) & (2**64 - 1)))


def _sign_fix(q, r):
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phase = np.where(d == 0, 1.0, d / np.abs(d))
    return q * phase[..., None, :]


def _orthogonal(rng, count, n, special):
    q, r = np.linalg.qr(rng.standard_normal((count, n, n)))
    q = _sign_fix(q, r)
    if special:
        flip = np.linalg.det(q) < 0
        q[flip, :, 0] *= -1.0
    return q


def complex_to_real(z: np.ndarray) -> np.ndarray:
    """Real realization of complex matrices, ``a + bi -> [[a, -b], [b, a]]``."""
    *lead, m, k = z.shape
    out = np.empty((*lead, 2 * m, 2 * k))
    out[..., 0::2, 0::2] = z.real
    out[..., 0::2, 1::2] = -z.imag
    out[..., 1::2, 0::2] = z.imag
    out[..., 1::2, 1::2] = z.real
    return out


def _unitary(rng, count, m, special):
    g = rng.standard_normal((count, m, m)) + 1j * rng.standard_normal((count, m, m))
    q, r = np.linalg.qr(g)
    q = _sign_fix(q, r)
    if special:
        det = np.linalg.det(q)
        q[:, :, 0] *= np.conj(det)[:, None]
    return complex_to_real(q)


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternion arrays with trailing axis (1, i, j, k)."""
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(q: np.ndarray) -> np.ndarray:
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def quaternion_to_real(q: np.ndarray) -> np.ndarray:
    """Real 4m x 4m realization of quaternion matrices of shape (..., m, m, 4)."""
    a, b, c, d = np.moveaxis(q, -1, 0)
    blocks = np.stack(
        [
            np.stack([a, -b, -c, -d], axis=-1),
            np.stack([b, a, -d, c], axis=-1),
            np.stack([c, d, a, -b], axis=-1),
            np.stack([d, -c, b, a], axis=-1),
        ],
        axis=-2,
    )
    # blocks: (..., m, m, 4, 4) -> (..., 4m, 4m)
    *lead, m, k, _, _ = blocks.shape
    return np.swapaxes(blocks, -3, -2).reshape(*lead, 4 * m, 4 * k)


def _symplectic(rng, count, m):
    cols = rng.standard_normal((count, m, m, 4))  # (sample, row, col, quat)
    out = np.zeros_like(cols)
    for j in range(m):
        v = cols[:, :, j, :]
        # two Gram-Schmidt passes keep orthogonality at rounding level
        for _ in range(2):
            for i in range(j):
                u = out[:, :, i, :]
                coef = qmul(qconj(u), v).sum(axis=1)  # <u, v>
                v = v - qmul(u, coef[:, None, :])
        norm = np.sqrt((v**2).sum(axis=(1, 2)))
        out[:, :, j, :] = v / norm[:, None, None]
    return quaternion_to_real(out)


def haar_sample(spec: "GroupSpec | str", seed: int, count: int) -> np.ndarray:
    """Draw ``count`` Haar-distributed elements as real ``(count, n, n)`` matrices.

    Gaussian matrix, QR, then column phases fixed by ``diag(R)``. The
    determinant is then corrected for SO and SU. Sp(m) uses quaternionic
    Gram-Schmidt on a quaternion Gaussian matrix, which is left-equivariant
    and therefore also Haar.
    """
    spec = GroupSpec.parse(spec)
    if int(count) != count or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    rng = _as_seed(seed)
    if spec.family in ("SO", "O"):
        return _orthogonal(rng, count, spec.m, special=spec.family == "SO")
    if spec.family in ("U", "SU"):
        return _unitary(rng, count, spec.m, special=spec.family == "SU")
    return _symplectic(rng, count, spec.m)


# -- classification of sphere-transitive groups ------------------------------


@dataclass(frozen=True)
class Extension:
    label: str
    group: str


@dataclass(frozen=True)
class ClassificationEntry:
    case: str
    n_predicate: str
    identity_component: str
    extensions: tuple[Extension, ...]
    sampler_available: bool

    @property
    def groups(self) -> list[str]:
        return [ext.group for ext in self.extensions]

    def names(self) -> set[str]:
        return {self.identity_component, *self.groups}

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "n_predicate": self.n_predicate,
            "K0": self.identity_component,
            "extensions": [ext.label for ext in self.extensions],
            "groups": self.groups,
            "sampler": self.sampler_available,
        }


@dataclass(frozen=True)
class _Template:
    case: str
    n_predicate: str
    k0: str
    extensions: tuple[tuple[str, str], ...]
    sampler: bool
    admits: object = field(compare=False)  # n -> m or None


def _div(k, m_min=1):
    def admits(n):
        if n % k == 0 and n // k >= m_min:
            return n // k
        return None

    return admits


def _exactly(value):
    return lambda n: 0 if n == value else None


_TEMPLATES = (
    _Template("1", "n>1", "SO(n)", (("trivial", "SO(n)"), ("±I", "O(n)")), True,
              lambda n: n if n >= 2 else None),
    # SU(1) is trivial and not transitive on S^1, hence m >= 2
    _Template("2(i)", "n=2m", "SU(m)", (("Z_l", "SU(m)Z_l"), ("D_l", "SU(m)D_l")), True,
              _div(2, m_min=2)),
    _Template("2(ii)", "n=2m", "U(m)", (("trivial", "U(m)"), ("α", "U(m)∪αU(m)")), True,
              _div(2)),
    _Template("3(i)", "n=4m", "Sp(m)",
              (("Z_l", "Sp(m)Z_l"), ("D*_l", "Sp(m)D*_l"), ("T*", "Sp(m)T*"),
               ("O*", "Sp(m)O*"), ("I*", "Sp(m)I*")), True, _div(4)),
    _Template("3(ii)", "n=4m", "Sp(m)U(1)",
              (("trivial", "Sp(m)U(1)"), ("β", "(Sp(m)U(1))∪(Sp(m)U(1))β")), False, _div(4)),
    _Template("3(iii)", "n=4m", "Sp(m)Sp(1)", (("trivial", "Sp(m)Sp(1)"),), False, _div(4)),
    _Template("4", "n=7", "G2", (("trivial", "G2"), ("±I", "G2∪(-I)G2")), False, _exactly(7)),
    _Template("5", "n=8", "Spin(7)", (("trivial", "Spin(7)"),), False, _exactly(8)),
    _Template("6", "n=16", "Spin(9)", (("trivial", "Spin(9)"),), False, _exactly(16)),
)


def _instantiate(template: _Template, n: int, m: int) -> ClassificationEntry:
    def fill(name):
        return name.replace("(n)", f"({n})").replace("(m)", f"({m})")

    return ClassificationEntry(
        case=template.case,
        n_predicate=template.n_predicate,
        identity_component=fill(template.k0),
        extensions=tuple(Extension(label, fill(group)) for label, group in template.extensions),
        sampler_available=template.sampler,
    )


def transitive_groups(n: int) -> list[ClassificationEntry]:
    """All classification entries whose dimension predicate admits ``n``."""
    if int(n) != n or n < 2:
        raise ValueError(f"sphere-transitive groups need n >= 2, got {n!r}")
    n = int(n)
    out = []
    for template in _TEMPLATES:
        m = template.admits(n)
        if m is not None:
            out.append(_instantiate(template, n, m))
    return out


_ALIASES = (("₂", "2"), ("−", "-"), ("·", ""), (".", ""), ("alpha", "α"), ("beta", "β"))


def _normalize(name: str) -> str:
    key = "".join(str(name).split())
    for src, dst in _ALIASES:
        key = key.replace(src, dst)
    key = key.replace("G_2", "G2")
    key = re.sub(r"D\*_?(\d+|l)", "D*_l", key)
    key = re.sub(r"D_?(\d+)", "D_l", key)
    key = re.sub(r"Z_?(\d+|l)", "Z_l", key)
    return key


def _template_patterns():
    pats = []
    for template in _TEMPLATES:
        for name in (template.k0, *(g for _, g in template.extensions)):
            pat = re.escape(name).replace(r"\(n\)", r"\(\d+\)").replace(r"\(m\)", r"\(\d+\)")
            pats.append(re.compile(pat))
    return pats


_PATTERNS = _template_patterns()


def _in_vocabulary(key: str) -> bool:
    return any(p.fullmatch(key) for p in _PATTERNS)


def is_transitive_on_spheres(name: "str | GroupSpec", n: int) -> bool:
    """Table lookup: does the named group act transitively on S^{n-1}?"""
    key = _normalize(str(name))
    if not _in_vocabulary(key):
        raise UnknownGroupError(f"unknown group name {name!r}")
    if int(n) != n or n < 2:
        return False
    return any(key in {_normalize(x) for x in entry.names()} for entry in transitive_groups(n))


def classification_json(n: int | None = None, indent: int | None = 2) -> str:
    """JSON export of the table, generic (``n=None``) or instantiated at ``n``."""
    if n is None:
        rows = [
            {
                "case": t.case,
                "n_predicate": t.n_predicate,
                "K0": t.k0,
                "extensions": [label for label, _ in t.extensions],
                "groups": [g for _, g in t.extensions],
                "sampler": t.sampler,
            }
            for t in _TEMPLATES
        ]
    else:
        rows = [entry.to_dict() for entry in transitive_groups(n)]
    return json.dumps(rows, indent=indent, ensure_ascii=False)
