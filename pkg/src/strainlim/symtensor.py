"""Symmetric and general 3x3 tensor algebra with spectral operations.

Symmetric tensors are stored as six plain floats so the hot operations
(norm, trace, determinant) stay allocation-free; full 3x3 values only
appear on the spectral paths. The eigensolver is a cyclic Jacobi sweep,
which is unconditionally robust for 3x3 symmetric input and, unlike the
closed-form cubic, does not lose accuracy near repeated eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, Singular

# eigenvalues at or below this are treated as nonpositive
EIG_POSITIVITY_TOL = 1e-14

_JACOBI_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 50


@dataclass(frozen=True)
class SymTensor:
    """Symmetric 3x3 tensor; components (xx, yy, zz, xy, xz, yz)."""

    xx: float = 0.0
    yy: float = 0.0
    zz: float = 0.0
    xy: float = 0.0
    xz: float = 0.0
    yz: float = 0.0

    @staticmethod
    def identity() -> "SymTensor":
        return SymTensor(1.0, 1.0, 1.0)

    @staticmethod
    def from_matrix(m) -> "SymTensor":
        """Build from a 3x3 array, averaging away roundoff asymmetry."""
        return SymTensor(
            float(m[0][0]),
            float(m[1][1]),
            float(m[2][2]),
            0.5 * (float(m[0][1]) + float(m[1][0])),
            0.5 * (float(m[0][2]) + float(m[2][0])),
            0.5 * (float(m[1][2]) + float(m[2][1])),
        )

    def as_matrix(self) -> np.ndarray:
        # both triangles from the same float, so the result is symmetric bit-exactly
        return np.array(
            [
                [self.xx, self.xy, self.xz],
                [self.xy, self.yy, self.yz],
                [self.xz, self.yz, self.zz],
            ]
        )

    def components(self) -> tuple:
        return (self.xx, self.yy, self.zz, self.xy, self.xz, self.yz)

    def __add__(self, other: "SymTensor") -> "SymTensor":
        return SymTensor(
            self.xx + other.xx,
            self.yy + other.yy,
            self.zz + other.zz,
            self.xy + other.xy,
            self.xz + other.xz,
            self.yz + other.yz,
        )

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        return SymTensor(
            self.xx - other.xx,
            self.yy - other.yy,
            self.zz - other.zz,
            self.xy - other.xy,
            self.xz - other.xz,
            self.yz - other.yz,
        )

    def __mul__(self, s: float) -> "SymTensor":
        return SymTensor(
            self.xx * s,
            self.yy * s,
            self.zz * s,
            self.xy * s,
            self.xz * s,
            self.yz * s,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "SymTensor":
        return self * -1.0


@dataclass(frozen=True)
class Tensor3:
    """General 3x3 tensor, row-major component tuple. Houses F and R."""

    data: tuple

    @staticmethod
    def identity() -> "Tensor3":
        return Tensor3((1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0))

    @staticmethod
    def from_matrix(m) -> "Tensor3":
        return Tensor3(tuple(float(m[i][j]) for i in range(3) for j in range(3)))

    def as_matrix(self) -> np.ndarray:
        return np.array(self.data).reshape(3, 3)

    def transpose(self) -> "Tensor3":
        d = self.data
        return Tensor3((d[0], d[3], d[6], d[1], d[4], d[7], d[2], d[5], d[8]))

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        return Tensor3(tuple(a - b for a, b in zip(self.data, other.data)))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and the orthogonal eigenvector frame (columns)."""

    eigenvalues: tuple
    frame: Tensor3


def frobenius(A) -> float:
    """Frobenius norm sqrt(tr(A A^T)); zero iff A is zero."""
    if isinstance(A, SymTensor):
        return math.sqrt(
            A.xx * A.xx
            + A.yy * A.yy
            + A.zz * A.zz
            + 2.0 * (A.xy * A.xy + A.xz * A.xz + A.yz * A.yz)
        )
    return math.sqrt(sum(x * x for x in A.data))


def trace(A: SymTensor) -> float:
    return A.xx + A.yy + A.zz


def inner(A: SymTensor, B: SymTensor) -> float:
    """Matrix inner product tr(A B) for symmetric arguments."""
    return (
        A.xx * B.xx
        + A.yy * B.yy
        + A.zz * B.zz
        + 2.0 * (A.xy * B.xy + A.xz * B.xz + A.yz * B.yz)
    )


def det(A) -> float:
    """Determinant by cofactor expansion."""
    if isinstance(A, SymTensor):
        return (
            A.xx * (A.yy * A.zz - A.yz * A.yz)
            - A.xy * (A.xy * A.zz - A.yz * A.xz)
            + A.xz * (A.xy * A.yz - A.yy * A.xz)
        )
    d = A.data
    return (
        d[0] * (d[4] * d[8] - d[5] * d[7])
        - d[1] * (d[3] * d[8] - d[5] * d[6])
        + d[2] * (d[3] * d[7] - d[4] * d[6])
    )


def inverse(A):
    """Inverse of a SymTensor or Tensor3 via the adjugate; raises Singular."""
    d = det(A)
    if abs(d) <= 1e-14:
        raise Singular(f"determinant {d!r} too small to invert")
    if isinstance(A, SymTensor):
        # adjugate of a symmetric matrix is symmetric
        return SymTensor(
            (A.yy * A.zz - A.yz * A.yz) / d,
            (A.xx * A.zz - A.xz * A.xz) / d,
            (A.xx * A.yy - A.xy * A.xy) / d,
            (A.xz * A.yz - A.xy * A.zz) / d,
            (A.xy * A.yz - A.xz * A.yy) / d,
            (A.xy * A.xz - A.xx * A.yz) / d,
        )
    m = A.data
    a, b, c, e, f, g, h, i, j = m
    adj = (
        f * j - g * i,
        c * i - b * j,
        b * g - c * f,
        g * h - e * j,
        a * j - c * h,
        c * e - a * g,
        e * i - f * h,
        b * h - a * i,
        a * f - b * e,
    )
    return Tensor3(tuple(x / d for x in adj))


def is_rotation(R: Tensor3, tol: float = 1e-12) -> bool:
    m = R.as_matrix()
    return bool(np.linalg.norm(m.T @ m - np.eye(3)) <= tol and np.linalg.det(m) > 0.0)


def eig_sym(A: SymTensor) -> Spectrum:
    """Spectral decomposition by cyclic Jacobi sweeps.

    Convergence: off-diagonal Frobenius norm <= 1e-14 * |A|, at most 50
    sweeps. Eigenvalues sorted descending (ties keep their pre-sort order);
    each eigenvector's largest-magnitude component is made positive so the
    output is deterministic.
    """
    norm_a = frobenius(A)
    m = A.as_matrix()
    v = np.eye(3)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(2.0 * (m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2))
        if off <= _JACOBI_TOL * norm_a:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = m[p, q]
            if apq == 0.0:
                continue
            theta = (m[q, q] - m[p, p]) / (2.0 * apq)
            if theta >= 0.0:
                t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
            else:
                t = 1.0 / (theta - math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            g = np.eye(3)
            g[p, p] = c
            g[q, q] = c
            g[p, q] = s
            g[q, p] = -s
            m = g.T @ m @ g
            v = v @ g
    evals = np.diag(m).copy()
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    v = v[:, order]
    for j in range(3):
        k = int(np.argmax(np.abs(v[:, j])))
        if v[k, j] < 0.0:
            v[:, j] = -v[:, j]
    return Spectrum(tuple(float(x) for x in evals), Tensor3.from_matrix(v))


def _spectral_map(A: SymTensor, fn, require_pd: bool) -> SymTensor:
    spec = eig_sym(A)
    if require_pd and min(spec.eigenvalues) <= EIG_POSITIVITY_TOL:
        raise NotPositiveDefinite(
            f"eigenvalue {min(spec.eigenvalues)!r} at or below {EIG_POSITIVITY_TOL}"
        )
    v = spec.frame.as_matrix()
    out = v @ np.diag([fn(x) for x in spec.eigenvalues]) @ v.T
    return SymTensor.from_matrix(out)


def spd_sqrt(C: SymTensor) -> SymTensor:
    """Symmetric positive definite square root."""
    return _spectral_map(C, math.sqrt, require_pd=True)


def sym_log(B: SymTensor) -> SymTensor:
    """Matrix logarithm of a symmetric positive definite tensor."""
    return _spectral_map(B, math.log, require_pd=True)


def sym_exp(H: SymTensor) -> SymTensor:
    """Matrix exponential of a symmetric tensor."""
    return _spectral_map(H, math.exp, require_pd=False)
