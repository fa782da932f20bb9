"""Random feature matrices A[j, k] = exp(i <x_j, w_k>) and their Gram matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NotHermitianError
from .sampling import PointCloud

HERMITIAN_TOL = 1e-8
_BLOCK = 512


def _freeze(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense complex Hermitian matrix (Gram, expectation or difference)."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ConfigurationError(f"expected a nonempty square matrix, got {a.shape}")
        residue = hermitian_residue(a)
        if residue > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(a)))):
            raise NotHermitianError(f"symmetry residue {residue:.3g} exceeds tolerance")
        object.__setattr__(self, "entries", _freeze(a))

    @property
    def n(self):
        return self.entries.shape[0]

    def __sub__(self, other):
        return HermitianMatrix(self.entries - _entries(other))

    def __add__(self, other):
        return HermitianMatrix(self.entries + _entries(other))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n, dtype=np.complex128))


def _entries(m):
    return m.entries if isinstance(m, HermitianMatrix) else np.asarray(m)


def hermitian_residue(a):
    """Largest componentwise |a - a^H|."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


@dataclass(frozen=True)
class FeatureMatrix:
    entries: np.ndarray = field(repr=False)
    normalized: bool = False

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2 or 0 in a.shape:
            raise ConfigurationError(f"expected a nonempty m x N matrix, got {a.shape}")
        object.__setattr__(self, "entries", _freeze(a))

    @property
    def m(self):
        return self.entries.shape[0]

    @property
    def N(self):
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape


def build_feature_matrix(data: PointCloud, weights: PointCloud) -> FeatureMatrix:
    """Raw (unnormalized) feature matrix for ``m`` data points and ``N`` weights."""
    x = data.points if isinstance(data, PointCloud) else np.atleast_2d(data)
    w = weights.points if isinstance(weights, PointCloud) else np.atleast_2d(weights)
    if x.shape[1] != w.shape[1]:
        raise ConfigurationError(
            f"dimension mismatch: data d={x.shape[1]}, weights d={w.shape[1]}"
        )
    phase = x @ w.T
    return FeatureMatrix(np.cos(phase) + 1j * np.sin(phase), normalized=False)


def normalize_columns(A: FeatureMatrix) -> FeatureMatrix:
    """Scale every column to unit l2 norm (a factor 1/sqrt(m) for raw A)."""
    if A.normalized:
        raise ConfigurationError("feature matrix is already normalized")
    norms = np.linalg.norm(A.entries, axis=0)
    if np.any(norms == 0):
        raise ConfigurationError("cannot normalize a zero column")
    return FeatureMatrix(A.entries / norms[None, :], normalized=True)


def _blocked_gram(a):
    """a^H a, accumulated over row blocks and reduced pairwise."""
    partial = [
        a[s : s + _BLOCK].conj().T @ a[s : s + _BLOCK]
        for s in range(0, a.shape[0], _BLOCK)
    ]
    while len(partial) > 1:
        partial = [
            partial[i] + partial[i + 1] if i + 1 < len(partial) else partial[i]
            for i in range(0, len(partial), 2)
        ]
    return partial[0]


def _hermitian_from_upper(g):
    upper = np.triu(g, 1)
    out = upper + upper.conj().T
    # raw entries are unimodular, so each diagonal entry is exactly one
    out[np.diag_indices_from(out)] = 1.0
    return out


def _require_raw(A):
    if A.normalized:
        raise ConfigurationError("Gram matrices are formed from the raw feature matrix")


def gram_over_weights(A: FeatureMatrix) -> HermitianMatrix:
    """(1/m) A^* A, size N x N."""
    _require_raw(A)
    return HermitianMatrix(_hermitian_from_upper(_blocked_gram(A.entries) / A.m))


def gram_over_data(A: FeatureMatrix) -> HermitianMatrix:
    """(1/N) A A^*, size m x m."""
    _require_raw(A)
    g = _blocked_gram(A.entries.conj().T) / A.N
    return HermitianMatrix(_hermitian_from_upper(g))


def smaller_gram(A: FeatureMatrix, scale=None) -> HermitianMatrix:
    """Gram over the shorter side of A (m x m when m <= N), times ``scale``.

    Default scale is 1 (unnormalized product), which works for normalized and
    raw matrices alike.
    """
    a = A.entries
    g = _blocked_gram(a.conj().T) if A.m <= A.N else _blocked_gram(a)
    if scale is not None:
        g = g * scale
    upper = np.triu(g, 1)
    out = upper + upper.conj().T
    out[np.diag_indices_from(out)] = np.real(np.diag(g))
    return HermitianMatrix(out)


def format_complex(z):
    return f"{z.real:.17g}{z.imag:+.17g}j"


def matrix_to_csv(matrix, path=None):
    """CSV text of a complex matrix: header of column indices, 're+imj' cells."""
    a = _entries(matrix)
    lines = [",".join(str(k) for k in range(a.shape[1]))]
    for row in a:
        lines.append(",".join(format_complex(complex(z)) for z in row))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def matrix_from_csv(text):
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return np.array([[complex(c) for c in r.split(",")] for r in rows[1:]])


def column_norms(A: FeatureMatrix):
    return np.linalg.norm(A.entries, axis=0)


def unit_gram_scale(A: FeatureMatrix):
    """Factor mapping A to the scaling whose singular values concentrate near 1.

    That is 1/sqrt(max(m, N)): singular values of the scaled matrix are the
    square roots of the eigenvalues of (1/N) A A^* when m <= N and of
    (1/m) A^* A otherwise.
    """
    return 1.0 / math.sqrt(max(A.m, A.N))
