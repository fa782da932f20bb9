"""Eigenvalues, singular values and spectral norms.

Complex Hermitian problems are mapped to the real symmetric embedding
``[[Re M, -Im M], [Im M, Re M]]``, whose spectrum is that of ``M`` with every
eigenvalue doubled, and solved by cyclic Jacobi with threshold skipping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import ConvergenceError, NotHermitianError
from .features import HERMITIAN_TOL, FeatureMatrix, HermitianMatrix, hermitian_residue

JACOBI_TOL = 1e-12
MAX_SWEEPS = 64
PAIRING_TOL = 1e-10
CLAMP_TOL = 1e-10
SINGULAR_RATIO = 1e-14


@numba.njit(cache=True, nogil=True)
def _jacobi_kernel(B, V, want_vectors, tol, max_sweeps):
    n = B.shape[0]
    fro = np.sqrt(np.sum(B * B))
    # entries below this are left alone; all of them together stay under tol
    skip = 1e-14 * fro / max(n, 1)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += B[i, j] * B[i, j]
        if np.sqrt(off) <= tol * fro:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = B[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (B[q, q] - B[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    bp = B[p, k]
                    bq = B[q, k]
                    B[p, k] = c * bp - s * bq
                    B[q, k] = s * bp + c * bq
                for k in range(n):
                    bp = B[k, p]
                    bq = B[k, q]
                    B[k, p] = c * bp - s * bq
                    B[k, q] = s * bp + c * bq
                B[p, q] = 0.0
                B[q, p] = 0.0
                if want_vectors:
                    for k in range(n):
                        vp = V[k, p]
                        vq = V[k, q]
                        V[k, p] = c * vp - s * vq
                        V[k, q] = s * vp + c * vq
    return -1


def jacobi_eigh(S, vectors=False, tol=JACOBI_TOL, max_sweeps=MAX_SWEEPS):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi.

    Returns ascending eigenvalues (and matching eigenvector columns when
    ``vectors`` is true).  Raises :class:`ConvergenceError` if the
    off-diagonal Frobenius norm is still above ``tol * ||S||_F`` after
    ``max_sweeps`` sweeps.
    """
    B = np.array(S, dtype=np.float64, order="C")
    n = B.shape[0]
    V = np.eye(n) if vectors else np.empty((0, 0))
    if n and np.any(B):
        sweeps = _jacobi_kernel(B, V, vectors, tol, max_sweeps)
        if sweeps < 0:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    values = np.diag(B).copy()
    order = np.argsort(values, kind="stable")
    if vectors:
        return values[order], V[:, order]
    return values[order]


def real_embedding(M):
    a = np.asarray(M, dtype=np.complex128)
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


@dataclass(frozen=True)
class SpectrumResult:
    values: np.ndarray = field(repr=False)
    kind: str
    sigma_min: float
    sigma_max: float
    condition_number: float
    pairing_residue: float = 0.0

    @property
    def is_singular(self):
        return math.isinf(self.condition_number)

    def to_csv(self):
        lines = ["index,value"]
        lines += [f"{i},{v:.17g}" for i, v in enumerate(self.values)]
        return "\n".join(lines) + "\n"


def _result(values, kind, pairing_residue=0.0):
    values = np.sort(np.asarray(values, dtype=np.float64))
    values.setflags(write=False)
    lo, hi = float(values[0]), float(values[-1])
    if lo > SINGULAR_RATIO * hi and lo > 0:
        cond = hi / lo
    else:
        cond = math.inf
    return SpectrumResult(values, kind, lo, hi, cond, pairing_residue)


def _hermitian_entries(M):
    if isinstance(M, HermitianMatrix):
        return M.entries
    a = np.asarray(M, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {a.shape}")
    if hermitian_residue(a) > HERMITIAN_TOL:
        raise NotHermitianError("matrix is not Hermitian")
    return a


def hermitian_eigh(M, vectors=False):
    """Eigenvalues (ascending) of a Hermitian matrix, optionally with vectors.

    Returns ``(values, pairing_residue)`` or ``(values, vectors, residue)``;
    the residue is the largest gap inside the doubled eigenvalue pairs of the
    real embedding.
    """
    a = _hermitian_entries(M)
    n = a.shape[0]
    if not np.any(a.imag):
        out = jacobi_eigh(a.real, vectors=vectors)
        if vectors:
            return out[0], out[1].astype(np.complex128), 0.0
        return out, 0.0
    emb = real_embedding(a)
    out = jacobi_eigh(emb, vectors=vectors)
    ev = out[0] if vectors else out
    residue = float(np.max(np.abs(ev[0::2] - ev[1::2])))
    scale = max(1.0, float(np.max(np.abs(ev))))
    if residue > PAIRING_TOL * scale:
        raise ConvergenceError(f"embedding eigenvalues failed to pair (residue {residue:.3g})")
    values = 0.5 * (ev[0::2] + ev[1::2])
    if not vectors:
        return values, residue
    # each pair spans {[u; v], [-v; u]}; any member maps to a complex vector
    V = out[1]
    cvec = V[:n, 0::2] + 1j * V[n:, 0::2]
    cvec /= np.linalg.norm(cvec, axis=0)[None, :]
    return values, cvec, residue


def hermitian_eigenvalues(M) -> SpectrumResult:
    values, residue = hermitian_eigh(M)
    return _result(values, "eigenvalues", residue)


def singular_values(A) -> SpectrumResult:
    """Singular values of ``A`` from the smaller of ``A^* A`` and ``A A^*``."""
    a = A.entries if isinstance(A, FeatureMatrix) else np.atleast_2d(np.asarray(A))
    m, n = a.shape
    g = a @ a.conj().T if m <= n else a.conj().T @ a
    g = 0.5 * (g + g.conj().T)
    values, residue = hermitian_eigh(g)
    return _result(gram_to_singular(values), "singular_values", residue)


def gram_to_singular(values):
    """Square roots of Gram eigenvalues; rounding negatives clamp to zero."""
    values = np.asarray(values, dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(values))))
    if values.min() < -CLAMP_TOL * scale:
        raise ConvergenceError(f"Gram eigenvalue {values.min():.3g} is negative beyond rounding")
    return np.sqrt(np.clip(values, 0.0, None))


def spectral_norm_hermitian(M) -> float:
    values, _ = hermitian_eigh(M)
    return float(np.max(np.abs(values)))


def deviation_from_identity(M) -> float:
    """||M - I||_2 for Hermitian M, via max |lambda - 1|."""
    values, _ = hermitian_eigh(M)
    return float(np.max(np.abs(values - 1.0)))


def backward_errors(M, values, vecs):
    """||M v - lambda v||_2 for each eigenpair."""
    a = _hermitian_entries(M)
    return np.linalg.norm(a @ vecs - vecs * values[None, :], axis=0)
