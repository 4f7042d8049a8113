"""Dense complex linear algebra kernel.

All operators (states, unitaries, POVM elements, Choi matrices) are plain
numpy complex arrays in row-major order. Matrix functions go through the
Hermitian eigendecomposition; eigenvalue dust in [-1e-10, 0) from simulated
density matrices is clipped before sqrt/log.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERM_TOL = 1e-10
PSD_CLIP = 1e-10
PSD_ERR = 1e-8


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (a + a†)/2."""
    return (a + a.conj().T) / 2


def is_hermitian(a: np.ndarray, tol: float = HERM_TOL) -> bool:
    return np.linalg.norm(a - a.conj().T) <= tol


def is_unitary(a: np.ndarray, tol: float = HERM_TOL) -> bool:
    d = a.shape[0]
    return a.shape == (d, d) and np.linalg.norm(a.conj().T @ a - np.eye(d)) <= tol


def is_psd(a: np.ndarray, tol: float = HERM_TOL) -> bool:
    if not is_hermitian(a, max(tol, 1e-8)):
        return False
    return float(np.linalg.eigvalsh(hermitianize(a)).min()) >= -tol


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with row-major (big-endian) ordering."""
    return np.kron(a, b)


def kron_all(*ops: np.ndarray) -> np.ndarray:
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def partial_trace(m: np.ndarray, dims: list[int], keep) -> np.ndarray:
    """Reduce a square operator on a tensor product to the kept subsystems.

    `dims` lists the subsystem dimensions in tensor order; `keep` is an
    iterable of subsystem indices to retain (order preserved as in `dims`).
    """
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if keep and (keep[0] < 0 or keep[-1] >= len(dims)):
        raise ValueError("keep indices out of range")
    t = m.reshape(dims + dims)
    cur = list(dims)
    for ax in sorted((i for i in range(len(dims)) if i not in keep), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + len(cur))
        cur.pop(ax)
    dk = int(np.prod(cur)) if cur else 1
    return t.reshape(dk, dk)


@dataclass(frozen=True)
class EigenDecomposition:
    """Hermitian eigendecomposition, eigenvalues sorted descending."""

    values: np.ndarray        # real, descending
    vectors: np.ndarray       # orthonormal columns, vectors[:, i] <-> values[i]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def herm_eig(m: np.ndarray, tol: float = 1e-8) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix (descending eigenvalues)."""
    if not is_hermitian(m, tol):
        raise ValueError("input is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(hermitianize(m))
    order = np.argsort(vals)[::-1]
    return EigenDecomposition(values=vals[order], vectors=vecs[:, order])


def _psd_eig(m: np.ndarray) -> EigenDecomposition:
    eig = herm_eig(m)
    if eig.values.min() < -PSD_ERR:
        raise ValueError(f"matrix is not PSD: min eigenvalue {eig.values.min():.3e}")
    vals = np.clip(eig.values, 0.0, None)
    return EigenDecomposition(values=vals, vectors=eig.vectors)


def matrix_sqrt_psd(m: np.ndarray) -> np.ndarray:
    """PSD square root. Eigenvalue dust below zero is clipped."""
    eig = _psd_eig(m)
    return (eig.vectors * np.sqrt(eig.values)) @ eig.vectors.conj().T


def psd_part(m: np.ndarray) -> np.ndarray:
    """Projection of a Hermitian matrix onto the PSD cone."""
    vals, vecs = np.linalg.eigh(hermitianize(m))
    return (vecs * np.clip(vals, 0.0, None)) @ vecs.conj().T


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    if m.shape[0] != m.shape[1]:
        raise ValueError("trace norm expects a square matrix")
    return float(np.linalg.svd(m, compute_uv=False).sum())


def polar_unitary(m: np.ndarray) -> np.ndarray:
    """Unitary factor U of the polar decomposition m = U |m|.

    For singular m the completion on the kernel comes from the SVD bases,
    which is one valid unitary completion.
    """
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def unitary_completion(iso: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Extend an isometry (orthonormal columns) to a square unitary.

    The leading columns of the result equal `iso` exactly.
    """
    d, k = iso.shape
    if k > d:
        raise ValueError("isometry has more columns than rows")
    if np.linalg.norm(iso.conj().T @ iso - np.eye(k)) > tol:
        raise ValueError("columns are not orthonormal")
    cols = [iso[:, j] for j in range(k)]
    for j in range(d):
        if len(cols) == d:
            break
        v = np.zeros(d, dtype=complex)
        v[j] = 1.0
        for _ in range(2):  # two-pass Gram-Schmidt for stability
            for c in cols:
                v = v - c * np.vdot(c, v)
        norm = np.linalg.norm(v)
        if norm > 1e-7:
            cols.append(v / norm)
    if len(cols) != d:
        raise ValueError("failed to complete isometry")
    return np.column_stack(cols)
