"""Dense complex linear algebra for the selection and verification layers.

Everything is numpy-backed and deliberately non-incremental: eigenvalue
certificates are always recomputed from a fresh Hermitian eigendecomposition
rather than maintained by rank-one updates.  Desk-scale orders (m up to about
1024) keep this cheap, and it removes a whole class of drift bugs from the
certified numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, ShiftInsideSpectrum

HERMITIAN_RTOL = 1e-12
EIG_RESIDUAL_RTOL = 1e-10


def dft_submatrix(m: int, row_set, col_set) -> np.ndarray:
    """Submatrix of the order-m Fourier matrix, entries exp(2i*pi*j*r/m).

    Rows are indexed by j in row_set, columns by r in col_set; both must be
    duplicate-free residues in {0, ..., m-1}.
    """
    rows = np.asarray(list(row_set), dtype=np.int64)
    cols = np.asarray(list(col_set), dtype=np.int64)
    for name, idx in (("row", rows), ("col", cols)):
        if idx.size == 0:
            raise ValueError(f"{name} set is empty")
        if idx.min() < 0 or idx.max() >= m:
            raise ValueError(f"{name} residue out of range [0, {m - 1}]")
        if np.unique(idx).size != idx.size:
            raise ValueError(f"duplicate {name} residues")
    phase = 2.0j * np.pi * np.outer(rows, cols) / m
    return np.exp(phase)


def gram(a: np.ndarray) -> np.ndarray:
    """Conjugate-transpose product a* a (cols x cols, Hermitian PSD)."""
    a = np.asarray(a, dtype=np.complex128)
    g = a.conj().T @ a
    return 0.5 * (g + g.conj().T)


@dataclass(frozen=True)
class HermitianSpectrum:
    """Ascending eigenvalues with a unitary eigenvector basis.

    Eigenvectors follow a fixed sign convention (first component of modulus
    above 1e-8 times the max is rotated to the positive real axis) so that
    identical inputs give byte-identical results.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def lam_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lam_max(self) -> float:
        return float(self.eigenvalues[-1])


def _canonical_phases(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        pivot = int(np.argmax(mags > 1e-8 * mags.max())) if mags.max() > 0 else 0
        z = col[pivot]
        if abs(z) > 0:
            out[:, k] = col * (z.conjugate() / abs(z))
    return out


def hermitian_eig(h: np.ndarray) -> HermitianSpectrum:
    """Full spectrum of a Hermitian matrix, deterministic for identical input.

    Raises NotHermitian if the asymmetry exceeds HERMITIAN_RTOL relative to
    the matrix scale; the input is symmetrized before factorization.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("hermitian_eig expects a square matrix")
    if not (np.all(np.isfinite(h.real)) and np.all(np.isfinite(h.imag))):
        raise ValueError("matrix entries must be finite")
    scale = max(1.0, float(np.abs(h).max()) if h.size else 0.0)
    asym = float(np.abs(h - h.conj().T).max())
    if asym > HERMITIAN_RTOL * scale:
        raise NotHermitian(f"asymmetry {asym:.3e} exceeds {HERMITIAN_RTOL:.0e} * {scale:.3e}")
    hs = 0.5 * (h + h.conj().T)
    vals, vecs = np.linalg.eigh(hs)
    vecs = _canonical_phases(vecs)
    spec = HermitianSpectrum(vals, vecs)
    hnorm = max(1.0, float(np.abs(vals).max()))
    residual = float(np.abs(hs @ vecs - vecs * vals[None, :]).max())
    if residual > EIG_RESIDUAL_RTOL * hnorm:
        raise ArithmeticError(f"eigendecomposition residual {residual:.3e} too large")
    return spec


def resolvent_quadratics(a: np.ndarray, shift: float, v: np.ndarray) -> tuple[float, float]:
    """Quadratic forms of the first and second resolvent powers at a real shift.

    For shift u above the spectrum returns (v*(uI-a)^-1 v, v*(uI-a)^-2 v);
    for shift l below it returns the mirrored forms with (a-lI).  Computed
    from the eigendecomposition of a; no incremental updates.
    """
    spec = hermitian_eig(a)
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != spec.eigenvalues.size:
        raise ValueError("vector length does not match matrix order")
    anorm = max(1.0, float(np.abs(spec.eigenvalues).max()))
    weights = np.abs(spec.eigenvectors.conj().T @ v) ** 2
    if shift > spec.lam_max:
        gaps = shift - spec.eigenvalues
    elif shift < spec.lam_min:
        gaps = spec.eigenvalues - shift
    else:
        raise ShiftInsideSpectrum(
            f"shift {shift} inside [{spec.lam_min}, {spec.lam_max}]"
        )
    if float(gaps.min()) < 1e-12 * anorm:
        raise ShiftInsideSpectrum(f"shift {shift} within 1e-12 margin of the spectrum")
    q1 = float(np.sum(weights / gaps))
    q2 = float(np.sum(weights / gaps**2))
    return q1, q2
