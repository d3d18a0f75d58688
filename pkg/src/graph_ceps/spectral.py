"""Symmetric eigendecomposition and graph Fourier bases.

The eigensolver is a cyclic Jacobi rotation scheme chosen for determinism:
identical input matrices produce bit-identical bases (fixed sweep order,
fixed sign convention, fixed tie-break for degenerate eigenvalues).  Sizes
here are small (tens of channels), so simplicity wins over asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidMatrixError, InvalidParameterError, NumericalError
from .topology import GraphLaplacian, laplacian, ring_graph

ASCENDING = "ascending"
DESCENDING = "descending"

# Convergence target for the Jacobi sweep loop, relative to the Frobenius
# norm of the input; 100 sweeps is far beyond the quadratic-convergence need.
_JACOBI_OFF_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100

# Eigenvalues closer than this (relative) are treated as one degenerate
# cluster when ordering.
_TIE_REL_TOL = 1e-9


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenvalues and sign-fixed orthonormal eigenvectors of a symmetric matrix.

    Columns of ``eigenvectors`` are the eigenvectors, sorted by eigenvalue in
    the declared ``ordering``.  The entry of largest absolute value in each
    column is positive (first such entry on ties).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    ordering: str

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class DftMatrix:
    """Unitary IDFT matrix with entries zeta**(j*k) / sqrt(N), zeta = e^(i 2 pi / N)."""

    n: int
    entries: np.ndarray


@dataclass(frozen=True)
class RingEquivalenceReport:
    """Result of comparing the ring-graph Fourier basis with the DFT basis."""

    n: int
    max_projector_mismatch: float
    max_column_residual: float
    passed: bool


def _off_norm(a: np.ndarray) -> float:
    # summed directly over off-diagonal entries; a difference of squared
    # norms would cancel catastrophically once the residue is tiny
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _jacobi_sweep(a: np.ndarray, v: np.ndarray) -> None:
    """One cyclic sweep over the strict upper triangle, row-major order."""
    n = a.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = float(a[p, q])
            if apq == 0.0:
                continue
            denom = 2.0 * apq
            diff = float(a[q, q] - a[p, p])
            if denom == 0.0 or abs(diff) > abs(denom) * 1e154:
                t = 0.0  # angle below resolution; the explicit zeroing below acts
            else:
                tau = diff / denom
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c

            col_p = a[:, p].copy()
            col_q = a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p = a[p, :].copy()
            row_q = a[q, :].copy()
            a[p, :] = c * row_p - s * row_q
            a[q, :] = s * row_p + c * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vec_p = v[:, p].copy()
            vec_q = v[:, q].copy()
            v[:, p] = c * vec_p - s * vec_q
            v[:, q] = s * vec_p + c * vec_q


def _jacobi_diagonalize(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization; returns (eigenvalues, eigenvector columns).

    Sweeps until the off-diagonal Frobenius norm drops below 1e-12 times the
    input norm, then runs one polishing sweep: quadratic convergence pushes
    the residue to the machine floor, which keeps eigenvectors of nearly
    degenerate clusters accurate (their error scales as residue / eigengap).
    """
    a = matrix.astype(float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    stop = _JACOBI_OFF_TOL * float(np.linalg.norm(matrix))

    sweeps = 0
    while _off_norm(a) > stop:
        if sweeps >= _JACOBI_MAX_SWEEPS:
            raise NumericalError(
                f"Jacobi eigensolver did not converge in {_JACOBI_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {_off_norm(a):.3e}, target {stop:.3e})"
            )
        _jacobi_sweep(a, v)
        sweeps += 1
    if sweeps < _JACOBI_MAX_SWEEPS:
        _jacobi_sweep(a, v)
    return np.diag(a).copy(), v


def _fix_column_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (first on ties)."""
    fixed = vectors.copy()
    for k in range(fixed.shape[1]):
        lead = int(np.argmax(np.abs(fixed[:, k])))
        if fixed[lead, k] < 0.0:
            fixed[:, k] = -fixed[:, k]
    # normalize -0.0 entries so dumps and byte comparisons are stable
    return fixed + 0.0


def _order_spectrum(
    values: np.ndarray, vectors: np.ndarray, ordering: str
) -> tuple[np.ndarray, np.ndarray]:
    """Sort eigenpairs by eigenvalue with a deterministic degenerate tie-break.

    Eigenvalues within 1e-9 (relative) form a cluster; inside a cluster the
    columns are ordered by descending lexicographic comparison of the
    sign-fixed eigenvectors, which maps the identity matrix to itself.
    """
    idx = list(np.argsort(values, kind="stable"))
    tol = _TIE_REL_TOL * max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)

    clusters: list[list[int]] = [[idx[0]]]
    for i in idx[1:]:
        if values[i] - values[clusters[-1][-1]] <= tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    for cluster in clusters:
        if len(cluster) > 1:
            cluster.sort(key=lambda i: tuple(vectors[:, i]), reverse=True)
    if ordering == DESCENDING:
        clusters.reverse()

    order = [i for cluster in clusters for i in cluster]
    return values[order], vectors[:, order]


def eig_sym(matrix, ordering: str = ASCENDING) -> SpectralBasis:
    """Eigendecomposition of a real symmetric matrix via cyclic Jacobi rotations.

    Args:
        matrix: square symmetric matrix (asymmetry up to 1e-9 relative is
            tolerated and symmetrized away).
        ordering: "ascending" (Laplacian convention) or "descending"
            (covariance/PCA convention).

    Returns:
        A deterministic, sign-fixed :class:`SpectralBasis`.

    Raises:
        InvalidMatrixError: non-square, non-finite, or non-symmetric input.
        InvalidParameterError: unknown ordering.
        NumericalError: sweep cap reached before convergence.
    """
    if ordering not in (ASCENDING, DESCENDING):
        raise InvalidParameterError(f"unknown ordering {ordering!r}")
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidMatrixError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        raise InvalidMatrixError("empty matrix")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrixError("matrix contains non-finite entries")
    norm = float(np.linalg.norm(m))
    asym = float(np.linalg.norm(m - m.T))
    if asym > 1e-9 * max(norm, 1e-300):
        raise InvalidMatrixError(
            f"matrix is not symmetric (relative asymmetry {asym / max(norm, 1e-300):.3e})"
        )
    sym = 0.5 * (m + m.T)

    values, vectors = _jacobi_diagonalize(sym)
    vectors = _fix_column_signs(vectors)
    values, vectors = _order_spectrum(values, vectors, ordering)
    return SpectralBasis(values, vectors, ordering)


def gft_basis(lap: GraphLaplacian) -> SpectralBasis:
    """Graph Fourier basis: ascending-ordered Laplacian eigenvectors.

    For a connected graph the first column is the constant vector 1/sqrt(N)
    with eigenvalue 0.
    """
    return eig_sym(lap.matrix, ASCENDING)


def idft_matrix(n: int) -> DftMatrix:
    """Unitary IDFT matrix of size N; first row and column are all 1/sqrt(N)."""
    if n < 1:
        raise InvalidParameterError(f"IDFT size must be >= 1, got {n}")
    k = np.arange(n)
    phase = np.outer(k, k) % n
    entries = np.exp(2j * np.pi * phase / n) / math.sqrt(n)
    return DftMatrix(n, entries)


def ring_eigenvalues(n: int) -> np.ndarray:
    """Closed-form ring-Laplacian eigenvalues 2 - 2 cos(2 pi k / N), k = 0..N-1."""
    return 2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)


def verify_ring_equivalence(n: int, tol: float = 1e-9) -> RingEquivalenceReport:
    """Check that the ring-graph Fourier basis coincides with the DFT basis.

    Because ring Laplacian eigenvalues are degenerate (lambda_k equals
    lambda_{N-k}), individual eigenvectors are not unique; the comparison is
    made at the level of orthogonal projectors onto each distinct eigenspace.
    Additionally verifies columnwise that L Z = Z Lambda for the analytic
    eigenvalues.  Failure is reported, not raised.
    """
    ring_lap = laplacian(ring_graph(n))
    lap = ring_lap.matrix
    basis = gft_basis(ring_lap)
    z = idft_matrix(n).entries
    analytic = ring_eigenvalues(n)

    residual = lap @ z - z * analytic[np.newaxis, :]
    max_column_residual = float(np.max(np.linalg.norm(residual, axis=0)))

    cluster_tol = 1e-6
    distinct: list[float] = []
    for lam in analytic:
        if not any(abs(lam - d) <= cluster_tol for d in distinct):
            distinct.append(float(lam))

    max_mismatch = 0.0
    for lam in distinct:
        dft_cols = z[:, np.abs(analytic - lam) <= cluster_tol]
        gft_cols = basis.eigenvectors[:, np.abs(basis.eigenvalues - lam) <= cluster_tol]
        if dft_cols.shape[1] != gft_cols.shape[1]:
            max_mismatch = math.inf
            break
        proj_dft = dft_cols @ dft_cols.conj().T
        proj_gft = gft_cols @ gft_cols.T
        max_mismatch = max(max_mismatch, float(np.linalg.norm(proj_gft - proj_dft)))

    passed = max_mismatch <= tol and max_column_residual <= tol
    return RingEquivalenceReport(n, max_mismatch, max_column_residual, passed)
