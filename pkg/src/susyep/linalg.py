"""Dense complex linear algebra for small non-Hermitian matrices.

Everything here targets matrices of dimension <= ~32.  The main
eigendecomposition is backed by LAPACK (balanced Hessenberg QR via
numpy); an independent characteristic-polynomial route
(Faddeev-LeVerrier coefficients + Aberth-Ehrlich simultaneous root
refinement) is provided for cross-validation, and an arbitrary-precision
backend (mpmath) is available for computations near a defective point,
where double precision loses eps^(1/N) digits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

__all__ = [
    "Spectrum",
    "LinAlgError",
    "ConvergenceError",
    "DefectiveMatrixError",
    "eig",
    "charpoly_coefficients",
    "aberth_roots",
    "eig_charpoly",
    "numerical_rank",
    "matrix_power",
    "evolve",
    "eig_mp",
    "sort_eigenvalues",
]


class LinAlgError(ValueError):
    """Invalid input to a linear-algebra operation."""


class ConvergenceError(RuntimeError):
    """An iterative eigenvalue computation failed its residual bound."""


class DefectiveMatrixError(RuntimeError):
    """Matrix is defective and no nilpotent (EPN) structure certifies it."""


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition result.

    eigenvalues are sorted by (real, imag) ascending; eigenvectors[:, k]
    is the unit-norm right eigenvector of eigenvalues[k], gauge-fixed so
    the largest-magnitude component is real and positive (ties broken by
    lowest index).  residuals[k] = ||H v - lambda v||_2.  cluster_labels
    groups eigenvalues lying within the coalescence tolerance.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    cluster_labels: np.ndarray = field(default=None)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def _validate_square(H) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise LinAlgError(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise LinAlgError("matrix contains NaN or Inf entries")
    return H


def sort_eigenvalues(w, vectors=None):
    """Sort eigenvalues by (real, imag) ascending; reorder vectors along."""
    idx = np.lexsort((np.imag(w), np.real(w)))
    if vectors is None:
        return np.asarray(w)[idx]
    return np.asarray(w)[idx], np.asarray(vectors)[:, idx]


def _gauge_fix(V: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-|.| component is real positive.

    np.argmax returns the first index on ties, which implements the
    lowest-index tie-break.
    """
    V = V.copy()
    for k in range(V.shape[1]):
        j = int(np.argmax(np.abs(V[:, k])))
        pivot = V[j, k]
        if pivot != 0:
            V[:, k] *= np.conj(pivot) / abs(pivot)
    return V


def cluster_eigenvalues(w: np.ndarray, tol: float) -> np.ndarray:
    """Single-linkage clustering of eigenvalues within absolute tol."""
    n = len(w)
    labels = -np.ones(n, dtype=int)
    current = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        stack = [i]
        labels[i] = current
        while stack:
            a = stack.pop()
            for b in range(n):
                if labels[b] < 0 and abs(w[a] - w[b]) <= tol:
                    labels[b] = current
                    stack.append(b)
        current += 1
    return labels


def eig(H, rtol: float = 1e-10) -> Spectrum:
    """Full eigendecomposition of a dense complex matrix.

    Right eigenvectors have backward error ||Hv - lambda v|| <= rtol*||H||;
    a ConvergenceError names the offending eigenvalue otherwise.  Near a
    defective point the eigenvector set may be numerically rank-deficient;
    cluster_labels then flags the coalescing eigenvalues.
    """
    if rtol <= 0:
        raise LinAlgError("rtol must be positive")
    H = _validate_square(H)
    n = H.shape[0]
    if n == 1:
        lam = H[0, 0]
        return Spectrum(
            eigenvalues=np.array([lam]),
            eigenvectors=np.array([[1.0 + 0j]]),
            residuals=np.zeros(1),
            cluster_labels=np.zeros(1, dtype=int),
        )
    w, V = np.linalg.eig(H)
    w, V = sort_eigenvalues(w, V)
    V = V / np.linalg.norm(V, axis=0)
    V = _gauge_fix(V)
    norm_H = np.linalg.norm(H, 2)
    residuals = np.linalg.norm(H @ V - V * w, axis=0)
    bad = np.nonzero(residuals > rtol * max(norm_H, 1e-300))[0]
    if bad.size:
        k = int(bad[0])
        raise ConvergenceError(
            f"eigenpair {k} (lambda={w[k]}) exceeds the residual bound: "
            f"{residuals[k]:.3e} > {rtol:.1e} * ||H||"
        )
    ctol = max(1e-8, 10 * rtol) * max(norm_H, 1e-300)
    labels = cluster_eigenvalues(w, ctol)
    return Spectrum(w, V, residuals, labels)


def charpoly_coefficients(H) -> np.ndarray:
    """Characteristic polynomial coefficients by Faddeev-LeVerrier.

    Returns monic coefficients [1, c1, ..., cn] of det(lambda*I - H).
    """
    H = _validate_square(H)
    n = H.shape[0]
    coeffs = np.empty(n + 1, dtype=complex)
    coeffs[0] = 1.0
    M = np.zeros_like(H)
    I = np.eye(n, dtype=complex)
    c = 1.0 + 0j
    for k in range(1, n + 1):
        M = H @ (M + c * I)
        c = -np.trace(M) / k
        coeffs[k] = c
    return coeffs


def aberth_roots(coeffs, tol: float = 1e-14, max_iter: int = 500) -> np.ndarray:
    """All roots of a monic polynomial by Aberth-Ehrlich iteration."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs) - 1
    if n == 0:
        return np.array([], dtype=complex)
    dcoeffs = coeffs[:-1] * np.arange(n, 0, -1)
    radius = 1.0 + np.max(np.abs(coeffs[1:]))
    # slightly irrational angular offset avoids symmetric stagnation
    angles = 2 * np.pi * (np.arange(n) + 0.3728) / n
    z = radius * np.exp(1j * angles)
    scale = max(radius, 1.0)
    for _ in range(max_iter):
        p = np.polyval(coeffs, z)
        dp = np.polyval(dcoeffs, z)
        dp = np.where(dp == 0, 1e-300, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        denom = np.where(denom == 0, 1e-300, denom)
        step = w / denom
        z = z - step
        if np.max(np.abs(step)) < tol * scale:
            break
    return z


def eig_charpoly(H) -> np.ndarray:
    """Eigenvalues via the characteristic-polynomial route (dim <= 12).

    Independent of the QR-based path in eig(); the two cross-validate
    each other in the test suite.
    """
    H = _validate_square(H)
    if H.shape[0] > 12:
        raise LinAlgError("characteristic-polynomial route limited to dim <= 12")
    return sort_eigenvalues(aberth_roots(charpoly_coefficients(H)))


def numerical_rank(M, tol: float = 1e-12) -> int:
    """Number of singular values above tol * (largest singular value)."""
    if tol <= 0:
        raise LinAlgError("tol must be positive")
    M = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise LinAlgError("matrix contains NaN or Inf entries")
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def matrix_power(M, k: int) -> np.ndarray:
    """Repeated matrix product; M^0 is the identity."""
    M = _validate_square(M)
    if k < 0:
        raise LinAlgError("exponent must be non-negative")
    return np.linalg.matrix_power(M, k)


def _nilpotency_residual(A: np.ndarray) -> float:
    """||A^n||/||A||^n in the spectral norm (0 for the zero matrix)."""
    n = A.shape[0]
    norm_A = np.linalg.norm(A, 2)
    if norm_A == 0:
        return 0.0
    return float(np.linalg.norm(matrix_power(A, n), 2) / norm_A**n)


def evolve(H, psi0, t: float, rtol: float = 1e-10) -> np.ndarray:
    """psi(t) = exp(-i H t) psi0.

    Diagonalizable H uses the eigendecomposition.  A defective H is
    accepted only when it carries an N-fold coalescence (all eigenvalues
    in one cluster and H - omega0*I nilpotent); the propagator is then
    the exact finite series exp(-i*omega0*t) * sum_{k<N} (-it)^k A^k / k!
    with A = H - omega0*I.  Any other defective input is refused.
    """
    H = _validate_square(H)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (H.shape[0],):
        raise LinAlgError(
            f"state dimension {psi0.shape} does not match matrix dim {H.shape[0]}"
        )
    spec = eig(H, rtol=rtol)
    V = spec.eigenvectors
    # well-separated eigenvector basis <=> safely diagonalizable
    smin = np.linalg.svd(V, compute_uv=False)[-1]
    if smin > 1e-6:
        c = np.linalg.solve(V, psi0)
        return V @ (np.exp(-1j * spec.eigenvalues * t) * c)
    # defective: accept only the EPN (single Jordan block) structure;
    # the coalescence tolerance must absorb the eps^(1/n) scatter of
    # defective eigenvalues
    n = H.shape[0]
    omega0 = np.mean(spec.eigenvalues)
    norm_H = max(np.linalg.norm(H, 2), 1e-300)
    scatter_tol = 10 * np.finfo(float).eps ** (1.0 / n) * norm_H
    if np.all(np.abs(spec.eigenvalues - omega0) <= scatter_tol):
        A = H - omega0 * np.eye(n)
        if _nilpotency_residual(A) <= 1e-8:
            psi = psi0.astype(complex)
            term = psi0.astype(complex)
            for k in range(1, n):
                term = (-1j * t) / k * (A @ term)
                psi = psi + term
            return np.exp(-1j * omega0 * t) * psi
    raise DefectiveMatrixError(
        "matrix is numerically defective but not certified as an EPN; "
        "refusing to evolve with unknown accuracy"
    )


def eig_mp(A: mp.matrix, dps: int = 40):
    """Arbitrary-precision eigendecomposition (sorted by (Re, Im)).

    Returns (eigenvalues, eigenvector columns) as mpmath objects.  Used
    where double precision cannot resolve near-EP quantities.
    """
    with mp.workdps(dps):
        E, V = mp.eig(A)
        n = len(E)
        order = sorted(range(n), key=lambda i: (mp.re(E[i]), mp.im(E[i])))
        w = [E[i] for i in order]
        cols = []
        for i in order:
            v = [V[r, i] for r in range(n)]
            nrm = mp.sqrt(mp.fsum(abs(x) ** 2 for x in v))
            cols.append([x / nrm for x in v])
        return w, cols


def eigvals_mp(A: mp.matrix, dps: int = 40):
    """Arbitrary-precision eigenvalues only (unsorted)."""
    with mp.workdps(dps):
        return mp.eig(A, left=False, right=False)
