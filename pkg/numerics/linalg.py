"""
Dense complex linear algebra for the optimizer.

  - as_hermitian : validate + symmetrize a matrix (HermMatrix invariants)
  - herm_eig     : cyclic Jacobi eigensolver for Hermitian matrices
  - cholesky_psd : Cholesky factor of a PSD matrix plus a diagonal shift
  - is_psd       : eigenvalue-based PSD test with a relative tolerance
"""

import logging
import math

import numpy as np

from errors import NoConvergenceError, NonHermitianError, NotPSDError, TooLargeError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
PSD_REL_TOL = 1e-9
PIVOT_TOL = 1e-9
MAX_EIG_ORDER = 4096
JACOBI_MAX_SWEEPS = 60
JACOBI_OFF_TOL = 1e-13     # relative to the Frobenius norm


def check_finite(x, name: str) -> np.ndarray:
    """Return `x` as a complex array, rejecting NaN/Inf entries."""
    arr = np.asarray(x, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


# ---------------------------------------------------------------------------
# Hermitian matrices
# ---------------------------------------------------------------------------

def as_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """
    Copy `h` into a Hermitian complex array.

    The symmetry check is elementwise with tolerance tol·max(1, max|h_ij|).
    The result is exactly Hermitian and has a real diagonal.
    """
    a = check_finite(h, "matrix").copy()
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NonHermitianError(f"expected a non-empty square matrix, got shape {a.shape}")

    scale = max(1.0, float(np.max(np.abs(a))))
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > tol * scale:
        raise NonHermitianError(f"matrix is not Hermitian (max |a - a^H| = {asym:.3e})")

    a = 0.5 * (a + a.conj().T)
    np.fill_diagonal(a, a.diagonal().real)
    return a


def herm_eig(h, max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each (p, q) rotation first removes the phase of a_pq with a diagonal
    unitary, then applies the classic real Jacobi rotation.

    Returns:
        (eigenvalues ascending, unitary matrix whose columns are eigenvectors)
    """
    a = as_hermitian(h)
    n = a.shape[0]
    if n > MAX_EIG_ORDER:
        raise TooLargeError(f"herm_eig supports order <= {MAX_EIG_ORDER}, got {n}")

    v = np.eye(n, dtype=np.complex128)
    scale = float(np.linalg.norm(a))
    if scale == 0.0 or n == 1:
        return a.diagonal().real.copy(), v

    skip = 1e-18 * scale
    for sweep in range(max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(a.diagonal())))
        if off <= JACOBI_OFF_TOL * scale:
            break
        if sweep == max_sweeps:
            raise NoConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})"
            )

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = np.conj(apq / mag)
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s * phase, c * phase]], dtype=np.complex128)

                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g

    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def is_psd(eigenvalues: np.ndarray, rel_tol: float = PSD_REL_TOL) -> bool:
    """Eigenvalue >= -rel_tol·max|λ| counts as non-negative."""
    w = np.asarray(eigenvalues, dtype=float)
    if w.size == 0:
        return True
    bound = rel_tol * float(np.max(np.abs(w)))
    return bool(np.min(w) >= -bound)


# ---------------------------------------------------------------------------
# Cholesky
# ---------------------------------------------------------------------------

def cholesky_psd(h, shift: float = 0.0) -> np.ndarray:
    """
    Lower-triangular L with L L^H = h + shift·I.

    Zero pivots (rank-deficient PSD input) produce a zero column. A pivot
    below -PIVOT_TOL·max(1, max diag) means the input is not PSD.
    """
    if shift < 0:
        raise ValueError(f"shift must be >= 0, got {shift}")

    a = as_hermitian(h)
    n = a.shape[0]
    a = a + shift * np.eye(n)
    tol = PIVOT_TOL * max(1.0, float(np.max(np.abs(a.diagonal()))))

    L = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j].real - float(np.sum(np.abs(row) ** 2))
        if pivot < -tol:
            raise NotPSDError(f"matrix is not PSD: pivot {j} = {pivot:.3e}")
        if pivot <= 0.0:
            continue
        ljj = math.sqrt(pivot)
        L[j, j] = ljj
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row.conj()) / ljj
    return L
