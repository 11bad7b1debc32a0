"""Small dense linear algebra: cyclic Jacobi for Hermitian matrices, expm."""
from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, NotHermitianError

HERMITIAN_TOL = 1e-12


def as_square(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    return A


def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"n": int(M.shape[0]), "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(data) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; a plain nested list of reals is also accepted."""
    if isinstance(data, list):
        data = {"re": data}
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    M = re + 1j * im
    n = int(data.get("n", M.shape[0]))
    if M.shape != (n, n):
        raise DimensionError(f"matrix declared n={n} but has shape {M.shape}")
    return M


def check_hermitian(A: np.ndarray, name: str = "matrix", tol: float = HERMITIAN_TOL) -> None:
    dev = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    if dev > tol:
        raise NotHermitianError(f"{name} is not Hermitian (max |A - A^H| = {dev:.3g})")


def jacobi_eigh(M, tol: float = 1e-15, max_sweeps: int = 60):
    """Eigen-decomposition of a complex Hermitian matrix by cyclic Jacobi.

    Each (p, q) rotation first removes the phase of ``A[p, q]`` with a
    diagonal unitary, then applies the real symmetric Jacobi rotation.
    Returns ascending eigenvalues and the unitary whose columns are the
    eigenvectors.
    """
    A = as_square(M).copy()
    check_hermitian(A)
    n = A.shape[0]
    U = np.eye(n, dtype=complex)
    if n <= 1:
        return np.real(np.diag(A)).copy(), U
    A = (A + A.conj().T) / 2
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), U
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                beta = abs(apq)
                if beta <= 1e-300:
                    continue
                phase = apq / beta
                a = A[p, p].real
                d = A[q, q].real
                theta = 0.5 * math.atan2(2 * beta, a - d)
                c, s = math.cos(theta), math.sin(theta)
                # columns p, q of the unitary D R with D = diag(1, conj(phase))
                G = np.array([[c, -s], [s * phase.conjugate(), c * phase.conjugate()]])
                cols = A[:, [p, q]] @ G
                A[:, [p, q]] = cols
                A[[p, q], :] = G.conj().T @ A[[p, q], :]
                A[q, p] = 0.0
                A[p, q] = 0.0
                U[:, [p, q]] = U[:, [p, q]] @ G
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], U[:, order]


def eigvalsh(M) -> np.ndarray:
    return jacobi_eigh(M)[0]


def expm(M, order: int = 18, theta: float = 0.5) -> np.ndarray:
    """Matrix exponential: scale until ||M||_1 < ``theta``, Taylor, square back."""
    A = as_square(M)
    norm = np.max(np.sum(np.abs(A), axis=0)) if A.size else 0.0
    k = 0
    if norm >= theta:
        k = int(math.ceil(math.log2(norm / theta))) + 1
    B = A / 2 ** k
    n = A.shape[0]
    term = np.eye(n, dtype=complex)
    out = np.eye(n, dtype=complex)
    for j in range(1, order + 1):
        term = term @ B / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out
