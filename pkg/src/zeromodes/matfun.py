"""Dense kernels for real-symmetric and complex-Hermitian matrices.

Two eigensolvers live here.  ``method="lapack"`` (default) goes through
:func:`numpy.linalg.eigh`; ``method="jacobi"`` is a cyclic Jacobi sweep
written out in full, used as an independent route in the test-suite and
for small problems where bit-level reproducibility across BLAS builds
matters more than speed.  Both return eigenvalues ascending and
eigenvectors with the first non-negligible component made positive.

Complete elliptic integrals are computed with the arithmetic-geometric
mean, in the parameter convention ``F(m) = int_0^{pi/2} (1 - m sin^2)^{-1/2}``.
"""

import math

import numpy as np

from .errors import ConvergenceError, DomainError, NotPositiveDefinite

__all__ = [
    "as_symmetric",
    "as_hermitian",
    "pd_floor",
    "sym_eigen",
    "jacobi_eigen",
    "herm_eigenvalues",
    "real_embedding",
    "sym_sqrt",
    "sym_inv_sqrt",
    "sym_sqrt_pair",
    "elliptic_fe",
]

JACOBI_MAX_SWEEPS = 100
PD_FLOOR_REL = 1e-12
_SYM_TOL = 1e-12


def as_symmetric(M):
    """Return ``M`` as a float array that is exactly symmetric.

    Raises ``ValueError`` if ``M`` is not square or is asymmetric beyond
    round-off (1e-12 relative to its largest entry).
    """
    A = np.array(M, dtype=float, copy=True)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    scale = max(np.abs(A).max(), 1.0)
    if np.abs(A - A.T).max() > _SYM_TOL * scale:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def as_hermitian(M):
    """Return ``M`` as a complex array, Hermitian with a real diagonal."""
    A = np.array(M, dtype=complex, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    scale = max(np.abs(A).max(), 1.0)
    if np.abs(A - A.conj().T).max() > _SYM_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    A = 0.5 * (A + A.conj().T)
    A[np.diag_indices_from(A)] = A.diagonal().real
    return A


def pd_floor(M):
    """Positive-definiteness floor: 1e-12 times the largest diagonal entry."""
    return PD_FLOOR_REL * float(np.max(np.abs(np.diagonal(M))))


def _fix_signs(V):
    # first component above 1e-12 of the column max is made positive
    V = np.array(V, copy=True)
    for j in range(V.shape[1]):
        col = V[:, j]
        big = np.abs(col) > 1e-12 * np.abs(col).max()
        first = col[np.argmax(big)]
        if first.real < 0:
            V[:, j] = -col
    return V


def _check_residual(A, w, V, rtol):
    scale = max(np.abs(A).max(), np.finfo(float).tiny)
    resid = np.abs(A @ V - V * w).max()
    if resid > rtol * scale:
        raise ConvergenceError("eigendecomposition residual above contract", resid / scale)


def _off_norm(A):
    # summed directly: ||A||^2 - ||diag||^2 cancels below ~1e-8 ||A||
    return math.sqrt(2.0) * float(np.linalg.norm(np.triu(A, 1)))


def jacobi_eigen(M, max_sweeps=JACOBI_MAX_SWEEPS, tol=1e-14):
    """Cyclic Jacobi eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    M : array_like
        Symmetric matrix.
    max_sweeps : int
        Cap on full sweeps over the strict upper triangle.
    tol : float
        Stop once the off-diagonal Frobenius norm is below ``tol * ||M||_F``.

    Returns
    -------
    w : ndarray
        Eigenvalues, ascending.
    V : ndarray
        Orthonormal eigenvectors as columns.

    Raises
    ------
    ConvergenceError
        If the off-diagonal norm has not dropped below tolerance after
        ``max_sweeps`` sweeps.
    """
    A = as_symmetric(M)
    n = A.shape[0]
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if norm == 0.0:
        return np.zeros(n), V
    for _ in range(max_sweeps):
        off = _off_norm(A)
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        off = _off_norm(A)
        if off > tol * norm:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", off / norm)
    w = np.diagonal(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], _fix_signs(V[:, order])


def sym_eigen(M, method="lapack"):
    """Eigendecomposition ``M = V diag(w) V^T`` of a real symmetric matrix.

    Eigenvalues are ascending; each eigenvector has its first non-negligible
    component positive so repeated calls give identical output.
    """
    A = as_symmetric(M)
    if method == "jacobi":
        w, V = jacobi_eigen(A)
    elif method == "lapack":
        w, V = np.linalg.eigh(A)
        V = _fix_signs(V)
    else:
        raise ValueError(f"unknown method {method!r}")
    _check_residual(A, w, V, 1e-10)
    return w, V


def real_embedding(M):
    """The 2n x 2n real symmetric matrix ``[[Re, -Im], [Im, Re]]`` of a Hermitian ``M``."""
    H = as_hermitian(M)
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def herm_eigenvalues(M, method="lapack"):
    """Ascending real eigenvalues of a Hermitian matrix.

    With ``method="jacobi"`` the real embedding is diagonalised and every
    eigenvalue, which appears there twice, is taken once.
    """
    H = as_hermitian(M)
    if method == "lapack":
        return np.linalg.eigvalsh(H)
    if method == "jacobi":
        w, _ = jacobi_eigen(real_embedding(H))
        return w[::2].copy()
    raise ValueError(f"unknown method {method!r}")


def sym_sqrt_pair(M, method="lapack"):
    """Return ``(sqrt(M), inv(sqrt(M)))`` from one eigendecomposition.

    Raises
    ------
    NotPositiveDefinite
        If the smallest eigenvalue is at or below :func:`pd_floor`.  For a
        coupling matrix this is how a zero mode shows up.
    """
    A = as_symmetric(M)
    w, V = sym_eigen(A, method=method)
    floor = pd_floor(A)
    if w[0] <= floor:
        raise NotPositiveDefinite(float(w[0]), floor)
    r = np.sqrt(w)
    S = (V * r) @ V.T
    Si = (V / r) @ V.T
    return 0.5 * (S + S.T), 0.5 * (Si + Si.T)


def sym_sqrt(M, method="lapack"):
    """Principal square root of a symmetric positive-definite matrix."""
    return sym_sqrt_pair(M, method)[0]


def sym_inv_sqrt(M, method="lapack"):
    """Inverse principal square root of a symmetric positive-definite matrix."""
    return sym_sqrt_pair(M, method)[1]


def _agm_fe(mc):
    """F and E at parameter ``1 - mc`` for ``0 < mc <= 1`` (complementary parameter)."""
    a, b = 1.0, math.sqrt(mc)
    acc = 0.5 * (1.0 - mc)  # 2^{-1} c_0^2
    weight = 1.0
    for _ in range(64):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        acc += weight * c * c
        weight *= 2.0
        if abs(c) <= 1e-17 * a:
            break
    F = math.pi / (2.0 * a)
    return F, F * (1.0 - acc)


def elliptic_fe(m_param):
    """Complete elliptic integrals of the first and second kind.

    Parameters
    ----------
    m_param : float
        Parameter ``m < 1`` in ``F(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta)``.

    Returns
    -------
    (F, E) : tuple of float

    Notes
    -----
    Negative parameters are mapped into ``(0, 1)`` with the imaginary-modulus
    transformation ``F(m) = F(m/(m-1)) / sqrt(1-m)``,
    ``E(m) = sqrt(1-m) E(m/(m-1))``; the complementary parameter ``1/(1-m)``
    is passed to the AGM directly so nothing cancels for large ``|m|``.
    """
    m = float(m_param)
    if not m < 1.0 or math.isnan(m):
        raise DomainError(f"elliptic parameter must be < 1, got {m_param}")
    if m >= 0.0:
        return _agm_fe(1.0 - m)
    mc = 1.0 / (1.0 - m)
    F, E = _agm_fe(mc)
    root = math.sqrt(mc)
    return F * root, E / root
