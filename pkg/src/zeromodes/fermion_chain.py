"""Staggered free fermions on a ring: correlation matrices and entanglement.

The chain has ``2N`` sites grouped into ``N`` cells ``(b(n), d(n))``.  The
single-particle Hamiltonian hops with amplitude ``i/(2a)`` between
neighbouring sites and carries a staggered mass ``+m`` on ``b`` and ``-m``
on ``d``.  The ring is antiperiodic, so the cell momenta are

    k_n = pi (n + 1/2) / (N a),   n = -N/2 .. N/2 - 1,

and in each momentum sector the Bloch matrix is

    [[m, h], [h*, -m]],   h = (i / 2a) (1 - exp(-2 i k a)),

with energies ``+-omega``, ``omega^2 = m^2 + sin^2(ka)/a^2``.  The ground
state fills the lower band.  Correlations are ``C_ij = <c_i^dag c_j>`` with
sites ordered ``b(0), d(0), b(1), d(1), ...``; block ``(i, j)`` of a
subsystem of ``L`` cells is ``A(i - j)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from . import matfun
from .errors import ConsistencyError, DegenerateMode, DomainError

__all__ = [
    "FermionSpec",
    "BlochMode",
    "FermionCorrelation",
    "AsymptoticEstimate",
    "SingleSiteAnalytics",
    "RescaledCheck",
    "THERMO_CELLS",
    "momentum_grid",
    "dispersion",
    "bloch_matrix",
    "bloch_diagonalize",
    "bloch_modes",
    "correlation_block",
    "correlation_blocks",
    "assemble_correlation",
    "correlation_eigenvalues",
    "fermion_entropy",
    "entropy",
    "entropy_curve",
    "convergence_gap",
    "single_site_analytics",
    "asymptotic_entropy",
    "real_space_hamiltonian",
    "ground_state_correlation",
    "rescaled_bdg",
    "bdg_subsystem_entropy",
    "rescaled_hamiltonian_check",
    "continuum_dispersion_error",
    "count_near_half",
]

THERMO_CELLS = 4096
EIG_TOL = 1e-9
CLAMP_LIMIT = 1e-6


@dataclass(frozen=True)
class FermionSpec:
    """``n_cells`` unit cells (``2 n_cells`` sites), mass ``m`` and spacing ``a``."""

    n_cells: int
    mass: float = 0.0
    lattice_a: float = 1.0

    def __post_init__(self):
        n = self.n_cells
        if int(n) != n or n < 2 or int(n) % 2:
            raise ValueError(f"n_cells must be a positive even integer, got {n}")
        object.__setattr__(self, "n_cells", int(n))
        if not self.mass >= 0.0 or not math.isfinite(self.mass):
            raise ValueError(f"mass must be finite and >= 0, got {self.mass}")
        if not self.lattice_a > 0.0 or not math.isfinite(self.lattice_a):
            raise ValueError(f"lattice_a must be finite and > 0, got {self.lattice_a}")

    @property
    def K(self):
        return self.mass * self.lattice_a

    @classmethod
    def from_K(cls, K, n_cells=THERMO_CELLS, lattice_a=1.0):
        return cls(n_cells, K / lattice_a, lattice_a)

    @classmethod
    def thermodynamic(cls, K, L=1, lattice_a=1.0):
        """Proxy for the infinite chain: ``N = max(4 L, 4096)`` cells."""
        return cls.from_K(K, max(4 * int(L), THERMO_CELLS), lattice_a)


@dataclass(frozen=True)
class BlochMode:
    """Upper-band eigenvector ``(alpha, beta)`` of the Bloch matrix at momentum ``k``."""

    k: float
    omega: float
    alpha: complex
    beta: complex


@dataclass(frozen=True)
class FermionCorrelation:
    """Subsystem correlation matrix of ``L`` cells.

    ``blocks[d + L - 1]`` is ``A(d)`` for ``d = -(L-1) .. L-1``.
    """

    L: int
    blocks: np.ndarray
    matrix: np.ndarray
    eigenvalues: np.ndarray

    def block(self, d):
        if abs(d) >= self.L:
            raise IndexError(f"offset {d} outside +-{self.L - 1}")
        return self.blocks[d + self.L - 1]


@dataclass(frozen=True)
class AsymptoticEstimate:
    K: float
    roots: tuple
    inside: tuple
    S_estimate: float
    small_K_law: float


@dataclass(frozen=True)
class SingleSiteAnalytics:
    """One-cell spectrum, numeric and from the elliptic-integral expression.

    ``ratio = (lambda_plus - 1/2) / delta``; ``lambda_printed`` uses the
    prefactor ``pi`` in front of ``delta`` and is reported for comparison
    only.  At ``K = 0`` the elliptic quantities are NaN.
    """

    K: float
    delta: float
    lambda_numeric: tuple
    lambda_printed: tuple
    ratio: float
    entropy: float


@dataclass(frozen=True)
class RescaledCheck:
    passed: bool
    entropy_dirac: float
    entropy_rescaled: float
    eigenvalues_dirac: np.ndarray
    eigenvalues_rescaled: np.ndarray


def momentum_grid(n_cells, lattice_a=1.0):
    """Antiperiodic cell momenta ``pi (n + 1/2) / (N a)``, ascending."""
    if int(n_cells) != n_cells or n_cells < 2 or int(n_cells) % 2:
        raise ValueError(f"n_cells must be a positive even integer, got {n_cells}")
    n = np.arange(-(int(n_cells) // 2), int(n_cells) // 2)
    return math.pi * (n + 0.5) / (n_cells * lattice_a)


def dispersion(k, m, a=1.0):
    """Upper-band energy ``sqrt(m^2 + sin^2(k a) / a^2)``."""
    return np.hypot(m, np.sin(np.asarray(k) * a) / a)


def _hopping(k, a):
    # i/(2a) (1 - e^{-2ika}) = -e^{-ika} sin(ka) / a, written without cancellation
    k = np.asarray(k, dtype=float)
    return -np.exp(-1j * k * a) * np.sin(k * a) / a


def bloch_matrix(k, m, a=1.0):
    h = complex(_hopping(k, a))
    return np.array([[m, h], [h.conjugate(), -m]], dtype=complex)


def _upper_band(k, m, a):
    k = np.asarray(k, dtype=float)
    h = _hopping(k, a)
    omega = np.hypot(m, np.abs(h))
    if np.any(omega <= 0.0):
        raise DegenerateMode("Bloch matrix has a zero eigenvalue (m = 0 and sin(ka) = 0)")
    with np.errstate(divide="ignore", invalid="ignore"):
        if m >= 0.0:
            # eigenvector (omega + m, h*) / sqrt(2 omega (omega + m)); alpha already real
            alpha = np.sqrt((omega + m) / (2.0 * omega))
            beta = np.conj(h) / np.sqrt(2.0 * omega * (omega + m))
        else:
            # (h, omega - m) / norm, rotated so that the first component is real
            habs = np.abs(h)
            norm = np.sqrt(2.0 * omega * (omega - m))
            alpha = habs / norm
            phase = np.where(habs > 0, np.conj(h) / np.where(habs > 0, habs, 1.0), 1.0)
            beta = (omega - m) * phase / norm
    return omega, alpha.astype(complex), np.asarray(beta, dtype=complex)


def bloch_diagonalize(k, m, a=1.0):
    """Upper-band eigenvector of the Bloch matrix, ``alpha`` real and non-negative.

    Raises
    ------
    DegenerateMode
        If ``m = 0`` and ``sin(k a) = 0``, where both bands touch.
    """
    omega, alpha, beta = _upper_band(float(k), float(m), float(a))
    return BlochMode(float(k), float(omega), complex(alpha), complex(beta))


def bloch_modes(spec):
    """``(k, omega, alpha, beta)`` arrays over the full momentum grid."""
    k = momentum_grid(spec.n_cells, spec.lattice_a)
    omega, alpha, beta = _upper_band(k, spec.mass, spec.lattice_a)
    return k, omega, alpha, beta


def _kernel(spec):
    # G(k)_ij = <c_i^dag c_j> for the filled lower band, whose eigenvector is
    # (-beta*, alpha*): [[|beta|^2, -alpha* beta], [-alpha beta*, |alpha|^2]]
    k, _, alpha, beta = bloch_modes(spec)
    G = np.empty((k.size, 2, 2), dtype=complex)
    G[:, 0, 0] = np.abs(beta) ** 2
    G[:, 1, 1] = np.abs(alpha) ** 2
    G[:, 0, 1] = -np.conj(alpha) * beta
    G[:, 1, 0] = -alpha * np.conj(beta)
    return k, G


def correlation_block(d, spec):
    """``A(d) = (1/N) sum_k G(k) exp(-2 i k a d)`` by direct summation."""
    d = int(d)
    if abs(d) >= spec.n_cells:
        raise ValueError(f"|d| must be < N = {spec.n_cells}, got {d}")
    k, G = _kernel(spec)
    phase = np.exp(-2j * k * spec.lattice_a * d)
    return np.einsum("k,kij->ij", phase, G) / spec.n_cells


def correlation_blocks(L, spec):
    """All blocks ``A(d)``, ``|d| < L``, from one FFT over the momentum grid.

    With ``k a = pi (n' - N/2 + 1/2) / N`` and ``n' = 0 .. N-1`` the phase
    factorises as ``exp(-2 pi i n' d / N) * exp(i pi d (1 - 1/N))``.
    """
    N = spec.n_cells
    if not 1 <= L <= N:
        raise ValueError(f"need 1 <= L <= N = {N}, got L={L}")
    _, G = _kernel(spec)
    F = np.fft.fft(G, axis=0)
    d = np.arange(-(L - 1), L)
    twist = np.exp(1j * math.pi * d * (1.0 - 1.0 / N))
    return twist[:, None, None] * F[d % N] / N


def _toeplitz(blocks, L):
    i = np.arange(L)
    D = i[:, None] - i[None, :] + (L - 1)
    C = blocks[D]  # (L, L, 2, 2)
    return C.transpose(0, 2, 1, 3).reshape(2 * L, 2 * L)


def correlation_eigenvalues(C):
    """Ascending eigenvalues of a correlation matrix (Hermitian part)."""
    return np.linalg.eigvalsh(matfun.as_hermitian(C))


def assemble_correlation(L, spec, blocks=None):
    """Block-Toeplitz correlation matrix of the first ``L`` cells.

    ``blocks`` may carry precomputed ``A(d)`` for offsets up to at least
    ``L - 1`` (as returned by :func:`correlation_blocks` for a larger ``L``).

    Raises
    ------
    ConsistencyError
        If an eigenvalue leaves ``[-1e-9, 1 + 1e-9]``.
    """
    L = int(L)
    if blocks is None:
        blocks = correlation_blocks(L, spec)
    else:
        Lb = (blocks.shape[0] + 1) // 2
        if Lb < L:
            raise ValueError(f"blocks cover offsets up to {Lb - 1}, need {L - 1}")
        blocks = blocks[Lb - L : Lb + L - 1]
    C = matfun.as_hermitian(_toeplitz(blocks, L))
    lam = np.linalg.eigvalsh(C)
    if lam[0] < -EIG_TOL or lam[-1] > 1.0 + EIG_TOL:
        raise ConsistencyError(f"correlation eigenvalues span [{lam[0]:.3e}, {lam[-1]:.12f}]")
    return FermionCorrelation(L, blocks, C, lam)


def fermion_entropy(corr):
    """``-sum [lam ln lam + (1 - lam) ln(1 - lam)]`` over the correlation spectrum.

    Accepts a :class:`FermionCorrelation` or an array of eigenvalues.
    Eigenvalues are clipped into ``[0, 1]``; anything further than 1e-6
    outside raises :class:`ConsistencyError`.
    """
    lam = corr.eigenvalues if isinstance(corr, FermionCorrelation) else np.asarray(corr, dtype=float)
    if lam.size and (lam.min() < -CLAMP_LIMIT or lam.max() > 1.0 + CLAMP_LIMIT):
        raise ConsistencyError(f"eigenvalue outside [0, 1]: [{lam.min():.3e}, {lam.max():.6f}]")
    lam = np.clip(lam, 0.0, 1.0)
    return float(-np.sum(xlogy(lam, lam) + xlogy(1.0 - lam, 1.0 - lam)))


def entropy(K, L, n_cells=None):
    """Entropy of ``L`` cells at ``K``; ``n_cells`` defaults to the thermodynamic proxy."""
    spec = FermionSpec.thermodynamic(K, L) if n_cells is None else FermionSpec.from_K(K, n_cells)
    return fermion_entropy(assemble_correlation(L, spec))


def entropy_curve(K, L_values, n_cells=None):
    """Entropies for several ``L`` at one ``K``, sharing one FFT."""
    L_values = [int(L) for L in L_values]
    Lmax = max(L_values)
    spec = FermionSpec.thermodynamic(K, Lmax) if n_cells is None else FermionSpec.from_K(K, n_cells)
    blocks = correlation_blocks(Lmax, spec)
    return np.array([fermion_entropy(assemble_correlation(L, spec, blocks)) for L in L_values])


def convergence_gap(K, L, n_cells=THERMO_CELLS):
    """``|S(N) - S(2N)|``; the size of the finite-ring error at ``N`` cells."""
    return abs(entropy(K, L, n_cells) - entropy(K, L, 2 * n_cells))


def single_site_analytics(K, n_cells=THERMO_CELLS):
    """Numeric one-cell spectrum next to ``Delta = sqrt(K^2 (F - E)^2 + F^2)``.

    ``F`` and ``E`` are complete elliptic integrals at parameter ``-1/K^2``.
    """
    K = float(K)
    if not K >= 0.0:
        raise DomainError(f"K must be >= 0, got {K}")
    corr = assemble_correlation(1, FermionSpec.from_K(K, n_cells))
    lo, hi = (float(x) for x in corr.eigenvalues)
    S = fermion_entropy(corr)
    if K == 0.0:
        nan = float("nan")
        return SingleSiteAnalytics(K, nan, (lo, hi), (nan, nan), nan, S)
    F, E = matfun.elliptic_fe(-1.0 / K**2)
    delta = math.hypot(K * (F - E), F)
    printed = (0.5 - math.pi * delta, 0.5 + math.pi * delta)
    return SingleSiteAnalytics(K, delta, (lo, hi), printed, (hi - 0.5) / delta, S)


def asymptotic_entropy(K):
    """Root-geometry estimate of the entropy for ``p(z) = -z^2/K - z + 1/K``.

    The roots are ``zeta_+- = (-K +- sqrt(K^2 + 4)) / 2``.  The roots of
    ``z^N p(z) p(1/z)`` inside the unit disc are ``zeta_+`` and
    ``1/zeta_-``, and the estimate is ``-(1/6) sum ln|z - 1/conj(z)|`` over them.
    """
    K = float(K)
    if not K > 0.0 or not math.isfinite(K):
        raise DomainError(f"K must be finite and > 0, got {K}")
    r = math.sqrt(K * K + 4.0)
    zp = 2.0 / (K + r)  # = (-K + r)/2 without cancellation
    zm = -(K + r) / 2.0
    inside = tuple(z for z in (zp, zm, 1.0 / zp, 1.0 / zm) if abs(z) < 1.0)
    S = 0.0 - sum(math.log(abs(z - 1.0 / np.conj(z))) for z in inside) / 6.0
    return AsymptoticEstimate(K, (zp, zm), inside, float(S) + 0.0, 0.0 - math.log(K) / 3.0)


def real_space_hamiltonian(spec, scale=1.0):
    """``2N x 2N`` single-particle Hamiltonian on the antiperiodic ring."""
    n = 2 * spec.n_cells
    a = spec.lattice_a
    H = np.zeros((n, n), dtype=complex)
    H[np.diag_indices(n)] = spec.mass * (1.0 - 2.0 * (np.arange(n) % 2))
    for j in range(n):
        t = 0.5j / a if j < n - 1 else -0.5j / a
        H[j, (j + 1) % n] += t
        H[(j + 1) % n, j] += np.conj(t)
    return scale * H


def ground_state_correlation(H):
    """``<c_i^dag c_j>`` with every negative-energy level filled.

    Raises
    ------
    DegenerateMode
        If a level sits at zero energy, so the ground state is not unique.
    """
    w, V = np.linalg.eigh(matfun.as_hermitian(H))
    if np.min(np.abs(w)) <= 1e-12 * max(np.abs(w).max(), 1.0):
        raise DegenerateMode("zero-energy level: ground state is degenerate")
    occ = V[:, w < 0]
    return np.conj(occ) @ occ.T


def rescaled_bdg(spec, scale=1.0):
    """Bogoliubov-de Gennes matrix of the mass-rescaled pairing Hamiltonian.

    After ``b -> b^dag`` on even sites, ``b -> i b`` and a rescaling by
    ``2/m`` the Hamiltonian reads

        sum_j (1/K) (phi_j^dag phi_{j+1}^dag - phi_j phi_{j+1}) - 2 phi_j^dag phi_j,

    with the wrap-around bond sign flipped on the antiperiodic ring.  Returned
    as ``[[A, B], [-B*, -A*]]`` in the Nambu basis ``(phi, phi^dag)``.
    """
    if not spec.mass > 0.0:
        raise DomainError("the rescaled Hamiltonian needs m > 0")
    n = 2 * spec.n_cells
    A = -2.0 * np.eye(n)
    B = np.zeros((n, n))
    for j in range(n):
        t = 1.0 / spec.K if j < n - 1 else -1.0 / spec.K
        B[j, (j + 1) % n] += t
        B[(j + 1) % n, j] -= t
    return scale * np.block([[A, B], [-B, -A]]).astype(complex)


def bdg_subsystem_entropy(H_bdg, sites):
    """Entropy of ``sites`` in the ground state of a BdG Hamiltonian.

    The generalised correlation matrix is the projector onto positive-energy
    quasiparticles; each subsystem mode contributes twice to its spectrum,
    hence the factor 1/2.
    """
    w, V = np.linalg.eigh(matfun.as_hermitian(H_bdg))
    if np.min(np.abs(w)) <= 1e-12 * max(np.abs(w).max(), 1.0):
        raise DegenerateMode("zero-energy quasiparticle: ground state is degenerate")
    pos = V[:, w > 0]
    G = pos @ pos.conj().T
    n = H_bdg.shape[0] // 2
    idx = np.concatenate([np.asarray(sites), np.asarray(sites) + n])
    g = np.linalg.eigvalsh(matfun.as_hermitian(G[np.ix_(idx, idx)]))
    return 0.5 * fermion_entropy(g), g


def rescaled_hamiltonian_check(spec, L=4, tol=1e-9, scale=1.0):
    """Compare subsystem entropies of the Dirac and rescaled pairing forms.

    ``scale`` multiplies both Hamiltonians; the ground state, and so the
    entropy, must not depend on it.
    """
    if not 1 <= L <= spec.n_cells:
        raise ValueError(f"need 1 <= L <= N = {spec.n_cells}, got L={L}")
    sites = np.arange(2 * L)
    C = ground_state_correlation(real_space_hamiltonian(spec, scale))
    lam = correlation_eigenvalues(C[np.ix_(sites, sites)])
    S_dirac = fermion_entropy(lam)
    S_bdg, g = bdg_subsystem_entropy(rescaled_bdg(spec, scale), sites)
    return RescaledCheck(abs(S_dirac - S_bdg) <= tol, S_dirac, S_bdg, lam, g)


def continuum_dispersion_error(K, ka_max=0.1, samples=201):
    """Largest relative gap between ``a omega_k`` and ``sqrt(K^2 + (ka)^2)`` for ``0 < ka <= ka_max``."""
    ka = np.linspace(ka_max / samples, ka_max, samples)
    lattice = np.hypot(K, np.sin(ka))
    continuum = np.hypot(K, ka)
    return float(np.max(np.abs(lattice - continuum) / continuum))


def count_near_half(eigenvalues, delta=0.05):
    return int(np.sum(np.abs(np.asarray(eigenvalues) - 0.5) < delta))
