"""Harmonic chains: ground-state covariance, subsystem symplectic spectra, zero modes.

For ``H = p^T P p / 2 + x^T X x / 2`` the ground state is Gaussian with
covariance blocks

    gamma_p = <p p^T> = (1/2) X^{1/2} (X^{1/2} P X^{1/2})^{-1/2} X^{1/2},
    gamma_x = <x x^T> = (1/4) gamma_p^{-1}.

Restricting both blocks to a set of sites gives the reduced state; its
symplectic eigenvalues ``nu_a >= 1/2`` fix the entropy and the mode
frequencies ``mu*_a = 2 arccoth(2 nu_a)`` of the entanglement Hamiltonian.
Sites are 0-based.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import matfun
from .boson_pair import entropy_from_alpha
from .errors import ConsistencyError, NotPositiveDefinite, ZeroModePresent

__all__ = [
    "Boundary",
    "ChainSpec",
    "GroundCovariance",
    "EntanglementSpectrum",
    "EntropyReport",
    "ZeroModeReport",
    "EPS_ZERO",
    "build_couplings",
    "ground_covariance",
    "reduce",
    "symplectic_spectrum",
    "symplectic_routes",
    "entanglement_frequencies",
    "spectrum_entropy",
    "chain_min_frequency",
    "chain_entropy",
    "zero_mode_report",
]

EPS_ZERO = 1e-3
ROUTE_TOL = 1e-6
_NU_SLACK = 1e-9


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class ChainSpec:
    """Discretised massive scalar field on ``n_sites`` sites, spacing ``lattice_a``."""

    n_sites: int
    mass: float
    lattice_a: float = 1.0
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ValueError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        if not self.mass >= 0.0:
            raise ValueError(f"mass must be >= 0, got {self.mass}")
        if not self.lattice_a > 0.0:
            raise ValueError(f"lattice_a must be > 0, got {self.lattice_a}")


@dataclass(frozen=True)
class GroundCovariance:
    gamma_x: np.ndarray
    gamma_p: np.ndarray

    @property
    def size(self):
        return self.gamma_x.shape[0]

    def purity_defect(self):
        """``max |4 gamma_x gamma_p - I|``; zero for a pure state."""
        n = self.size
        return float(np.abs(4.0 * self.gamma_x @ self.gamma_p - np.eye(n)).max())


@dataclass(frozen=True)
class EntanglementSpectrum:
    """Symplectic eigenvalues (ascending) and entanglement-Hamiltonian frequencies (descending)."""

    symplectic_eigenvalues: np.ndarray
    ent_mode_frequencies: np.ndarray
    zero_mode_count: int
    route_gap: float = 0.0


@dataclass(frozen=True)
class EntropyReport:
    entropy: float
    spectrum: EntanglementSpectrum
    chain_min_freq: float
    sites: tuple = field(default=())

    @property
    def max_nu(self):
        return float(self.spectrum.symplectic_eigenvalues[-1])

    @property
    def min_mu(self):
        return float(self.spectrum.ent_mode_frequencies[-1])


@dataclass(frozen=True)
class ZeroModeReport:
    chain_min_freq: float
    ent_min_freq: float
    near_zero_tower: int


def build_couplings(spec):
    """Coupling matrices ``(X, P)`` of the chain.

    ``P = I``; ``X`` has ``m^2 + 2/a^2`` on the diagonal and ``-1/a^2`` between
    neighbours, wrapping around for periodic chains (for ``n = 2`` the two
    bonds land on the same entry, giving ``-2/a^2``).  Dirichlet chains are
    pinned to zero outside ``[0, n)``.
    """
    n, a2 = spec.n_sites, spec.lattice_a**2
    X = np.zeros((n, n))
    X[np.diag_indices(n)] = spec.mass**2 + 2.0 / a2
    last = n if spec.boundary is Boundary.PERIODIC else n - 1
    for i in range(last):
        j = (i + 1) % n
        X[i, j] -= 1.0 / a2
        X[j, i] -= 1.0 / a2
    return X, np.eye(n)


def ground_covariance(X, P):
    """Ground-state covariance of ``p^T P p / 2 + x^T X x / 2``.

    Raises
    ------
    ZeroModePresent
        If ``X`` or ``P`` is singular to within the positive-definiteness floor.
    """
    try:
        Xs, Xi = matfun.sym_sqrt_pair(X)
        Q = matfun.as_symmetric(Xs @ P @ Xs)
        Qs, Qi = matfun.sym_sqrt_pair(Q)
    except NotPositiveDefinite as exc:
        raise ZeroModePresent(exc.eigenvalue) from exc
    gamma_x = 0.5 * Xi @ Qs @ Xi
    gamma_p = 0.5 * Xs @ Qi @ Xs
    return GroundCovariance(matfun.as_symmetric(gamma_x), matfun.as_symmetric(gamma_p))


def reduce(cov, sites):
    """Principal sub-blocks of both covariance blocks on ``sites``."""
    idx = np.asarray(list(sites), dtype=int)
    if idx.size == 0:
        raise ValueError("subsystem must be non-empty")
    if np.any(np.diff(idx) <= 0):
        raise ValueError(f"sites must be strictly increasing, got {list(idx)}")
    if idx[0] < 0 or idx[-1] >= cov.size:
        raise ValueError(f"sites out of range for a {cov.size}-site chain: {list(idx)}")
    sub = np.ix_(idx, idx)
    return GroundCovariance(cov.gamma_x[sub].copy(), cov.gamma_p[sub].copy())


def entanglement_frequencies(nu):
    """``mu* = 2 arccoth(2 nu)``, with ``+inf`` where ``nu <= 1/2 + 1e-12``."""
    nu = np.asarray(nu, dtype=float)
    out = np.full(nu.shape, np.inf)
    live = nu > 0.5 + 1e-12
    out[live] = np.log1p(1.0 / (nu[live] - 0.5))
    return out


def _nu_via_product(cov):
    sx = matfun.sym_sqrt(cov.gamma_x)
    w = np.linalg.eigvalsh(matfun.as_symmetric(sx @ cov.gamma_p @ sx))
    return np.sqrt(np.clip(w, 0.0, None))


def _nu_via_symplectic_form(cov):
    k = cov.size
    G = np.zeros((2 * k, 2 * k))
    G[:k, :k] = cov.gamma_x
    G[k:, k:] = cov.gamma_p
    R = matfun.sym_sqrt(G)
    i_omega = np.zeros((2 * k, 2 * k), dtype=complex)
    i_omega[:k, k:] = 1j * np.eye(k)
    i_omega[k:, :k] = -1j * np.eye(k)
    # R (i Omega) R is Hermitian and similar to i Omega G
    w = matfun.herm_eigenvalues(R @ i_omega @ R)
    return w[k:]


def symplectic_routes(cov):
    """Ascending symplectic eigenvalues from both routes, unclamped: ``(form, product)``."""
    return np.sort(_nu_via_symplectic_form(cov)), np.sort(_nu_via_product(cov))


def symplectic_spectrum(cov, eps_zero=EPS_ZERO):
    """Symplectic spectrum of a (reduced) covariance, computed two ways.

    Route 1 diagonalises the Hermitian form ``G^{1/2} (i Omega) G^{1/2}`` of
    ``i Omega G``; route 2 takes square roots of the eigenvalues of
    ``gamma_x^{1/2} gamma_p gamma_x^{1/2}``.  They must agree to 1e-6
    relative or a :class:`ConsistencyError` is raised; route 2's values are
    returned.
    """
    nu1, nu2 = symplectic_routes(cov)
    gap = float(np.max(np.abs(nu1 - nu2) / np.maximum(nu2, 0.5)))
    if gap > ROUTE_TOL:
        raise ConsistencyError(f"symplectic routes disagree by {gap:.3e}")
    if nu2[0] < 0.5 - _NU_SLACK:
        raise ConsistencyError(f"symplectic eigenvalue {nu2[0]:.12f} below 1/2")
    nu = np.maximum(nu2, 0.5)
    mu = entanglement_frequencies(nu)
    return EntanglementSpectrum(nu, mu, int(np.sum(mu < eps_zero)), gap)


def spectrum_entropy(nu):
    return float(sum(entropy_from_alpha(v) for v in nu))


def chain_min_frequency(X, P):
    """Smallest normal-mode frequency ``sqrt(min eig(XP))``; works for singular ``X``."""
    Ps = matfun.sym_sqrt(P)
    w = np.linalg.eigvalsh(matfun.as_symmetric(Ps @ X @ Ps))
    return math.sqrt(max(float(w[0]), 0.0))


def _default_sites(spec, sites):
    if sites is None:
        return tuple(range(spec.n_sites // 2))
    return tuple(int(s) for s in sites)


def chain_entropy(spec, sites=None, couplings=None):
    """Entanglement entropy of ``sites`` (default: the first half of the chain).

    ``couplings`` overrides the ``(X, P)`` built from ``spec``.

    Raises
    ------
    ZeroModePresent
        For massless periodic chains (or any singular ``X``).
    """
    X, P = couplings if couplings is not None else build_couplings(spec)
    sites = _default_sites(spec, sites)
    cov = ground_covariance(X, P)
    spec_r = symplectic_spectrum(reduce(cov, sites))
    return EntropyReport(
        entropy=spectrum_entropy(spec_r.symplectic_eigenvalues),
        spectrum=spec_r,
        chain_min_freq=chain_min_frequency(X, P),
        sites=sites,
    )


def zero_mode_report(spec, sites=None, couplings=None, eps_zero=EPS_ZERO):
    """Minimum chain frequency, minimum entanglement frequency and near-zero count.

    If the chain itself has a zero mode, ``ent_min_freq`` is 0 and
    ``near_zero_tower`` counts the vanishing chain modes.
    """
    X, P = couplings if couplings is not None else build_couplings(spec)
    sites = _default_sites(spec, sites)
    chain_min = chain_min_frequency(X, P)
    try:
        cov = ground_covariance(X, P)
    except ZeroModePresent:
        Ps = matfun.sym_sqrt(P)
        w = np.linalg.eigvalsh(matfun.as_symmetric(Ps @ X @ Ps))
        return ZeroModeReport(chain_min, 0.0, int(np.sum(w <= matfun.pd_floor(X))))
    mu = symplectic_spectrum(reduce(cov, sites), eps_zero).ent_mode_frequencies
    return ZeroModeReport(chain_min, float(mu.min()), int(np.sum(mu < eps_zero)))
