"""Two coupled bosonic oscillators: entropy, degeneracy paths, divergence diagnostics.

The Hamiltonian is ``H = p^T P p / 2 + x^T X x / 2`` with

    X = [[j, k], [k, j]],   P = [[l, m], [m, l]],   j > k >= 0,  l > m >= 0.

In the decoupled basis ``x_pm = (x1 +- x2)/sqrt(2)`` the antisymmetric mode
``H_- = (l - m) p_-^2 / 2 + (j - k) x_-^2 / 2`` is the one that goes soft as
``j -> k`` or ``l -> m``.  All quantities below are written in terms of the
two *gaps* ``u = j - k`` and ``v = l - m`` so that paths can be followed to
``1 - tau ~ 1e-8`` (gaps ~ 1e-16) without cancellation.

Normalisation: covariance blocks carry the physical factor 1/2
(``<x^2> = 1/(2 omega)`` for a unit-mass oscillator), so a product state has
symplectic eigenvalue exactly 1/2 and zero entropy.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentEigenvalue, DomainError, InconclusiveLimit, UnboundedHamiltonian

__all__ = [
    "PairCouplings",
    "PathKind",
    "DegeneracyPath",
    "LimitClass",
    "DivergenceVerdict",
    "OmegaMinus",
    "ZERO_TOL_REL",
    "RATIO_TOL",
    "WIDTH_CAP",
    "mode_frequencies_squared",
    "has_zero_mode",
    "alpha_from_gaps",
    "symplectic_eigenvalue",
    "entropy_from_alpha",
    "pair_entropy",
    "path_gaps",
    "path_point",
    "path_alpha",
    "path_entropy",
    "limiting_alpha_path_ii",
    "classify_limit",
    "omega_minus",
    "ground_width",
    "product_state_couplings",
    "product_state_check",
]

ZERO_TOL_REL = 1e-10
RATIO_TOL = 1e3
WIDTH_CAP = 1e6
PROBE_Q = (2, 4, 6, 8)
# a ratio sequence whose last step moves log10 r by less than this has converged
_CONVERGED_DLOG = 1e-6


@dataclass(frozen=True)
class PairCouplings:
    """Entries of ``X = [[j, k], [k, j]]`` and ``P = [[l, m], [m, l]]``."""

    j: float
    k: float
    l: float  # noqa: E741
    m: float

    def __post_init__(self):
        vals = (self.j, self.k, self.l, self.m)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"couplings must be finite, got {vals}")
        if not (self.j > self.k >= 0.0 and self.l > self.m >= 0.0):
            raise ValueError(f"need j > k >= 0 and l > m >= 0, got {vals}")

    @property
    def gaps(self):
        return self.j - self.k, self.l - self.m

    def matrices(self):
        """``(X, P)`` as 2x2 arrays."""
        X = np.array([[self.j, self.k], [self.k, self.j]], dtype=float)
        P = np.array([[self.l, self.m], [self.m, self.l]], dtype=float)
        return X, P

    def swapped(self):
        """The position-momentum dual ``(j, k) <-> (l, m)``."""
        return PairCouplings(self.l, self.m, self.j, self.k)


class PathKind(enum.Enum):
    PATH_I = "I"
    PATH_II = "II"
    PATH_III = "III"
    CUSTOM = "custom"


@dataclass(frozen=True)
class DegeneracyPath:
    """A path from ``(j0, l0)`` at tau=0 to the degenerate point ``(k0, m0)`` at tau=1.

    Only the diagonal couplings move.  Every kind is a power law in the gaps,

        j(tau) - k0 = (j0 - k0) (1 - tau)**p_j,   l(tau) - m0 = (l0 - m0) (1 - tau)**p_l,

    with ``(p_j, p_l) = (2, 1)`` for path I, ``(1, 1)`` for path II,
    ``(1, 2)`` for path III and user-chosen exponents for ``CUSTOM``.
    """

    base: PairCouplings
    kind: PathKind = PathKind.PATH_II
    p_j: float = 1.0
    p_l: float = 1.0

    def __post_init__(self):
        kind = PathKind(self.kind)
        object.__setattr__(self, "kind", kind)
        fixed = {PathKind.PATH_I: (2.0, 1.0), PathKind.PATH_II: (1.0, 1.0), PathKind.PATH_III: (1.0, 2.0)}
        if kind in fixed:
            object.__setattr__(self, "p_j", fixed[kind][0])
            object.__setattr__(self, "p_l", fixed[kind][1])
        elif not (self.p_j >= 1.0 and self.p_l >= 1.0):
            raise ValueError(f"custom exponents must be >= 1, got ({self.p_j}, {self.p_l})")

    @classmethod
    def custom(cls, base, p_j, p_l):
        return cls(base, PathKind.CUSTOM, float(p_j), float(p_l))


class LimitClass(enum.Enum):
    HARMONIC = "Harmonic"
    FREE_PARTICLE = "FreeParticle"
    X_SQUARED = "XSquared"


@dataclass(frozen=True)
class DivergenceVerdict:
    limit_class: LimitClass
    entropy_diverges: bool
    omega_minus_limit: float
    width_bounded: bool
    tower_collapses: bool
    ratio_sequence: tuple = ()


@dataclass(frozen=True)
class OmegaMinus:
    """Frequency of the soft mode: raw, and with the overall prefactor of ``H_-`` removed."""

    raw: float
    scale_stripped: float


def mode_frequencies_squared(c):
    """Squared normal-mode frequencies ``(mu_plus, mu_minus) = ((j+k)(l+m), (j-k)(l-m))``."""
    u, v = c.gaps
    return (c.j + c.k) * (c.l + c.m), u * v


def has_zero_mode(c, rel_tol=ZERO_TOL_REL):
    """True when ``mu_minus < rel_tol * mu_plus``."""
    mu_p, mu_m = mode_frequencies_squared(c)
    return mu_m < rel_tol * mu_p


def _coupling_ratio(k, m, u, v):
    # (jl - km) / sqrt((j^2 - k^2)(l^2 - m^2)) with j = k + u, l = m + v
    return (k * v + m * u + u * v) / math.sqrt(u * v * (2.0 * k + u) * (2.0 * m + v))


def alpha_from_gaps(k, m, u, v):
    """Symplectic eigenvalue of one oscillator's reduced state, from gaps ``u = j-k``, ``v = l-m``.

    ``alpha^2 = (1 + R) / 8`` with ``R = (jl - km) / sqrt((j^2-k^2)(l^2-m^2))``.
    """
    if not (u > 0.0 and v > 0.0):
        raise DomainError(f"gaps must be positive, got u={u}, v={v}")
    return math.sqrt((1.0 + _coupling_ratio(k, m, u, v)) / 8.0)


def symplectic_eigenvalue(c, zero_tol=ZERO_TOL_REL):
    """Symplectic eigenvalue of the single-oscillator reduced covariance matrix.

    Raises
    ------
    DivergentEigenvalue
        When exactly one gap is closed to within ``zero_tol`` (relative to
        ``mu_plus``); alpha then grows like ``gap**(-1/4)``.  When both gaps
        close the limit is path dependent and the value is returned as is.
    """
    u, v = c.gaps
    mu_p, mu_m = mode_frequencies_squared(c)
    if mu_m < zero_tol * mu_p:
        su = u < math.sqrt(zero_tol) * (c.j + c.k)
        sv = v < math.sqrt(zero_tol) * (c.l + c.m)
        if su != sv:
            raise DivergentEigenvalue(mu_m, u if su else v)
    return alpha_from_gaps(c.k, c.m, u, v)


def entropy_from_alpha(alpha):
    """Von Neumann entropy of a single mode with symplectic eigenvalue ``alpha >= 1/2``.

    ``S = (a + 1/2) ln(a + 1/2) - (a - 1/2) ln(a - 1/2)``, evaluated as
    ``ln(a + 1/2) + (a - 1/2) log1p(1 / (a - 1/2))`` so that large ``a`` does
    not cancel.
    """
    a = float(alpha)
    if not a >= 0.5 - 1e-12:
        raise DomainError(f"symplectic eigenvalue {alpha} violates the uncertainty bound 1/2")
    if math.isinf(a):
        return math.inf
    x = a - 0.5
    if x <= 0.0:
        return 0.0
    return math.log(a + 0.5) + x * math.log1p(1.0 / x)


def pair_entropy(c):
    return entropy_from_alpha(symplectic_eigenvalue(c))


def path_gaps(path, tau):
    """``(j(tau) - k0, l(tau) - m0)`` computed without subtracting nearly equal numbers."""
    tau = float(tau)
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    s = 1.0 - tau
    u0, v0 = path.base.gaps
    return u0 * s**path.p_j, v0 * s**path.p_l


def path_point(path, tau):
    """Diagonal couplings ``(j(tau), l(tau))`` along ``path``."""
    u, v = path_gaps(path, tau)
    return path.base.k + u, path.base.m + v


def path_alpha(path, tau):
    u, v = path_gaps(path, tau)
    return alpha_from_gaps(path.base.k, path.base.m, u, v)


def path_entropy(path, tau):
    return entropy_from_alpha(path_alpha(path, tau))


def limiting_alpha_path_ii(base):
    """tau -> 1 limit of alpha along path II, for ``k0, m0 > 0``.

    With ``(a, b, c, d) = (j0, k0, l0, m0)`` the coupling ratio tends to
    ``(ad + bc - 2bd) / (2 sqrt(bd (a-b)(c-d)))``.
    """
    a, b, c, d = base.j, base.k, base.l, base.m
    if b <= 0.0 or d <= 0.0:
        return math.inf
    ratio = (a * d + b * c - 2.0 * b * d) / (2.0 * math.sqrt(b * d * (a - b) * (c - d)))
    return math.sqrt((1.0 + ratio) / 8.0)


def _gap_ratio(path, tau):
    u0, v0 = path.base.gaps
    u, v = path_gaps(path, tau)
    return (u / v) * (v0 / u0)


def _trend(values):
    """Classify a positive sequence as converged (0), falling (-1) or rising (+1).

    Raises ``InconclusiveLimit`` if it is not monotone.
    """
    logs = np.log10(values)
    steps = np.diff(logs)
    if np.all(steps <= _CONVERGED_DLOG) or np.all(steps >= -_CONVERGED_DLOG):
        if abs(steps[-1]) <= _CONVERGED_DLOG:
            return 0, logs[-1]
        return (1 if steps[-1] > 0 else -1), logs[-1]
    raise InconclusiveLimit(f"non-monotone sequence {values}")


def classify_limit(path, ratio_tol=RATIO_TOL, width_cap=WIDTH_CAP, probe_q=PROBE_Q):
    """Decide how the soft mode ``H_-`` degenerates along ``path``.

    The ratio ``r(tau) = [(j - k0)/(l - m0)] * [(l0 - m0)/(j0 - k0)]`` of the
    potential and kinetic coefficients (normalised to 1 at tau=0) is sampled at
    ``tau = 1 - 10**-q``.  A converged ratio inside ``(1/ratio_tol, ratio_tol)``
    is an amplitude-modulated harmonic oscillator; a ratio running to 0 is a
    free-particle limit, one running to infinity is the ``x^2`` limit.  The
    last two make the entropy diverge.
    """
    taus = [1.0 - 10.0 ** (-q) for q in probe_q]
    ratios = np.array([_gap_ratio(path, t) for t in taus])
    direction, last_log = _trend(ratios)
    lim = math.log10(ratio_tol)
    if direction == 0 and -lim < last_log < lim:
        limit_class = LimitClass.HARMONIC
    elif direction < 0 or (direction == 0 and last_log <= -lim):
        limit_class = LimitClass.FREE_PARTICLE
    else:
        limit_class = LimitClass.X_SQUARED

    # position width relative to tau=0; the momentum width is its inverse
    w0 = ground_width(path, 0.0)
    rel = np.array([ground_width(path, t) / w0 for t in taus])
    spread = np.maximum(rel, 1.0 / rel)
    wdir, wlog = _trend(spread)
    width_bounded = bool(wdir <= 0 and wlog < math.log10(width_cap))

    diverges = limit_class is not LimitClass.HARMONIC
    if limit_class is LimitClass.HARMONIC:
        omega_lim = omega_minus(path, taus[-1]).scale_stripped
    elif limit_class is LimitClass.FREE_PARTICLE:
        omega_lim = 0.0
    else:
        omega_lim = math.inf
    return DivergenceVerdict(
        limit_class=limit_class,
        entropy_diverges=diverges,
        omega_minus_limit=omega_lim,
        width_bounded=width_bounded,
        tower_collapses=not width_bounded,
        ratio_sequence=tuple(float(r) for r in ratios),
    )


def omega_minus(path, tau):
    """Frequency of ``H_-`` at the path point.

    ``raw = sqrt((j - k0)(l - m0))``.  ``scale_stripped`` first rescales
    ``H_-`` so that its kinetic coefficient equals the tau=0 value, which
    removes an overall (amplitude) prefactor and leaves only genuine
    frequency modulation: ``v0 * sqrt(u / v)``.
    """
    u, v = path_gaps(path, tau)
    _, v0 = path.base.gaps
    return OmegaMinus(raw=math.sqrt(u * v), scale_stripped=v0 * math.sqrt(u / v))


def ground_width(path, tau):
    """``<x_-^2> = (1/2) sqrt((l - m0)/(j - k0))`` in the ground state of ``H_-``."""
    u, v = path_gaps(path, tau)
    if u == 0.0:
        return math.inf
    return 0.5 * math.sqrt(v / u)


def product_state_couplings(lam):
    """Couplings of ``a^+a + b^+b + lam (a^+b + b^+a)`` in real variables.

    With ``x = (a + a^+)/2``, ``p = (a^+ - a)/(2i)`` and a rescaling to
    canonical pairs the Hamiltonian becomes ``X = P = [[1, lam], [lam, 1]]``
    up to a factor and a constant.
    """
    lam = float(lam)
    if lam >= 1.0:
        raise UnboundedHamiltonian(f"hopping lam={lam} >= 1: no unique ground state")
    if lam < 0.0:
        raise DomainError(f"hopping lam={lam} must be >= 0")
    return PairCouplings(1.0, lam, 1.0, lam)


def product_state_check(lam):
    """Entanglement entropy of the number-conserving pair ground state; zero for all ``lam < 1``."""
    c = product_state_couplings(lam)
    u, v = c.gaps
    return entropy_from_alpha(alpha_from_gaps(c.k, c.m, u, v))
