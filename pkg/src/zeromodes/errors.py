"""Exception hierarchy shared by all modules."""


class ZeromodesError(Exception):
    """Base class for numerical and internal-consistency failures."""


class DomainError(ZeromodesError, ValueError):
    """Argument outside the domain of a closed-form expression."""


class ConvergenceError(ZeromodesError):
    """Iterative eigensolver hit its sweep cap."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NotPositiveDefinite(ZeromodesError, ValueError):
    """Matrix has an eigenvalue at or below the positive-definiteness floor."""

    def __init__(self, eigenvalue, floor):
        super().__init__(
            f"matrix not positive definite: eigenvalue {eigenvalue:.6e} <= floor {floor:.3e}"
        )
        self.eigenvalue = eigenvalue
        self.floor = floor


class ZeroModePresent(ZeromodesError):
    """The Hamiltonian has a vanishing normal mode; the entropy is formally infinite."""

    def __init__(self, eigenvalue, message="zero mode present"):
        super().__init__(f"{message}: vanishing eigenvalue {eigenvalue:.6e}")
        self.eigenvalue = eigenvalue


class DivergentEigenvalue(ZeromodesError):
    """One coupling gap closed while the other stayed open.

    ``exponent`` is the power law of the blow-up, alpha ~ gap**exponent.
    """

    def __init__(self, mu_minus, gap, exponent=-0.25):
        super().__init__(
            f"symplectic eigenvalue diverges: mu_minus={mu_minus:.3e}, "
            f"closing gap {gap:.3e}, alpha ~ gap**{exponent}"
        )
        self.mu_minus = mu_minus
        self.gap = gap
        self.exponent = exponent


class UnboundedHamiltonian(DomainError):
    """Hamiltonian has no lower bound (no ground state)."""


class InconclusiveLimit(ZeromodesError):
    """Path is outside the family that ``classify_limit`` can decide."""


class ConsistencyError(ZeromodesError):
    """Two routes that must agree did not, or a structural invariant broke."""


class DegenerateMode(ZeromodesError):
    """A Bloch mode has zero energy, so the filled sea is ambiguous."""


class FitError(ZeromodesError, ValueError):
    """Least-squares design matrix is singular or the window is too small."""
