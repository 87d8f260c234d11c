"""Matrix-space descriptors and induced spectral densities.

Five symmetry classes are supported, all with Dyson index beta = 2:

* ``G``       -- invertible complex n x n matrices (multiplicative structure),
* ``H2``      -- Hermitian n x n matrices,
* ``Mnu``     -- complex rectangular n x (n+nu) matrices, identified with their
                 chiral embedding in Herm(2n+nu),
* ``H1even``  -- i * o(2n)   (Hermitian anti-symmetric, even dimension),
* ``H1odd``   -- i * o(2n+1) (Hermitian anti-symmetric, odd dimension),
* ``H4``      -- i * usp(2n) (Hermitian anti-self-dual).

An invariant matrix density on one of these spaces is equivalent to a
symmetric density of its n eigenvalues (H2) or squared singular values
(all other classes).  The map between the two carries an explicit
Vandermonde-squared Jacobian and a class constant; both are implemented
here, together with the embeddings ``iota`` that realise a spectral point
as an ambient Hermitian matrix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

__all__ = [
    "SpaceKind",
    "MatrixSpace",
    "vandermonde",
    "vandermonde_neg_inverse",
    "space_constant",
    "embed_iota",
    "spectral_map",
    "as_spectral_point",
]


class SpaceKind(enum.Enum):
    """Symmetry class selector."""

    G = "G"
    H2 = "H2"
    MNU = "Mnu"
    H1_EVEN = "H1even"
    H1_ODD = "H1odd"
    H4 = "H4"


# Chirality index attached to each class; MNU carries a free integer nu.
_FIXED_NU = {
    SpaceKind.H1_EVEN: Fraction(-1, 2),
    SpaceKind.H1_ODD: Fraction(1, 2),
    SpaceKind.H4: Fraction(1, 2),
}

# Second and third Pauli matrices, used by the embeddings.
TAU2 = np.array([[0.0, -1.0j], [1.0j, 0.0]])
TAU3 = np.array([[1.0, 0.0], [0.0, -1.0]])


@dataclass(frozen=True)
class MatrixSpace:
    """One of the five symmetry classes, with size n and chirality index nu.

    ``n`` is the number of eigenvalues (H2) or squared singular values
    (all other kinds).  ``nu`` is a non-negative integer for ``Mnu``,
    -1/2 for ``H1even``, +1/2 for ``H1odd`` and ``H4``, and unused for
    ``G`` and ``H2``.
    """

    kind: SpaceKind
    n: int
    nu: Fraction = Fraction(0)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "nu", Fraction(self.nu))
        if self.kind == SpaceKind.MNU:
            if self.nu.denominator != 1 or self.nu < 0:
                raise ValueError(f"Mnu requires integer nu >= 0, got {self.nu}")
        elif self.kind in _FIXED_NU:
            if self.nu != _FIXED_NU[self.kind]:
                raise ValueError(
                    f"{self.kind.value} fixes nu = {_FIXED_NU[self.kind]}, got {self.nu}"
                )
        elif self.nu != 0:
            raise ValueError(f"{self.kind.value} does not carry a nu index")

    # -- constructors ------------------------------------------------------

    @classmethod
    def g(cls, n: int) -> "MatrixSpace":
        return cls(SpaceKind.G, n)

    @classmethod
    def h2(cls, n: int) -> "MatrixSpace":
        return cls(SpaceKind.H2, n)

    @classmethod
    def m(cls, n: int, nu: int) -> "MatrixSpace":
        return cls(SpaceKind.MNU, n, Fraction(nu))

    @classmethod
    def h1_even(cls, n: int) -> "MatrixSpace":
        return cls(SpaceKind.H1_EVEN, n, Fraction(-1, 2))

    @classmethod
    def h1_odd(cls, n: int) -> "MatrixSpace":
        return cls(SpaceKind.H1_ODD, n, Fraction(1, 2))

    @classmethod
    def h4(cls, n: int) -> "MatrixSpace":
        return cls(SpaceKind.H4, n, Fraction(1, 2))

    # -- derived data ------------------------------------------------------

    @property
    def is_additive(self) -> bool:
        """True for the linear spaces (everything except G)."""
        return self.kind != SpaceKind.G

    @property
    def is_chiral(self) -> bool:
        """True for the classes whose spectra are squared singular values
        of an ambient matrix with +/- sqrt(a) eigenvalue pairs."""
        return self.kind in (SpaceKind.MNU, SpaceKind.H1_EVEN, SpaceKind.H1_ODD, SpaceKind.H4)

    @property
    def ambient_dim(self) -> int:
        """Dimension of the ambient (embedded) matrix."""
        n = self.n
        if self.kind in (SpaceKind.G, SpaceKind.H2):
            return n
        if self.kind == SpaceKind.MNU:
            return 2 * n + int(self.nu)
        if self.kind == SpaceKind.H1_EVEN:
            return 2 * n
        if self.kind == SpaceKind.H1_ODD:
            return 2 * n + 1
        return 2 * n  # H4

    @property
    def spectral_domain(self) -> tuple[float, float]:
        """Domain of a single eigenvalue / squared singular value."""
        if self.kind == SpaceKind.H2:
            return (-math.inf, math.inf)
        return (0.0, math.inf)

    def __str__(self) -> str:
        if self.kind == SpaceKind.MNU:
            return f"M{int(self.nu)}(n={self.n})"
        return f"{self.kind.value}(n={self.n})"


def vandermonde(a: Sequence[float]) -> float:
    """Vandermonde determinant prod_{b<c} (a_c - a_b).

    Empty and singleton inputs return 1 (the empty product).  The value is
    antisymmetric under transposition of entries.
    """
    a = np.asarray(a, dtype=float)
    n = a.size
    if n <= 1:
        return 1.0
    diff = a[None, :] - a[:, None]          # diff[b, c] = a_c - a_b
    return float(np.prod(diff[np.triu_indices(n, k=1)]))


def vandermonde_neg_inverse(x: Sequence[float]) -> float:
    """Vandermonde determinant of the reflected inverses, Delta_n(-1/x).

    For positive entries this equals det(x)^(1-n) * Delta_n(x), the
    convention used by the multiplicative group-integral identity.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise ValueError("entries must be non-zero")
    return vandermonde(-1.0 / x)


def as_spectral_point(space: MatrixSpace, a: Sequence[float]) -> np.ndarray:
    """Validate and canonicalise a spectral point (ascending order).

    Entries must be strictly positive for every kind except H2.  Repeated
    entries are legal; the densities vanish there continuously.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.ndim != 1 or a.size != space.n:
        raise ValueError(f"expected {space.n} spectral values, got shape {a.shape}")
    if space.kind != SpaceKind.H2 and np.any(a <= 0):
        raise ValueError(f"spectral values must be positive for {space.kind.value}")
    return np.sort(a)


def space_constant(space: MatrixSpace) -> float:
    """Class constant of the spectral-density map.

    C_H2   = (1/n!) prod_{j=0}^{n-1} pi^j / j!
    C_star = (1/n!) prod_{j=0}^{n-1} pi^(2j+nu+1) / (Gamma(j+nu+1) j!)

    with C_G = C_star(nu=0), C_Mnu = C_H1 = C_star(nu), and
    C_H4 = C_star(nu) / 2^(n(n-1)).
    """
    n = space.n
    if space.kind == SpaceKind.H2:
        log_c = -gammaln(n + 1)
        for j in range(n):
            log_c += j * math.log(math.pi) - gammaln(j + 1)
        return math.exp(log_c)

    nu = float(space.nu) if space.kind != SpaceKind.G else 0.0
    log_c = -gammaln(n + 1)
    for j in range(n):
        log_c += (2 * j + nu + 1) * math.log(math.pi)
        log_c -= gammaln(j + nu + 1) + gammaln(j + 1)
    if space.kind == SpaceKind.H4:
        log_c -= n * (n - 1) * math.log(2.0)
    return math.exp(log_c)


def embed_iota(space: MatrixSpace, a: Sequence[float]) -> np.ndarray:
    """Ambient Hermitian matrix with non-zero eigenvalues +/- sqrt(a_j).

    Only the chiral kinds (Mnu, H1even, H1odd, H4) embed; G and H2 are
    rejected.  ``a`` holds positive squared singular values.
    """
    if not space.is_chiral:
        raise ValueError(f"{space.kind.value} has no iota embedding")
    a = as_spectral_point(space, a)
    root = np.sqrt(a)
    n = space.n

    if space.kind == SpaceKind.MNU:
        nu = int(space.nu)
        dim = 2 * n + nu
        block = np.zeros((n, n + nu))
        block[:, :n] = np.diag(root)        # sqrt(a) Pi_{n,n+nu}
        out = np.zeros((dim, dim), dtype=complex)
        out[:n, n:] = block
        out[n:, :n] = block.conj().T
        return out

    if space.kind == SpaceKind.H1_EVEN:
        return np.kron(np.diag(root), TAU2)

    if space.kind == SpaceKind.H1_ODD:
        out = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
        out[: 2 * n, : 2 * n] = np.kron(np.diag(root), TAU2)
        return out

    # H4
    return np.kron(np.diag(root), TAU3).astype(complex)


def spectral_map(
    space: MatrixSpace,
    f_matrix: Callable[[np.ndarray], float],
    a: Sequence[float],
) -> float:
    """Induced spectral density of an invariant matrix density.

    ``f_matrix`` is the invariant density evaluated on the spectral
    representative: it receives the eigenvalue vector for H2, the
    singular-value vector sqrt(a) for G, and the squared-singular-value
    vector a itself for the chiral kinds (its value at iota(a)).

    Returns C_M * (det a)^nu * f_matrix(repr(a)) * Delta_n(a)^2 with the
    kind-appropriate specialisation:  no (det a)^nu factor for H2, and the
    component-wise square root as argument for G.
    """
    a = as_spectral_point(space, a)
    c = space_constant(space)
    delta_sq = vandermonde(a) ** 2

    if space.kind == SpaceKind.H2:
        return c * float(f_matrix(a)) * delta_sq
    if space.kind == SpaceKind.G:
        return c * float(f_matrix(np.sqrt(a))) * delta_sq
    det_nu = float(np.prod(a)) ** float(space.nu)
    return c * det_nu * float(f_matrix(a)) * delta_sq
