"""Haar-measure sampling and Monte Carlo group-integral verification.

Haar matrices come from phase-corrected QR of Ginibre draws (unitary,
orthogonal) and from Gram-Schmidt in the quaternion algebra (unitary
symplectic), which keeps the symplectic structure to round-off.

Three determinantal group-integral identities are implemented both as
closed forms and as plain Monte Carlo averages over Haar samples:

* unitary average of exp[i tr(a k s k*)]              (HCIZ),
* block-unitary average of exp[i tr(k* iota(a) k iota(s))]
  with Bessel-kernel determinant                      (Berezin-Karpelevich),
* unitary average of nested principal-minor powers    (Gelfand-Naimark).

On top of these sit the derivative-type ensemble identities: the group
average of a density evaluated at shifted arguments collapses, after
Vandermonde prefactors, to an n x n determinant of univariate data.  All
randomness flows from one root seed through counter-keyed Philox streams,
so estimates are bit-reproducible for a fixed seed, sample count and
chunk partitioning, independent of any worker layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gamma as sp_gamma
from scipy.special import gammaln

from .ensembles import Ensemble, convolve_polya, joint_density, marginal_density
from .spaces import MatrixSpace, SpaceKind, space_constant, vandermonde
from .transforms import (
    DEFAULT_QUAD,
    QuadratureSpec,
    TransformKind,
    _integral_over_support,
    bessel_phi,
    det_over_vandermonde,
    transform_kind_for_space,
    univariate_transform,
)
from .weights import Weight, apply_derivative_op, make_family, scale_argument

__all__ = [
    "McReport",
    "GroupKind",
    "haar_sample",
    "haar_unitary",
    "haar_orthogonal",
    "haar_symplectic",
    "symplectic_form",
    "group_integral_closed",
    "group_integral_mc",
    "polya_group_identity",
    "sample_matrix_ensemble",
    "empirical_convolution_check",
    "ks_distance",
    "family_weight",
]

CHUNK = 1 << 13


@dataclass(frozen=True)
class McReport:
    """A Monte Carlo estimate with its standard error and provenance."""

    estimate: complex
    std_error: float
    n_samples: int
    seed: int

    def within(self, reference: complex, n_sigma: float = 5.0) -> bool:
        return abs(self.estimate - reference) <= n_sigma * self.std_error


@dataclass(frozen=True)
class GroupKind:
    """Compact group selector: U(n), O(n), USp(2n) or U(n) x U(m)."""

    name: str  # "unitary" | "orthogonal" | "symplectic" | "product_unitary"
    dims: tuple[int, ...]

    def __post_init__(self):
        if self.name not in ("unitary", "orthogonal", "symplectic", "product_unitary"):
            raise ValueError(f"unknown group {self.name!r}")
        if any(d < 1 for d in self.dims):
            raise ValueError("dimensions must be positive")
        if self.name == "symplectic" and self.dims[0] % 2:
            raise ValueError("symplectic dimension must be even")

    @classmethod
    def unitary(cls, n: int) -> "GroupKind":
        return cls("unitary", (n,))

    @classmethod
    def orthogonal(cls, n: int) -> "GroupKind":
        return cls("orthogonal", (n,))

    @classmethod
    def symplectic(cls, two_n: int) -> "GroupKind":
        return cls("symplectic", (two_n,))

    @classmethod
    def product_unitary(cls, n: int, m: int) -> "GroupKind":
        return cls("product_unitary", (n, m))


def _rng(seed: int, counter: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, counter]))


# ---------------------------------------------------------------------------
# Haar samplers
# ---------------------------------------------------------------------------

def haar_unitary(n: int, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """(size, n, n) Haar-unitary matrices via phase-corrected QR."""
    z = rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))
    q, r = np.linalg.qr(z)
    d = np.einsum("...ii->...i", r)
    q *= (d / np.abs(d))[:, None, :]
    return q

def haar_orthogonal(n: int, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """(size, n, n) Haar-orthogonal matrices via sign-corrected QR."""
    z = rng.standard_normal((size, n, n))
    q, r = np.linalg.qr(z)
    d = np.einsum("...ii->...i", r)
    q *= np.sign(d)[:, None, :]
    return q


def symplectic_form(two_n: int) -> np.ndarray:
    """J = [[0, I], [-I, 0]] in the block convention used here."""
    n = two_n // 2
    j = np.zeros((two_n, two_n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def _partner(v: np.ndarray) -> np.ndarray:
    """The quaternion-conjugate column [-conj(v2); conj(v1)]."""
    n = v.size // 2
    return np.concatenate([-np.conj(v[n:]), np.conj(v[:n])])


def haar_symplectic(two_n: int, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """(size, 2n, 2n) Haar matrices on USp(2n).

    Draws a quaternion Ginibre matrix [[A, B], [-conj(B), conj(A)]] and
    orthonormalises its quaternion columns (each spanning a complex pair
    (v, partner(v))) with real positive normalisation, which is the
    quaternion QR with positive diagonal and hence exactly Haar.
    """
    n = two_n // 2
    out = np.empty((size, two_n, two_n), dtype=complex)
    for idx in range(size):
        a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        b = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        x = np.block([[a, b], [-np.conj(b), np.conj(a)]])
        cols: list[np.ndarray] = []
        for j in range(n):
            v = x[:, j].copy()
            for u in cols:
                v -= u * np.vdot(u, v)
            v /= np.linalg.norm(v)
            cols.append(v)
            cols.append(_partner(v))
        q = np.empty((two_n, two_n), dtype=complex)
        for j in range(n):
            q[:, j] = cols[2 * j]
            q[:, n + j] = cols[2 * j + 1]
        out[idx] = q
    return out


def haar_sample(g: GroupKind, seed: int) -> np.ndarray:
    """A single Haar-distributed matrix (block-diagonal for product groups)."""
    rng = _rng(seed)
    if g.name == "unitary":
        return haar_unitary(g.dims[0], rng, 1)[0]
    if g.name == "orthogonal":
        return haar_orthogonal(g.dims[0], rng, 1)[0]
    if g.name == "symplectic":
        return haar_symplectic(g.dims[0], rng, 1)[0]
    n, m = g.dims
    k1 = haar_unitary(n, rng, 1)[0]
    k2 = haar_unitary(m, rng, 1)[0]
    out = np.zeros((n + m, n + m), dtype=complex)
    out[:n, :n] = k1
    out[n:, n:] = k2
    return out


# ---------------------------------------------------------------------------
# closed-form group integrals
# ---------------------------------------------------------------------------

def _check_axis(name, arr, n):
    arr = np.atleast_1d(np.asarray(arr, dtype=complex))
    if arr.size != n:
        raise ValueError(f"{name} must have {n} entries")
    return arr


def group_integral_closed(kind: str, a: Sequence[float], s: Sequence[complex],
                          nu: float = 0.0) -> complex:
    """Determinantal right-hand sides of the three group integrals.

    kind = 'hciz' | 'bk' | 'gn'.  Coincident entries within ``a`` or
    within ``s`` are resolved by confluent divided differences on that
    axis (repeats on both axes at once are not supported).  The
    Gelfand-Naimark form follows the convention s_(n+1) = (n-1)/2 on its
    defining side and evaluates entries in the log domain.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    n = a.size
    s = _check_axis("s", s, n)
    m = n * (n - 1) // 2

    def _resolve(entry_s_deriv: Callable[[int, complex, int], complex],
                 entry_a_deriv: Callable[[int, complex, int], complex],
                 ) -> complex:
        """det[E(a_b, s_c)] / (Delta(a) Delta(s)) with one confluent axis."""
        a_rep = np.any(np.abs(np.subtract.outer(a, a))[np.triu_indices(n, 1)] < 1e-12)
        s_rep = np.any(np.abs(np.subtract.outer(s, s))[np.triu_indices(n, 1)] < 1e-12)
        if a_rep and s_rep:
            raise ValueError("coincidences in both a and s are not supported")
        if a_rep:
            ratio = det_over_vandermonde(entry_a_deriv, a.astype(complex))
            return ratio / np.prod([s[c] - s[b] for b in range(n) for c in range(b + 1, n)])
        ratio = det_over_vandermonde(entry_s_deriv, s)
        return ratio / vandermonde(a)

    if kind == "hciz":
        pref = np.prod([math.factorial(j) for j in range(n)])

        def e_s(b, sv, k):  # d^k/ds of e^(i a_b s)
            return (1j * a[b]) ** k * np.exp(1j * a[b] * sv)

        def e_a(c, av, k):  # d^k/da of e^(i a s_c); rows indexed by s after transpose
            return (1j * s[c]) ** k * np.exp(1j * av * s[c])

        ratio = _resolve(e_s, e_a)
        return complex(pref * ratio * (1.0 / 1j) ** m)

    if kind == "bk":
        log_pref = sum(gammaln(j + nu + 1) + gammaln(j + 1) for j in range(n))
        pref = math.exp(log_pref - n * gammaln(nu + 1.0))
        fac = [(-1.0) ** k * math.exp(gammaln(nu + 1.0) - gammaln(nu + k + 1.0))
               for k in range(n + 1)]

        def e_s(b, sv, k):  # d^k/ds of phi_nu(a_b s)
            return a[b] ** k * fac[k] * bessel_phi(nu + k, a[b] * sv)

        def e_a(c, av, k):
            return s[c] ** k * fac[k] * bessel_phi(nu + k, av * s[c])

        ratio = _resolve(e_s, e_a)
        return complex(pref * ratio * (-1.0) ** m)

    if kind == "gn":
        pref = np.prod([math.factorial(j) for j in range(n)])
        shift = (n + 1) / 2.0
        log_a = np.log(a)

        def e_s(b, sv, k):  # d^k/ds of a_b^(s - shift)
            return log_a[b] ** k * np.exp((sv - shift) * log_a[b])

        def e_a(c, av, k):  # d^k/da of a^(s_c - shift)
            sig = s[c] - shift
            fall = 1.0
            for i in range(k):
                fall *= sig - i
            return fall * av ** (sig - k)

        ratio = _resolve(e_s, e_a)
        return complex(pref * ratio)

    raise ValueError(f"unknown integral kind {kind!r}")


# ---------------------------------------------------------------------------
# Monte Carlo group integrals
# ---------------------------------------------------------------------------

def _mc_run(chunk_values: Callable[[np.random.Generator, int], np.ndarray],
            n_samples: int, seed: int) -> McReport:
    """Chunked accumulation with per-chunk counter-keyed streams."""
    total = 0.0 + 0.0j
    total_sq = 0.0  # sum of |z|^2
    done = 0
    chunk_idx = 0
    while done < n_samples:
        m = min(CHUNK, n_samples - done)
        vals = np.asarray(chunk_values(_rng(seed, chunk_idx + 1), m), dtype=complex)
        total += vals.sum()
        total_sq += float(np.sum(np.abs(vals) ** 2))
        done += m
        chunk_idx += 1
    mean = total / n_samples
    var = max(total_sq / n_samples - abs(mean) ** 2, 0.0)
    return McReport(estimate=complex(mean),
                    std_error=math.sqrt(var / n_samples),
                    n_samples=n_samples, seed=seed)


def group_integral_mc(kind: str, a: Sequence[float], s: Sequence[complex],
                      n_samples: int, seed: int, nu: int = 0) -> McReport:
    """Monte Carlo of the group-integral left-hand sides over Haar samples.

    hciz averages exp[i tr(a k s k*)] over U(n); bk averages the chiral
    phase over U(n) x U(n+nu); gn averages the nested principal-minor
    product over U(n) with the s_(n+1) = (n-1)/2 convention.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    n = a.size
    s_arr = _check_axis("s", s, n)

    if kind == "hciz":
        s_real = s_arr.real if np.allclose(s_arr.imag, 0) else s_arr

        def chunk(rng, m):
            u = haar_unitary(n, rng, m)
            w = np.abs(u) ** 2
            phase = np.einsum("i,kij,j->k", a, w, s_real)
            return np.exp(1j * phase)

        return _mc_run(chunk, n_samples, seed)

    if kind == "bk":
        root_a = np.sqrt(a)
        root_s = np.sqrt(s_arr.real)
        nu_i = int(nu)

        def chunk(rng, m):
            k1 = haar_unitary(n, rng, m)
            k2 = haar_unitary(n + nu_i, rng, m)
            # B_ii = sum_l sqrt(a_l) conj(k1[l,i]) k2[l,i]
            b_diag = np.einsum("l,kli,kli->ki", root_a, np.conj(k1), k2[:, :n, :n])
            phase = 2.0 * np.einsum("i,ki->k", root_s, b_diag.real)
            return np.exp(1j * phase)

        return _mc_run(chunk, n_samples, seed)

    if kind == "gn":
        shift = (n - 1) / 2.0
        exponents = np.empty(n, dtype=complex)
        for j in range(n):
            s_next = s_arr[j + 1] if j + 1 < n else shift
            exponents[j] = s_arr[j] - s_next - 1.0

        def chunk(rng, m):
            u = haar_unitary(n, rng, m)
            b = np.einsum("kij,j,klj->kil", u, a.astype(complex), np.conj(u))
            log_total = np.zeros(m, dtype=complex)
            for j in range(1, n):
                minors = np.linalg.det(b[:, :j, :j]).real
                log_total += exponents[j - 1] * np.log(minors)
            log_total += exponents[n - 1] * np.log(np.prod(a))
            return np.exp(log_total)

        return _mc_run(chunk, n_samples, seed)

    raise ValueError(f"unknown integral kind {kind!r}")


# ---------------------------------------------------------------------------
# derivative-type ensemble group identities
# ---------------------------------------------------------------------------

def _batch_vdm(vals: np.ndarray) -> np.ndarray:
    """Vandermonde of each row of a (m, n) array."""
    m, n = vals.shape
    out = np.ones(m)
    for b in range(n):
        for c in range(b + 1, n):
            out *= vals[:, c] - vals[:, b]
    return out


def _batch_weight_matrix(space: MatrixSpace, w: Weight, spectra: np.ndarray) -> np.ndarray:
    """(m, n, n) matrices W[k, j-1, c] = w_j(spectra[k, c])."""
    m, n = spectra.shape
    flat = spectra.reshape(-1)
    out = np.empty((n, m * n))
    for j in range(1, n + 1):
        out[j - 1] = apply_derivative_op(space, w, j, flat)
    return out.reshape(n, m, n).transpose(1, 0, 2)


def _spectral_density_ratio(space: MatrixSpace, ens: Ensemble,
                            spectra: np.ndarray) -> np.ndarray:
    """Invariant matrix density evaluated on batched spectra:
    p_M = C_n det[w_b(a_c)] / (C_M (det a)^nu Delta(a))."""
    mats = _batch_weight_matrix(space, ens.polya_weight, spectra)
    dets = np.linalg.det(mats)
    vdm = _batch_vdm(spectra)
    c_m = space_constant(space)
    out = ens.norm * dets / (c_m * vdm)
    if space.is_chiral:
        out /= np.prod(spectra, axis=1) ** float(space.nu)
    return out


def _chiral_block(space: MatrixSpace, root_vals: np.ndarray) -> np.ndarray:
    """diag(sqrt(a)) padded to the rectangular block shape for Mnu."""
    n = space.n
    nu = int(space.nu)
    block = np.zeros((n, n + nu), dtype=complex)
    block[:, :n] = np.diag(root_vals)
    return block


def _hankel_transform_spline(w: Weight, nu: float, spec: QuadratureSpec):
    """(spline of H_nu w on [0, s_max], s_max): cached transform values."""
    from scipy.interpolate import CubicSpline

    kind = TransformKind.hankel(nu)

    def h(s: float) -> float:
        return complex(univariate_transform(kind, w, s, spec)).real

    h0 = h(0.0)
    scale = max(abs(h0), 1e-300)
    s_max = 1.0
    while max(abs(h(s_max)), abs(h(0.7 * s_max))) > 1e-13 * scale:
        s_max *= 2.0
        if s_max > 1e6:
            raise ValueError("Hankel transform does not decay; spline cut-off failed")
    u = np.linspace(0.0, 1.0, 257)
    grid = s_max * u ** 2
    vals = np.array([h(t) for t in grid])
    return CubicSpline(grid, vals), s_max


def _m1_entry(space: MatrixSpace, h_spline, s_max: float, h0: float,
              y: float, x: float, spec: QuadratureSpec) -> float:
    """The n = 1 chiral group integral through the transform route:

    int_K(1) p_M(1)(iota(y) - k iota(x) k*) d*k
      = (1 / (Gamma(nu+1)^2 C_M(1))) int H(s) phi_nu(ys) phi_nu(xs) s^nu ds

    with H the normalised Hankel transform of the weight (splined once
    per identity evaluation).
    """
    nu = float(space.nu)
    space1 = MatrixSpace(space.kind, 1, space.nu)
    c_m1 = space_constant(space1)
    pref = 1.0 / (sp_gamma(nu + 1.0) ** 2 * c_m1 * h0)

    def integrand(sv):
        sv = np.atleast_1d(sv)
        return (pref * h_spline(sv) * bessel_phi(nu, y * sv)
                * bessel_phi(nu, x * sv) * sv ** nu)

    from .transforms import _quad_c

    total, _ = _quad_c(integrand, 0.0, s_max, spec)
    return float(np.real(total))


def polya_group_identity(space: MatrixSpace, w: Weight,
                         x: Sequence[float], y: Sequence[float],
                         n_samples: int, seed: int,
                         spec: QuadratureSpec = DEFAULT_QUAD,
                         ) -> tuple[McReport, float]:
    """Monte Carlo left side and determinantal right side of the
    derivative-type group-integral identity.

    lhs: Delta(y) Delta(x') E_k[ p_M(shifted argument) ] with the
    kind-matched shift (difference for the additive classes, the
    x^(-1/2) k y^(1/2) product for the multiplicative one, where the
    second Vandermonde is Delta(-1/x)).

    rhs: det[omega(y_b - x_c)] / (F w(0))^n / (n! C_H2)     for H2,
         det[omega(y_b / x_c)] / prod_j M w(j) / (n! C_G)   for G,
         (C_M(1)^n / (n! C_M)) det[ n=1 group integrals ]   chiral.
    """
    x = np.sort(np.atleast_1d(np.asarray(x, dtype=float)))
    y = np.sort(np.atleast_1d(np.asarray(y, dtype=float)))
    n = space.n
    if x.size != n or y.size != n:
        raise ValueError(f"need {n} points in x and y")
    ens = Ensemble.polya(space, w, spec)
    c_space = space_constant(space)
    kind = transform_kind_for_space(space)

    if space.kind == SpaceKind.H2:
        pref = vandermonde(y) * vandermonde(x)

        def chunk(rng, m):
            u = haar_unitary(n, rng, m)
            mats = np.einsum("kij,j,klj->kil", u, x.astype(complex), np.conj(u))
            mats = np.diag(y).astype(complex)[None] - mats
            spectra = np.linalg.eigvalsh(mats)
            return pref * _spectral_density_ratio(space, ens, spectra)

        lhs = _mc_run(chunk, n_samples, seed)
        f0 = complex(univariate_transform(kind, w, 0.0, spec)).real
        mat = w(y[:, None] - x[None, :])
        rhs = float(np.linalg.det(mat)) / f0 ** n / (math.factorial(n) * c_space)
        return lhs, rhs

    if space.kind == SpaceKind.G:
        from .spaces import vandermonde_neg_inverse

        pref = vandermonde(y) * vandermonde_neg_inverse(x)
        ix_root = np.diag(x ** -0.5).astype(complex)
        y_root = np.diag(y ** 0.5).astype(complex)

        def chunk(rng, m):
            u = haar_unitary(n, rng, m)
            g = np.einsum("ij,kjl,lm->kim", ix_root, u, y_root)
            spectra = np.linalg.eigvalsh(np.conj(g).transpose(0, 2, 1) @ g)
            return pref * _spectral_density_ratio(space, ens, spectra)

        lhs = _mc_run(chunk, n_samples, seed)
        denom = np.prod([complex(univariate_transform(kind, w, float(j), spec)).real
                         for j in range(1, n + 1)])
        mat = w(y[:, None] / x[None, :])
        rhs = float(np.linalg.det(mat)) / denom / (math.factorial(n) * c_space)
        return lhs, rhs

    # chiral classes
    root_x, root_y = np.sqrt(x), np.sqrt(y)
    pref = vandermonde(y) * vandermonde(x)

    if space.kind == SpaceKind.MNU:
        nu_i = int(space.nu)

        def chunk(rng, m):
            k1 = haar_unitary(n, rng, m)
            k2 = haar_unitary(n + nu_i, rng, m)
            block_x = _chiral_block(space, root_x)
            rotated = np.einsum("kij,jl,kml->kim", k1, block_x,
                                np.conj(k2))
            block = _chiral_block(space, root_y)[None] - rotated
            gram = block @ np.conj(block).transpose(0, 2, 1)
            spectra = np.maximum(np.linalg.eigvalsh(gram), 1e-300)
            return pref * _spectral_density_ratio(space, ens, spectra)
    else:
        from .spaces import embed_iota

        iota_x = embed_iota(space, x)
        iota_y = embed_iota(space, y)
        dim = space.ambient_dim
        use_orth = space.kind in (SpaceKind.H1_EVEN, SpaceKind.H1_ODD)

        def chunk(rng, m):
            k = (haar_orthogonal(dim, rng, m).astype(complex) if use_orth
                 else haar_symplectic(dim, rng, m))
            mats = iota_y[None] - np.einsum("kij,jl,kml->kim", k, iota_x, np.conj(k))
            eigs = np.linalg.eigvalsh(mats)
            spectra = np.sort(eigs[:, -n:] ** 2, axis=1)
            return pref * _spectral_density_ratio(space, ens, spectra)

    lhs = _mc_run(chunk, n_samples, seed)
    space1 = MatrixSpace(space.kind, 1, space.nu)
    c_m1 = space_constant(space1)
    h_spline, s_max = _hankel_transform_spline(w, float(space.nu), spec)
    h0 = float(h_spline(0.0))
    mat = np.array([[_m1_entry(space, h_spline, s_max, h0, yb, xc, spec)
                     for xc in x] for yb in y])
    rhs = (c_m1 ** n / (math.factorial(n) * c_space)) * float(np.linalg.det(mat))
    return lhs, rhs


# ---------------------------------------------------------------------------
# matrix-ensemble sampling
# ---------------------------------------------------------------------------

def _gue_batch(n: int, eps: float, rng: np.random.Generator, m: int) -> np.ndarray:
    """(m, n, n) Hermitian Gaussians with density prop exp(-tr y^2 / (2 eps))."""
    re = rng.standard_normal((m, n, n)) * math.sqrt(eps / 4.0)
    im = rng.standard_normal((m, n, n)) * math.sqrt(eps / 4.0)
    z = re + 1j * im
    h = z + np.conj(z).transpose(0, 2, 1)  # diagonal ~ N(0, eps), offdiag var eps/2
    return h


def _complex_rect_batch(n: int, m_cols: int, var: float,
                        rng: np.random.Generator, m: int) -> np.ndarray:
    """(m, n, m_cols) complex Gaussians with E|g_ij|^2 = var."""
    sd = math.sqrt(var / 2.0)
    return (rng.standard_normal((m, n, m_cols)) * sd
            + 1j * rng.standard_normal((m, n, m_cols)) * sd)


def _antisym_batch(dim: int, eps: float, rng: np.random.Generator, m: int) -> np.ndarray:
    """(m, dim, dim) Hermitian i*A, A real antisymmetric, density
    prop exp(-tr y^2 / (2 eps))."""
    g = rng.standard_normal((m, dim, dim)) * math.sqrt(eps / 2.0)
    a = g - g.transpose(0, 2, 1)
    a *= 1.0 / math.sqrt(2.0)  # each entry back to sd sqrt(eps/2)
    return 1j * a


def _h4_batch(n: int, eps: float, rng: np.random.Generator, m: int) -> np.ndarray:
    """(m, 2n, 2n) Hermitian anti-self-dual [[H, S], [S*, -H^T]] Gaussians.

    tr y^2 = 2 tr H^2 + 2 tr S S*, so the H block is a GUE with half the
    variance parameter and S is complex symmetric."""
    h = _gue_batch(n, eps / 2.0, rng, m)
    z = rng.standard_normal((m, n, n)) + 1j * rng.standard_normal((m, n, n))
    s = (z + z.transpose(0, 2, 1)) * math.sqrt(eps / 8.0)
    top = np.concatenate([h, s], axis=2)
    bot = np.concatenate([np.conj(s).transpose(0, 2, 1), -h.transpose(0, 2, 1)], axis=2)
    return np.concatenate([top, bot], axis=1)


def _sample_matrices(space: MatrixSpace, family: str, params: dict,
                     rng: np.random.Generator, m: int) -> np.ndarray:
    """Raw matrix draws (ambient representation) for a family on a space."""
    n = space.n
    if family == "gaussian":
        eps = float(params.get("eps", 1.0))
        if space.kind == SpaceKind.H2:
            return _gue_batch(n, eps, rng, m)
        if space.kind == SpaceKind.MNU:
            return _complex_rect_batch(n, n + int(space.nu), eps, rng, m)
        if space.kind == SpaceKind.H1_EVEN:
            return _antisym_batch(2 * n, eps, rng, m)
        if space.kind == SpaceKind.H1_ODD:
            return _antisym_batch(2 * n + 1, eps, rng, m)
        if space.kind == SpaceKind.H4:
            return _h4_batch(n, eps, rng, m)
        raise ValueError("gaussian family needs an additive space")
    if family == "laguerre":
        if space.kind != SpaceKind.H2:
            raise ValueError("laguerre family lives on the Hermitian space")
        nu = int(params.get("nu", 0))
        g = _complex_rect_batch(n, n + nu, 1.0, rng, m)
        return g @ np.conj(g).transpose(0, 2, 1)
    if family == "ginibre":
        if space.kind != SpaceKind.G:
            raise ValueError("ginibre family lives on the multiplicative space")
        nu = int(params.get("nu", 0))
        return _complex_rect_batch(n, n + nu, 1.0, rng, m)
    if family == "jacobi":
        if space.kind not in (SpaceKind.G, SpaceKind.MNU):
            raise ValueError("jacobi family needs G or Mnu")
        nu = int(params.get("nu", space.nu if space.kind == SpaceKind.MNU else 0))
        mu = int(params.get("mu", 1))
        big = 2 * n + nu + mu
        u = haar_unitary(big, rng, m)
        return u[:, :n, : n + nu]
    raise ValueError(f"unknown family {family!r}")


def _spectra_of(space: MatrixSpace, mats: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues (H2) or squared singular values (other kinds)."""
    n = space.n
    if space.kind == SpaceKind.H2:
        if mats.shape[-1] != n:  # Wishart product already Hermitian n x n
            raise ValueError("bad matrix shape")
        return np.sort(np.linalg.eigvalsh(mats), axis=1)
    if space.kind in (SpaceKind.G, SpaceKind.MNU):
        gram = mats @ np.conj(mats).transpose(0, 2, 1)
        return np.sort(np.linalg.eigvalsh(gram), axis=1)
    eigs = np.linalg.eigvalsh(mats)
    return np.sort(eigs[:, -n:] ** 2, axis=1)


def sample_matrix_ensemble(space: MatrixSpace, family: str, seed: int,
                           size: int = 1, **params) -> np.ndarray:
    """(size, n) sorted spectra of random matrices from a named family.

    gaussian(eps) on the additive spaces, laguerre(nu) on H2, ginibre(nu)
    on G, jacobi(nu, mu) on G / Mnu (truncated-unitary construction).
    """
    out = np.empty((size, space.n))
    done = 0
    chunk_idx = 0
    while done < size:
        m = min(CHUNK, size - done)
        mats = _sample_matrices(space, family, params, _rng(seed, chunk_idx + 1), m)
        out[done:done + m] = _spectra_of(space, mats)
        done += m
        chunk_idx += 1
    return out


def family_weight(space: MatrixSpace, family: str, **params) -> Weight:
    """The derivative-type weight matching :func:`sample_matrix_ensemble`."""
    n = space.n
    if family == "gaussian":
        eps = float(params.get("eps", 1.0))
        if space.kind == SpaceKind.H2:
            return scale_argument(make_family("gaussian_shifted", alpha=0.0),
                                  math.sqrt(eps))
        if space.is_chiral:
            return make_family("gaussian_radial", nu=float(space.nu), eps=eps)
        raise ValueError("gaussian family needs an additive space")
    if family == "laguerre":
        return make_family("laguerre_h2", n=n, nu=float(params.get("nu", 0)))
    if family == "ginibre":
        return make_family("ginibre", nu=float(params.get("nu", 0)))
    if family == "jacobi":
        nu = params.get("nu", space.nu if space.kind == SpaceKind.MNU else 0)
        mu = params.get("mu", 1)
        return make_family("jacobi", n=n, mu=float(mu), nu=float(nu))
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# empirical convolution checks
# ---------------------------------------------------------------------------

def ks_distance(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov distance between an empirical sample and a CDF."""
    xs = np.sort(np.asarray(samples, dtype=float).ravel())
    n = xs.size
    f = np.asarray(cdf(xs))
    upper = np.max(np.abs(np.arange(1, n + 1) / n - f))
    lower = np.max(np.abs(np.arange(0, n) / n - f))
    return float(max(upper, lower))


def _marginal_cdf(ens: Ensemble, samples: np.ndarray,
                  grid_size: int = 1500) -> Callable[[np.ndarray], np.ndarray]:
    """CDF of the one-point marginal density on an adaptive grid."""
    lo = float(np.min(samples))
    hi = float(np.max(samples))
    pad = 0.1 * (hi - lo)
    lo_dom, hi_dom = ens.space.spectral_domain
    lo = max(lo - pad, lo_dom + 1e-12 if math.isfinite(lo_dom) else lo - pad)
    hi = hi + pad
    grid = np.linspace(lo, hi, grid_size)
    dens = np.asarray(marginal_density(ens, grid))
    dens = np.maximum(dens, 0.0)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    total = cum[-1]
    if total <= 0:
        raise ValueError("marginal density integrated to zero")
    cum /= total

    def cdf(x):
        return np.interp(x, grid, cum, left=0.0, right=1.0)

    return cdf


def empirical_convolution_check(space: MatrixSpace, family1: str, family2: str,
                                n_samples: int, seed: int,
                                params1: Optional[dict] = None,
                                params2: Optional[dict] = None,
                                spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """KS distance between spectra of X1 + X2 (X1 X2 on G) and the
    quadrature marginal of the convolved derivative-type ensemble."""
    params1 = params1 or {}
    params2 = params2 or {}
    n = space.n

    spectra = np.empty((n_samples, n))
    done = 0
    chunk_idx = 0
    while done < n_samples:
        m = min(CHUNK, n_samples - done)
        rng = _rng(seed, chunk_idx + 1)
        m1 = _sample_matrices(space, family1, params1, rng, m)
        m2 = _sample_matrices(space, family2, params2, rng, m)
        combined = (m1 @ m2) if space.kind == SpaceKind.G else (m1 + m2)
        spectra[done:done + m] = _spectra_of(space, combined)
        done += m
        chunk_idx += 1

    w1 = family_weight(space, family1, **params1)
    w2 = family_weight(space, family2, **params2)
    w12 = convolve_polya(space, w1, w2, spec)
    ens = Ensemble.polya(space, w12, spec)
    cdf = _marginal_cdf(ens, spectra)
    return ks_distance(spectra, cdf)
