"""Univariate and multivariate Fourier, Hankel and Mellin transforms.

Conventions (all on the induced spectral side):

* Fourier   F f(s)     = int f(x) e^(i s x) dx                 on R,
* Hankel    H_nu f(s)  = Gamma(nu+1) int f(x) J_nu(2 sqrt(xs)) / (xs)^(nu/2) dx
                         = int f(x) phi_nu(x s) dx             on R_+,
* Mellin    M f(s)     = int f(x) x^(s-1) dx                   on R_+,

where phi_nu(z) = Gamma(nu+1) J_nu(2 sqrt z) / z^(nu/2) is entire with
phi_nu(0) = 1, so H_nu f(0) = int f.  The Hankel transform is normalised
so that it multiplies under the induced additive convolution of the
chiral matrix classes, exactly as the Fourier transform does on the
Hermitian class and the Mellin transform does on the multiplicative one.

For derivative-type (Polya) ensembles the multivariate transforms
factorise into products of univariate ones; for general polynomial
ensembles they are determinantal.  Coincident transform arguments are
handled by confluent divided differences (the singularities are
removable).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma as sp_gamma
from scipy.special import gammaln, iv, jv

from .spaces import MatrixSpace, SpaceKind
from .weights import Weight

__all__ = [
    "QuadratureSpec",
    "TransformKind",
    "DivergentIntegralError",
    "bessel_phi",
    "univariate_transform",
    "univariate_transform_sderiv",
    "laplace_transform",
    "inverse_hankel",
    "mv_transform_polya",
    "mv_transform_polynomial",
    "det_over_vandermonde",
    "andreief_check",
    "transform_kind_for_space",
]

DEFAULT_MAX_OSC_SEGMENTS = 4000


class DivergentIntegralError(ValueError):
    """A transform integral failed to converge (or lies outside its strip)."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    tail_cutoff_strategy: str = "doubling"  # or "exponential_map"

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.tail_cutoff_strategy not in ("doubling", "exponential_map"):
            raise ValueError(f"unknown tail strategy {self.tail_cutoff_strategy!r}")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class TransformKind:
    """Selector among Fourier, Hankel(nu) and Mellin."""

    name: str  # "fourier" | "hankel" | "mellin"
    nu: float = 0.0

    def __post_init__(self):
        if self.name not in ("fourier", "hankel", "mellin"):
            raise ValueError(f"unknown transform kind {self.name!r}")
        if self.name == "hankel" and self.nu < -0.5:
            raise ValueError("Hankel order must be >= -1/2")

    @classmethod
    def fourier(cls) -> "TransformKind":
        return cls("fourier")

    @classmethod
    def hankel(cls, nu: float) -> "TransformKind":
        return cls("hankel", float(nu))

    @classmethod
    def mellin(cls) -> "TransformKind":
        return cls("mellin")


def transform_kind_for_space(space: MatrixSpace) -> TransformKind:
    """The transform that multiplies under the space's convolution."""
    if space.kind == SpaceKind.H2:
        return TransformKind.fourier()
    if space.kind == SpaceKind.G:
        return TransformKind.mellin()
    return TransformKind.hankel(float(space.nu))


# ---------------------------------------------------------------------------
# Bessel kernel
# ---------------------------------------------------------------------------

def bessel_phi(nu: float, z):
    """phi_nu(z) = Gamma(nu+1) J_nu(2 sqrt z) / z^(nu/2), entire in z.

    Real z of either sign uses scipy's J_nu / I_nu; complex z falls back
    to the defining power series (safe for |z| <= 40) and to mpmath
    beyond that.
    """
    z_arr = np.asarray(z)
    if np.iscomplexobj(z_arr):
        return _phi_complex(nu, z_arr)
    z_arr = np.atleast_1d(np.asarray(z_arr, dtype=float))
    out = np.empty_like(z_arr)
    small = np.abs(z_arr) < 1e-6
    pos = (z_arr > 0) & ~small
    neg = (z_arr < 0) & ~small
    if np.any(small):
        t = z_arr[small]
        out[small] = 1.0 - t / (nu + 1.0) + t * t / (2.0 * (nu + 1.0) * (nu + 2.0))
    if np.any(pos):
        t = z_arr[pos]
        out[pos] = sp_gamma(nu + 1.0) * jv(nu, 2.0 * np.sqrt(t)) / t ** (nu / 2.0)
    if np.any(neg):
        t = -z_arr[neg]
        out[neg] = sp_gamma(nu + 1.0) * iv(nu, 2.0 * np.sqrt(t)) / t ** (nu / 2.0)
    if np.asarray(z).ndim == 0:
        return float(out[0])
    return out


def _phi_complex(nu: float, z):
    scalar = np.asarray(z).ndim == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(z)
    flat_in, flat_out = z.ravel(), out.ravel()
    for i, zi in enumerate(flat_in):
        if abs(zi) <= 40.0:
            term = 1.0 + 0.0j
            acc = term
            for k in range(1, 200):
                term *= -zi / (k * (nu + k))
                acc += term
                if abs(term) < 1e-16 * max(1.0, abs(acc)):
                    break
            flat_out[i] = acc
        else:
            import mpmath

            w = 2.0 * mpmath.sqrt(mpmath.mpc(zi))
            val = mpmath.gamma(nu + 1) * mpmath.besselj(nu, w) / mpmath.mpc(zi) ** (nu / 2.0)
            flat_out[i] = complex(val)
    return complex(flat_out[0]) if scalar else out


def _hankel_inverse_kernel(nu: float, z):
    """z^(nu/2) J_nu(2 sqrt z) for z >= 0 (the self-reciprocal kernel)."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    small = z < 1e-8
    if np.any(small):
        out[small] = z[small] ** nu / sp_gamma(nu + 1.0)
    big = ~small
    if np.any(big):
        out[big] = z[big] ** (nu / 2.0) * jv(nu, 2.0 * np.sqrt(z[big]))
    return out


def _bessel_zero(nu: float, k: int) -> float:
    """McMahon approximation of the k-th positive zero of J_nu."""
    beta = (k + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    return beta - (mu - 1.0) / (8.0 * beta)


# ---------------------------------------------------------------------------
# quadrature engine
# ---------------------------------------------------------------------------

def _quad_c(f, a, b, spec: QuadratureSpec):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                        limit=spec.max_subdivisions, complex_func=True)
    return complex(val), abs(err)


def _euler_accelerated(partial_terms, spec: QuadratureSpec):
    """Sum a (eventually alternating) series of segment integrals by
    repeated averaging of its partial sums.  Returns (value, converged)."""
    psums: list[complex] = []
    total = 0.0 + 0.0j
    prev_est: Optional[complex] = None
    for term in partial_terms:
        total += term
        psums.append(total)
        if len(psums) >= 4:
            arr = np.array(psums[-24:], dtype=complex)
            while arr.size > 1:
                arr = 0.5 * (arr[:-1] + arr[1:])
            est = arr[0]
            if prev_est is not None and abs(est - prev_est) <= max(
                    spec.abs_tol, spec.rel_tol * abs(est)):
                return est, True
            prev_est = est
    return (prev_est if prev_est is not None else total), False


def _tail_doubling(f, a, spec: QuadratureSpec, sign: int = +1):
    """Integrate f on [a, +inf) (sign=+1) or (-inf, a] (sign=-1) by windows."""
    if spec.tail_cutoff_strategy == "exponential_map":
        def g(t):
            x = a + sign * (math.exp(t) - 1.0)
            return f(x) * math.exp(t) * sign

        total, _ = _quad_c(g, 0.0, 1.0, spec)
        span = 1.0
    else:
        total, _ = _quad_c(f, a, a + sign * 1.0, spec) if sign > 0 else _quad_c(f, a - 1.0, a, spec)
        span = 1.0
    increments: list[float] = []
    for _ in range(60):
        if spec.tail_cutoff_strategy == "exponential_map":
            def g(t):
                x = a + sign * (math.exp(t) - 1.0)
                return f(x) * math.exp(t) * sign

            inc, _ = _quad_c(g, span, 2.0 * span, spec)
        else:
            lo = a + sign * span
            hi = a + sign * 2.0 * span
            inc, _ = _quad_c(f, min(lo, hi), max(lo, hi), spec)
        total += inc
        increments.append(abs(inc))
        span *= 2.0
        if abs(inc) <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return total, True
        if len(increments) >= 3 and increments[-1] > increments[-2] > increments[-3]:
            return total, False
    return total, False


def _integral_over_support(f, support, spec: QuadratureSpec,
                           osc_breaks: Optional[Callable[[int], float]] = None):
    """Integrate a complex-valued f over the support.

    Infinite ranges first try QUADPACK's native infinite-interval rule and
    fall back to zero-to-zero segments with Euler acceleration when
    ``osc_breaks`` supplies oscillation break points, or to doubling
    windows otherwise.
    """
    lo, hi = support
    if math.isfinite(lo) and math.isfinite(hi):
        val, _ = _quad_c(f, lo, hi, spec)
        return val

    val, err = _quad_c(f, lo, hi, spec)
    if err <= 50.0 * max(spec.abs_tol, spec.rel_tol * abs(val)) and abs(val) < 1e100:
        return val

    # tails need care
    if osc_breaks is not None:
        anchor = lo if math.isfinite(lo) else 0.0
        head = 0.0 + 0.0j
        if not math.isfinite(lo):
            head_l, ok_l = _tail_doubling(f, anchor, spec, sign=-1)
            if not ok_l:
                raise DivergentIntegralError("left tail did not converge")
            head += head_l
        breaks = [anchor]
        k = 1
        while len(breaks) < DEFAULT_MAX_OSC_SEGMENTS:
            b = osc_breaks(k)
            k += 1
            if b > breaks[-1]:
                breaks.append(b)
            if len(breaks) > 4 and b > breaks[1] * 2 ** 30:
                break

        def segments():
            for aa, bb in zip(breaks[:-1], breaks[1:]):
                seg, _ = _quad_c(f, aa, bb, spec)
                yield seg

        tail, ok = _euler_accelerated(segments(), spec)
        if not ok:
            raise DivergentIntegralError(
                f"oscillatory tail not converged after {len(breaks) - 1} segments; "
                f"partial value {head + tail}")
        return head + tail

    total = 0.0 + 0.0j
    if not math.isfinite(lo):
        anchor = 0.0 if not math.isfinite(hi) else hi
        part, ok = _tail_doubling(f, anchor, spec, sign=-1)
        if not ok:
            raise DivergentIntegralError("integral did not converge on the left tail")
        total += part
    if not math.isfinite(hi):
        anchor = 0.0 if not math.isfinite(lo) else lo
        part, ok = _tail_doubling(f, anchor, spec, sign=+1)
        if not ok:
            raise DivergentIntegralError("integral did not converge on the right tail")
        total += part
    return total


# ---------------------------------------------------------------------------
# univariate transforms
# ---------------------------------------------------------------------------

def _fourier(w: Weight, s: complex, spec: QuadratureSpec, x_power: int = 0) -> complex:
    s = complex(s)

    def f(x):
        return w(x) * (1j * x) ** x_power * np.exp(1j * s * x)

    omega = abs(s.real)
    breaks = None
    if omega > 0:
        anchor = w.support[0] if math.isfinite(w.support[0]) else 0.0

        def breaks(k, _a=anchor, _w=omega):
            return _a + k * math.pi / _w

    return _integral_over_support(f, w.support, spec, osc_breaks=breaks)


def _mellin(w: Weight, s: complex, spec: QuadratureSpec, log_power: int = 0) -> complex:
    s = complex(s)
    lo, hi = w.support
    if lo < 0:
        raise ValueError("Mellin transform requires support in (0, inf)")

    def f(x):
        return w(x) * np.log(x) ** log_power * x ** (s - 1.0)

    # split at 1 so the potential power singularity at 0 sits at an endpoint
    hi_inner = min(hi, 1.0)
    val = 0.0 + 0.0j
    if hi_inner > lo:
        part, _ = _quad_c(f, lo, hi_inner, spec)
        val += part
    if hi > 1.0:
        val += _integral_over_support(f, (max(lo, 1.0), hi), spec)
    if not np.isfinite(val):
        raise DivergentIntegralError(f"Mellin integral divergent at s={s}")
    return val


def _hankel(w: Weight, nu: float, s, spec: QuadratureSpec, s_deriv: int = 0) -> complex:
    s = complex(s)

    def f(x):
        return w(x) * x ** s_deriv * _phi_deriv(nu, x * s, s_deriv)

    if s.imag != 0.0:
        return _integral_over_support(f, w.support, spec)

    s_re = s.real
    if s_re <= 0.0:
        # s = 0 is the plain integral; s < 0 continues through I_nu (grows,
        # so convergence is the caller's responsibility)
        def f_real(x):
            return w(x) * x ** s_deriv * _phi_deriv(nu, x * s_re, s_deriv)

        return _integral_over_support(f_real, w.support, spec)

    def f_pos(x):
        return w(x) * x ** s_deriv * _phi_deriv(nu, x * s_re, s_deriv)

    def breaks(k, _s=s_re, _nu=nu):
        return _bessel_zero(_nu + s_deriv, k) ** 2 / (4.0 * _s)

    return _integral_over_support(f_pos, w.support, spec, osc_breaks=breaks)


def _phi_deriv(nu: float, z, k: int):
    """k-th derivative of phi_nu: phi_nu^(k)(z) = (-1)^k phi_(nu+k)(z)
    Gamma(nu+1)/Gamma(nu+k+1)."""
    if k == 0:
        return bessel_phi(nu, z)
    factor = (-1.0) ** k * math.exp(gammaln(nu + 1.0) - gammaln(nu + k + 1.0))
    return factor * bessel_phi(nu + k, z)


def _phi_deriv_at_zero(nu: float, k: int) -> float:
    return (-1.0) ** k * math.exp(gammaln(nu + 1.0) - gammaln(nu + k + 1.0))


def univariate_transform(kind: TransformKind, f: Weight, s,
                         spec: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """Fourier, Hankel or Mellin transform of a weight at argument s."""
    if kind.name == "fourier":
        return _fourier(f, s, spec)
    if kind.name == "mellin":
        return _mellin(f, s, spec)
    return _hankel(f, kind.nu, s, spec)


def univariate_transform_sderiv(kind: TransformKind, f: Weight, s, k: int,
                                spec: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """k-th derivative of the transform with respect to s (for confluent
    multivariate arguments)."""
    if k == 0:
        return univariate_transform(kind, f, s, spec)
    if kind.name == "fourier":
        return _fourier(f, s, spec, x_power=k)
    if kind.name == "mellin":
        return _mellin(f, s, spec, log_power=k)
    return _hankel(f, kind.nu, s, spec, s_deriv=k)


def laplace_transform(f: Weight, s: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Two-sided Laplace transform int f(x) e^(-s x) dx over the support."""

    def g(x):
        fx = f(x)
        if np.ndim(fx) == 0:
            return 0.0 if fx == 0.0 else fx * math.exp(-s * float(x))
        out = np.zeros_like(fx)
        nz = fx != 0.0
        out[nz] = fx[nz] * np.exp(-s * np.asarray(x, dtype=float)[nz])
        return out

    return float(np.real(_integral_over_support(g, f.support, spec)))


def inverse_hankel(F: Callable[[np.ndarray], np.ndarray], nu: float, x: float,
                   spec: QuadratureSpec = DEFAULT_QUAD,
                   s_max: Optional[float] = None) -> float:
    """Inverse of the Hankel transform at a point x > 0.

    f(x) = (1/Gamma(nu+1)) int_0^inf F(s) (xs)^(nu/2) J_nu(2 sqrt(xs)) ds.
    ``s_max`` truncates the integral when the caller knows F's support.
    """
    x = float(x)
    if x < 0:
        raise ValueError("x must be non-negative")
    pref = 1.0 / sp_gamma(nu + 1.0)

    def f(s):
        return pref * np.asarray(F(s)) * _hankel_inverse_kernel(nu, x * s)

    if s_max is not None:
        val, _ = _quad_c(f, 0.0, s_max, spec)
        return float(np.real(val))
    if x == 0.0:
        val = _integral_over_support(f, (0.0, math.inf), spec)
        return float(np.real(val))

    def breaks(k, _x=x, _nu=nu):
        return _bessel_zero(_nu, k) ** 2 / (4.0 * _x)

    val = _integral_over_support(f, (0.0, math.inf), spec, osc_breaks=breaks)
    return float(np.real(val))


# ---------------------------------------------------------------------------
# determinants with confluent divided differences
# ---------------------------------------------------------------------------

def det_over_vandermonde(column_fn: Callable[[int, complex, int], complex],
                         s: Sequence[complex],
                         coincidence_tol: float = 1e-12) -> complex:
    """det[g_b(s_c)] / Delta_n(s) via a divided-difference table.

    ``column_fn(b, s_value, k)`` must return the k-th derivative of g_b at
    s_value (k = 0 for plain values).  Coincident arguments are evaluated
    by the confluent limit, where equal nodes pull in derivatives.
    """
    s = np.asarray(s, dtype=complex)
    n = s.size
    order = np.lexsort((s.imag, s.real))
    nodes = s[order]
    scale = max(1.0, float(np.max(np.abs(nodes))))

    mat = np.empty((n, n), dtype=complex)
    for b in range(n):
        # dd[i] holds the divided difference over nodes[j..j+i] column-wise;
        # build the standard triangular table with confluent entries.
        table = np.empty((n, n), dtype=complex)
        # repetition count for confluent entries
        for j in range(n):
            table[0, j] = column_fn(b, nodes[j], 0)
        for i in range(1, n):
            for j in range(n - i):
                lo, hi = nodes[j], nodes[j + i]
                if abs(hi - lo) <= coincidence_tol * scale:
                    table[i, j] = column_fn(b, nodes[j], i) / math.factorial(i)
                else:
                    table[i, j] = (table[i - 1, j + 1] - table[i - 1, j]) / (hi - lo)
        mat[b, :] = table[:, 0]
    return complex(np.linalg.det(mat))


def _vdm_phase_ratio(s: np.ndarray, variant: str) -> complex:
    """Delta_n(s) / Delta_n(variant(s)) for variant in {identity, i*s, -s}."""
    n = len(s)
    m = n * (n - 1) // 2
    if variant == "is":
        return (1.0 / 1j) ** m
    if variant == "neg":
        return (-1.0) ** m
    return 1.0 + 0.0j


# ---------------------------------------------------------------------------
# multivariate transforms
# ---------------------------------------------------------------------------

def mv_transform_polya(space: MatrixSpace, w: Weight, s: Sequence[complex],
                       spec: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """Multivariate transform of a derivative-type ensemble: a product of
    normalised univariate transforms."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    n = space.n
    if s.size != n:
        raise ValueError(f"expected {n} transform arguments, got {s.size}")
    kind = transform_kind_for_space(space)

    if space.kind == SpaceKind.H2:
        denom = univariate_transform(kind, w, 0.0, spec)
        if abs(denom) < 1e-300:
            raise ValueError("degenerate ensemble: F w(0) = 0")
        return complex(np.prod([univariate_transform(kind, w, sj, spec) for sj in s]) / denom ** n)

    if space.kind == SpaceKind.G:
        shift = (n - 1) / 2.0
        denoms = [univariate_transform(kind, w, float(j), spec) for j in range(1, n + 1)]
        if any(abs(d) < 1e-300 for d in denoms):
            raise ValueError("degenerate ensemble: M w(j) = 0")
        num = np.prod([univariate_transform(kind, w, sj - shift, spec) for sj in s])
        return complex(num / np.prod(denoms))

    denom = univariate_transform(kind, w, 0.0, spec)
    if abs(denom) < 1e-300:
        raise ValueError("degenerate ensemble: H w(0) = 0")
    return complex(np.prod([univariate_transform(kind, w, sj, spec) for sj in s]) / denom ** n)


def mv_transform_polynomial(space: MatrixSpace, ws: Sequence[Weight],
                            s: Sequence[complex],
                            spec: QuadratureSpec = DEFAULT_QUAD,
                            norm: Optional[float] = None) -> complex:
    """Multivariate transform of a polynomial ensemble (determinantal form).

    ``norm`` is the ensemble normalisation constant C_n[w]; if omitted it
    is computed from the moment Gram determinant.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    n = space.n
    if len(ws) != n or s.size != n:
        raise ValueError(f"need {n} weights and {n} arguments")
    if norm is None:
        from .ensembles import normalize_polynomial

        norm = normalize_polynomial(space, ws, spec)
    kind = transform_kind_for_space(space)

    if space.kind == SpaceKind.H2:
        pref = norm * np.prod([math.factorial(j) for j in range(1, n + 1)])
        ratio = det_over_vandermonde(
            lambda b, sv, k: univariate_transform_sderiv(kind, ws[b], sv, k, spec), s)
        return complex(pref * ratio * _vdm_phase_ratio(s, "is"))

    if space.kind == SpaceKind.G:
        shift = (n - 1) / 2.0
        pref = norm * np.prod([math.factorial(j) for j in range(1, n + 1)])
        ratio = det_over_vandermonde(
            lambda b, sv, k: univariate_transform_sderiv(kind, ws[b], sv - shift, k, spec), s)
        return complex(pref * ratio)

    nu = float(space.nu)
    log_pref = sum(gammaln(j + 1) + gammaln(j + nu) - gammaln(1 + nu)
                   for j in range(1, n + 1))
    pref = norm * math.exp(log_pref)
    ratio = det_over_vandermonde(
        lambda b, sv, k: univariate_transform_sderiv(kind, ws[b], sv, k, spec), s)
    return complex(pref * ratio * _vdm_phase_ratio(s, "neg"))


# ---------------------------------------------------------------------------
# Andreief integration check
# ---------------------------------------------------------------------------

def _effective_cutoff(fns, lo: float, hi: float) -> tuple[float, float]:
    """Shrink an infinite domain to where the functions carry mass."""
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    scale = 1.0
    probe = np.linspace(0, 1, 17)

    def mass(a, b):
        xs = a + (b - a) * probe
        return max(float(np.max(np.abs(f(xs)))) for f in fns)

    ref = None
    a_eff, b_eff = lo, hi
    if not math.isfinite(hi):
        x = max(1.0, lo if math.isfinite(lo) else 0.0)
        ref = mass(x - 1.0 if math.isfinite(lo) is False else lo, x)
        ref = max(ref, 1e-300)
        while mass(x, 2 * x) > 1e-14 * ref and x < 1e9:
            x *= 2
        b_eff = 2 * x
    if not math.isfinite(lo):
        x = -1.0
        ref = ref or max(mass(-1.0, 1.0), 1e-300)
        while mass(2 * x, x) > 1e-14 * ref and x > -1e9:
            x *= 2
        a_eff = 2 * x
    return a_eff, b_eff


def andreief_check(phis: Sequence[Callable], psis: Sequence[Callable],
                   domain: tuple[float, float],
                   n_nodes: int = 120) -> tuple[float, float]:
    """Both sides of the Andreief identity for n <= 3.

    lhs = (1/n!) int det[phi_b(x_c)] det[psi_b(x_c)] dx  (n-fold quadrature),
    rhs = det[ int phi_b psi_c ].

    The caller asserts closeness; nothing is asserted here.
    """
    n = len(phis)
    if len(psis) != n:
        raise ValueError("phi and psi lists must have equal length")
    if n > 3:
        raise ValueError("n-fold quadrature supported for n <= 3 only")

    lo, hi = _effective_cutoff(list(phis) + list(psis), *domain)
    x_nodes, x_weights = np.polynomial.legendre.leggauss(n_nodes)
    x_nodes = 0.5 * (hi - lo) * (x_nodes + 1.0) + lo
    x_weights = 0.5 * (hi - lo) * x_weights

    phi_vals = np.array([p(x_nodes) for p in phis])  # (n, m)
    psi_vals = np.array([p(x_nodes) for p in psis])

    # rhs Gram matrix
    gram = np.einsum("bm,cm,m->bc", phi_vals, psi_vals, x_weights)
    rhs = float(np.linalg.det(gram))

    # lhs on the tensor grid
    idx = np.indices((n_nodes,) * n).reshape(n, -1)  # (n, m^n)
    wprod = np.prod(x_weights[idx], axis=0)
    phi_mats = np.transpose(phi_vals[:, idx], (2, 0, 1))  # (m^n, n, n)
    psi_mats = np.transpose(psi_vals[:, idx], (2, 0, 1))
    dets = np.linalg.det(phi_mats) * np.linalg.det(psi_mats)
    lhs = float(np.dot(dets, wprod) / math.factorial(n))
    return lhs, rhs
