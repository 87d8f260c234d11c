"""Polynomial and derivative-type spectral ensembles and their convolutions.

A polynomial ensemble on one of the matrix classes has the joint spectral
density

    p(a) = C_n[w] * Delta_n(a) * det[ w_b(a_c) ],

built from n one-point weights.  A Polya (derivative-type) ensemble uses
the induced weights w_j of a single weight, in which case the
normalisation constant is a closed product of univariate transform values:

    H2     C_n = prod_j 1 / (j! F w(0)),
    G      C_n = prod_j 1 / (j! M w(j)),
    chiral C_n = prod_j Gamma(1+nu) / (j! Gamma(j+nu) H_nu w(0)).

Sums (H2, chiral) and products (G) of independent invariant random
matrices act on these ensembles weight-by-weight: the induced spectral
convolution of two derivative-type ensembles is again derivative-type
with the univariate convolution of the weights, and convolving a
polynomial ensemble with a derivative-type one convolves every weight of
the vector.  The chiral ("Hankel") convolution is computed through the
transform product H_nu f * H_nu g, which is its defining property.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gamma as sp_gamma
from scipy.special import gammaln, jv

from .spaces import MatrixSpace, SpaceKind, vandermonde
from .transforms import (
    DEFAULT_QUAD,
    DivergentIntegralError,
    QuadratureSpec,
    TransformKind,
    _integral_over_support,
    _quad_c,
    transform_kind_for_space,
    univariate_transform,
)
from .weights import Weight, apply_derivative_op

__all__ = [
    "Ensemble",
    "PositivityViolationWarning",
    "normalize",
    "normalize_polynomial",
    "joint_density",
    "marginal_density",
    "joint_density_mass",
    "univariate_convolution",
    "convolve_polya",
    "convolve_mixed",
    "weight_moment",
]


class PositivityViolationWarning(UserWarning):
    """A joint density came out negative beyond round-off tolerance."""


# ---------------------------------------------------------------------------
# normalisation
# ---------------------------------------------------------------------------

def normalize(space: MatrixSpace, w: Weight,
              spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Normalisation constant C_n of the derivative-type ensemble (space, w)."""
    n = space.n
    kind = transform_kind_for_space(space)

    if space.kind == SpaceKind.H2:
        t0 = complex(univariate_transform(kind, w, 0.0, spec)).real
        if t0 <= 0:
            raise ValueError(f"vanishing transform F w(0) = {t0}")
        log_c = -n * math.log(t0) - sum(gammaln(j + 1) for j in range(1, n + 1))
        return math.exp(log_c)

    if space.kind == SpaceKind.G:
        log_c = 0.0
        for j in range(1, n + 1):
            tj = complex(univariate_transform(kind, w, float(j), spec)).real
            if tj <= 0:
                raise ValueError(f"vanishing transform M w({j}) = {tj}")
            log_c -= gammaln(j + 1) + math.log(tj)
        return math.exp(log_c)

    nu = float(space.nu)
    t0 = complex(univariate_transform(kind, w, 0.0, spec)).real
    if t0 <= 0:
        raise ValueError(f"vanishing transform H w(0) = {t0}")
    log_c = -n * math.log(t0)
    for j in range(1, n + 1):
        log_c += gammaln(1 + nu) - gammaln(j + 1) - gammaln(j + nu)
    return math.exp(log_c)


def weight_moment(w: Weight, k: int, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """int x^k w(x) dx over the support."""

    def f(x):
        return x ** k * w(x)

    return float(np.real(_integral_over_support(f, w.support, spec)))


def normalize_polynomial(space: MatrixSpace, ws: Sequence[Weight],
                         spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """C_n of a general polynomial ensemble, via the Andreief moment
    determinant  1 / (n! det[ int x^(b-1) w_c ])."""
    n = space.n
    if len(ws) != n:
        raise ValueError(f"need {n} weights, got {len(ws)}")
    gram = np.array([[weight_moment(ws[c], b, spec) for c in range(n)]
                     for b in range(n)])
    det = float(np.linalg.det(gram))
    if det == 0.0 or not math.isfinite(det):
        raise ValueError("moment matrix is singular; ensemble not normalisable")
    return 1.0 / (math.factorial(n) * det)


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------

@dataclass
class Ensemble:
    """A polynomial or derivative-type ensemble with cached normalisation.

    Exactly one of ``weights`` (polynomial form) and ``polya_weight``
    (derivative form) is set.  Immutable after :meth:`norm` first runs;
    the cache is guarded for shared concurrent reads.
    """

    space: MatrixSpace
    weights: Optional[tuple[Weight, ...]] = None
    polya_weight: Optional[Weight] = None
    quad: QuadratureSpec = DEFAULT_QUAD
    _norm: Optional[float] = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if (self.weights is None) == (self.polya_weight is None):
            raise ValueError("set exactly one of weights / polya_weight")
        if self.weights is not None:
            self.weights = tuple(self.weights)
            if len(self.weights) != self.space.n:
                raise ValueError(f"need {self.space.n} weights")

    @classmethod
    def polynomial(cls, space: MatrixSpace, ws: Sequence[Weight],
                   quad: QuadratureSpec = DEFAULT_QUAD) -> "Ensemble":
        return cls(space, weights=tuple(ws), quad=quad)

    @classmethod
    def polya(cls, space: MatrixSpace, w: Weight,
              quad: QuadratureSpec = DEFAULT_QUAD) -> "Ensemble":
        return cls(space, polya_weight=w, quad=quad)

    @property
    def is_polya(self) -> bool:
        return self.polya_weight is not None

    @property
    def norm(self) -> float:
        with self._lock:
            if self._norm is None:
                if self.is_polya:
                    self._norm = normalize(self.space, self.polya_weight, self.quad)
                else:
                    self._norm = normalize_polynomial(self.space, self.weights, self.quad)
            return self._norm

    def induced_weight_values(self, j: int, x) -> np.ndarray:
        """w_j evaluated at x (rows of the determinantal density)."""
        if self.is_polya:
            return apply_derivative_op(self.space, self.polya_weight, j, x)
        return self.weights[j - 1](x)

    def label(self) -> str:
        if self.is_polya:
            return f"PE_{self.space}[{self.polya_weight.label}]"
        return f"PE_{self.space}[{';'.join(w.label for w in self.weights)}]"


def joint_density(e: Ensemble, a: Sequence[float]) -> float:
    """C_n Delta_n(a) det[w_b(a_c)] at a spectral point.

    Values negative beyond round-off scale are reported through a
    :class:`PositivityViolationWarning` (never clipped): the determinantal
    form guarantees positivity only for genuine Polya weights.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    n = e.space.n
    if a.size != n:
        raise ValueError(f"expected {n} spectral values")
    mat = np.empty((n, n))
    for j in range(1, n + 1):
        mat[j - 1, :] = e.induced_weight_values(j, a)
    det = float(np.linalg.det(mat))
    val = e.norm * vandermonde(a) * det
    scale = abs(e.norm) * abs(vandermonde(a)) * math.factorial(n) * \
        float(np.max(np.abs(mat))) ** n
    if val < -10.0 * 1e-9 * max(scale, 1e-300):
        warnings.warn(
            f"joint density negative at {a}: {val:.3e} (scale {scale:.3e})",
            PositivityViolationWarning, stacklevel=2)
    return val


def _marginal_moments(e: Ensemble, n_nodes: int = 400) -> tuple[float, float, float, float]:
    """(B1, A1, B2, A2) with B_j = int w_j and A_j = int y w_j over the
    effective spectral box (n = 2)."""
    lo, hi = e.space.spectral_domain
    lo_eff, hi_eff = _effective_box(e, lo, hi)
    nodes, wts = np.polynomial.legendre.leggauss(n_nodes)
    nodes = 0.5 * (hi_eff - lo_eff) * (nodes + 1.0) + lo_eff
    wts = 0.5 * (hi_eff - lo_eff) * wts
    w1 = np.asarray(e.induced_weight_values(1, nodes))
    w2 = np.asarray(e.induced_weight_values(2, nodes))
    return (float(np.dot(wts, w1)), float(np.dot(wts, nodes * w1)),
            float(np.dot(wts, w2)), float(np.dot(wts, nodes * w2)))


def marginal_density(e: Ensemble, x, n_nodes: int = 400):
    """One-point marginal int p(x, y) dy for n = 2 (the joint density
    itself for n = 1).

    For n = 2 the y-integral collapses to weight moments:
    rho(x) = C [ w1(x)(A2 - x B2) - w2(x)(A1 - x B1) ],
    A_j = int y w_j(y) dy, B_j = int w_j(y) dy.
    """
    n = e.space.n
    if n == 1:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([joint_density(e, [t]) for t in xs])
        return out if np.asarray(x).ndim else float(out[0])
    if n != 2:
        raise ValueError("marginal implemented for n <= 2")
    b1, a1, b2, a2 = _marginal_moments(e, n_nodes)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    w1 = np.asarray(e.induced_weight_values(1, xs))
    w2 = np.asarray(e.induced_weight_values(2, xs))
    out = e.norm * (w1 * (a2 - xs * b2) - w2 * (a1 - xs * b1))
    return out if np.asarray(x).ndim else float(out[0])


def joint_density_mass(e: Ensemble, spec: Optional[QuadratureSpec] = None,
                       n_nodes: int = 160) -> float:
    """Total mass of the joint density by tensor quadrature (n <= 2).

    Uses Gauss-Legendre panels on an adaptively truncated box; for a
    correctly normalised ensemble this returns 1 up to quadrature error.
    """
    n = e.space.n
    spec = spec or e.quad
    lo, hi = e.space.spectral_domain
    lo_eff, hi_eff = _effective_box(e, lo, hi)
    nodes, wts = np.polynomial.legendre.leggauss(n_nodes)
    nodes = 0.5 * (hi_eff - lo_eff) * (nodes + 1.0) + lo_eff
    wts = 0.5 * (hi_eff - lo_eff) * wts

    if n == 1:
        vals = np.array([joint_density(e, [x]) for x in nodes])
        return float(np.dot(vals, wts))
    if n != 2:
        raise ValueError("mass quadrature implemented for n <= 2")

    mat = np.empty((2, len(nodes)))
    for j in (1, 2):
        mat[j - 1] = e.induced_weight_values(j, nodes)
    # p(x,y) = C (y - x)(w1(x) w2(y) - w2(x) w1(y)) on the tensor grid
    x = nodes[:, None]
    y = nodes[None, :]
    det = mat[0][:, None] * mat[1][None, :] - mat[1][:, None] * mat[0][None, :]
    vals = e.norm * (y - x) * det
    return float(wts @ vals @ wts)


def _effective_box(e: Ensemble, lo: float, hi: float) -> tuple[float, float]:
    """Truncate the spectral domain to where the weights carry mass."""

    def total(x):
        return sum(abs(float(np.max(np.abs(e.induced_weight_values(j, np.atleast_1d(x))))))
                   for j in range(1, e.space.n + 1))

    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    scale = max(total(x) for x in (0.0, 0.5, 1.0, 2.0))
    hi_eff = 1.0
    while total(hi_eff) > 1e-14 * scale and hi_eff < 1e6:
        hi_eff *= 2.0
    if math.isfinite(lo):
        return lo, hi_eff
    lo_eff = -1.0
    while total(lo_eff) > 1e-14 * scale and lo_eff > -1e6:
        lo_eff *= 2.0
    return lo_eff, hi_eff


# ---------------------------------------------------------------------------
# univariate convolutions
# ---------------------------------------------------------------------------

def _additive_value(f: Weight, g: Weight, x: float, spec: QuadratureSpec,
                    g_deriv: int = 0) -> float:
    lo = max(f.support[0], x - g.support[1])
    hi = min(f.support[1], x - g.support[0])
    if hi <= lo:
        return 0.0

    def integrand(y):
        fy = f(y)
        gy = g(x - y) if g_deriv == 0 else g.deriv(x - y, g_deriv)
        return fy * gy

    val = _integral_over_support(integrand, (lo, hi), spec)
    return float(np.real(val))


def _multiplicative_value(f: Weight, g: Weight, x: float, spec: QuadratureSpec,
                          g_deriv: int = 0) -> float:
    if x <= 0:
        return 0.0
    glo, ghi = g.support
    lo = max(f.support[0], x / ghi if ghi < math.inf else 0.0)
    hi = min(f.support[1], x / glo if glo > 0 else math.inf)
    if hi <= lo:
        return 0.0

    def integrand(y):
        u = x / y
        gy = g(u) if g_deriv == 0 else g.deriv(u, g_deriv)
        return f(y) * gy * y ** (-1.0 - g_deriv)

    val = _integral_over_support(integrand, (lo, hi), spec)
    return float(np.real(val))


class _HankelProduct:
    """Transform-domain representation of a Hankel convolution.

    Caches H_nu f * H_nu g on a clustered grid with a cubic spline, then
    evaluates values, plain derivatives and operator powers of f *_nu g by
    quadrature against the corresponding inverse kernels.  Thread-safe for
    shared reads after construction.
    """

    def __init__(self, f: Weight, g: Weight, nu: float, spec: QuadratureSpec,
                 n_grid: int = 641):
        from scipy.interpolate import CubicSpline

        self.nu = float(nu)
        self.spec = spec
        kind = TransformKind.hankel(self.nu)

        def product(s: float) -> float:
            tf = complex(univariate_transform(kind, f, s, spec)).real
            tg = complex(univariate_transform(kind, g, s, spec)).real
            return tf * tg

        p0 = product(0.0)
        scale = max(abs(p0), 1e-300)
        s_max = 1.0
        while max(abs(product(s_max)), abs(product(0.7 * s_max))) > 1e-14 * scale:
            s_max *= 2.0
            if s_max > 1e7:
                raise DivergentIntegralError(
                    "transform product does not decay; cannot realise the convolution")
        # quadratic clustering toward s = 0 where the product varies most
        u = np.linspace(0.0, 1.0, n_grid)
        grid = s_max * u ** 2
        vals = np.array([product(s) for s in grid])
        self.s_max = s_max
        self.spline = CubicSpline(grid, vals)
        self._cache: dict[tuple[float, int, int], float] = {}
        self._lock = threading.Lock()

    # kernel d^k/dx^k [(xs)^(nu/2) J_nu(2 sqrt(xs))] = s^k (xs)^((nu-k)/2) J_(nu-k)
    def _integral(self, x: float, k: int, m: int) -> float:
        nu = self.nu
        pref = 1.0 / sp_gamma(nu + 1.0)

        def kernel(s):
            z = x * s
            out = np.zeros_like(z)
            big = z > 1e-12
            if np.any(big):
                out[big] = z[big] ** ((nu - k) / 2.0) * jv(nu - k, 2.0 * np.sqrt(z[big]))
            if np.any(~big) and nu == k:
                out[~big] = 1.0
            return out * s ** k

        def integrand(s):
            s = np.atleast_1d(s)
            return pref * self.spline(s) * (-s) ** m * kernel(s)

        # panel between consecutive Bessel-kernel zeros, Gauss-Legendre each
        from .transforms import _bessel_zero

        breaks = [0.0]
        j = 1
        while True:
            b = _bessel_zero(abs(nu - k), j) ** 2 / (4.0 * x) if x > 0 else self.s_max
            j += 1
            if b >= self.s_max:
                break
            breaks.append(b)
            if len(breaks) > 10_000:
                break
        breaks.append(self.s_max)
        gl_x, gl_w = np.polynomial.legendre.leggauss(24)
        total = 0.0
        for aa, bb in zip(breaks[:-1], breaks[1:]):
            mid, half = 0.5 * (aa + bb), 0.5 * (bb - aa)
            total += half * float(np.dot(gl_w, integrand(mid + half * gl_x)))
        return total

    def lookup(self, x: float, k: int, m: int) -> float:
        key = (float(x), k, m)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        val = self._integral(float(x), k, m)
        with self._lock:
            self._cache[key] = val
        return val


def univariate_convolution(kind: str, f: Weight, g: Weight, x,
                           nu: float = 0.0,
                           spec: QuadratureSpec = DEFAULT_QUAD):
    """Pointwise additive, multiplicative or Hankel convolution.

    * additive        (f * g)(x)  = int f(y) g(x - y) dy
    * multiplicative  (f o g)(x)  = int f(y) g(x / y) dy / y
    * hankel          defined through H_nu(f *_nu g) = H_nu f . H_nu g

    ``x`` may be a scalar or an array; for the hankel kind the transform
    product is built once per call, so prefer array arguments or
    :func:`convolve_polya` for repeated evaluation.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.asarray(x).ndim == 0
    if kind == "additive":
        out = np.array([_additive_value(f, g, t, spec) for t in xs])
    elif kind == "multiplicative":
        out = np.array([_multiplicative_value(f, g, t, spec) for t in xs])
    elif kind == "hankel":
        prod = _HankelProduct(f, g, nu, spec)
        out = np.array([prod.lookup(t, 0, 0) for t in xs])
    else:
        raise ValueError(f"unknown convolution kind {kind!r}")
    return float(out[0]) if scalar else out


def _kind_for_space(space: MatrixSpace) -> str:
    if space.kind == SpaceKind.H2:
        return "additive"
    if space.kind == SpaceKind.G:
        return "multiplicative"
    return "hankel"


def _boundary_smooth(w: Weight) -> bool:
    """True when w vanishes at every finite support endpoint, so that
    derivatives can be moved onto it under a convolution integral."""
    if w.deriv_fn is None and w.op_deriv_fn is None:
        return False
    lo, hi = w.support
    scale = max(abs(w(t)) for t in np.linspace(max(lo, -5), min(hi, 5), 7) if lo < t < hi)
    for edge in (lo, hi):
        if math.isfinite(edge):
            probe = edge + (1e-9 if edge == lo else -1e-9) * max(1.0, abs(edge))
            if abs(w(probe)) > 1e-7 * max(scale, 1e-300):
                return False
    return True


class _MemoScalarFn:
    """Pointwise-memoised scalar function with internal locking."""

    def __init__(self, compute: Callable[[float], float]):
        self._compute = compute
        self._cache: dict[float, float] = {}
        self._lock = threading.Lock()

    def __call__(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xs)
        for i, t in enumerate(xs):
            key = float(t)
            with self._lock:
                hit = key in self._cache
                if hit:
                    out[i] = self._cache[key]
            if not hit:
                val = self._compute(key)
                with self._lock:
                    self._cache[key] = val
                out[i] = val
        return out if np.asarray(x).ndim else float(out[0])


def convolve_polya(space: MatrixSpace, w1: Weight, w2: Weight,
                   spec: QuadratureSpec = DEFAULT_QUAD) -> Weight:
    """The weight of the convolution of two derivative-type ensembles.

    Values are computed by the kind-matched univariate convolution and
    memoised.  Derivatives come from differentiating under the integral
    (additive, multiplicative) or from the transform product multiplied by
    powers of -s (hankel), which is what the chiral derivative operator
    does in the spectral domain.
    """
    kind = _kind_for_space(space)

    if kind == "hankel":
        nu = float(space.nu)
        prod = _HankelProduct(w1, w2, nu, spec)
        value = _MemoScalarFn(lambda x: prod.lookup(x, 0, 0))

        def deriv(x, k):
            xs = np.atleast_1d(np.asarray(x, dtype=float))
            return np.array([prod.lookup(t, k, 0) for t in xs])

        def op_deriv(nu_arg, m, x):
            xs = np.atleast_1d(np.asarray(x, dtype=float))
            out = np.array([prod.lookup(t, 0, m) for t in xs])
            return out if np.asarray(x).ndim else float(out[0])

        return Weight(
            fn=value,
            support=(0.0, math.inf),
            label=f"({w1.label} *_{nu} {w2.label})",
            deriv_fn=deriv,
            op_deriv_fn=op_deriv,
        )

    if kind == "additive":
        # differentiate under the integral on whichever factor allows it
        if _boundary_smooth(w2):
            outer, inner = w1, w2
        elif _boundary_smooth(w1):
            outer, inner = w2, w1
        else:
            outer, inner = w1, w2
        support = (outer.support[0] + inner.support[0],
                   outer.support[1] + inner.support[1])
        value = _MemoScalarFn(lambda x: _additive_value(outer, inner, x, spec))
        deriv = None
        if _boundary_smooth(inner):
            def deriv(x, k, _o=outer, _i=inner):
                xs = np.atleast_1d(np.asarray(x, dtype=float))
                return np.array([_additive_value(_o, _i, t, spec, g_deriv=k) for t in xs])

        return Weight(fn=value, support=support,
                      label=f"({w1.label} * {w2.label})", deriv_fn=deriv)

    # multiplicative
    if _boundary_smooth(w2):
        outer, inner = w1, w2
    elif _boundary_smooth(w1):
        outer, inner = w2, w1
    else:
        outer, inner = w1, w2
    lo = outer.support[0] * inner.support[0]
    hi = outer.support[1] * inner.support[1]
    support = (lo, hi if not math.isnan(hi) else math.inf)
    value = _MemoScalarFn(lambda x: _multiplicative_value(outer, inner, x, spec))
    deriv = None
    if _boundary_smooth(inner):
        def deriv(x, k, _o=outer, _i=inner):
            xs = np.atleast_1d(np.asarray(x, dtype=float))
            return np.array([_multiplicative_value(_o, _i, t, spec, g_deriv=k) for t in xs])

    return Weight(fn=value, support=support,
                  label=f"({w1.label} o {w2.label})", deriv_fn=deriv)


def convolve_mixed(space: MatrixSpace, ws: Sequence[Weight], w: Weight,
                   spec: QuadratureSpec = DEFAULT_QUAD) -> list[Weight]:
    """Convolve every weight of a polynomial ensemble with a Polya weight."""
    return [convolve_polya(space, wb, w, spec) for wb in ws]
