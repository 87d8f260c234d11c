"""One-point weight functions and the space-specific derivative operators.

A :class:`Weight` is an evaluable scalar function with a declared support
interval, optional analytic derivatives of arbitrary order, and a label.
Weights are interpreted as extended by zero outside their support, so a
Heaviside-type cutoff is represented by the interval, never by evaluating
a jump.

The induced weights of a derivative-type ensemble are obtained from a
single weight ``w`` by repeated application of a first- or second-order
differential operator that depends on the symmetry class:

* ``H2``                  :  (-d/dx)^(j-1) w
* ``G``                   :  (-x d/dx)^(j-1) w
* ``Mnu``, ``H1``, ``H4`` :  (x^nu d/dx x^(1-nu) d/dx)^(j-1) w,
                             which expands to (x d^2/dx^2 + (1-nu) d/dx)^(j-1).

The expansions of these operator powers in plain derivatives have
polynomial coefficients and are computed once and cached, so a weight only
ever needs ordinary derivatives d^k w / dx^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import gammaln, kv

from .spaces import MatrixSpace, SpaceKind

__all__ = [
    "Weight",
    "apply_derivative_op",
    "boundary_operator_value",
    "make_family",
    "FAMILIES",
    "admissibility_check",
    "AdmissibilityReport",
    "numeric_derivative",
    "scale_argument",
]

_EPS = np.finfo(float).eps

# Numeric-fallback differentiation is noise-dominated beyond this order,
# which caps derivative-free weights at n <= 3 on the chiral spaces.
MAX_NUMERIC_ORDER = 4


@dataclass
class Weight:
    """Evaluable one-point weight with support and optional derivatives.

    ``fn`` is only ever called with arguments inside the open support;
    :meth:`__call__` masks everything else to zero.  ``deriv_fn(x, k)``
    returns the plain k-th derivative inside the support.  ``op_deriv_fn``,
    when present, short-circuits the chiral operator powers
    (x^nu d x^(1-nu) d)^m directly (used by transform-backed convolved
    weights, where the spectral route is far more accurate).

    Instances are treated as immutable after construction.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    label: str = ""
    deriv_fn: Optional[Callable[[np.ndarray, int], np.ndarray]] = None
    deriv_max: Optional[int] = None
    op_deriv_fn: Optional[Callable[[Fraction, int, np.ndarray], np.ndarray]] = None

    def __call__(self, x):
        lo, hi = self.support
        if isinstance(x, float) or np.ndim(x) == 0:
            xf = float(x)
            if not lo < xf < hi:
                return 0.0
            return float(self.fn(np.float64(xf)))
        x_arr = np.asarray(x, dtype=float)
        inside = (x_arr > lo) & (x_arr < hi)
        out = np.zeros_like(x_arr)
        if inside.any():
            out[inside] = self.fn(x_arr[inside])
        return out

    def deriv(self, x, order: int):
        """Plain derivative d^order/dx^order, zero outside the support."""
        if order == 0:
            return self(x)
        lo, hi = self.support
        analytic = self.deriv_fn is not None and (
            self.deriv_max is None or order <= self.deriv_max)
        if isinstance(x, float) or np.ndim(x) == 0:
            xf = float(x)
            if not lo < xf < hi:
                return 0.0
            if analytic:
                return float(self.deriv_fn(np.float64(xf), order))
            if order <= MAX_NUMERIC_ORDER:
                return numeric_derivative(self.fn, xf, order, self.support)
            raise ValueError(
                f"weight '{self.label}' has no analytic derivatives and "
                f"order {order} exceeds the numeric cap {MAX_NUMERIC_ORDER}")
        x_arr = np.asarray(x, dtype=float)
        inside = (x_arr > lo) & (x_arr < hi)
        out = np.zeros_like(x_arr)
        if inside.any():
            xin = x_arr[inside]
            if analytic:
                out[inside] = self.deriv_fn(xin, order)
            elif order <= MAX_NUMERIC_ORDER:
                out[inside] = [numeric_derivative(self.fn, float(t), order, self.support)
                               for t in xin]
            else:
                raise ValueError(
                    f"weight '{self.label}' has no analytic derivatives and "
                    f"order {order} exceeds the numeric cap {MAX_NUMERIC_ORDER}")
        return out

    def scaled(self, c: float) -> "Weight":
        """Weight with values (and derivatives) multiplied by c."""
        base = self
        return Weight(
            fn=lambda x: c * base.fn(x),
            support=base.support,
            label=f"{c}*{base.label}",
            deriv_fn=None if base.deriv_fn is None
            else (lambda x, k: c * base.deriv_fn(x, k)),
            deriv_max=base.deriv_max,
            op_deriv_fn=None if base.op_deriv_fn is None
            else (lambda nu, m, x: c * base.op_deriv_fn(nu, m, x)),
        )


def scale_argument(w: Weight, c: float) -> Weight:
    """The weight x -> w(x / c) for c > 0 (dilated by c)."""
    if c <= 0:
        raise ValueError("c must be positive")
    lo, hi = w.support
    support = (lo * c if math.isfinite(lo) else lo, hi * c if math.isfinite(hi) else hi)

    def fn(x):
        return w.fn(np.asarray(x, dtype=float) / c)

    deriv = None
    if w.deriv_fn is not None:
        def deriv(x, k):
            return w.deriv_fn(np.asarray(x, dtype=float) / c, k) * c ** (-k)

    return Weight(fn, support, f"dilate({w.label},{c})", deriv, deriv_max=w.deriv_max)


# ---------------------------------------------------------------------------
# numeric differentiation fallback
# ---------------------------------------------------------------------------

def numeric_derivative(fn, x: float, order: int,
                       support: tuple[float, float] = (-math.inf, math.inf)) -> float:
    """Central finite difference with one Richardson extrapolation level.

    Step h = max(|x|, 1) * eps^(1/(order+2)).  Near a support boundary the
    stencil is replaced by a local polynomial fit on interior points.
    """
    h = max(abs(x), 1.0) * _EPS ** (1.0 / (order + 2))
    lo, hi = support
    half = order / 2.0

    def central(step):
        nodes = x + (np.arange(order + 1) - half) * step
        coeff = np.array([(-1) ** i * math.comb(order, i) for i in range(order + 1)])
        # highest node pairs with +, standard central difference ordering
        return float(np.dot(coeff[::-1], fn(nodes))) / step ** order

    if x - half * h > lo and x + half * h < hi:
        d1 = central(h)
        d2 = central(h / 2.0)
        return (4.0 * d2 - d1) / 3.0

    # one-sided: fit a polynomial on interior points next to the boundary
    width = max(abs(x), 1.0) * _EPS ** (1.0 / (order + 3)) * 4
    a = max(lo, x - width)
    b = min(hi, x + width)
    pad = (b - a) * 1e-3
    nodes = np.linspace(a + pad, b - pad, order + 4)
    vals = fn(nodes)
    coeffs = np.polynomial.polynomial.polyfit(nodes - x, vals, order + 2)
    return float(coeffs[order]) * math.factorial(order)


# ---------------------------------------------------------------------------
# operator powers expanded in plain derivatives
# ---------------------------------------------------------------------------

def _expand_once(expn: dict[int, np.ndarray], kind: SpaceKind, nu: float) -> dict[int, np.ndarray]:
    """One application of the class operator to sum_k p_k(x) f^(k)(x)."""
    new: dict[int, np.ndarray] = {}

    def add(k, coeffs):
        coeffs = np.atleast_1d(coeffs)
        if not np.any(coeffs):
            return
        new[k] = P.polyadd(new.get(k, np.zeros(1)), coeffs)

    for k, p in expn.items():
        dp = P.polyder(p) if len(p) > 1 else np.zeros(1)
        if kind == SpaceKind.H2:
            add(k, -dp)
            add(k + 1, -p)
        elif kind == SpaceKind.G:
            add(k, -P.polymulx(dp))
            add(k + 1, -P.polymulx(p))
        else:  # chiral: x d^2 + (1 - nu) d
            ddp = P.polyder(dp) if len(dp) > 1 else np.zeros(1)
            add(k, P.polymulx(ddp))
            add(k + 1, 2.0 * P.polymulx(dp))
            add(k + 2, P.polymulx(p))
            add(k, (1.0 - nu) * dp)
            add(k + 1, (1.0 - nu) * p)
    return new


@lru_cache(maxsize=None)
def _op_power_expansion(kind: SpaceKind, nu: float, m: int) -> tuple[tuple[int, tuple[float, ...]], ...]:
    """Expansion of the m-th operator power; cached, hashable output."""
    expn = {0: np.array([1.0])}
    for _ in range(m):
        expn = _expand_once(expn, kind, nu)
    return tuple(sorted((k, tuple(c)) for k, c in expn.items()))


def _required_order(space: MatrixSpace, j: int) -> int:
    return 2 * (j - 1) if space.is_chiral else j - 1


def apply_derivative_op(space: MatrixSpace, w: Weight, j: int, x):
    """j-th induced weight w_j(x); j = 1 returns w itself for every kind."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if j == 1:
        return w(x)

    m = j - 1
    if space.is_chiral and w.op_deriv_fn is not None:
        return w.op_deriv_fn(space.nu, m, x)

    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.asarray(x).ndim == 0
    out = np.zeros_like(x_arr)
    nu = float(space.nu) if space.is_chiral else 0.0
    for k, coeffs in _op_power_expansion(space.kind, nu, m):
        c = P.polyval(x_arr, np.asarray(coeffs))
        if np.any(c):
            out = out + c * np.asarray(w.deriv(x_arr, k))
    return float(out[0]) if scalar else out


def boundary_operator_value(space: MatrixSpace, w: Weight, l: int, x):
    """Value of x^(nu+1) d x^(-nu) (d x^(nu+1) d x^(-nu))^l w at x.

    This is the quantity whose x -> 0 limit must vanish for a weight to be
    admissible on the chiral spaces (l = 0, ..., n-2).  The prefix operator
    equals x d/dx - nu, and the bracket is the class operator itself.
    """
    if not space.is_chiral:
        raise ValueError("boundary operator only defined for chiral kinds")
    nu = float(space.nu)
    expn = {0: np.array([1.0])}
    for _ in range(l):
        expn = _expand_once(expn, space.kind, nu)
    # apply B = x d/dx - nu on top
    out_expn: dict[int, np.ndarray] = {}

    def add(k, coeffs):
        coeffs = np.atleast_1d(coeffs)
        if not np.any(coeffs):
            return
        out_expn[k] = P.polyadd(out_expn.get(k, np.zeros(1)), coeffs)

    for k, p in expn.items():
        dp = P.polyder(p) if len(p) > 1 else np.zeros(1)
        add(k, P.polymulx(dp))
        add(k + 1, P.polymulx(p))
        add(k, -nu * p)

    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.asarray(x).ndim == 0
    out = np.zeros_like(x_arr)
    for k, coeffs in out_expn.items():
        c = P.polyval(x_arr, coeffs)
        if np.any(c):
            out = out + c * np.asarray(w.deriv(x_arr, k))
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# built-in weight families (all with closed-form derivatives)
# ---------------------------------------------------------------------------

def _hermite_factor(t: np.ndarray, k: int) -> np.ndarray:
    """Probabilists' Hermite polynomial He_k(t) by recurrence."""
    prev = np.ones_like(t)
    if k == 0:
        return prev
    cur = t.copy()
    for j in range(1, k):
        prev, cur = cur, t * cur - j * prev
    return cur


def _falling(a: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= a - i
    return out


def _power_exp_deriv(p: float, c: float):
    """Derivative family of x^p e^(-c x)."""

    def deriv(x, k):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for j in range(k + 1):
            fac = _falling(p, j)
            if fac == 0.0:
                continue
            acc += math.comb(k, j) * fac * x ** (p - j) * (-c) ** (k - j)
        return acc * np.exp(-c * x)

    return deriv


def _two_power_deriv(p: float, q: float, sign: float):
    """Derivative family of x^p (1 + sign*x)^q  (sign=-1 gives (1-x)^q)."""

    def deriv(x, k):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        base = 1.0 + sign * x
        for j in range(k + 1):
            f1 = _falling(p, j)
            f2 = _falling(q, k - j) * sign ** (k - j)
            if f1 == 0.0 or f2 == 0.0:
                continue
            acc += math.comb(k, j) * f1 * x ** (p - j) * f2 * base ** (q - (k - j))
        return acc

    return deriv


def _gaussian_shifted(alpha: float = 0.0) -> Weight:
    def fn(x):
        return np.exp(-0.5 * (x - alpha) ** 2)

    def deriv(x, k):
        t = np.asarray(x, dtype=float) - alpha
        return (-1.0) ** k * _hermite_factor(t, k) * np.exp(-0.5 * t ** 2)

    return Weight(fn, (-math.inf, math.inf), f"gaussian_shifted(alpha={alpha})", deriv)


def _gaussian_radial(nu: float = 0.0, eps: float = 1.0) -> Weight:
    if eps <= 0:
        raise ValueError("eps must be positive")
    if nu <= -1:
        raise ValueError("nu must exceed -1")
    c = 1.0 / eps

    def fn(x):
        return x ** nu * np.exp(-c * x)

    return Weight(fn, (0.0, math.inf), f"gaussian_radial(nu={nu},eps={eps})",
                  _power_exp_deriv(nu, c))


def _ginibre(nu: float = 0.0) -> Weight:
    w = _gaussian_radial(nu, 1.0)
    w.label = f"ginibre(nu={nu})"
    return w


def _laguerre_h2(n: int = 1, nu: float = 0.0) -> Weight:
    p = n + nu - 1
    if p < 0:
        raise ValueError("needs n + nu - 1 >= 0")

    def fn(x):
        return x ** p * np.exp(-x)

    return Weight(fn, (0.0, math.inf), f"laguerre_h2(n={n},nu={nu})",
                  _power_exp_deriv(p, 1.0))


def _jacobi(n: int = 1, mu: float = 0.0, nu: float = 0.0) -> Weight:
    if nu <= -1 or mu <= -1:
        raise ValueError("nu and mu must exceed -1")
    q = n + mu - 1

    def fn(x):
        return x ** nu * (1.0 - x) ** q

    return Weight(fn, (0.0, 1.0), f"jacobi(n={n},mu={mu},nu={nu})",
                  _two_power_deriv(nu, q, -1.0))


def _cauchy_lorentz(n: int = 1, mu: float = 0.0, nu: float = 0.0) -> Weight:
    if nu <= -1 or mu <= -1:
        raise ValueError("nu and mu must exceed -1")
    q = -(n + nu + mu + 1)

    def fn(x):
        return x ** nu * (1.0 + x) ** q

    return Weight(fn, (0.0, math.inf), f"cauchy_lorentz(n={n},mu={mu},nu={nu})",
                  _two_power_deriv(nu, q, 1.0))


def _lognormal(alpha: float = 0.0, sigma: float = 1.0) -> Weight:
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    def fn(x):
        u = np.log(x)
        return np.exp(-u - (u - alpha) ** 2 / (2.0 * sigma ** 2))

    # d/dx = e^(-u) d/du with u = log x; coefficients follow the shift
    # recurrence c[k+1, j] = c[k, j-1] - (k+1) c[k, j].
    def deriv(x, k):
        x = np.asarray(x, dtype=float)
        u = np.log(x)
        t = (u - alpha) / sigma
        h = np.exp(-t ** 2 / 2.0)
        coeffs = np.zeros(k + 2)
        coeffs[0] = 1.0
        for m in range(k):
            nxt = np.zeros_like(coeffs)
            nxt[1:] = coeffs[:-1]
            nxt -= (m + 1) * coeffs
            coeffs = nxt
        acc = np.zeros_like(x)
        for j in range(k + 2):
            if coeffs[j] == 0.0:
                continue
            hj = (-1.0 / sigma) ** j * _hermite_factor(t, j) * h
            acc += coeffs[j] * hj
        return np.exp(-(k + 1) * u) * acc

    return Weight(fn, (0.0, math.inf), f"lognormal(alpha={alpha},sigma={sigma})", deriv)


def _gumbel_deformed(alpha: float = 1.0) -> Weight:
    if alpha <= 0:
        raise ValueError("alpha must be positive")

    def fn(x):
        with np.errstate(over="ignore"):
            return np.exp(-np.exp(-x) - alpha * x)

    # f^(k) = Q_k(u) f with u = e^(-x), Q_{k+1}(u) = (u - alpha) Q_k - u Q_k'.
    def deriv(x, k):
        x = np.asarray(x, dtype=float)
        q = np.array([1.0])
        for _ in range(k):
            dq = P.polyder(q) if len(q) > 1 else np.zeros(1)
            q = P.polyadd(P.polymul(np.array([-alpha, 1.0]), q), -P.polymulx(dq))
        with np.errstate(over="ignore", invalid="ignore"):
            u = np.exp(-x)
            out = P.polyval(u, q) * np.exp(-u - alpha * x)
        return np.where(np.isfinite(out), out, 0.0)

    return Weight(fn, (-math.inf, math.inf), f"gumbel_deformed(alpha={alpha})", deriv)


def _cosh_power(mu: float = 1.0) -> Weight:
    if mu <= 0:
        raise ValueError("mu must be positive")

    def fn(x):
        return np.cosh(x) ** (-mu)

    # f^(k) = R_k(tanh x) f with R_{k+1} = -mu t R_k + (1 - t^2) R_k'.
    def deriv(x, k):
        x = np.asarray(x, dtype=float)
        t = np.tanh(x)
        r = np.array([1.0])
        for _ in range(k):
            dr = P.polyder(r) if len(r) > 1 else np.zeros(1)
            r = P.polyadd(np.array([-mu]) * P.polymulx(r),
                          P.polymul(np.array([1.0, 0.0, -1.0]), dr))
        return P.polyval(t, r) * np.cosh(x) ** (-mu)

    return Weight(fn, (-math.inf, math.inf), f"cosh_power(mu={mu})", deriv)


def _bessel_k(mu: float = 0.0, nu: float = 0.0) -> Weight:
    """x^((mu+nu)/2) K_(mu-nu)(2 sqrt(x)); integrable near 0 for min(mu,nu) > -1."""
    if min(mu, nu) <= -1:
        raise ValueError("needs min(mu, nu) > -1")
    p0 = (mu + nu) / 2.0
    rho0 = mu - nu

    def fn(x):
        return x ** p0 * kv(rho0, 2.0 * np.sqrt(x))

    # Terms close under d/dx: d[x^p K_rho(2 sqrt x)] =
    #   p x^(p-1) K_rho - x^(p-1/2) (K_(rho-1) + K_(rho+1)) / 2.
    def deriv(x, k):
        x = np.asarray(x, dtype=float)
        terms = {(p0, rho0): 1.0}
        for _ in range(k):
            nxt: dict[tuple[float, float], float] = {}
            for (p, rho), coef in terms.items():
                if p != 0.0:
                    key = (p - 1.0, rho)
                    nxt[key] = nxt.get(key, 0.0) + coef * p
                for drho in (-1.0, 1.0):
                    key = (p - 0.5, rho + drho)
                    nxt[key] = nxt.get(key, 0.0) - 0.5 * coef
            terms = nxt
        z = 2.0 * np.sqrt(x)
        acc = np.zeros_like(x)
        for (p, rho), coef in terms.items():
            acc += coef * x ** p * kv(rho, z)
        return acc

    return Weight(fn, (0.0, math.inf), f"bessel_k(mu={mu},nu={nu})", deriv)


def _indicator(lo: float = 0.0, hi: float = 1.0) -> Weight:
    def fn(x):
        return np.ones_like(np.asarray(x, dtype=float))

    def deriv(x, k):
        return np.zeros_like(np.asarray(x, dtype=float))

    return Weight(fn, (lo, hi), f"indicator({lo},{hi})", deriv)


def _indicator_gap() -> Weight:
    """Indicator of [0,1] union [2,3]; not log-concave, fails order 2."""

    def fn(x):
        x = np.asarray(x, dtype=float)
        return (((x >= 0) & (x <= 1)) | ((x >= 2) & (x <= 3))).astype(float)

    def deriv(x, k):
        return np.zeros_like(np.asarray(x, dtype=float))

    return Weight(fn, (0.0, 3.0), "indicator_gap", deriv)


def _step() -> Weight:
    def fn(x):
        return np.ones_like(np.asarray(x, dtype=float))

    def deriv(x, k):
        return np.zeros_like(np.asarray(x, dtype=float))

    return Weight(fn, (0.0, math.inf), "step", deriv)


def _power_step(nu: float = 1.0) -> Weight:
    def fn(x):
        return np.asarray(x, dtype=float) ** nu

    def deriv(x, k):
        f = _falling(nu, k)
        return f * np.asarray(x, dtype=float) ** (nu - k)

    return Weight(fn, (0.0, math.inf), f"power_step(nu={nu})", deriv)


def _exponential(scale: float = 1.0) -> Weight:
    w = _gaussian_radial(0.0, scale)
    w.label = f"exponential(scale={scale})"
    return w


def _hard_edge_cutoff(a: float = 0.2) -> Weight:
    """e^(-1/(a-x)) on (0, a): all derivatives vanish at both endpoints."""
    if a <= 0:
        raise ValueError("a must be positive")

    # f^(k) = T_k(v) f with v = 1/(a-x), T_{k+1} = v^2 (T_k' - T_k).
    def fn(x):
        return np.exp(-1.0 / (a - np.asarray(x, dtype=float)))

    def deriv(x, k):
        x = np.asarray(x, dtype=float)
        v = 1.0 / (a - x)
        t = np.array([1.0])
        vsq = np.array([0.0, 0.0, 1.0])
        for _ in range(k):
            dt = P.polyder(t) if len(t) > 1 else np.zeros(1)
            t = P.polymul(vsq, P.polyadd(dt, -t))
        return P.polyval(v, t) * np.exp(-v)

    return Weight(fn, (0.0, a), f"hard_edge_cutoff(a={a})", deriv)


FAMILIES: dict[str, Callable[..., Weight]] = {
    "gaussian_shifted": _gaussian_shifted,
    "gaussian_radial": _gaussian_radial,
    "laguerre_h2": _laguerre_h2,
    "ginibre": _ginibre,
    "jacobi": _jacobi,
    "cauchy_lorentz": _cauchy_lorentz,
    "lognormal": _lognormal,
    "gumbel_deformed": _gumbel_deformed,
    "cosh_power": _cosh_power,
    "bessel_k": _bessel_k,
    "indicator": _indicator,
    "indicator_gap": _indicator_gap,
    "step": _step,
    "power_step": _power_step,
    "exponential": _exponential,
    "hard_edge_cutoff": _hard_edge_cutoff,
}


def make_family(name: str, **params) -> Weight:
    """Construct a built-in weight family by name."""
    try:
        ctor = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown weight family '{name}'; "
                         f"known: {', '.join(sorted(FAMILIES))}") from None
    return ctor(**params)


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

@dataclass
class AdmissibilityReport:
    """Outcome of the numeric admissibility screen for (space, weight, n).

    This is a heuristic certificate: quadrature on growing windows with a
    divergence-slope detector, not a proof.
    """

    space: MatrixSpace
    label: str
    n: int
    nonneg_ok: bool
    nonneg_min: float
    nonzero_ok: bool
    integrability: dict[tuple[int, int], tuple[bool, float]] = field(default_factory=dict)
    boundary_ok: Optional[bool] = None
    boundary_values: list[float] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        ok = self.nonneg_ok and self.nonzero_ok
        ok = ok and all(flag for flag, _ in self.integrability.values())
        if self.boundary_ok is not None:
            ok = ok and self.boundary_ok
        return ok


def _sample_grid(support: tuple[float, float], count: int = 1000) -> np.ndarray:
    lo, hi = support
    if math.isinf(lo) and math.isinf(hi):
        return np.linspace(-30.0, 30.0, count)
    if math.isinf(hi):
        # geometric coverage of several decades plus the unit scale
        return np.concatenate([
            np.geomspace(1e-6, 1.0, count // 2) + lo,
            np.linspace(1.0, 60.0, count - count // 2) + lo,
        ])
    pad = (hi - lo) * 1e-9
    return np.linspace(lo + pad, hi - pad, count)


def _window_integral_diverges(f, support, rel_tol=1e-8) -> tuple[bool, float]:
    """(converged, value): integrate on doubling windows, flag divergence
    when the increments grow over three consecutive doublings."""
    from scipy.integrate import quad

    lo, hi = support
    two_sided = math.isinf(lo) and math.isinf(hi)
    if not math.isinf(hi) and not math.isinf(lo):
        val, _ = quad(f, lo, hi, limit=200)
        return math.isfinite(val), val

    total = 0.0
    increments = []
    if two_sided:
        x_prev = 0.0
        total, _ = quad(f, -1.0, 1.0, limit=200)
        span = 1.0
        for _ in range(40):
            inc_r, _ = quad(f, span, 2 * span, limit=200)
            inc_l, _ = quad(f, -2 * span, -span, limit=200)
            inc = inc_r + inc_l
            total += inc
            increments.append(abs(inc))
            span *= 2
            if abs(inc) < rel_tol * max(1.0, abs(total)):
                return True, total
            if len(increments) >= 3 and increments[-1] > increments[-2] > increments[-3]:
                return False, total
        return False, total

    base = lo if math.isfinite(lo) else 0.0
    total, _ = quad(f, base, base + 1.0, limit=200)
    span = 1.0
    for _ in range(40):
        inc, _ = quad(f, base + span, base + 2 * span, limit=200)
        total += inc
        increments.append(abs(inc))
        span *= 2
        if abs(inc) < rel_tol * max(1.0, abs(total)):
            return True, total
        if len(increments) >= 3 and increments[-1] > increments[-2] > increments[-3]:
            return False, total
    return False, total


def admissibility_check(space: MatrixSpace, w: Weight, n: Optional[int] = None) -> AdmissibilityReport:
    """Numerically screen a weight for the derivative-type conditions.

    Checks (i) non-negativity on a 1000-point sample grid, (ii) finiteness
    of int |x|^(kappa-1) |w_j| for kappa in {1, n} and each induced weight
    j = 1..n, and (iii), on the chiral spaces, the vanishing boundary
    limits at the origin for l = 0..n-2.  All findings go in the report;
    nothing raises.
    """
    if n is None:
        n = space.n
    grid = _sample_grid(w.support)
    vals = w(grid)
    nonneg_min = float(np.min(vals))
    report = AdmissibilityReport(
        space=space, label=w.label, n=n,
        nonneg_ok=bool(nonneg_min >= -1e-12 * max(1.0, float(np.max(np.abs(vals))))),
        nonneg_min=nonneg_min,
        nonzero_ok=bool(np.max(np.abs(vals)) > 0.0),
    )
    if not report.nonzero_ok:
        report.notes.append("weight vanished at all 1000 sampled points")

    # (ii) integrability of |x|^(kappa-1) |w_j|
    for j in range(1, n + 1):
        order = _required_order(space, j)
        if w.deriv_fn is None and w.op_deriv_fn is None and order > MAX_NUMERIC_ORDER:
            report.integrability[(j, 1)] = (False, math.nan)
            report.notes.append(
                f"induced weight j={j} needs derivative order {order}, beyond numeric cap")
            continue
        for kappa in {1, n}:
            def integrand(x, _j=j, _k=kappa):
                return abs(x) ** (_k - 1) * abs(apply_derivative_op(space, w, _j, x))

            try:
                ok, val = _window_integral_diverges(integrand, w.support)
            except Exception as exc:  # quadrature blow-ups count as failures
                ok, val = False, math.nan
                report.notes.append(f"integrability probe failed at j={j}, kappa={kappa}: {exc}")
            report.integrability[(j, kappa)] = (ok, val)

    # (iii) chiral boundary limits at the origin
    if space.is_chiral and n >= 2:
        ok_all = True
        probes = np.geomspace(1e-2, 1e-7, 6)
        scale = max(1.0, float(np.max(np.abs(vals))))
        for l in range(n - 1):
            lo = w.support[0]
            if lo > 0:
                # support away from the origin: limit is trivially zero
                report.boundary_values.append(0.0)
                continue
            seq = np.array([boundary_operator_value(space, w, l, lo + p) for p in probes])
            report.boundary_values.append(float(seq[-1]))
            if not (abs(seq[-1]) < 1e-4 * scale and abs(seq[-1]) <= abs(seq[0]) + 1e-12):
                ok_all = False
                report.notes.append(
                    f"boundary limit l={l} does not vanish: tail value {seq[-1]:.3e}")
        report.boundary_ok = ok_all

    return report
