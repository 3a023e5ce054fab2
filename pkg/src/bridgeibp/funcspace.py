"""Function types and the deterministic operator calculus on [0, 1].

The module provides

* ``GridFunction`` / ``SmoothTestFunction`` / ``DirectionFunction``, the three
  carriers used everywhere else in the package,
* the kernel ``q_indicator`` and the integral operators ``h_transform``,
  ``h_dot``, ``q_apply`` and ``k_apply`` built on top of it,
* composite Gauss-Legendre quadrature with an endpoint-singularity mode for
  integrands that blow up like ``1/sqrt(t - t**2)`` at 0 and 1,
* a fixed catalog of analytically differentiable test functions.

All callables handled here must be vectorized over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson

from .errors import (
    DomainError,
    NonFiniteIntegrandError,
    QuadratureError,
    SupportError,
)

DEFAULT_GRID_INTERVALS = 4096
_GL_NODES = 64
_GL_PANELS = 32


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(a: float, b: float, n: int = _GL_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to the interval [a, b]."""
    x, w = _leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _panel_rule(a: float, b: float, panels: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with ``panels`` equal panels on [a, b]."""
    x, w = _leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    mode: str = "regular",
    a: float = 0.0,
    b: float = 1.0,
    tol: float = 1e-10,
    max_panels: int = 256,
) -> float:
    """Integrate ``f`` over (a, b) with composite Gauss-Legendre panels.

    ``mode="regular"`` integrates directly.  ``mode="endpoint_singular"``
    applies the substitution ``t = (1 - cos(pi*u)) / 2`` first, which absorbs
    inverse-square-root endpoint singularities; it is only supported on the
    unit interval.  The rule is refined by panel doubling until two successive
    results agree to ``tol`` (absolute).

    Raises ``NonFiniteIntegrandError`` if the integrand evaluates to a
    non-finite value at any quadrature node, and ``QuadratureError`` if the
    doubling loop fails to converge.
    """
    if mode == "regular":
        g = f
        lo, hi = a, b
    elif mode == "endpoint_singular":
        if (a, b) != (0.0, 1.0):
            raise DomainError("endpoint_singular mode is defined on (0, 1) only")

        def g(u: np.ndarray) -> np.ndarray:
            t = 0.5 * (1.0 - np.cos(np.pi * u))
            return f(t) * (0.5 * np.pi) * np.sin(np.pi * u)

        lo, hi = 0.0, 1.0
    else:
        raise ValueError(f"unknown quadrature mode: {mode!r}")

    def evaluate(panels: int) -> float:
        pts, wts = _panel_rule(lo, hi, panels, _GL_NODES)
        vals = np.asarray(g(pts), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = pts[~np.isfinite(vals)][0]
            raise NonFiniteIntegrandError(f"integrand is non-finite at t={bad!r}")
        return float(np.dot(wts, vals))

    panels = _GL_PANELS
    previous = evaluate(panels)
    while panels < max_panels:
        panels *= 2
        current = evaluate(panels)
        if abs(current - previous) <= tol:
            return current
        previous = current
    raise QuadratureError(f"quadrature did not reach tol={tol:g} with {max_panels} panels")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

def uniform_grid(n_intervals: int) -> np.ndarray:
    """Uniform grid 0, 1/n, ..., 1 with ``n_intervals + 1`` nodes."""
    return np.linspace(0.0, 1.0, n_intervals + 1)


@dataclass(frozen=True)
class GridFunction:
    """A real function sampled at the nodes of a uniform grid of [0, 1]."""

    n_intervals: int
    values: np.ndarray

    def __post_init__(self):
        if self.n_intervals < 2:
            raise DomainError("GridFunction needs n_intervals >= 2")
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.n_intervals + 1,):
            raise ValueError(
                f"expected {self.n_intervals + 1} samples, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("GridFunction values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def grid(self) -> np.ndarray:
        return uniform_grid(self.n_intervals)

    @property
    def dt(self) -> float:
        return 1.0 / self.n_intervals


def grid_inner(f: GridFunction, g) -> float:
    """L2(0,1) inner product of grid functions via Simpson's rule."""
    gv = g.values if isinstance(g, GridFunction) else np.asarray(g, dtype=float)
    return float(simpson(f.values * gv, x=f.grid))


def grid_norm_sq(f: GridFunction) -> float:
    """Squared L2(0,1) norm of a grid function via Simpson's rule."""
    return grid_inner(f, f)


_SELF_CHECK_POINTS = 100
_SELF_CHECK_STEP = 1e-5
_SELF_CHECK_RTOL = 1e-6
_SUP_CHECK_GRID = 4096


@dataclass(eq=False)
class SmoothTestFunction:
    """An analytically defined function on [0, 1] with exact derivatives.

    ``evaluator`` and ``derivative1`` (and ``derivative2`` when present) must
    accept and return numpy arrays.  ``sup_bound`` must dominate
    ``max |evaluator|`` on [0, 1].  Construction self-checks both claims:
    the exact derivative is compared against a centered finite difference of
    the evaluator at 100 interior points, and the bound against a dense grid.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    derivative1: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    derivative2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "test-function"

    def __post_init__(self):
        pts = np.linspace(0.0, 1.0, _SELF_CHECK_POINTS + 2)[1:-1]
        h = _SELF_CHECK_STEP
        fd = (self.evaluator(pts + h) - self.evaluator(pts - h)) / (2.0 * h)
        exact = self.derivative1(pts)
        err = np.abs(fd - exact) / (1.0 + np.abs(exact))
        if np.max(err) > _SELF_CHECK_RTOL:
            raise ValueError(
                f"{self.name}: derivative1 disagrees with finite differences "
                f"(max relative error {np.max(err):.3e})"
            )
        dense = np.linspace(0.0, 1.0, _SUP_CHECK_GRID + 1)
        observed = float(np.max(np.abs(self.evaluator(dense))))
        if self.sup_bound < observed * (1.0 - 1e-12):
            raise ValueError(
                f"{self.name}: sup_bound {self.sup_bound} below observed max {observed}"
            )

    @property
    def has_second_derivative(self) -> bool:
        return self.derivative2 is not None

    def __call__(self, s: np.ndarray) -> np.ndarray:
        return self.evaluator(s)

    def __repr__(self):  # keep reports readable
        return f"SmoothTestFunction({self.name})"


@dataclass(eq=False)
class DirectionFunction:
    """A twice differentiable direction compactly supported inside (0, 1)."""

    base: SmoothTestFunction
    support_lo: float
    support_hi: float

    def __post_init__(self):
        if not (0.0 < self.support_lo < self.support_hi < 1.0):
            raise SupportError("support must satisfy 0 < lo < hi < 1")
        if not self.base.has_second_derivative:
            raise ValueError("DirectionFunction base needs an exact second derivative")
        outside = np.concatenate([
            np.linspace(0.0, self.support_lo, 50),
            np.linspace(self.support_hi, 1.0, 50),
        ])
        for label, fn in (
            ("value", self.base.evaluator),
            ("first derivative", self.base.derivative1),
            ("second derivative", self.base.derivative2),
        ):
            if np.max(np.abs(fn(outside))) > 1e-12:
                raise SupportError(f"direction {label} does not vanish outside the support")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return self.base.evaluator(t)

    @property
    def name(self) -> str:
        return self.base.name

    def deriv1(self, t: np.ndarray) -> np.ndarray:
        return self.base.derivative1(t)

    def deriv2(self, t: np.ndarray) -> np.ndarray:
        return self.base.derivative2(t)

    def __repr__(self):
        return f"DirectionFunction({self.base.name}, [{self.support_lo}, {self.support_hi}])"


# ---------------------------------------------------------------------------
# the kernel q and the operators H, Q, K
# ---------------------------------------------------------------------------

def q_indicator(t: float, s) -> np.ndarray:
    """Centered bridge kernel: 1 - t on [0, t), -t on [t, 1), 0 elsewhere.

    For t = 0 the kernel is identically zero.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError("q_indicator needs t in [0, 1]")
    s_arr = np.asarray(s, dtype=float)
    if t == 0.0:
        out = np.zeros_like(s_arr)
    else:
        out = np.where(
            (s_arr >= 0.0) & (s_arr < t), 1.0 - t,
            np.where((s_arr >= t) & (s_arr < 1.0), -t, 0.0),
        )
    return float(out) if np.isscalar(s) else out


def _integral_0_to_1(phi: Callable[[np.ndarray], np.ndarray]) -> float:
    pts, wts = _panel_rule(0.0, 1.0, 8, _GL_NODES)
    return float(np.dot(wts, phi(pts)))


def _integral_0_to_t(phi: Callable[[np.ndarray], np.ndarray], t: np.ndarray) -> np.ndarray:
    """Vectorized single-panel Gauss-Legendre value of the running integral."""
    x, w = _leggauss(_GL_NODES)
    t = np.asarray(t, dtype=float)
    nodes = 0.5 * t[..., None] * (x + 1.0)
    return 0.5 * t * np.dot(phi(nodes), w)


def h_transform(phi, t):
    """Centered running integral: integral of phi over [0, t] minus t times its mean.

    Vanishes exactly at t = 0 and t = 1.  Accepts scalar or array t.
    """
    fn = phi.evaluator if isinstance(phi, SmoothTestFunction) else phi
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0.0) | (t_arr > 1.0)):
        raise DomainError("h_transform needs t in [0, 1]")
    total = _integral_0_to_1(fn)
    out = _integral_0_to_t(fn, t_arr) - t_arr * total
    return float(out) if np.isscalar(t) else out


def h_dot(phi, t):
    """Time derivative of ``h_transform``: phi(t) minus the mean of phi."""
    fn = phi.evaluator if isinstance(phi, SmoothTestFunction) else phi
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr <= 0.0) | (t_arr >= 1.0)):
        raise DomainError("h_dot needs t in (0, 1)")
    out = fn(t_arr) - _integral_0_to_1(fn)
    return float(out) if np.isscalar(t) else out


def q_apply(eta, t):
    """Covariance-operator image: integral of (min(t,s) - t*s) * eta(s) ds.

    The kernel has a kink at s = t, so the integral is split there and each
    smooth piece handled by Gauss-Legendre.  Vanishes at t = 0 and t = 1.
    """
    fn = eta.evaluator if isinstance(eta, SmoothTestFunction) else eta
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0.0) | (t_arr > 1.0)):
        raise DomainError("q_apply needs t in [0, 1]")
    x, w = _leggauss(_GL_NODES)
    # left piece: s in [0, t], kernel s*(1-t)
    s_left = 0.5 * t_arr[..., None] * (x + 1.0)
    left = 0.5 * t_arr * (1.0 - t_arr) * np.dot(fn(s_left) * s_left, w)
    # right piece: s in [t, 1], kernel t*(1-s)
    half = 0.5 * (1.0 - t_arr)
    s_right = half[..., None] * x + 0.5 * (1.0 + t_arr)[..., None]
    right = half * t_arr * np.dot(fn(s_right) * (1.0 - s_right), w)
    out = left + right
    return float(out) if np.isscalar(t) else out


def k_apply(eta, t):
    """Adjoint-style image: integral of eta over [t, 1] minus the s-weighted mean.

    Its derivative in t is -eta and its mean over [0, 1] is zero.
    """
    fn = eta.evaluator if isinstance(eta, SmoothTestFunction) else eta
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0.0) | (t_arr > 1.0)):
        raise DomainError("k_apply needs t in [0, 1]")
    x, w = _leggauss(_GL_NODES)
    half = 0.5 * (1.0 - t_arr)
    s_right = half[..., None] * x + 0.5 * (1.0 + t_arr)[..., None]
    tail = half * np.dot(fn(s_right), w)
    weighted = _integral_0_to_1(lambda s: s * fn(s))
    out = tail - weighted
    return float(out) if np.isscalar(t) else out


def k_as_test_function(eta: SmoothTestFunction) -> SmoothTestFunction:
    """Wrap the ``k_apply`` image of eta as a SmoothTestFunction.

    The exact first derivative is -eta; the sup bound is measured on a dense
    grid with a small safety margin.
    """
    dense = np.linspace(0.0, 1.0, _SUP_CHECK_GRID + 1)
    bound = float(np.max(np.abs(k_apply(eta, dense)))) * (1.0 + 1e-9) + 1e-15
    return SmoothTestFunction(
        evaluator=lambda s: k_apply(eta, np.asarray(s, dtype=float)),
        derivative1=lambda s: -eta.evaluator(np.asarray(s, dtype=float)),
        sup_bound=bound,
        name=f"K[{eta.name}]",
    )


# ---------------------------------------------------------------------------
# test-function catalog
# ---------------------------------------------------------------------------

def _monomial(k: int) -> SmoothTestFunction:
    if k == 0:
        return SmoothTestFunction(
            evaluator=lambda s: np.ones_like(np.asarray(s, dtype=float)),
            derivative1=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            derivative2=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            sup_bound=1.0,
            name="one",
        )
    return SmoothTestFunction(
        evaluator=lambda s, k=k: np.asarray(s, dtype=float) ** k,
        derivative1=lambda s, k=k: k * np.asarray(s, dtype=float) ** (k - 1),
        derivative2=lambda s, k=k: (
            k * (k - 1) * np.asarray(s, dtype=float) ** (k - 2)
            if k >= 2 else np.zeros_like(np.asarray(s, dtype=float))
        ),
        sup_bound=1.0,
        name=f"s^{k}",
    )


def _sine(k: int) -> SmoothTestFunction:
    om = 2.0 * np.pi * k
    return SmoothTestFunction(
        evaluator=lambda s, om=om: np.sin(om * np.asarray(s, dtype=float)),
        derivative1=lambda s, om=om: om * np.cos(om * np.asarray(s, dtype=float)),
        derivative2=lambda s, om=om: -om * om * np.sin(om * np.asarray(s, dtype=float)),
        sup_bound=1.0,
        name=f"sin(2pi*{k}s)",
    )


def _cosine(k: int) -> SmoothTestFunction:
    om = 2.0 * np.pi * k
    return SmoothTestFunction(
        evaluator=lambda s, om=om: np.cos(om * np.asarray(s, dtype=float)),
        derivative1=lambda s, om=om: -om * np.sin(om * np.asarray(s, dtype=float)),
        derivative2=lambda s, om=om: -om * om * np.cos(om * np.asarray(s, dtype=float)),
        sup_bound=1.0,
        name=f"cos(2pi*{k}s)",
    )


def gaussian_bump(center: float = 0.5, width: float = 0.02) -> SmoothTestFunction:
    """exp(-(s - center)**2 / width) with exact derivatives."""

    def val(s):
        s = np.asarray(s, dtype=float)
        return np.exp(-((s - center) ** 2) / width)

    def d1(s):
        s = np.asarray(s, dtype=float)
        return -2.0 * (s - center) / width * val(s)

    def d2(s):
        s = np.asarray(s, dtype=float)
        return (-2.0 / width + 4.0 * (s - center) ** 2 / width ** 2) * val(s)

    return SmoothTestFunction(
        evaluator=val, derivative1=d1, derivative2=d2,
        sup_bound=1.0, name=f"bump({center},{width})",
    )


def test_function_family() -> list[SmoothTestFunction]:
    """Fixed catalog used by the property suites and the scenario catalog."""
    fam = [_monomial(k) for k in range(5)]
    fam += [_sine(k) for k in (1, 2, 3)]
    fam += [_cosine(k) for k in (1, 2, 3)]
    fam.append(gaussian_bump())
    return fam


def polynomial_direction(lo: float = 0.25, hi: float = 0.75) -> DirectionFunction:
    """Cubic-of-quadratic bump ((t-lo)(hi-t))^3, normalized to peak 1.

    Twice continuously differentiable with compact support [lo, hi]; the
    derivatives are hand-coded polynomials.
    """
    if not (0.0 < lo < hi < 1.0):
        raise SupportError("direction support must lie strictly inside (0, 1)")
    peak = ((hi - lo) ** 2 / 4.0) ** 3

    def u(t):
        return (t - lo) * (hi - t)

    def val(t):
        t = np.asarray(t, dtype=float)
        inside = (t > lo) & (t < hi)
        out = np.zeros_like(t)
        out[inside] = u(t[inside]) ** 3 / peak
        return out

    def d1(t):
        t = np.asarray(t, dtype=float)
        inside = (t > lo) & (t < hi)
        out = np.zeros_like(t)
        ti = t[inside]
        out[inside] = 3.0 * u(ti) ** 2 * (lo + hi - 2.0 * ti) / peak
        return out

    def d2(t):
        t = np.asarray(t, dtype=float)
        inside = (t > lo) & (t < hi)
        out = np.zeros_like(t)
        ti = t[inside]
        up = lo + hi - 2.0 * ti
        out[inside] = (6.0 * u(ti) * up ** 2 - 6.0 * u(ti) ** 2) / peak
        return out

    base = SmoothTestFunction(
        evaluator=val, derivative1=d1, derivative2=d2,
        sup_bound=1.0, name=f"h-bump({lo},{hi})",
    )
    return DirectionFunction(base=base, support_lo=lo, support_hi=hi)
