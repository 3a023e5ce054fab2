"""Smooth symmetric mollifiers and pathwise smoothing of grid functions.

The base bump is the classical compactly supported profile
``rho(x) = C * exp(-1 / (1 - x**2))`` on (-1, 1), normalized to unit mass.
Scaling gives ``rho_eps(x) = rho(x / eps) / eps``.

Smoothing of a grid function uses the two-sided convolution over [0, 1]
(the sampled function is extended by zero outside the unit interval, which
reproduces integrals with limits 0 and 1 exactly).  With this convention the
squared smoothed slope of the pinned bridge has expectation
``norm(rho)**2 / eps - 1`` away from the boundary, and this closed form is
what ``renorm_constant`` checks against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import correlate1d

from .errors import DomainError, ResolutionError
from .funcspace import DEFAULT_GRID_INTERVALS, GridFunction, _panel_rule, integrate


def _bump_unnormalized(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0 - 1e-14
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi * xi))
    return out


def _bump_constants() -> tuple[float, float]:
    mass = integrate(_bump_unnormalized, a=-1.0, b=1.0, tol=1e-14)
    c = 1.0 / mass
    l2_sq = integrate(lambda x: (c * _bump_unnormalized(x)) ** 2, a=-1.0, b=1.0, tol=1e-14)
    return c, l2_sq


BASE_NORMALIZER, BASE_L2_SQ = _bump_constants()


def rho_base(x) -> np.ndarray:
    """The unit-mass base bump on (-1, 1)."""
    out = BASE_NORMALIZER * _bump_unnormalized(np.atleast_1d(x))
    return float(out[0]) if np.isscalar(x) else out.reshape(np.shape(x))


def rho_base_prime(x) -> np.ndarray:
    """Exact derivative of the base bump."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(arr)
    inside = np.abs(arr) < 1.0 - 1e-14
    xi = arr[inside]
    out[inside] = -2.0 * xi / (1.0 - xi * xi) ** 2 * (
        BASE_NORMALIZER * np.exp(-1.0 / (1.0 - xi * xi))
    )
    return float(out[0]) if np.isscalar(x) else out.reshape(np.shape(x))


@dataclass(frozen=True)
class Mollifier:
    """Rescaled bump ``rho(x / eps) / eps`` with support (-eps, eps)."""

    epsilon: float
    base_l2_sq: float = field(default=BASE_L2_SQ)

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise DomainError("mollifier scale must lie in (0, 1/2)")


def rho_eval(m: Mollifier, x) -> np.ndarray:
    return rho_base(np.asarray(x) / m.epsilon) / m.epsilon


def rho_prime(m: Mollifier, x) -> np.ndarray:
    return rho_base_prime(np.asarray(x) / m.epsilon) / m.epsilon ** 2


def _kernel_offsets(m: Mollifier, n_intervals: int) -> np.ndarray:
    dt = 1.0 / n_intervals
    if m.epsilon < 2.0 * dt:
        raise ResolutionError(
            f"mollifier scale {m.epsilon} under-resolves a grid with step {dt}"
        )
    half = int(np.ceil(m.epsilon * n_intervals))
    return np.arange(-half, half + 1) * dt


def smooth_path(g: GridFunction, m: Mollifier) -> GridFunction:
    """Two-sided mollification of a grid function over [0, 1].

    Returns the sampled convolution ``t -> integral rho_eps(s - t) g(s) ds``
    with the integral restricted to [0, 1].
    """
    offsets = _kernel_offsets(m, g.n_intervals)
    weights = rho_eval(m, offsets) * g.dt
    smoothed = correlate1d(g.values, weights, mode="constant", cval=0.0)
    return GridFunction(g.n_intervals, smoothed)


def smooth_path_deriv(g: GridFunction, m: Mollifier) -> GridFunction:
    """Exact time derivative of ``smooth_path``: convolution with -rho_eps'."""
    offsets = _kernel_offsets(m, g.n_intervals)
    weights = -rho_prime(m, offsets) * g.dt
    deriv = correlate1d(g.values, weights, mode="constant", cval=0.0)
    return GridFunction(g.n_intervals, deriv)


def smooth_block_deriv(values: np.ndarray, n_intervals: int, m: Mollifier) -> np.ndarray:
    """Row-wise ``smooth_path_deriv`` for a block of sampled paths."""
    offsets = _kernel_offsets(m, n_intervals)
    weights = -rho_prime(m, offsets) / n_intervals
    return correlate1d(values, weights, axis=-1, mode="constant", cval=0.0)


def unit_mass_on_interval(m: Mollifier, t) -> np.ndarray:
    """Mass of ``rho_eps(. - t)`` restricted to [0, 1].

    Equals 1 for t in (eps, 1 - eps) and drops near the boundary.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    pts, wts = _panel_rule(-1.0, 1.0, 8, 64)
    # substitute u = t + eps * x so the window follows t
    u = t_arr[:, None] + m.epsilon * pts[None, :]
    vals = rho_base(pts)[None, :] * ((u >= 0.0) & (u <= 1.0))
    out = np.dot(vals, wts)
    return float(out[0]) if np.isscalar(t) else out.reshape(np.shape(t))


def dot_kernel(m: Mollifier, t: float, n_intervals: int = DEFAULT_GRID_INTERVALS) -> GridFunction:
    """Square-integrable kernel representing the smoothed bridge slope at t.

    The kernel is ``u -> rho_eps(u - t) - mass`` on [0, 1), where ``mass`` is
    the [0, 1]-restricted mass of the shifted mollifier; this is the exact
    result of integrating ``-rho_eps'(s - t)`` against the centered bridge
    kernel in s.  The final grid node carries the left limit, which is the
    natural square-integrable representative.
    """
    if not 0.0 < t < 1.0:
        raise DomainError("dot_kernel needs t in (0, 1)")
    grid = np.linspace(0.0, 1.0, n_intervals + 1)
    mass = unit_mass_on_interval(m, t)
    values = rho_eval(m, grid - t) - mass
    return GridFunction(n_intervals, values)


def renorm_constant(m: Mollifier, t: float) -> float:
    """Squared L2(0, 1) norm of ``dot_kernel``; the Wick subtraction constant.

    Computed from the closed form: the restricted L2 mass of the shifted
    mollifier squared minus the squared restricted unit mass.  For t in
    (eps, 1 - eps) this equals ``base_l2_sq / eps - 1``.
    """
    if not 0.0 < t < 1.0:
        raise DomainError("renorm_constant needs t in (0, 1)")
    lo = max(0.0, t - m.epsilon)
    hi = min(1.0, t + m.epsilon)
    sq = integrate(lambda u: rho_eval(m, u - t) ** 2, a=lo, b=hi, tol=1e-12)
    mass = unit_mass_on_interval(m, t)
    return sq - mass * mass


def smoothed_value(fn, m: Mollifier, t) -> np.ndarray:
    """Mollified value of a function on [0, 1] at times t.

    Evaluates ``integral rho_eps(s - t) fn(s) ds`` over [0, 1] with
    Gauss-Legendre panels, vectorized over t.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    pts, wts = _panel_rule(-1.0, 1.0, 8, 64)
    s = t_arr[:, None] + m.epsilon * pts[None, :]
    inside = (s >= 0.0) & (s <= 1.0)
    fvals = np.where(inside, fn(np.clip(s, 0.0, 1.0)), 0.0)
    out = np.dot(fvals * rho_base(pts)[None, :], wts)
    return float(out[0]) if np.isscalar(t) else out.reshape(np.shape(t))


def smooth_deriv_of(fn, m: Mollifier, t) -> np.ndarray:
    """Mollified derivative of a smooth function on [0, 1] at times t.

    Evaluates ``-integral rho_eps'(s - t) fn(s) ds`` over [0, 1] with
    Gauss-Legendre panels; this is the deterministic analogue of
    ``smooth_path_deriv`` for analytic inputs.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    pts, wts = _panel_rule(-1.0, 1.0, 8, 64)
    s = t_arr[:, None] + m.epsilon * pts[None, :]
    inside = (s >= 0.0) & (s <= 1.0)
    fvals = np.where(inside, fn(np.clip(s, 0.0, 1.0)), 0.0)
    # d/dx rho(x/eps)/eps gives 1/eps**2; one eps cancels with the substitution
    kern = -rho_base_prime(pts)[None, :] / m.epsilon
    out = np.dot(fvals * kern, wts)
    return float(out[0]) if np.isscalar(t) else out.reshape(np.shape(t))
