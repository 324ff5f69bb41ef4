"""Kernel functions, Gram matrices and RKHS inner-product utilities.

The built-in kernel is the first-order Sobolev kernel on [0, 1],
``K(x, t) = min(x, t) - x*t``, whose RKHS is the space of absolutely
continuous functions vanishing at both endpoints with inner product
``<f, g> = int f' g'``.  Custom kernels plug in through :class:`Kernel`
with a vectorized evaluation rule and a supremum bound ``kappa``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Eigenvalues this far below zero (relative to the largest) are treated as
# floating-point noise and clamped before any spectral filter is applied.
PSD_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Kernel:
    """A symmetric positive semidefinite kernel on a real interval.

    Parameters
    ----------
    name : str
        Identifier used in configs and reports.
    fn : callable
        Vectorized evaluation ``fn(x, t)``; must broadcast and satisfy
        ``fn(x, t) == fn(t, x)``.
    kappa : float
        Supremum bound ``sup_x sqrt(K(x, x))``.
    low, high : float
        Domain endpoints; inputs outside ``[low, high]`` are rejected.
    exactly_symmetric : bool
        If the evaluation rule is symmetric in floating point (true for
        the built-in), Gram assembly skips the symmetrizing pass.
    """

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    kappa: float
    low: float = 0.0
    high: float = 1.0
    exactly_symmetric: bool = True

    def __call__(self, x, t):
        return evaluate(self, x, t)


def _sobolev_min_fn(x, t):
    return np.minimum(x, t) - x * t


def sobolev_min() -> Kernel:
    """The kernel ``min(x, t) - x*t`` on [0, 1]; ``kappa = 1/2``.

    ``K(x, x) = x - x**2`` peaks at 1/4, hence the bound.
    """
    return Kernel(name="sobolev-min", fn=_sobolev_min_fn, kappa=0.5)


def user_kernel(fn, kappa, name="user", low=0.0, high=1.0,
                exactly_symmetric=False) -> Kernel:
    """Wrap a custom positive semidefinite kernel with its sup bound."""
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    return Kernel(name=name, fn=fn, kappa=float(kappa), low=low, high=high,
                  exactly_symmetric=exactly_symmetric)


def _check_domain(kernel: Kernel, a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.size and (a.min() < kernel.low or a.max() > kernel.high):
        raise ValueError(
            f"input outside kernel domain [{kernel.low}, {kernel.high}]")
    return a


def evaluate(kernel: Kernel, x, t):
    """Evaluate ``K(x, t)``; scalars in, scalar out, arrays broadcast."""
    xa = _check_domain(kernel, x)
    ta = _check_domain(kernel, t)
    out = kernel.fn(xa, ta)
    if np.isscalar(x) and np.isscalar(t):
        return float(out)
    return out


def kappa_of(kernel: Kernel) -> float:
    """Supremum bound ``sup_x sqrt(K(x, x))`` carried by the kernel."""
    return kernel.kappa


def gram(kernel: Kernel, points) -> np.ndarray:
    """Dense Gram matrix ``G[i, j] = K(x_i, x_j)`` for the given anchors.

    The result is exactly symmetric; asymmetric floating-point noise from
    a user evaluation rule is averaged out.
    """
    pts = _check_domain(kernel, points)
    if pts.ndim != 1:
        pts = pts.ravel()
    if pts.size == 0:
        raise ValueError("gram requires at least one point")
    G = kernel.fn(pts[:, None], pts[None, :])
    if not kernel.exactly_symmetric:
        G = 0.5 * (G + G.T)
    return G


def rkhs_norm_sq(expansion) -> float:
    """Squared RKHS norm ``alpha' G alpha`` of a kernel expansion.

    Accepts any object with ``coefficients``, ``points`` and ``kernel``
    attributes.  Tiny negative values from rounding are clamped to zero.
    """
    alpha = np.asarray(expansion.coefficients, dtype=float)
    if alpha.size == 0:
        return 0.0
    G = gram(expansion.kernel, expansion.points)
    val = float(alpha @ G @ alpha)
    if val < 0:
        if val < -PSD_TOLERANCE:
            raise ArithmeticError(f"Gram quadratic form is negative: {val}")
        val = 0.0
    return val
