"""Derivatives and Schwarzian derivatives of scalar maps.

Closed-form derivatives are used whenever a map carries them; otherwise the
estimate is a central finite difference (5 points for orders 1 and 2, 7
points for order 3) sharpened by one step of Richardson extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import CriticalPoint, DomainError, NonFinite

_EPS = float(np.finfo(float).eps)

_DEFAULT_POINTS = {1: 5, 2: 5, 3: 7}


@dataclass(frozen=True)
class SmoothMap:
    """Scalar map of one real variable with an optional derivative tower.

    ``d1``..``d3`` are closed-form derivatives; any subset may be supplied.
    ``domain`` is the open interval on which ``eval`` is defined.
    """

    eval: Callable[[float], float]
    d1: Optional[Callable[[float], float]] = None
    d2: Optional[Callable[[float], float]] = None
    d3: Optional[Callable[[float], float]] = None
    domain: tuple[float, float] = (-math.inf, math.inf)

    def closed_form(self, order: int) -> Optional[Callable[[float], float]]:
        return (self.d1, self.d2, self.d3)[order - 1]


@dataclass(frozen=True)
class Stencil:
    """Central difference stencil; ``points`` odd, >= 5 and >= order + 2."""

    order: int
    points: int
    base_step: float

    def __post_init__(self) -> None:
        if self.order not in (1, 2, 3):
            raise ValueError("derivative order must be 1, 2 or 3")
        if self.points < 5 or self.points % 2 == 0:
            raise ValueError("stencil needs an odd point count >= 5")
        if self.points < self.order + 2:
            raise ValueError("stencil needs points >= order + 2")
        if not self.base_step > 0.0:
            raise ValueError("base_step must be positive")

    @property
    def half_width(self) -> int:
        return self.points // 2


def default_stencil(order: int, z: float) -> Stencil:
    """Stencil with step eps^(1/(points+1)) * max(1, |z|)."""
    points = _DEFAULT_POINTS[order]
    step = _EPS ** (1.0 / (points + 1)) * max(1.0, abs(z))
    return Stencil(order=order, points=points, base_step=step)


@lru_cache(maxsize=None)
def _central_weights(points: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.arange(-(points // 2), points // 2 + 1, dtype=float)
    return fd_weights(tuple(offsets), order), offsets


def fd_weights(offsets: tuple[float, ...], order: int) -> np.ndarray:
    """Finite-difference weights for d^order/dx^order on the given offsets.

    Offsets are in units of the step h; the caller divides by h**order.
    """
    m = len(offsets)
    if order >= m:
        raise ValueError("need more points than the derivative order")
    mat = np.array([[o ** k / math.factorial(k) for o in offsets] for k in range(m)])
    rhs = np.zeros(m)
    rhs[order] = 1.0
    return np.linalg.solve(mat, rhs)


def _apply_stencil(f: SmoothMap, z: float, h: float, weights: np.ndarray,
                   offsets: np.ndarray, order: int) -> float:
    vals = np.array([f.eval(z + o * h) for o in offsets], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFinite(f"map returned a non-finite value near z={z!r}")
    return float(weights @ vals) / h ** order


def _fd_derivative(f: SmoothMap, order: int, z: float, stencil: Stencil) -> float:
    weights, offsets = _central_weights(stencil.points, order)
    h = stencil.base_step
    half = stencil.half_width
    lo, hi = f.domain
    if not (lo < z - half * h and z + half * h < hi):
        raise DomainError(
            f"stencil of half-width {half * h:.3e} around z={z!r} exits the "
            f"declared domain ({lo!r}, {hi!r})")
    coarse = _apply_stencil(f, z, h, weights, offsets, order)
    fine = _apply_stencil(f, z, 0.5 * h, weights, offsets, order)
    # accuracy order of the symmetric stencil (odd orders round up to even)
    p = stencil.points - order
    p += p % 2
    fac = 2.0 ** p
    return (fac * fine - coarse) / (fac - 1.0)


def derivative(f: SmoothMap, order: int, z: float,
               stencil: Optional[Stencil] = None) -> float:
    """Derivative of the given order at z.

    Uses the closed form when the map carries one for that order, otherwise
    a Richardson-extrapolated central difference.
    """
    if order not in (1, 2, 3):
        raise ValueError("derivative order must be 1, 2 or 3")
    closed = f.closed_form(order)
    if closed is not None:
        val = float(closed(z))
        if not math.isfinite(val):
            raise NonFinite(f"closed-form derivative non-finite at z={z!r}")
        return val
    return _fd_derivative(f, order, z, stencil or default_stencil(order, z))


def schwarzian(f: SmoothMap, z: float, critical_tol: float = 1e-9) -> float:
    """Schwarzian derivative f'''/f' - (3/2)(f''/f')^2 at z.

    Raises CriticalPoint when |f'| falls below the configured threshold;
    the expression is singular there and a huge return value would silently
    corrupt downstream residuals.
    """
    f1 = derivative(f, 1, z)
    f2 = derivative(f, 2, z)
    h = default_stencil(2, z).base_step
    if abs(f1) < critical_tol * max(1.0, abs(f2) * h):
        raise CriticalPoint(f"|f'({z!r})| = {abs(f1):.3e} is numerically zero")
    f3 = derivative(f, 3, z)
    ratio = f2 / f1
    return f3 / f1 - 1.5 * ratio * ratio


def compose(outer: SmoothMap, inner: SmoothMap) -> SmoothMap:
    """Composition outer(inner(.)) with chain-rule derivatives where available."""

    def ev(z: float) -> float:
        return outer.eval(inner.eval(z))

    d1 = d2 = d3 = None
    if outer.d1 and inner.d1:
        def d1(z: float) -> float:
            return outer.d1(inner.eval(z)) * inner.d1(z)
    if outer.d1 and outer.d2 and inner.d1 and inner.d2:
        def d2(z: float) -> float:
            u = inner.eval(z)
            du = inner.d1(z)
            return outer.d2(u) * du * du + outer.d1(u) * inner.d2(z)
        if outer.d3 and inner.d3:
            def d3(z: float) -> float:
                u = inner.eval(z)
                du = inner.d1(z)
                ddu = inner.d2(z)
                return (outer.d3(u) * du ** 3
                        + 3.0 * outer.d2(u) * du * ddu
                        + outer.d1(u) * inner.d3(z))
    return SmoothMap(eval=ev, d1=d1, d2=d2, d3=d3, domain=inner.domain)
