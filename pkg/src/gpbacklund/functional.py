"""Polynomial translation maps, Mobius transformations and the pointwise
solver for the functional equation G(f(x)) = G(x) + K.

G(x) = x^n (1 + eta x^n) is strictly increasing on x > 0, so f is obtained
by inverting G at the shifted target; the closed-form root is polished with
two Newton steps to guard against cancellation for large eta*G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .calculus import SmoothMap
from .errors import DomainError, NoRealRoot, NumericalError, Pole, RangeError

_ROOT_RTOL = 1e-12


def _require_positive(x, what: str = "x"):
    if np.any(np.asarray(x) <= 0.0):
        raise DomainError(f"{what} must be positive")
    return x


@dataclass(frozen=True)
class PolyG:
    """The strictly increasing polynomial G(x) = x^n (1 + eta x^n), x > 0."""

    n: int
    eta: float = 0.0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.eta < 0.0:
            raise ValueError("eta must be nonnegative")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "eta", float(self.eta))

    def value(self, x):
        _require_positive(x)
        xn = x ** self.n
        return xn * (1.0 + self.eta * xn)

    def prime(self, x):
        """G'(x) = n x^(n-1) (1 + 2 eta x^n)."""
        _require_positive(x)
        return self.n * x ** (self.n - 1) * (1.0 + 2.0 * self.eta * x ** self.n)

    def second(self, x):
        n, eta = self.n, self.eta
        return (n * (n - 1) * x ** (n - 2)
                + 2.0 * n * (2 * n - 1) * eta * x ** (2 * n - 2))

    def third(self, x):
        n, eta = self.n, self.eta
        return (n * (n - 1) * (n - 2) * x ** (n - 3)
                + 2.0 * n * (2 * n - 1) * (2 * n - 2) * eta * x ** (2 * n - 3))

    def inverse(self, y):
        """Unique positive root of G(x) = y for y > 0."""
        if np.any(np.asarray(y) <= 0.0):
            raise DomainError("G(x) = y has a positive root only for y > 0")
        if self.eta == 0.0:
            u = y
        else:
            # conjugate form of the quadratic root: stable as eta -> 0
            u = 2.0 * y / (1.0 + np.sqrt(1.0 + 4.0 * self.eta * y))
        x = u if self.n == 1 else u ** (1.0 / self.n)
        for _ in range(2):
            x = x - (self.value(x) - y) / self.prime(x)
        return x

    def as_smooth_map(self, domain: tuple[float, float] = (0.0, math.inf),
                      with_derivatives: bool = True) -> SmoothMap:
        if with_derivatives:
            return SmoothMap(eval=self.value, d1=self.prime, d2=self.second,
                             d3=self.third, domain=domain)
        return SmoothMap(eval=self.value, domain=domain)


@dataclass(frozen=True)
class Mobius:
    """Fractional linear transformation w -> (a w + b) / (c w + d)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if self.det == 0.0:
            raise ValueError("Mobius transformation requires ad - bc != 0")

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def _denominator(self, w):
        denom = self.c * w + self.d
        scale = np.abs(self.c * w) + abs(self.d)
        if np.any(np.abs(denom) <= 1e-12 * scale):
            raise Pole(f"evaluation too close to the pole of {self!r}")
        return denom

    def __call__(self, w):
        return (self.a * w + self.b) / self._denominator(w)

    def derivative(self, w):
        denom = self._denominator(w)
        return self.det / (denom * denom)

    def compose(self, other: "Mobius") -> "Mobius":
        """self after other, by 2x2 matrix multiplication."""
        return Mobius(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mobius":
        return Mobius(a=self.d, b=-self.b, c=-self.c, d=self.a)

    def as_smooth_map(self, domain: tuple[float, float] = (-math.inf, math.inf),
                      with_derivatives: bool = False) -> SmoothMap:
        if not with_derivatives:
            return SmoothMap(eval=lambda w: float(self(w)), domain=domain)
        det = self.det
        c, d = self.c, self.d

        def d1(w: float) -> float:
            return det / (c * w + d) ** 2

        def d2(w: float) -> float:
            return -2.0 * c * det / (c * w + d) ** 3

        def d3(w: float) -> float:
            return 6.0 * c * c * det / (c * w + d) ** 4

        return SmoothMap(eval=lambda w: float(self(w)), d1=d1, d2=d2, d3=d3,
                         domain=domain)


def apply_mobius(m: Mobius, w):
    """(a w + b)/(c w + d); raises Pole near c w + d = 0."""
    return m(w)


@dataclass(frozen=True)
class ShiftMap:
    """Pointwise solution f(x) of G(f(x)) = G(x) + K, f > 0.

    Valid on the interval where G(x) + K > 0; for K < 0 the left endpoint
    x_min = G^{-1}(-K) is computed eagerly, and queries outside raise
    DomainError rather than returning complex roots.
    """

    g: PolyG
    K: float

    @cached_property
    def x_min(self) -> float:
        if self.K >= 0.0:
            return 0.0
        return float(self.g.inverse(-self.K))

    @property
    def valid_domain(self) -> tuple[float, float]:
        return (self.x_min, math.inf)

    def _target(self, x):
        _require_positive(x)
        t = self.g.value(x) + self.K
        if self.g.eta > 0.0 and np.any(1.0 + 4.0 * self.g.eta * t <= 0.0):
            raise NoRealRoot(
                f"discriminant 1 + 4*eta*(G(x)+K) <= 0 for K={self.K}")
        if np.any(t <= 0.0):
            raise DomainError(
                f"G(x) + K <= 0 for K={self.K}: no positive root")
        return t

    def f(self, x):
        t = self._target(x)
        if self.g.eta == 0.0:
            u = t
        else:
            # conjugate form of the quadratic root: stable as eta -> 0
            u = 2.0 * t / (1.0 + np.sqrt(1.0 + 4.0 * self.g.eta * t))
        val = u if self.g.n == 1 else u ** (1.0 / self.g.n)
        for _ in range(2):
            val = val - (self.g.value(val) - t) / self.g.prime(val)
        resid = np.abs(self.g.value(val) - t)
        if np.any(resid > _ROOT_RTOL * np.maximum(1.0, np.abs(t))):
            raise NumericalError(
                f"root polish failed for K={self.K}: |G(f)-G(x)-K| = "
                f"{float(np.max(resid)):.3e}")
        return val

    def f_prime(self, x, fval=None):
        """f'(x) = G'(x)/G'(f(x)) by implicit differentiation."""
        f = self.f(x) if fval is None else fval
        return self.g.prime(x) / self.g.prime(f)

    def f_second(self, x, fval=None, fp=None):
        f = self.f(x) if fval is None else fval
        fp = self.f_prime(x, f) if fp is None else fp
        return (self.g.second(x) - self.g.second(f) * fp * fp) / self.g.prime(f)

    def f_third(self, x, fval=None, fp=None, fpp=None):
        f = self.f(x) if fval is None else fval
        fp = self.f_prime(x, f) if fp is None else fp
        fpp = self.f_second(x, f, fp) if fpp is None else fpp
        return ((self.g.third(x) - self.g.third(f) * fp ** 3
                 - 3.0 * self.g.second(f) * fp * fpp) / self.g.prime(f))

    def inverse(self) -> "ShiftMap":
        return ShiftMap(g=self.g, K=-self.K)

    def as_smooth_map(self, with_derivatives: bool = False) -> SmoothMap:
        ev = lambda x: float(self.f(x))
        if not with_derivatives:
            return SmoothMap(eval=ev, domain=self.valid_domain)
        return SmoothMap(
            eval=ev,
            d1=lambda x: float(self.f_prime(x)),
            d2=lambda x: float(self.f_second(x)),
            d3=lambda x: float(self.f_third(x)),
            domain=self.valid_domain,
        )


def solve_f(shift: ShiftMap, x):
    """The positive root f with its derivative, as a pair (f, fprime)."""
    f = shift.f(x)
    return f, shift.f_prime(x, f)


def conjugate_f(w: SmoothMap, w_inverse: Callable[[float], float],
                m: Mobius, match_tol: float = 1e-10) -> SmoothMap:
    """The conjugated map f = w^{-1} o m o w, so w(f(x)) = m(w(x)).

    ``w`` must be strictly monotone on its domain with ``w_inverse`` its
    inverse; raises RangeError whenever m(w(x)) leaves the range of w.
    """
    lo, hi = w.domain

    def ev(x: float) -> float:
        t = float(m(w.eval(x)))
        y = float(w_inverse(t))
        if not math.isfinite(y) or not (lo < y < hi):
            raise RangeError(
                f"m(w({x!r})) = {t!r} has no preimage inside the domain of w")
        if abs(w.eval(y) - t) > match_tol * max(1.0, abs(t)):
            raise RangeError(
                f"w_inverse failed to invert w at {t!r} to within {match_tol}")
        return y

    d1 = None
    if w.d1 is not None:
        def d1(x: float) -> float:
            return float(m.derivative(w.eval(x))) * w.d1(x) / w.d1(ev(x))

    return SmoothMap(eval=ev, d1=d1, domain=w.domain)
