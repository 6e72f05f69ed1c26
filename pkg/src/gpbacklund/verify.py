"""Numerical verification suites for the functional identities behind the
transformation machinery.

Each check returns a CheckResult with the measured worst-case deviation and
the tolerance it was held to. ``constraint_activity`` is a reversed check:
it passes when the deviation is at least the tolerance, confirming that
breaking the closed-form constraint visibly breaks the residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backlund import BacklundMap, is_fixed_point
from .calculus import SmoothMap, compose, derivative, schwarzian
from .functional import Mobius, PolyG, ShiftMap, solve_f
from .gp import (ClosedFormSolution, GPParams, closed_form_residual,
                 linear_coefficient_check)

PARAM_SWEEP = [(n, eta) for n in (1, 2, 3) for eta in (0.0, 0.5, 1.0)]

# double-precision floor of the absolute translation criterion: the computed
# residual G(f) - G(x) - K cannot beat ~eps * |G| however exact the root is
_TARGET_CAP = 5e4


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    passed: bool
    higher_is_better: bool = False

    def as_dict(self) -> dict:
        return {"name": self.name, "deviation": self.deviation,
                "tolerance": self.tolerance, "pass": self.passed}


def _result(name: str, deviation: float, tolerance: float,
            higher_is_better: bool = False) -> CheckResult:
    deviation = float(deviation)
    tolerance = float(tolerance)
    passed = deviation >= tolerance if higher_is_better else deviation < tolerance
    return CheckResult(name=name, deviation=deviation, tolerance=tolerance,
                       passed=bool(passed), higher_is_better=higher_is_better)


def random_mobius_with_points(rng: np.random.Generator, n_points: int):
    """Well-conditioned random Mobius map with evaluation points.

    Conditioning: |det| >= 0.5, moderate denominator, and unit distance from
    the pole (differencing any map is hopeless against the pole's factorial
    derivative growth). Maps admitting no such points are redrawn.
    """
    while True:
        a, b, c, d = rng.uniform(-1.5, 1.5, size=4)
        if abs(a * d - b * c) < 0.5:
            continue
        m = Mobius(a, b, c, d)
        points = []
        for _ in range(60 * n_points):
            z = float(rng.uniform(-2.0, 2.0))
            denom = abs(c * z + d)
            if 0.7 <= denom <= 2.0 and denom >= abs(c):
                points.append(z)
                if len(points) == n_points:
                    return m, points


def check_mobius_kernel(rng: np.random.Generator, n_maps: int = 100,
                        n_points: int = 10,
                        tolerance: float = 1e-7) -> CheckResult:
    """Finite-difference Schwarzian of fractional linear maps vanishes."""
    worst = 0.0
    for _ in range(n_maps):
        m, points = random_mobius_with_points(rng, n_points)
        fd_map = m.as_smooth_map(with_derivatives=False)
        for z in points:
            worst = max(worst, abs(schwarzian(fd_map, z)))
    return _result("mobius_schwarzian_kernel", worst, tolerance)


def _smooth_pool(rng: np.random.Generator):
    """Random smooth map and its true first derivative (for conditioning)."""
    kind = rng.integers(0, 5)
    if kind == 0:
        alpha = rng.uniform(0.7, 1.5) * rng.choice([-1.0, 1.0])
        beta = rng.uniform(-1.0, 1.0)
        return (lambda z: alpha * z + beta), (lambda z: alpha)
    if kind == 1:
        alpha = rng.uniform(0.4, 0.9) * rng.choice([-1.0, 1.0])
        return (lambda z: math.exp(alpha * z)), \
               (lambda z: alpha * math.exp(alpha * z))
    if kind == 2:
        gam = rng.uniform(-0.5, 0.5)
        return (lambda z: z + gam * math.sin(z)), \
               (lambda z: 1.0 + gam * math.cos(z))
    if kind == 3:
        dlt = rng.uniform(0.05, 0.3)
        return (lambda z: z + dlt * z ** 3), (lambda z: 1.0 + 3 * dlt * z * z)
    w = rng.uniform(0.3, 0.8)
    return (lambda z: math.tanh(w * z) + z), \
           (lambda z: w / math.cosh(w * z) ** 2 + 1.0)


def check_composition_law(rng: np.random.Generator, n_pairs: int = 100,
                          tolerance: float = 1e-6) -> CheckResult:
    """{g o f, z} = (f')^2 {g, f(z)} + {f, z} for random smooth pairs."""
    worst = 0.0
    done = 0
    while done < n_pairs:
        f_ev, f_d1 = _smooth_pool(rng)
        g_ev, g_d1 = _smooth_pool(rng)
        z = rng.uniform(-1.2, 1.2)
        u = f_ev(z)
        if abs(f_d1(z)) < 0.3 or abs(g_d1(u)) < 0.3 or abs(u) > 2.5:
            continue
        done += 1
        f_map = SmoothMap(eval=f_ev)
        g_map = SmoothMap(eval=g_ev)
        fp = derivative(f_map, 1, z)
        dev = abs(schwarzian(compose(g_map, f_map), z)
                  - fp * fp * schwarzian(g_map, u) - schwarzian(f_map, z))
        worst = max(worst, dev)
    return _result("schwarzian_composition", worst, tolerance)


def _draw_shift(rng: np.random.Generator):
    while True:
        n = int(rng.integers(1, 4))
        eta = float(rng.uniform(0.0, 2.0))
        x = float(rng.uniform(0.1, 10.0))
        k = float(rng.uniform(-2.0, 3.0))
        g = PolyG(n, eta)
        t = g.value(x) + k
        if 1e-6 < t < _TARGET_CAP:
            return g, k, x


def check_translation_property(rng: np.random.Generator, n_samples: int = 400,
                               tolerance: float = 1e-10) -> CheckResult:
    """|G(f(x)) - G(x) - K| stays below the absolute tolerance."""
    worst = 0.0
    for _ in range(n_samples):
        g, k, x = _draw_shift(rng)
        f = ShiftMap(g, k).f(x)
        worst = max(worst, abs(g.value(f) - g.value(x) - k))
    return _result("translation_property", worst, tolerance)


def check_semigroup(rng: np.random.Generator, n_samples: int = 200,
                    tolerance: float = 1e-9) -> CheckResult:
    """f_{K1} o f_{K2} = f_{K1+K2} pointwise."""
    worst = 0.0
    for _ in range(n_samples):
        n = int(rng.integers(1, 4))
        eta = float(rng.uniform(0.0, 2.0))
        x = float(rng.uniform(0.2, 5.0))
        k1 = float(rng.uniform(0.0, 2.0))
        k2 = float(rng.uniform(0.0, 2.0))
        g = PolyG(n, eta)
        chained = ShiftMap(g, k1).f(ShiftMap(g, k2).f(x))
        direct = ShiftMap(g, k1 + k2).f(x)
        worst = max(worst, abs(chained - direct))
    return _result("translation_semigroup", worst, tolerance)


def check_q_identity(k_values=(0.5, 1.0), tolerance: float = 1e-5,
                     x_lo: float = 0.8, x_hi: float = 3.0,
                     points: int = 12) -> CheckResult:
    """Q(x) = f'^2 Q(f) + {f, x} with Q the Schwarzian of G and {f, x}
    taken by finite differences of the pointwise solver."""
    worst = 0.0
    for n, eta in [(1, 0.5), (1, 1.0), (2, 0.5), (2, 1.0), (3, 0.5)]:
        g = PolyG(n, eta)
        g_map = g.as_smooth_map()
        for k in k_values:
            shift = ShiftMap(g, float(k))
            f_map = shift.as_smooth_map()
            for x in np.linspace(max(x_lo, shift.x_min + 0.2), x_hi, points):
                f, fp = solve_f(shift, float(x))
                dev = abs(schwarzian(g_map, float(x))
                          - fp * fp * schwarzian(g_map, float(f))
                          - schwarzian(f_map, float(x)))
                worst = max(worst, dev)
    return _result("q_identity", worst, tolerance)


def check_linear_coefficient(tolerance: float = 1e-6,
                             points: int = 19) -> CheckResult:
    """The equation's linear coefficient equals -(1/2){G, x}."""
    worst = 0.0
    for n, eta in PARAM_SWEEP:
        p = GPParams(n=n, eta=eta, b=-1.0, c=1.0)
        for x in np.linspace(0.5, 5.0, points):
            worst = max(worst, abs(linear_coefficient_check(p, float(x))))
    return _result("linear_coefficient", worst, tolerance)


def check_closed_form_residual(c: float = 1.0, v: float = 1.0,
                               x_lo: float = 0.5, x_hi: float = 5.0,
                               points: int = 401,
                               tolerance: float = 1e-7) -> CheckResult:
    """The closed-form amplitude solves the equation under the constraint."""
    xs = np.linspace(x_lo, x_hi, points)
    worst = 0.0
    for n, eta in PARAM_SWEEP:
        p = GPParams.constrained(n=n, eta=eta, c=c, v=v)
        worst = max(worst, float(np.max(np.abs(closed_form_residual(p, xs)))))
    return _result("closed_form_residual", worst, tolerance)


def check_constraint_activity(c: float = 1.0, v: float = 1.0,
                              delta: float = 0.01,
                              x_lo: float = 0.5, x_hi: float = 5.0,
                              points: int = 401,
                              tolerance: float = 1e-3) -> CheckResult:
    """Perturbing b off the constraint must visibly break the residual.

    Reversed check: passes when the smallest residual across the sweep is
    still at least the tolerance.
    """
    xs = np.linspace(x_lo, x_hi, points)
    smallest = math.inf
    for n, eta in PARAM_SWEEP:
        base = -(c * c) / v ** 6
        p = GPParams(n=n, eta=eta, b=base + delta, c=c, v=v)
        smallest = min(smallest,
                       float(np.max(np.abs(closed_form_residual(p, xs)))))
    return _result("constraint_activity", smallest, tolerance,
                   higher_is_better=True)


def check_fixed_point_for(params: GPParams, k_values=(0.25, 0.5, 1.0),
                          xs=None, tolerance: float = 1e-10) -> float:
    """Worst fixed-point deviation of the closed form for one parameter set.

    The translation map is evaluated on the full grid first, so an invalid
    (K, grid) combination surfaces as NoRealRoot or DomainError instead of
    being silently trimmed away.
    """
    if xs is None:
        xs = np.linspace(0.5, 3.0, 101)
    p = GPParams.constrained(n=params.n, eta=params.eta, c=params.c,
                             v=params.v)
    seed = ClosedFormSolution(p)
    worst = 0.0
    for k in k_values:
        shift = ShiftMap(p.g, float(k))
        shift.f(xs)  # validity probe for the whole grid
        res = is_fixed_point(BacklundMap(shift=shift), seed, xs, tol=tolerance)
        worst = max(worst, res.deviation)
    return worst


def check_fixed_point(k_values=(0.25, 0.5, 1.0), c: float = 1.0,
                      v: float = 1.0, params: GPParams | None = None,
                      xs=None, tolerance: float = 1e-10) -> CheckResult:
    """The closed form is a fixed point of the transformation for every K.

    The configured parameter set (when given) is probed first so its
    failures are the ones reported; the standard sweep follows.
    """
    worst = 0.0
    if params is not None:
        worst = check_fixed_point_for(params, k_values, xs, tolerance)
    for n, eta in PARAM_SWEEP:
        p = GPParams.constrained(n=n, eta=eta, c=c, v=v)
        worst = max(worst,
                    check_fixed_point_for(p, k_values, xs, tolerance))
    return _result("fixed_point", worst, tolerance)


def run_identity_checks(rng_seed: int = 0, c: float = 1.0, v: float = 1.0,
                        k_values=(0.25, 0.5, 1.0),
                        params: GPParams | None = None,
                        xs=None) -> list[CheckResult]:
    """The full identity suite in a deterministic order."""
    rng = np.random.default_rng(rng_seed)
    k_values = tuple(k_values) or (0.25, 0.5, 1.0)
    return [
        check_mobius_kernel(rng),
        check_composition_law(rng),
        check_translation_property(rng),
        check_semigroup(rng),
        check_q_identity(k_values=[k for k in k_values if k > 0.0] or (0.5,)),
        check_linear_coefficient(),
        check_closed_form_residual(c=c, v=v),
        check_constraint_activity(c=c, v=v),
        check_fixed_point(k_values=k_values, c=c, v=v, params=params, xs=xs),
    ]
