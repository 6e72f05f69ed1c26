#!/usr/bin/env python3
"""Integrator order study on the sine oracle r'' = -r.

Sweeps the tolerance, records the endpoint error against sin(pi/2) = 1 and
the mean accepted step size, and reports the log-log slope. An order-5 pair
should land between 4 and 6.
"""

import argparse
import math

import numpy as np

from gpbacklund import SecondOrderODE, ToleranceSpec, integrate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, default=10)
    ap.add_argument("--tol0", type=float, default=1e-5)
    ap.add_argument("--factor", type=float, default=4.0)
    args = ap.parse_args()

    sine = SecondOrderODE(rhs=lambda x, r: -r, domain=(1e-3, 10.0))
    x0, x1 = 0.01, math.pi / 2
    print(f"{'tol':>10} {'steps':>7} {'mean h':>11} {'endpoint error':>15}")
    errs, steps = [], []
    for k in range(args.levels):
        tol = args.tol0 * args.factor ** -k
        dense = integrate(sine, x0, math.sin(x0), math.cos(x0), x1,
                          ToleranceSpec(atol=tol, rtol=tol))
        err = abs(dense.evaluate(x1)[0] - 1.0)
        h = (x1 - x0) / dense.meta["steps"]
        errs.append(err)
        steps.append(h)
        print(f"{tol:>10.1e} {dense.meta['steps']:>7} {h:>11.3e} {err:>15.3e}")
    slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    print(f"\nlog(error) vs log(mean step) slope: {slope:.3f}")


if __name__ == "__main__":
    main()
