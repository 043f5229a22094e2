"""Independent root-finder for the delay-to-theta mapping.

The package solves eta * exp(-theta*C(theta)*D) = p_th by bracketing plus
bisection on the excess exponent. This oracle solves the same equation by
damped fixed-point iteration theta <- ln(eta/p_th) / (C(theta)*D), which is
a contraction because C is strictly decreasing in theta, and prints theta*
to full precision together with the residual identity
theta* C(theta*) D - ln(eta/p_th).

The exponent theta*C(theta)*1e-6 is bounded by the t-hat-3 domain limit
x_max, so d_max below ln(eta/p_th)/(x_max*1e6) is infeasible; the iteration
diverges there and the guard reports it.

The capacity evaluator C(theta) is the package's two-state solver, which is
itself pinned against the standalone scalar bisection oracle and the
cycle-domain Monte Carlo; only the root-finding layer is under test here.
"""

import math
import sys

sys.path.insert(0, "../../src")

import laacap as L

RATE = 2e7       # bit/s
ARRIVAL = 1e6    # bit/s, below the mean service rate of both modes
P_TH = 0.1
D_GRID = {
    L.FCW: (0.02, 0.05, 0.1, 0.2, 0.5),
    L.VCW: (0.1, 0.2, 0.5),
}


def solve_fp(d_max, params, cp, transforms):
    msr = L.mean_service_rate(params, cp, RATE, transforms)
    eta = ARRIVAL / msr
    target = math.log(eta / P_TH)
    d_us = d_max * 1e6
    theta = 1e-6
    for _ in range(400):
        sol = L.ec_two_state(theta, RATE, params, cp, transforms)
        if sol.ec <= 0 or theta > 1.0:
            return None, None, eta, None
        nxt = target / (sol.ec * 1e-6 * d_us)
        step = 0.5 * (nxt - theta)  # damping keeps the iteration contracting
        if abs(step) <= 1e-14 * theta:
            break
        theta += step
    sol = L.ec_two_state(theta, RATE, params, cp, transforms)
    resid = theta * sol.ec * 1e-6 * d_us - target
    return theta, sol.ec, eta, resid


def main():
    for mode in (L.FCW, L.VCW):
        params = L.SystemParams(mode=mode)
        cp = L.solve_fixed_point(params)
        transforms = L.build_transforms(params, cp)
        x_max = transforms[4].log_z_max()
        print(f"== {mode} ==  (rate {RATE:g}, arrival {ARRIVAL:g}, p_th {P_TH})")
        prev_theta = None
        prev_c = None
        for d in D_GRID[mode]:
            theta, c, eta, resid = solve_fp(d, params, cp, transforms)
            if theta is None:
                print(f"d_max={d:g}s infeasible "
                      f"(d below {math.log(eta / P_TH) / (x_max * 1e6):.4f} s)")
                continue
            mono = ""
            if prev_theta is not None:
                mono = f" dtheta<0:{theta < prev_theta} dC>0:{c > prev_c}"
            print(f"d_max={d:g}s theta*={theta!r} C={c!r} eta={eta!r} "
                  f"resid={resid:.3e}{mono}")
            prev_theta, prev_c = theta, c
        print(f"feasibility floor: {math.log((ARRIVAL / L.mean_service_rate(params, cp, RATE, transforms)) / P_TH) / (x_max * 1e6):.6f} s")


if __name__ == "__main__":
    main()
