"""Hand evaluation of the path-loss surrogate and a standalone scalar
bisection for the closed single-node capacity case.

The single-node case (one LAA BS, no WiFi, no channel errors) reduces the
four-state root condition to
    eta0(tau(e^{theta*C})) * e^{(theta*C - R*theta)*T_f} = 1
with tau(z) = z^sigma_idle (every backoff slot idle) and
eta0(y) = (1/W) * (y^W - 1)/(y - 1).
Everything here is written from scratch so the pinned root is independent of
the library. Durations in microseconds, rates in bits per microsecond.
Run: python tools/oracles/pathloss_and_scalar_ec.py
"""

import math


def pathloss_gain(d_m, f_ghz=5.0):
    d = max(d_m, 1.0)
    pl_db = 22.7 + 36.7 * math.log10(d) + 26.0 * math.log10(f_ghz)
    return 10.0 ** (-pl_db / 10.0)


def lhs(c_us, theta, r_us, w=16, sigma_idle=10.0, t_f=1000.0):
    z = math.exp(theta * c_us)
    y = z ** sigma_idle
    if abs(y - 1.0) < 1e-12:
        eta = 1.0
    else:
        eta = (y ** w - 1.0) / (y - 1.0) / w
    return eta * math.exp((theta * c_us - r_us * theta) * t_f)


def solve(theta, r_bps):
    r_us = r_bps * 1e-6
    lo, hi = 0.0, r_us
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if lhs(mid, theta, r_us) < 1.0:
            lo = mid
        else:
            hi = mid
    c_us = 0.5 * (lo + hi)
    return c_us * 1e6


if __name__ == "__main__":
    print(f"gain at d=100 m, f=5 GHz: {pathloss_gain(100.0)!r}")
    print(f"gain at d=1 m (clamp floor): {pathloss_gain(1.0)!r}")
    for theta in (1e-5, 1e-3):
        c = solve(theta, 2.0e7)
        print(f"single-node ec, theta={theta:g}, R=2e7 bit/s: {c!r}"
              f"   # residual {abs(lhs(c * 1e-6, theta, 20.0) - 1.0):.2e}")
