"""Effective-capacity solvers for the tagged LAA link.

Two equivalent routes are implemented and kept separate on purpose:
  - the four-state route solves the root condition
        (1-P) t1(e^{theta C}) [ (1-eps) e^{(theta C - R theta) T_f}
                                + eps e^{theta C T_f} ] + P t2(e^{theta C}) = 1
    with P = p_laa^{K_L}, by bisection on C in [0, R];
  - the two-state route inverts F(x) = log t3(e^x) + x T_f at R theta T_f
    and returns C = x*/theta.
Their agreement is the library's main cross-check. Rates at the API are
bit/s; internally C is bits per microsecond so that x = theta*C stays small.
"""

import math
from dataclasses import dataclass

import numpy as np

from .contention import slot_distribution, slot_pgf
from .genfun import (GenFunDomainError, big_f, big_f_value, t1_hat, t2_hat,
                     t3_hat, _exp_f)

FOUR_STATE = "FourState"
TWO_STATE = "TwoState"

_BISECT_ITERS = 300


@dataclass
class EcSolution:
    """One solved effective-capacity point with diagnostics."""

    theta: float            # QoS exponent, 1/bits
    rate: float             # peak service rate R, bit/s
    ec: float               # effective capacity C(theta), bit/s
    method: str             # FourState or TwoState
    bracket: tuple          # final root bracket, bit/s
    residual: float         # defining-equation defect at the solution
    spectral_defect: float | None = None
    domain_limited: bool = False


def build_transforms(params, cp):
    """Slot PGF and the three interval transforms at one contention point."""
    sd = slot_distribution(cp, params)
    slot = slot_pgf(sd)
    t1 = t1_hat(params, cp, slot)
    t2 = t2_hat(params, cp, slot)
    t3 = t3_hat(params, cp, slot)
    return sd, slot, t1, t2, t3


def _check_theta_rate(theta, rate):
    if not theta > 0:
        raise ValueError("theta must be > 0")
    if rate < 0:
        raise ValueError("rate must be >= 0")


def ec_four_state(theta, rate, params, cp, transforms=None):
    """Effective capacity from the four-state root condition."""
    _check_theta_rate(theta, rate)
    if rate == 0:
        return EcSolution(theta, rate, 0.0, FOUR_STATE, (0.0, 0.0), 0.0)
    if transforms is None:
        transforms = build_transforms(params, cp)
    _, _, t1, t2, _ = transforms
    r_us = rate * 1e-6
    tf = params.t_f_us
    eps = params.per
    big_p = cp.p_laa ** params.k_retry_laa

    def lhs(c_us):
        z = _exp_f(theta * c_us)
        g1 = t1.value(z)
        bracket = ((1.0 - eps) * _exp_f((theta * c_us - r_us * theta) * tf)
                   + (eps * _exp_f(theta * c_us * tf) if eps else 0.0))
        s = (1.0 - big_p) * g1 * bracket
        if big_p != 0.0:
            s = s + big_p * t2.value(z)
        return s

    lo, hi = 0.0, r_us
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if lhs(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    c_us = 0.5 * (lo + hi)
    return EcSolution(theta, rate, c_us * 1e6, FOUR_STATE,
                      (lo * 1e6, hi * 1e6), abs(lhs(c_us) - 1.0))


def ec_two_state(theta, rate, params, cp, transforms=None):
    """Effective capacity by inverting F(x) = log t3(e^x) + x T_f."""
    _check_theta_rate(theta, rate)
    if rate == 0:
        return EcSolution(theta, rate, 0.0, TWO_STATE, (0.0, 0.0), 0.0)
    if transforms is None:
        transforms = build_transforms(params, cp)
    t3 = transforms[4]
    r_us = rate * 1e-6
    tf = params.t_f_us
    target = r_us * theta * tf
    x_max = t3.log_z_max()
    hi_cap = theta * r_us
    domain_limited = False
    if x_max < hi_cap:
        hi_cap = x_max * (1.0 - 1e-13)
        domain_limited = True  # may clear below if the root is interior
    lo, hi = 0.0, hi_cap
    if big_f_value(hi, t3, params) < target:
        # target unreachable below the domain edge; report the supremum
        return EcSolution(theta, rate, hi / theta * 1e6, TWO_STATE,
                          (lo / theta * 1e6, hi / theta * 1e6),
                          abs(big_f_value(hi, t3, params) - target),
                          domain_limited=True)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if big_f_value(mid, t3, params) < target:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    if domain_limited and hi < hi_cap:
        domain_limited = False  # root strictly inside the domain
    resid = abs(big_f_value(x, t3, params) - target)
    return EcSolution(theta, rate, x / theta * 1e6, TWO_STATE,
                      (lo / theta * 1e6, hi / theta * 1e6), resid,
                      domain_limited=domain_limited)


def transition_matrix(sol, params, cp, transforms=None):
    """The 4x4 nonnegative matrix whose unit spectral radius certifies the
    solution; rows and columns ordered (OFF2, OFF3, OFF1, ON).

    OFF2 holds the pre-delivery contention interval (weight t1), OFF3 the
    dropped-packet interval (weight t2), OFF1 a collision-free transmission
    lost to a channel error, ON a delivered transmission.
    """
    if transforms is None:
        transforms = build_transforms(params, cp)
    _, _, t1, t2, _ = transforms
    theta = sol.theta
    c_us = sol.ec * 1e-6
    r_us = sol.rate * 1e-6
    tf = params.t_f_us
    eps = params.per
    big_p = cp.p_laa ** params.k_retry_laa
    z = _exp_f(theta * c_us)
    g1 = (1.0 - big_p) * t1.value(z)
    g2 = big_p * t2.value(z) if big_p else 0.0
    a = eps * _exp_f(theta * c_us * tf) if eps else 0.0
    b = (1.0 - eps) * _exp_f((theta * c_us - r_us * theta) * tf)
    h = np.array([
        [0.0, 0.0, a, b],
        [g1, g2, 0.0, 0.0],
        [g1, g2, 0.0, 0.0],
        [g1, g2, 0.0, 0.0],
    ])
    return h


def spectral_radius(h, tol=1e-13, max_iter=5000):
    """Power iteration on H + I (the shift keeps periodic chains convergent)."""
    v = np.full(h.shape[0], 1.0)
    rho = 0.0
    for _ in range(max_iter):
        w = h @ v + v
        nw = w.sum()  # L1 norm; H is nonnegative and v stays positive
        if nw <= 0 or not math.isfinite(nw):
            raise RuntimeError("power iteration lost positivity")
        w /= nw
        if abs(nw - rho) <= tol * max(1.0, abs(nw)):
            return nw - 1.0
        rho = nw
        v = w
    raise RuntimeError("power iteration did not converge")


def spectral_check(sol, params, cp, transforms=None):
    """|spectral radius - 1| of the verification matrix at a solution."""
    h = transition_matrix(sol, params, cp, transforms)
    return abs(spectral_radius(h) - 1.0)


def mean_service_rate(params, cp, rate, transforms=None):
    """Long-run average delivered rate R T_f / (T_f + E[t3]), bit/s."""
    if transforms is None:
        transforms = build_transforms(params, cp)
    t3 = transforms[4]
    e_t3 = t3.mean()
    tf = params.t_f_us
    return rate * tf / (tf + e_t3)


def ec_zero_theta_limit(params, cp, rate, transforms=None):
    """Alias of mean_service_rate: the effective capacity as theta -> 0."""
    return mean_service_rate(params, cp, rate, transforms)


@dataclass
class DelayMapping:
    """QoS exponent meeting a delay-violation target."""

    theta: float
    feasible: bool
    d_max_s: float
    p_threshold: float
    eta: float              # non-empty-buffer estimate arrival/mean-service


def theta_of_delay(d_max, p_th, arrival, params, cp, rate, tol=1e-10):
    """Solve eta * exp(-theta C(theta) D_max) = p_th for theta.

    eta is approximated by arrival / mean service rate. Returns theta = 0
    with feasible=False when the target is met by any theta (p_th >= eta).
    """
    if not 0.0 < p_th < 1.0:
        raise ValueError("p_th must be in (0, 1)")
    if d_max <= 0:
        raise ValueError("d_max must be > 0")
    if arrival <= 0:
        raise ValueError("arrival must be > 0")
    transforms = build_transforms(params, cp)
    msr = mean_service_rate(params, cp, rate, transforms)
    eta = arrival / msr
    if p_th >= eta:
        return DelayMapping(0.0, False, d_max, p_th, eta)
    target = math.log(eta / p_th)
    d_us = d_max * 1e6
    # theta*C(theta) is bounded by the t3 transform domain, so short deadlines
    # can be unreachable at any theta
    if transforms[4].log_z_max() * d_us <= target:
        return DelayMapping(math.inf, False, d_max, p_th, eta)

    def excess(theta):
        # theta * C(theta) * D_max = x*(theta) * D_max in paired units
        sol = ec_two_state(theta, rate, params, cp, transforms)
        return theta * sol.ec * 1e-6 * d_us - target

    lo = 0.0
    hi = 1e-9
    for _ in range(120):
        if excess(hi) > 0:
            break
        lo, hi = hi, hi * 2.0
    else:
        return DelayMapping(math.inf, False, d_max, p_th, eta)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return DelayMapping(0.5 * (lo + hi), True, d_max, p_th, eta)
