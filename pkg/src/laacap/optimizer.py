"""Power allocation maximizing total effective capacity or its energy
efficiency across the users of the tagged LAA BS.

The per-user map from target effective capacity to required transmit power,
    P(C) = (sigma^2/G) * (exp(F(theta C) * K ln2 / (B theta T_f)) - 1),
is increasing and convex, so both problems reduce to scalar KKT conditions:
    mu * dP/dC = 1                      (capacity maximization)
    (mu + omega/xi') * dP/dC = 1        (energy-efficiency maximization)
solved per user by bisection, with an outer bisection on mu driving the
power budget and an outer Dinkelbach iteration on omega for the fractional
objective. The power budget always binds in the capacity problem because
P(C) is a bijection onto [0, inf): any leftover budget buys more capacity.
"""

import math
from dataclasses import dataclass

import numpy as np

from .capacity import build_transforms, ec_two_state
from .contention import slot_distribution, slot_mean
from .genfun import _exp_f, big_f
from .scenario import FCW, rate_of_power

_KKT_TOL = 1e-9
_BUDGET_TOL = 1e-9
_DINKELBACH_TOL = 1e-8
_MAX_OUTER = 200


@dataclass
class PowerAllocation:
    """Per-user powers and capacities with dual diagnostics."""

    powers: np.ndarray      # W, one entry per user
    capacities: np.ndarray  # bit/s, one entry per user
    mu: float               # budget multiplier, (bit/s)/W
    omega: float | None     # energy-efficiency parameter, bit/J (else None)
    objective: float        # sum capacity (bit/s) or efficiency (bit/J)
    duality_gap: float      # relative gap bound at the returned iterate
    iterations: int
    kkt_residual: float     # max |multiplier * dP/dC - 1| over active users
    converged: bool = True


@dataclass
class PowerModel:
    """Scalars of the average-power accounting for one contention point."""

    pi1: float              # embedded weight of the contention state
    pi2: float              # embedded weight of the transmission state
    mean_collisions: float      # collisions between consecutive deliveries
    mean_backoff_slots: float   # backoff slots between consecutive deliveries
    p_static_eff: float     # W, static term absorbing idle listening
    xi_eff: float           # effective amplifier efficiency


class CapacityPowerMap:
    """P(C) and dP/dC for one user at a fixed QoS exponent."""

    def __init__(self, theta, g_k, params, t3):
        if theta <= 0:
            raise ValueError("theta must be > 0")
        if g_k <= 0:
            raise ValueError("gain must be > 0")
        self.theta = theta
        self.g = g_k
        self.noise = params.noise_subband_w
        self.params = params
        self.t3 = t3
        b_us = params.bandwidth_hz * 1e-6
        self.kappa = params.k_users * math.log(2.0) / (
            b_us * theta * params.t_f_us)
        x_max = t3.log_z_max()
        if math.isinf(x_max):
            self.c_sup = math.inf
            self.c_cap = math.inf
        else:
            self.c_sup = x_max / theta * 1e6
            self.c_cap = self.c_sup * (1.0 - 1e-12)

    def power_and_slope(self, c):
        """(P, dP/dC) at capacity c in bit/s; slope is W per bit/s."""
        if c < 0:
            raise ValueError("capacity must be >= 0")
        x = self.theta * c * 1e-6
        f, fp = big_f(x, self.t3, self.params)
        e = _exp_f(f * self.kappa)
        scale = self.noise / self.g
        power = scale * (e - 1.0)
        slope = scale * e * self.kappa * fp * self.theta * 1e-6
        return power, slope

    def power(self, c):
        return self.power_and_slope(c)[0]

    def slope(self, c):
        return self.power_and_slope(c)[1]


def power_of_capacity(c_k, theta, g_k, params, t3):
    """Transmit power (W) required for effective capacity c_k (bit/s)."""
    return CapacityPowerMap(theta, g_k, params, t3).power(c_k)


def power_slope_of_capacity(c_k, theta, g_k, params, t3):
    """(P, dP/dC) pair for the same map."""
    return CapacityPowerMap(theta, g_k, params, t3).power_and_slope(c_k)


def _solve_kkt_c(cpm, s_star):
    """Capacity where dP/dC first reaches s_star (0 when already above)."""
    if not s_star > 0:
        raise ValueError("slope target must be > 0")
    if cpm.slope(0.0) >= s_star:
        return 0.0
    hi = 1e6 if cpm.c_cap > 1e6 else cpm.c_cap
    for _ in range(200):
        if hi >= cpm.c_cap or cpm.slope(hi) >= s_star:
            break
        hi = min(hi * 2.0, cpm.c_cap)
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        s = cpm.slope(mid)
        if s < s_star:
            lo = mid
        else:
            hi = mid
            if s / s_star - 1.0 <= _KKT_TOL:
                return mid  # certified within tolerance; midpoint is not
    return 0.5 * (lo + hi)


def _allocate_at(maps, mu_eff):
    """Per-user KKT allocation at effective multiplier mu_eff."""
    s_star = 1.0 / mu_eff
    cs = np.array([_solve_kkt_c(m, s_star) for m in maps])
    ps = np.array([m.power(c) for m, c in zip(maps, cs)])
    return cs, ps


def _kkt_residual(maps, cs, mu_eff):
    worst = 0.0
    for m, c in zip(maps, cs):
        if c > 0:
            worst = max(worst, abs(mu_eff * m.slope(c) - 1.0))
    return worst


def _solve_budget(maps, p_tot, offset=0.0):
    """Smallest mu >= 0 with sum P <= p_tot under (mu+offset) dP/dC = 1.

    Returns (cs, ps, mu, iterations). sum P is continuous and decreasing in
    mu, so the budget equation is solved by bisection after bracketing.
    """
    iters = 0
    if offset > 0.0:
        cs, ps = _allocate_at(maps, offset)
        iters += 1
        if ps.sum() <= p_tot:
            return cs, ps, 0.0, iters
    mu_hi = max(1.0 / m.slope(0.0) for m in maps)
    if offset > 0.0:
        mu_hi = max(mu_hi - offset, mu_hi * 1e-12)
    best = None
    mu_lo = mu_hi
    for _ in range(_MAX_OUTER):
        mu_lo *= 0.25
        cs, ps = _allocate_at(maps, mu_lo + offset)
        iters += 1
        total = ps.sum()
        if total > p_tot:
            break
        best = (cs, ps, mu_lo)
    else:
        # budget never reachable (all users capacity-capped): keep last
        return best[0], best[1], best[2], iters
    for _ in range(_MAX_OUTER):
        mu = 0.5 * (mu_lo + mu_hi)
        if mu == mu_lo or mu == mu_hi:
            break
        cs, ps = _allocate_at(maps, mu + offset)
        iters += 1
        total = ps.sum()
        if total > p_tot:
            mu_lo = mu
        else:
            best = (cs, ps, mu)
            mu_hi = mu
            if p_tot - total <= _BUDGET_TOL * p_tot:
                return cs, ps, mu, iters
    if best is None:
        cs, ps = _allocate_at(maps, mu_hi + offset)
        best = (cs, ps, mu_hi)
    return best[0], best[1], best[2], iters


def _build_maps(channels, theta, params, cp, transforms=None):
    if transforms is None:
        transforms = build_transforms(params, cp)
    t3 = transforms[4]
    gains = channels.tagged_gains
    return [CapacityPowerMap(theta, g, params, t3) for g in gains], transforms


def maximize_ec(channels, theta, params, cp, transforms=None):
    """Allocate the power budget to maximize total effective capacity."""
    maps, _ = _build_maps(channels, theta, params, cp, transforms)
    p_tot = params.p_tot_w
    if not p_tot > 0:
        raise ValueError("p_tot must be > 0")
    cs, ps, mu, iters = _solve_budget(maps, p_tot)
    total_c = cs.sum()
    gap = 0.0
    res = 0.0
    if mu > 0:
        if total_c > 0:
            gap = mu * abs(p_tot - ps.sum()) / total_c
        res = _kkt_residual(maps, cs, mu)
    return PowerAllocation(ps, cs, mu, None, total_c, gap, iters, res)


def water_filling(channels, params, theta, cp, transforms=None):
    """Classical water level on sigma^2/G, capacities via the EC solver."""
    if transforms is None:
        transforms = build_transforms(params, cp)
    gains = np.asarray(channels.tagged_gains, dtype=float)
    p_tot = params.p_tot_w
    floors = params.noise_subband_w / gains
    order = np.argsort(floors)
    sorted_floors = floors[order]
    k = len(gains)
    # highest m with water level above the m-th floor
    level = None
    for m in range(k, 0, -1):
        cand = (p_tot + sorted_floors[:m].sum()) / m
        if cand > sorted_floors[m - 1]:
            level = cand
            break
    powers = np.maximum(level - floors, 0.0)
    return _evaluated_allocation(powers, channels, params, theta, cp,
                                 transforms)


def channel_inversion(channels, params, theta, cp, transforms=None):
    """Power inversely proportional to gain, capacities via the EC solver."""
    if transforms is None:
        transforms = build_transforms(params, cp)
    gains = np.asarray(channels.tagged_gains, dtype=float)
    inv = 1.0 / gains
    powers = params.p_tot_w * inv / inv.sum()
    return _evaluated_allocation(powers, channels, params, theta, cp,
                                 transforms)


def _evaluated_allocation(powers, channels, params, theta, cp, transforms):
    cs = np.empty_like(powers)
    for i, p_k in enumerate(powers):
        if p_k <= 0:
            cs[i] = 0.0
            continue
        rate = rate_of_power(p_k, channels.tagged_gains[i], params)
        cs[i] = ec_two_state(theta, rate, params, cp, transforms).ec
    return PowerAllocation(powers, cs, 0.0, None, cs.sum(), 0.0, 0, 0.0)


def power_model(params, cp):
    """Average-power scalars at a contention point."""
    p = cp.p_laa
    if p >= 1.0:
        raise ValueError("p_laa = 1 has no finite per-delivery averages")
    i_bar = p / (1.0 - p) ** 2
    if params.mode == FCW:
        big_i = (params.w_laa + 1) / (2.0 * (1.0 - p))
    else:
        kl = params.k_retry_laa
        num = sum((params.window_laa(j) + 1) / 2.0 * p ** j
                  for j in range(kl))
        big_i = num / (1.0 - p ** kl)
    sd = slot_distribution(cp, params)
    tau = slot_mean(sd)
    off_us = big_i * tau
    on_us = i_bar * params.t_c_us + params.t_f_us
    xi_eff = params.xi * (off_us + on_us) / on_us
    p_static_eff = params.p_static_w + params.p_idle_w * off_us / (
        off_us + on_us)
    return PowerModel(0.5, 0.5, i_bar, big_i, p_static_eff, xi_eff)


def average_power(alloc, params, cp):
    """Mean consumed power (W) of the BS running a given allocation."""
    pm = power_model(params, cp)
    total = float(np.sum(alloc.powers))
    return pm.p_static_eff + total / pm.xi_eff, pm


def maximize_eee(channels, theta, params, cp, transforms=None):
    """Allocate power to maximize effective capacity per consumed watt."""
    maps, transforms = _build_maps(channels, theta, params, cp, transforms)
    p_tot = params.p_tot_w
    if not p_tot > 0:
        raise ValueError("p_tot must be > 0")
    pm = power_model(params, cp)
    omega = 0.0
    iters = 0
    converged = False
    cs = ps = None
    mu = 0.0
    for _ in range(100):
        cs, ps, mu, it = _solve_budget(maps, p_tot, offset=omega / pm.xi_eff)
        iters += it
        total_c = cs.sum()
        p_bar = pm.p_static_eff + ps.sum() / pm.xi_eff
        h = total_c - omega * p_bar
        if abs(h) <= _DINKELBACH_TOL * max(total_c, 1.0):
            converged = True
            break
        nxt = total_c / p_bar
        if nxt < omega:
            if nxt < omega * (1.0 - 1e-6):
                raise RuntimeError("efficiency iterates must be non-decreasing")
            # the ratio update moved less than the inner solver resolves, so
            # the fixed point is pinned to within oracle noise
            converged = True
            break
        omega = nxt
    total_c = cs.sum()
    p_bar = pm.p_static_eff + ps.sum() / pm.xi_eff
    mu_eff = mu + omega / pm.xi_eff
    gap = 0.0
    if mu > 0 and total_c > 0:
        gap = mu * abs(p_tot - ps.sum()) / total_c
    res = _kkt_residual(maps, cs, mu_eff)
    return PowerAllocation(ps, cs, mu, omega, total_c / p_bar, gap, iters,
                           res, converged)
