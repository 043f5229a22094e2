"""Saturation fixed point for the shared-channel contention probabilities and
the slot-duration distribution seen by a tagged LAA BS.

The transmission probabilities are per virtual (backoff-counting) slot. The
mean backoff e_j counts the transmission slot on top of the uniform draw, so
e_j = (W_j + 1)/2 and the FCW transmission probability is 2/(W_L + 1).
"""

import math
from dataclasses import dataclass

from .genfun import GenFun, slot_pgf_from_atoms
from .scenario import FCW, VCW


class FixedPointError(RuntimeError):
    """Raised when the fixed-point iteration fails to converge; carries the
    last iterate for diagnosis."""

    def __init__(self, message, last):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class ContentionPoint:
    """Joint solution of the transmission/collision probability equations."""

    v_laa: float    # tagged LAA transmission probability per virtual slot
    v_wifi: float
    p_laa: float    # probability a tagged LAA transmission collides
    p_wifi: float
    residual: float

    def __post_init__(self):
        for name in ("v_laa", "v_wifi", "p_laa", "p_wifi"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")


SLOT_KINDS = ("idle", "t_cw", "t_c", "t_sw", "t_f", "t_wl")


@dataclass(frozen=True)
class SlotDistribution:
    """Six (duration_us, probability) atoms: idle, WiFi-WiFi collision,
    LAA-LAA collision, WiFi success, other-LAA success, cross collision."""

    durations_us: tuple
    probabilities: tuple

    def __post_init__(self):
        if len(self.durations_us) != 6 or len(self.probabilities) != 6:
            raise ValueError("slot distribution needs exactly six atoms")
        if any(d <= 0 for d in self.durations_us):
            raise ValueError("slot durations must be > 0")
        if any(not -1e-12 <= p <= 1.0 + 1e-12 for p in self.probabilities):
            raise ValueError(f"slot probabilities outside [0, 1]: "
                             f"{self.probabilities}")
        if abs(sum(self.probabilities) - 1.0) > 1e-12:
            raise ValueError("slot probabilities must sum to 1")

    def atoms(self):
        return tuple(zip(self.durations_us, self.probabilities))

    def mean_us(self):
        return sum(d * p for d, p in self.atoms())


def mean_backoff_laa(j, params):
    """Mean backoff e_j of LAA retry stage j, in virtual slots."""
    return (params.window_laa(j) + 1) / 2.0


def mean_backoff_wifi(j, params):
    """Mean backoff b_j of WiFi retry stage j, in virtual slots."""
    return (params.window_wifi(j) + 1) / 2.0


def v_laa_of_p(p, params):
    """LAA transmission probability given its collision probability."""
    if params.mode == FCW:
        return 2.0 / (params.w_laa + 1.0)
    kl = params.k_retry_laa
    num = sum(p ** i for i in range(kl))
    den = sum(p ** i * mean_backoff_laa(i, params) for i in range(kl))
    return num / den


def v_wifi_of_p(p, params):
    """WiFi transmission probability given its collision probability."""
    kw = params.k_retry_wifi
    num = sum(p ** j for j in range(kw))
    den = sum(p ** j * mean_backoff_wifi(j, params) for j in range(kw))
    return num / den


def _collision_probs(v_l, v_w, n, m, factor=1.0):
    p_l = 1.0 - ((1.0 - v_w) ** m) * ((1.0 - v_l) ** (n - 1)) * factor
    if m == 0:
        p_w = 0.0
    else:
        p_w = 1.0 - ((1.0 - v_w) ** (m - 1)) * ((1.0 - v_l) ** n) * factor
    return p_l, p_w


def _residual_at(p_l, p_w, params, factor=1.0):
    v_l = v_laa_of_p(p_l, params)
    v_w = v_wifi_of_p(p_w, params) if params.m_wifi else 0.0
    np_l, np_w = _collision_probs(v_l, v_w, params.n_laa, params.m_wifi, factor)
    return max(abs(np_l - p_l), abs(np_w - p_w)), v_l, v_w


def _solve_picard(params, factor_of, tol, max_iter, damping):
    n, m = params.n_laa, params.m_wifi
    p_l = p_w = 0.5
    for _ in range(max_iter):
        v_l = v_laa_of_p(p_l, params)
        v_w = v_wifi_of_p(p_w, params) if m else 0.0
        np_l, np_w = _collision_probs(v_l, v_w, n, m, factor_of(v_l, v_w))
        if max(abs(np_l - p_l), abs(np_w - p_w)) < 0.25 * tol:
            return np_l, np_w
        p_l += damping * (np_l - p_l)
        p_w += damping * (np_w - p_w)
    return p_l, p_w  # caller re-checks the residual and may fall back


def _solve_bisection(params, tol):
    """Fallback: nested bisection on the monotone reduced maps.

    For fixed p_l, the WiFi map p_w -> 1-(1-v_w(p_w))^(M-1)(1-v_l)^N is
    decreasing in p_w, so g(p_w) = p_w - map has a unique root; the outer map
    in p_l is increasing for the same reason.
    """
    n, m = params.n_laa, params.m_wifi

    def solve_pw(v_l):
        if m == 0:
            return 0.0, 0.0
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            v_w = v_wifi_of_p(mid, params)
            target = 1.0 - ((1.0 - v_w) ** (m - 1)) * ((1.0 - v_l) ** n)
            if mid < target:
                lo = mid
            else:
                hi = mid
        p_w = 0.5 * (lo + hi)
        return p_w, v_wifi_of_p(p_w, params)

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v_l = v_laa_of_p(mid, params)
        _, v_w = solve_pw(v_l)
        target = 1.0 - ((1.0 - v_w) ** m) * ((1.0 - v_l) ** (n - 1))
        if mid < target:
            lo = mid
        else:
            hi = mid
    p_l = 0.5 * (lo + hi)
    v_l = v_laa_of_p(p_l, params)
    p_w, _ = solve_pw(v_l)
    return p_l, p_w


def solve_fixed_point(params, tol=1e-12, max_iter=100000, damping=0.5):
    """Solve the joint contention fixed point without hidden nodes."""
    params.validate()
    p_l, p_w = _solve_picard(params, lambda vl, vw: 1.0, tol, max_iter, damping)
    res, v_l, v_w = _residual_at(p_l, p_w, params)
    if res > tol:
        p_l, p_w = _solve_bisection(params, tol)
        res, v_l, v_w = _residual_at(p_l, p_w, params)
    if res > tol:
        raise FixedPointError(
            f"fixed point residual {res:.3e} above tolerance {tol:.1e}",
            (v_l, v_w, p_l, p_w))
    return ContentionPoint(v_laa=v_l, v_wifi=v_w, p_laa=p_l, p_wifi=p_w,
                           residual=res)


def solve_fixed_point_hidden(params, tol=1e-10, max_iter=200000, damping=0.5):
    """Fixed point with hidden terminals.

    The collision probabilities gain the factor
    [(1-v_laa)^h_l (1-v_wifi)^h_w]^(2 T_f / tau_bar), where tau_bar is the
    mean virtual-slot duration, so the slot distribution is iterated jointly.
    The vulnerable window is taken as twice the transmission duration T_f.
    """
    params.validate()
    if params.hidden is None:
        raise ValueError("params.hidden must be set for the hidden-node solve")
    h_l, h_w = params.hidden
    if h_l == 0 and h_w == 0:
        base = solve_fixed_point(params, tol=min(tol, 1e-12))
        return ContentionPoint(base.v_laa, base.v_wifi, base.p_laa,
                               base.p_wifi, base.residual)

    def factor_of(v_l, v_w):
        tau = _slot_mean_from(v_l, v_w, params)
        return (((1.0 - v_l) ** h_l) * ((1.0 - v_w) ** h_w)) ** (
            2.0 * params.t_f_us / tau)

    p_l, p_w = _solve_picard(params, factor_of, tol, max_iter, damping)
    v_l = v_laa_of_p(p_l, params)
    v_w = v_wifi_of_p(p_w, params) if params.m_wifi else 0.0
    res, v_l, v_w = _residual_at(p_l, p_w, params, factor_of(v_l, v_w))
    if res > tol:
        raise FixedPointError(
            f"hidden-node fixed point residual {res:.3e} above {tol:.1e}",
            (v_l, v_w, p_l, p_w))
    return ContentionPoint(v_laa=v_l, v_wifi=v_w, p_laa=p_l, p_wifi=p_w,
                           residual=res)


def _slot_probs_from(v_l, v_w, n, m):
    other_laa_quiet = (1.0 - v_l) ** (n - 1)
    wifi_quiet = (1.0 - v_w) ** m
    one_wifi = m * v_w * (1.0 - v_w) ** (m - 1) if m >= 1 else 0.0
    one_laa = (n - 1) * v_l * (1.0 - v_l) ** (n - 2) if n >= 2 else 0.0
    p_idle = other_laa_quiet * wifi_quiet
    p_cw = (1.0 - wifi_quiet - one_wifi) * other_laa_quiet
    p_c = wifi_quiet * (1.0 - other_laa_quiet - one_laa)
    p_sw = one_wifi * other_laa_quiet
    p_f = one_laa * wifi_quiet
    p_wl = 1.0 - (p_idle + p_cw + p_c + p_sw + p_f)
    return (p_idle, p_cw, p_c, p_sw, p_f, p_wl)


def _slot_mean_from(v_l, v_w, params):
    probs = _slot_probs_from(v_l, v_w, params.n_laa, params.m_wifi)
    durs = (params.sigma_idle_us, params.t_cw_us, params.t_c_us,
            params.t_sw_us, params.t_f_us, params.t_wl_us)
    return sum(d * p for d, p in zip(durs, probs))


def slot_distribution(cp, params):
    """Slot-kind distribution seen by a tagged LAA BS while counting down."""
    probs = _slot_probs_from(cp.v_laa, cp.v_wifi, params.n_laa, params.m_wifi)
    durs = (params.sigma_idle_us, params.t_cw_us, params.t_c_us,
            params.t_sw_us, params.t_f_us, params.t_wl_us)
    # tiny negative round-off in the complement atom is clipped to zero
    probs = tuple(0.0 if -1e-15 < p < 0.0 else p for p in probs)
    return SlotDistribution(durations_us=durs, probabilities=probs)


def slot_pgf(sd):
    """PGF of the virtual-slot duration."""
    return slot_pgf_from_atoms(sd.atoms(), tag="slot")


def slot_mean(sd):
    """Mean virtual-slot duration, microseconds."""
    return sd.mean_us()
