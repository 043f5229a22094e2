# Monte-Carlo verification of the deep-theta effective capacity by sampling
# success-gap cycles directly (backoff stages, collisions, drops) and solving
# the empirical renewal-MGF equation
#     log E[exp(x * t3)] + x*T_f = theta*R*T_f   at x = theta*C.
# Unlike the time-domain estimator, the weights here stay moderate at the
# solution point, so the rare drop-dominated regime is measurable.
# Inputs (p_laa, slot atoms) come from the independent Picard oracle.
import math

import numpy as np

from picard_fixed_point import solve

SIGMA, T_CW, T_C, T_SW, T_F, T_WL = 10.0, 1000.0, 1000.0, 1000.0, 1000.0, 1000.0
W_L, K_L = 16, 6
R_US = 20.0      # 2e7 bit/s in bits per microsecond
SEED = 20240820
N_DELIVER = 4_000_000


def slot_atoms(vl, vw, n, m):
    ol = (1.0 - vl) ** (n - 1)
    ow = (1.0 - vw) ** m
    p_idle = ol * ow
    p_cw = (1.0 - ow - (m * vw * (1.0 - vw) ** (m - 1) if m else 0.0)) * ol
    p_c = ow * (1.0 - ol - ((n - 1) * vl * (1.0 - vl) ** (n - 2) if n > 1 else 0.0))
    p_sw = (m * vw * (1.0 - vw) ** (m - 1) if m else 0.0) * ol
    p_f = ((n - 1) * vl * (1.0 - vl) ** (n - 2) if n > 1 else 0.0) * ow
    p_wl = 1.0 - (p_idle + p_cw + p_c + p_sw + p_f)
    probs = np.array([p_idle, p_cw, p_c, p_sw, p_f, p_wl])
    durs = np.array([SIGMA, T_CW, T_C, T_SW, T_F, T_WL])
    return probs, durs


def sample_t3(rng, p, probs, durs, vcw, n_deliver):
    windows = [(W_L * 2 ** j if vcw else W_L) for j in range(K_L)]
    big_p = p ** K_L
    # drops before the delivered packet, then collisions of each packet
    drops = rng.geometric(1.0 - big_p, n_deliver) - 1
    n_pkt = int(drops.sum()) + n_deliver
    x_coll = np.empty(n_pkt, dtype=np.int64)
    # packet layout per delivery: its drop packets (X=K_L) then the final one
    final_idx = np.cumsum(drops + 1) - 1
    x_coll[:] = K_L
    u = rng.random(n_deliver)
    # truncated geometric on {0..K_L-1}: P(X=i) ~ (1-p) p^i
    final_x = np.minimum(
        np.floor(np.log1p(-u * (1.0 - big_p)) / math.log(p)).astype(np.int64)
        if p > 0 else np.zeros(n_deliver, dtype=np.int64), K_L - 1)
    x_coll[final_idx] = final_x
    # backoff timer draws: stage j reached by packets with X >= j; the timer
    # is uniform on {0..W_j-1}; the attempt slot is charged as T_c/T_f
    s_tot = np.zeros(n_pkt, dtype=np.int64)
    for j, w in enumerate(windows):
        active = x_coll >= j
        cnt = int(active.sum())
        s_tot[active] += rng.integers(0, w, cnt)
    # bulk categorical slot durations, summed per packet; the sentinel and
    # the patch handle reduceat's spurious element for zero-slot packets
    all_slots = rng.choice(len(durs), size=int(s_tot.sum()), p=probs)
    slot_durs = np.concatenate((durs[all_slots], [0.0]))
    bounds = np.concatenate(([0], np.cumsum(s_tot)[:-1]))
    t_backoff = np.add.reduceat(slot_durs, bounds)
    t_backoff[s_tot == 0] = 0.0
    t_pkt = t_backoff + x_coll * T_C
    dbounds = np.concatenate(([0], (final_idx + 1)[:-1]))
    return np.add.reduceat(t_pkt, dbounds)


def solve_c(t3, theta):
    target = theta * R_US * T_F

    def excess(x):
        y = x * t3
        m = y.max()
        return m + math.log(np.exp(y - m).mean()) + x * T_F - target

    lo, hi = 0.0, theta * R_US
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    return x / theta * 1e6  # bit/s


def main():
    for vcw, tag in ((False, "FCW"), (True, "VCW")):
        vl, vw, pl, pw, _ = solve(5, 5, vcw=vcw)
        probs, durs = slot_atoms(vl, vw, 5, 5)
        rng = np.random.Generator(np.random.Philox(
            np.random.SeedSequence([SEED, int(vcw)])))
        t3 = sample_t3(rng, pl, probs, durs, vcw, N_DELIVER)
        print(f"{tag}: p={pl:.6f} mean_t3={t3.mean():.3f} n={len(t3)}")
        half = len(t3) // 2
        for theta in (1e-5, 3e-5, 1e-4):
            c_full = solve_c(t3, theta)
            c_a = solve_c(t3[:half], theta)
            c_b = solve_c(t3[half:], theta)
            print(f"  CYCLE_MC_{tag}_theta{theta:g}: C = {c_full!r}"
                  f"  (halves {c_a:.1f} / {c_b:.1f})")


if __name__ == "__main__":
    main()
