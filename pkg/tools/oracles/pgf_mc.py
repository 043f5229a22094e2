"""Monte-Carlo oracle for the contention-interval transforms.

Samples the renewal structure directly: a packet suffers i collisions
(geometric in the collision probability), pays one uniform backoff per stage
with every backoff slot drawn from the six-atom slot distribution, and is
dropped after K_L collisions; a delivered collision-free packet is lost to a
channel error with probability eps, in which case the next packet starts
after the wasted transmission time. t1 is the pre-delivery interval of a
delivered packet, t3 the whole gap between consecutive successes (excluding
the final transmission itself).

Defaults: N=5, M=5, FCW, W_L=16, K_L=6, sigma_idle=10 us, T_f=T_c=1000 us.
Run: python tools/oracles/pgf_mc.py
"""

import numpy as np
from picard_fixed_point import solve, mean_backoffs

SEED = 20240818
N_T1 = 1_000_000
N_T3 = 1_000_000
W_L, K_L = 16, 6
T_F = T_C = 1000.0
SIGMA_IDLE = 10.0


def slot_atoms(vl, vw, n, m):
    ol = (1.0 - vl) ** (n - 1)
    ow = (1.0 - vw) ** m
    p_idle = ol * ow
    p_cw = (1.0 - ow - m * vw * (1.0 - vw) ** (m - 1)) * ol
    p_c = ow * (1.0 - ol - (n - 1) * vl * (1.0 - vl) ** (n - 2))
    p_sw = m * vw * (1.0 - vw) ** (m - 1) * ol
    p_f = (n - 1) * vl * (1.0 - vl) ** (n - 2) * ow
    p_wl = 1.0 - (p_idle + p_cw + p_c + p_sw + p_f)
    durs = np.array([SIGMA_IDLE, T_C, T_C, T_F, T_F, T_F])
    probs = np.array([p_idle, p_cw, p_c, p_sw, p_f, p_wl])
    return durs, probs


def sum_categorical(rng, counts, durs, probs):
    # duration total of `counts[i]` iid slot draws per sample, via one big draw
    total = int(counts.sum())
    draws = rng.choice(durs, size=total, p=probs)
    bounds = np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.int64)
    out = np.add.reduceat(np.concatenate((draws, [0.0])), bounds)
    out[counts == 0] = 0.0
    return out


def sample_t1(rng, p, durs, probs, n):
    # collisions of a delivered packet: truncated geometric on {0..K_L-1}
    u = rng.random(n)
    cdf = np.cumsum([(1 - p) * p ** i for i in range(K_L)]) / (1 - p ** K_L)
    i = np.searchsorted(cdf, u)
    # one backoff per stage 0..i: i+1 uniform draws over {0..W_L-1}
    slots = np.zeros(n, dtype=np.int64)
    for stage in range(K_L):
        active = i >= stage
        slots[active] += rng.integers(0, W_L, size=int(active.sum()))
    return sum_categorical(rng, slots, durs, probs) + i * T_C, i


def sample_t3(rng, p, eps, durs, probs, n):
    t3 = np.zeros(n)
    open_idx = np.arange(n)
    while open_idx.size:
        k = open_idx.size
        x = rng.geometric(1.0 - p, size=k) - 1  # collisions of this packet
        dropped = x >= K_L
        stages = np.where(dropped, K_L, x + 1)  # backoff draws used
        slots = np.zeros(k, dtype=np.int64)
        for stage in range(K_L):
            active = stages > stage
            slots[active] += rng.integers(0, W_L, size=int(active.sum()))
        t3[open_idx] += (sum_categorical(rng, slots, durs, probs)
                         + np.where(dropped, K_L, x) * T_C)
        err = (~dropped) & (rng.random(k) < eps)
        t3[open_idx[err]] += T_F  # wasted error transmission
        open_idx = open_idx[dropped | err]
    return t3


def report(name, samples, xs):
    print(f"{name} = {{")
    m, s = samples.mean(), samples.std(ddof=1) / len(samples) ** 0.5
    print(f"    'mean': ({m!r}, {s!r}),")
    for x in xs:
        v = np.exp(x * samples)
        m, s = v.mean(), v.std(ddof=1) / len(v) ** 0.5
        print(f"    {x!r}: ({m!r}, {s!r}),")
    print(f"}}")


def main():
    vl, vw, pl, pw, _ = solve(5, 5, vcw=False)
    durs, probs = slot_atoms(vl, vw, 5, 5)
    rng = np.random.default_rng(SEED)
    xs = (1e-9, 1e-5)
    t1, _ = sample_t1(rng, pl, durs, probs, N_T1)
    print(f"# N=5, M=5, FCW defaults, seed {SEED}, {N_T1} samples each")
    report("PGF_MC_T1", t1, xs)
    report("PGF_MC_T3_EPS0", sample_t3(rng, pl, 0.0, durs, probs, N_T3), xs)
    report("PGF_MC_T3_EPS005", sample_t3(rng, pl, 0.05, durs, probs, N_T3), xs)


if __name__ == "__main__":
    main()
