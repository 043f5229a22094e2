"""Monte-Carlo renewal oracle for the backoff energy model.

Simulates the tagged-BS attempt process directly: each attempt collides with
probability p (iid), a collision-free attempt is lost to a channel error with
probability eps, and every attempt costs one uniform backoff (counted in
slots, plus the transmission slot itself). Reports, per renewal gap between
consecutive successful deliveries:
  - collisions: number of collided attempts in the gap
  - slots: backoff slots plus transmission slots in the gap
FCW keeps the window at W_L; the VCW variant doubles per stage and resets
after a drop (K_L failures) or after any collision-free attempt.
Run: python tools/oracles/renewal_energy_mc.py
"""

import numpy as np

SEED = 20240819
W_L, K_L = 16, 6
EPS = 1e-4
N_ATTEMPTS = 20_000_000


def fcw_case(rng, p):
    coll = rng.random(N_ATTEMPTS) < p
    err = rng.random(N_ATTEMPTS) < EPS
    draw = rng.integers(0, W_L, size=N_ATTEMPTS)
    success = (~coll) & (~err)
    idx = np.flatnonzero(success)
    if idx.size < 2:
        raise RuntimeError("not enough deliveries")
    # per-gap tallies between consecutive successes: (prev, cur]
    cum_coll = np.concatenate(([0], np.cumsum(coll)))
    cum_slot = np.concatenate(([0], np.cumsum(draw + 1)))
    gaps_coll = np.diff(cum_coll[idx + 1])
    gaps_slot = np.diff(cum_slot[idx + 1])
    return gaps_coll, gaps_slot


def vcw_case(rng, p, n_gaps=1_000_000):
    gaps_coll = np.empty(n_gaps, dtype=np.int64)
    gaps_slot = np.empty(n_gaps, dtype=np.int64)
    stage = 0
    c = s = 0
    g = 0
    while g < n_gaps:
        w = W_L << stage
        s += int(rng.integers(0, w)) + 1
        if rng.random() < p:
            c += 1
            stage += 1
            if stage == K_L:
                stage = 0  # drop, window resets
        else:
            stage = 0  # collision-free attempt always resets the window
            if rng.random() >= EPS:
                gaps_coll[g] = c
                gaps_slot[g] = s
                c = s = 0
                g += 1
    return gaps_coll, gaps_slot


def report(name, gaps_coll, gaps_slot):
    n = len(gaps_coll)
    cm = gaps_coll.mean()
    cs = gaps_coll.std(ddof=1) / n ** 0.5
    sm = gaps_slot.mean()
    ss = gaps_slot.std(ddof=1) / n ** 0.5
    print(f"    {name}: {{'n': {n}, 'collisions': ({cm!r}, {cs!r}),"
          f" 'slots': ({sm!r}, {ss!r})}},")


def main():
    rng = np.random.default_rng(SEED)
    print(f"# W_L={W_L}, K_L={K_L}, eps={EPS}, seed {SEED}")
    print("RENEWAL_MC_FCW = {")
    for p in (0.1, 0.3, 0.5):
        report(repr(p), *fcw_case(rng, p))
    print("}")
    print("RENEWAL_MC_VCW = {")
    for p in (0.3,):
        report(repr(p), *vcw_case(rng, p))
    print("}")


if __name__ == "__main__":
    main()
