"""Monte-Carlo oracle for the six-atom slot-kind distribution.

Draws independent per-slot transmission indicators for the other LAA BSs and
the WiFi nodes (the same independence the analysis assumes) and tallies slot
kinds as seen by a tagged LAA BS counting down. Validates the binomial
classification arithmetic, not the decoupling itself.
Run: python tools/oracles/slot_mc.py
"""

import numpy as np
from picard_fixed_point import solve

N_SLOTS = 10_000_000
SEED = 20240817


def main():
    n, m = 2, 1
    vl, vw, pl, pw, _ = solve(n, m, vcw=False)
    rng = np.random.default_rng(SEED)
    # one other LAA BS, one WiFi node
    laa = rng.random((N_SLOTS, n - 1)) < vl
    wifi = rng.random((N_SLOTS, m)) < vw
    nl = laa.sum(axis=1)
    nw = wifi.sum(axis=1)
    counts = {
        "idle": int(((nl == 0) & (nw == 0)).sum()),
        "t_cw": int(((nw >= 2) & (nl == 0)).sum()),
        "t_c": int(((nl >= 2) & (nw == 0)).sum()),
        "t_sw": int(((nw == 1) & (nl == 0)).sum()),
        "t_f": int(((nl == 1) & (nw == 0)).sum()),
        "t_wl": int(((nl >= 1) & (nw >= 1)).sum()),
    }
    assert sum(counts.values()) == N_SLOTS
    print(f"# N=2, M=1, FCW defaults, {N_SLOTS} slots, seed {SEED}")
    print(f"SLOT_MC_N2_M1 = {{")
    for k, c in counts.items():
        f = c / N_SLOTS
        sig = (f * (1 - f) / N_SLOTS) ** 0.5
        print(f"    {k!r}: ({f!r}, {sig!r}),")
    print(f"}}")
    print(f"SLOT_MC_N_SLOTS = {N_SLOTS}")


if __name__ == "__main__":
    main()
