"""Solve the LAA/WiFi contention fixed point across a population grid.

Prints attempt and collision probabilities for the tagged LAA node as the
number of LAA and WiFi contenders grows, then the stationary virtual-slot
distribution at one operating point. More contenders of either kind raise
the collision probability; the variable-window mode reacts by backing off
harder, which lowers its attempt rate below the fixed-window mode.
"""

import laacap as L


def main():
    print(f"{'mode':>4} {'N':>3} {'M':>3} {'v_laa':>9} {'p_laa':>9} "
          f"{'v_wifi':>9} {'p_wifi':>9} {'residual':>9}")
    for mode in (L.FCW, L.VCW):
        for n in (1, 5, 10):
            for m in (1, 5, 10):
                params = L.SystemParams(mode=mode, n_laa=n, m_wifi=m)
                cp = L.solve_fixed_point(params)
                print(f"{mode:>4} {n:3d} {m:3d} {cp.v_laa:9.5f} "
                      f"{cp.p_laa:9.5f} {cp.v_wifi:9.5f} {cp.p_wifi:9.5f} "
                      f"{cp.residual:9.1e}")

    params = L.SystemParams(mode=L.FCW)
    cp = L.solve_fixed_point(params)
    sd = L.slot_distribution(cp, params)
    print(f"\nvirtual-slot distribution at FCW defaults "
          f"(N={params.n_laa}, M={params.m_wifi}):")
    for kind, prob, dur in zip(L.SLOT_KINDS, sd.probabilities,
                               sd.durations_us):
        print(f"  {kind:>5}: prob {prob:8.5f}  duration {dur:8.1f} us")
    print(f"  mean slot {L.slot_mean(sd):.3f} us")


if __name__ == "__main__":
    main()
