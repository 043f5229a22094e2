"""Translate delay targets into QoS exponents and achievable capacity.

For a 1 Mbit/s arrival stream and a 10% violation probability, finds the
QoS exponent whose queue keeps P(delay > D_max) at the target, then the
effective capacity the link sustains at that exponent. Looser deadlines
need smaller exponents and leave more capacity. Deadlines below the
mode's floor are infeasible at any exponent and are reported as such.
"""

import laacap as L

RATE = 2e7        # bit/s
ARRIVAL = 1e6     # bit/s
P_TH = 0.1
D_GRID = (0.005, 0.05, 0.1, 0.2, 0.5)   # seconds


def main():
    print(f"arrival {ARRIVAL / 1e6:.1f} Mbit/s, target "
          f"P(delay > D) <= {P_TH}\n")
    print(f"{'mode':>4} {'D_max (s)':>10} {'theta (1/bit)':>14} "
          f"{'C(theta) (Mbit/s)':>18}")
    for mode in (L.FCW, L.VCW):
        params = L.SystemParams(mode=mode)
        cp = L.solve_fixed_point(params)
        transforms = L.build_transforms(params, cp)
        for d_max in D_GRID:
            dm = L.theta_of_delay(d_max, P_TH, ARRIVAL, params, cp, RATE)
            if not dm.feasible:
                note = ("below floor" if dm.theta == float("inf")
                        else "no constraint")
                print(f"{mode:>4} {d_max:10.3f} {note:>14} {'-':>18}")
                continue
            sol = L.ec_two_state(dm.theta, RATE, params, cp, transforms)
            print(f"{mode:>4} {d_max:10.3f} {dm.theta:14.3e} "
                  f"{sol.ec / 1e6:18.4f}")


if __name__ == "__main__":
    main()
