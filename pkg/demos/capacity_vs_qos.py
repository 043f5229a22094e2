"""Sweep the QoS exponent and print the capacity curve for both modes.

Shows the two headline behaviors: effective capacity falls from the mean
service rate toward zero as the QoS requirement tightens, and the
variable-window mode pays a larger penalty because its service intervals
have a heavier tail. Points where the defining equation runs out of
domain (the transform pole) are marked with a trailing *.
"""

import laacap as L

RATE = 2e7          # peak service rate of the tagged link, bit/s
THETAS = (1e-9, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2)


def main():
    print(f"{'theta (1/bit)':>14} {'FCW C (Mbit/s)':>16} {'VCW C (Mbit/s)':>16}")
    rows = {}
    for mode in (L.FCW, L.VCW):
        params = L.SystemParams(mode=mode)
        cp = L.solve_fixed_point(params)
        transforms = L.build_transforms(params, cp)
        msr = L.mean_service_rate(params, cp, RATE, transforms)
        col = []
        for theta in THETAS:
            sol = L.ec_two_state(theta, RATE, params, cp, transforms)
            col.append((sol.ec, sol.domain_limited))
        rows[mode] = (msr, col)
    for i, theta in enumerate(THETAS):
        cells = []
        for mode in (L.FCW, L.VCW):
            ec, limited = rows[mode][1][i]
            cells.append(f"{ec / 1e6:15.4f}{'*' if limited else ' '}")
        print(f"{theta:>14.0e} {cells[0]:>16} {cells[1]:>16}")
    print()
    for mode in (L.FCW, L.VCW):
        msr, col = rows[mode]
        print(f"{mode}: mean service rate {msr / 1e6:.4f} Mbit/s, "
              f"C(1e-9)/msr = {col[0][0] / msr:.6f}")


if __name__ == "__main__":
    main()
