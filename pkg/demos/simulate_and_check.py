"""Run the event simulator and check it against the analysis.

One 60 s run per mode on default parameters. Compares the simulated
attempt and collision probabilities of the tagged node with the contention
fixed point, the long-run throughput with the mean service rate, and the
batch-mean capacity estimate at theta = 1e-5 with the analytic solver.
"""

import laacap as L

RATE = 2e7      # bit/s
THETA = 1e-5    # 1/bit
DURATION = 60.0  # seconds
SEED = 1


def main():
    for mode in (L.FCW, L.VCW):
        params = L.SystemParams(mode=mode)
        cp = L.solve_fixed_point(params)
        transforms = L.build_transforms(params, cp)
        trace = L.run(params, None, RATE, DURATION, SEED)
        stats = L.empirical_stats(trace)
        msr = L.mean_service_rate(params, cp, RATE, transforms)
        tput = trace.cumulative_bits[-1] / trace.total_time_us * 1e6
        ana = L.ec_two_state(THETA, RATE, params, cp, transforms)
        est = L.estimate_ec(trace, THETA)

        print(f"--- {mode}, {DURATION:.0f} s, seed {SEED} ---")
        print(f"  events               {len(trace.kinds)}")
        for name, ref in (("v_laa", cp.v_laa), ("p_laa", cp.p_laa)):
            e = stats[name]
            print(f"  {name:<6} sim {e.value:.5f} +- {e.stderr:.5f}   "
                  f"analysis {ref:.5f}")
        print(f"  throughput           {tput / 1e6:.4f} Mbit/s   "
              f"mean service rate {msr / 1e6:.4f} Mbit/s "
              f"({tput / msr - 1.0:+.2%})")
        print(f"  C({THETA:g}) estimate   {est.value / 1e6:.4f} "
              f"+- {est.halfwidth / 1e6:.4f} Mbit/s over {est.blocks} blocks")
        print(f"  C({THETA:g}) analysis   {ana.ec / 1e6:.4f} Mbit/s "
              f"({est.value / ana.ec - 1.0:+.2%})")
        print()


if __name__ == "__main__":
    main()
