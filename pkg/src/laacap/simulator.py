"""Slot-synchronous contention simulator for LAA and WiFi nodes sharing one
channel.

Every virtual slot, each node whose backoff timer reads zero transmits; all
other timers tick down by one, whatever the slot turns out to be (idle,
success, or collision), matching the per-virtual-slot abstraction of the
analytical model. A lone LAA transmission is further degraded by a Bernoulli
channel error: the frame is collision-free but lost, the packet is dropped
(no retransmission) and the window resets. Durations are microseconds.

Randomness uses one counter-based stream per node plus one for channel
errors, so changing the node count never perturbs the other streams.
"""

import csv
import json
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .contention import SLOT_KINDS
from .scenario import VCW

LAA_KIND = "LAA"
WIFI_KIND = "WiFi"

# slot codes follow SLOT_KINDS order: idle, t_cw, t_c, t_sw, t_f, t_wl
_IDLE, _T_CW, _T_C, _T_SW, _T_F, _T_WL = range(6)

OUT_IDLE, OUT_DELIVERED, OUT_ERROR, OUT_COLLISION, OUT_WIFI = range(5)
OUTCOME_NAMES = ("idle", "delivered", "channel_error", "collision",
                 "wifi_success")

EcEstimate = namedtuple("EcEstimate", "value halfwidth blocks")
Estimate = namedtuple("Estimate", "value stderr")


class InstabilityError(ValueError):
    """Raised when the offered load is not below the mean service rate."""


@dataclass
class NodeStats:
    """Per-node event counters."""

    tx: int = 0
    collisions: int = 0
    successes: int = 0
    channel_errors: int = 0
    drops: int = 0


@dataclass
class NodeState:
    """Backoff state of one contender."""

    kind: str               # LAA_KIND or WIFI_KIND
    cw: int                 # current contention window
    backoff_timer: int      # slots until the next attempt; < cw
    retry_stage: int = 0    # collisions suffered by the current packet
    stats: NodeStats = field(default_factory=NodeStats)


@dataclass
class ServiceTrace:
    """Event log of one run plus the tagged BS's delivered-bit process."""

    params: object
    rate: float             # bit/s offered to the tagged link
    seed: int
    kinds: np.ndarray       # slot code per event
    durations_us: np.ndarray
    end_times_us: np.ndarray
    winners: np.ndarray     # lone transmitter index, -1 otherwise
    outcomes: np.ndarray
    bits: np.ndarray        # tagged delivered bits per event
    cumulative_bits: np.ndarray
    tagged_in_backoff: np.ndarray
    node_stats: list
    n_slots: int
    total_time_us: float


def _node_rngs(seed, n, m):
    streams = []
    for i in range(n):
        streams.append(np.random.Generator(
            np.random.Philox(np.random.SeedSequence([int(seed), 1000 + i]))))
    for j in range(m):
        streams.append(np.random.Generator(
            np.random.Philox(np.random.SeedSequence([int(seed), 2000 + j]))))
    err = np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), 3000])))
    return streams, err


def run(params, channels, rate, duration_s, seed):
    """Simulate the shared channel for duration_s seconds of virtual time."""
    if duration_s <= 0:
        raise ValueError("duration_s must be > 0")
    if rate < 0:
        raise ValueError("rate must be >= 0")
    n, m = params.n_laa, params.m_wifi
    rngs, err_rng = _node_rngs(seed, n, m)
    nodes = []
    for i in range(n):
        cw = params.w_laa
        nodes.append(NodeState(LAA_KIND, cw, int(rngs[i].integers(cw))))
    for j in range(m):
        cw = params.w_wifi
        nodes.append(NodeState(WIFI_KIND, cw, int(rngs[n + j].integers(cw))))
    slot_us = (params.sigma_idle_us, params.t_cw_us, params.t_c_us,
               params.t_sw_us, params.t_f_us, params.t_wl_us)
    bits_per_frame = rate * 1e-6 * params.t_f_us
    horizon_us = duration_s * 1e6
    vcw = params.mode == VCW
    per = params.per

    kinds, winners, outcomes, bits, backoff0 = [], [], [], [], []
    elapsed = 0.0
    while elapsed < horizon_us:
        transmitters = [k for k, nd in enumerate(nodes)
                        if nd.backoff_timer == 0]
        nt = len(transmitters)
        delivered = 0.0
        if nt == 0:
            code, outcome, winner = _IDLE, OUT_IDLE, -1
        elif nt == 1:
            winner = transmitters[0]
            if nodes[winner].kind == LAA_KIND:
                code = _T_F
                erred = err_rng.random() < per
                outcome = OUT_ERROR if erred else OUT_DELIVERED
                if winner == 0 and not erred:
                    delivered = bits_per_frame
            else:
                code, outcome = _T_SW, OUT_WIFI
        else:
            laa_in = transmitters[0] < n          # indices are LAA-first
            wifi_in = transmitters[-1] >= n
            code = _T_WL if (laa_in and wifi_in) else (
                _T_C if laa_in else _T_CW)
            outcome, winner = OUT_COLLISION, -1

        backoff0.append(nodes[0].backoff_timer > 0)
        kinds.append(code)
        winners.append(winner)
        outcomes.append(outcome)
        bits.append(delivered)
        elapsed += slot_us[code]

        for k in transmitters:
            nd = nodes[k]
            st = nd.stats
            st.tx += 1
            wifi = nd.kind == WIFI_KIND
            if nt == 1:
                if not wifi and outcome == OUT_ERROR:
                    st.channel_errors += 1
                    st.drops += 1
                else:
                    st.successes += 1
                nd.retry_stage = 0
                nd.cw = params.w_wifi if wifi else params.w_laa
            else:
                st.collisions += 1
                nd.retry_stage += 1
                if wifi:
                    if nd.retry_stage >= params.k_retry_wifi:
                        st.drops += 1
                        nd.retry_stage = 0
                        nd.cw = params.w_wifi
                    else:
                        nd.cw = params.window_wifi(nd.retry_stage)
                else:
                    if nd.retry_stage >= params.k_retry_laa:
                        st.drops += 1
                        nd.retry_stage = 0
                        nd.cw = params.w_laa
                    elif vcw:
                        nd.cw = params.window_laa(nd.retry_stage)
            nd.backoff_timer = int(rngs[k].integers(nd.cw))
        for k, nd in enumerate(nodes):
            if nd.backoff_timer > 0 and k not in transmitters:
                nd.backoff_timer -= 1

    kinds = np.array(kinds, dtype=np.int8)
    durations = np.array([slot_us[c] for c in kinds], dtype=float)
    end_times = np.cumsum(durations)
    bits = np.array(bits, dtype=float)
    return ServiceTrace(
        params=params, rate=rate, seed=seed, kinds=kinds,
        durations_us=durations, end_times_us=end_times,
        winners=np.array(winners, dtype=np.int32),
        outcomes=np.array(outcomes, dtype=np.int8),
        bits=bits, cumulative_bits=np.cumsum(bits),
        tagged_in_backoff=np.array(backoff0, dtype=bool),
        node_stats=[nd.stats for nd in nodes],
        n_slots=len(kinds), total_time_us=float(end_times[-1]))


def throughput(trace):
    """Long-run delivered rate of the tagged link, bit/s."""
    return float(trace.cumulative_bits[-1]) / trace.total_time_us * 1e6


def _bits_at(trace, times_us):
    """S(t) sampled at given times (step function over slot ends)."""
    idx = np.searchsorted(trace.end_times_us, times_us, side="right")
    padded = np.concatenate(([0.0], trace.cumulative_bits))
    return padded[idx]


def estimate_ec(trace, theta, block_s=0.5):
    """Empirical effective capacity from per-block delivered bits.

    Blocks of block_s seconds yield increments dS_b; the estimate is
    -(1/(theta T_b)) log mean_b exp(-theta dS_b), with a batch-means
    confidence half-width on the same scale.
    """
    if theta <= 0:
        raise ValueError("theta must be > 0")
    t_b_us = block_s * 1e6
    nb = int(trace.total_time_us // t_b_us)
    if nb < 100:
        raise ValueError(f"trace too short: {nb} blocks, need >= 100")
    bounds = np.arange(nb + 1) * t_b_us
    s = _bits_at(trace, bounds)
    ds = np.diff(s)
    y = -theta * ds
    shift = y.max()
    scaled = np.exp(y - shift)
    mean = scaled.mean()
    log_mean = shift + math.log(mean)
    value = -log_mean / (theta * block_s)
    half = 1.96 * scaled.std(ddof=1) / (math.sqrt(nb) * mean) / (
        theta * block_s)
    return EcEstimate(value, half, nb)


def estimate_theta_from_queue(params, channels, rate, arrival, duration_s,
                              seed, sample_us=2000.0):
    """QoS exponent from the queue-length tail of a constant-rate feed.

    Feeds arrival bit/s into a FIFO queue served by the simulated trace and
    fits -log Pr{Q > q} against q over the upper tail. Returns +inf when the
    queue never builds.
    """
    trace = run(params, channels, rate, duration_s, seed)
    mean_service = throughput(trace)
    if arrival >= mean_service:
        raise InstabilityError(
            f"arrival {arrival:g} bit/s >= mean service {mean_service:g}")
    n_samp = int(trace.total_time_us // sample_us)
    times = np.arange(n_samp + 1) * sample_us
    served = np.diff(_bits_at(trace, times))
    offered = arrival * sample_us * 1e-6
    net = np.cumsum(offered - served)
    floor = np.minimum.accumulate(np.minimum(net, 0.0))
    queue = net - floor
    if queue.max() <= 0.0:
        return math.inf
    p_lo = max(20.0 / len(queue), 1e-4)
    levels = np.logspace(math.log10(0.1), math.log10(p_lo), 25)
    qs = np.quantile(queue, 1.0 - levels)
    mask = qs > 0
    if mask.sum() < 2 or qs[mask].max() == qs[mask].min():
        return math.inf
    slope = np.polyfit(qs[mask], -np.log(levels[mask]), 1)[0]
    return float(slope)


def _batch_mean(x, batches=100):
    """(mean, batch-means standard error) of a stationary sequence."""
    x = np.asarray(x, dtype=float)
    if len(x) == 0:
        return Estimate(math.nan, math.inf)
    width = len(x) // batches
    if width == 0:
        return Estimate(float(x.mean()),
                        float(x.std(ddof=1) / math.sqrt(len(x)))
                        if len(x) > 1 else math.inf)
    used = x[:width * batches].reshape(batches, width)
    means = used.mean(axis=1)
    return Estimate(float(used.mean()),
                    float(means.std(ddof=1) / math.sqrt(batches)))


def empirical_stats(trace, batches=100):
    """Contention statistics with batch-means errors, for model checks.

    Slot-kind frequencies and the attempt rate take the tagged BS's
    perspective: kinds are tallied only over slots the tagged BS spends in
    backoff, matching the analytical slot distribution.
    """
    tagged_tx = ~trace.tagged_in_backoff
    v_laa = _batch_mean(tagged_tx.astype(float), batches)
    coll = trace.outcomes[tagged_tx] == OUT_COLLISION
    p_laa = _batch_mean(coll.astype(float), batches)
    in_backoff = trace.tagged_in_backoff
    slot_probs = {}
    for code, name in enumerate(SLOT_KINDS):
        ind = (trace.kinds[in_backoff] == code).astype(float)
        slot_probs[name] = _batch_mean(ind, batches)
    starts = trace.end_times_us - trace.durations_us
    dmask = (trace.winners == 0) & (trace.outcomes == OUT_DELIVERED)
    dstarts = starts[dmask]
    if len(dstarts) > 1:
        gaps = np.diff(dstarts) - trace.params.t_f_us
        t3 = Estimate(float(gaps.mean()),
                      float(gaps.std(ddof=1) / math.sqrt(len(gaps))))
    else:
        t3 = Estimate(math.nan, math.inf)
    return {"v_laa": v_laa, "p_laa": p_laa, "slot_probs": slot_probs,
            "mean_t3_us": t3, "n_tagged_tx": int(tagged_tx.sum()),
            "n_backoff_slots": int(in_backoff.sum())}


def trace_to_csv(trace, path):
    """Write the event log: slot_index, kind, duration_us, winner, outcome."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["slot_index", "kind", "duration_us", "winner_id",
                     "outcome"])
        for i in range(trace.n_slots):
            wr.writerow([i, SLOT_KINDS[trace.kinds[i]],
                         f"{trace.durations_us[i]:.12g}",
                         int(trace.winners[i]),
                         OUTCOME_NAMES[trace.outcomes[i]]])


def trace_summary(trace):
    """Counters and headline estimates as a JSON-ready dict."""
    stats = empirical_stats(trace)
    per_node = []
    for idx, st in enumerate(trace.node_stats):
        per_node.append({
            "node": idx,
            "kind": LAA_KIND if idx < trace.params.n_laa else WIFI_KIND,
            "tx": st.tx, "collisions": st.collisions,
            "successes": st.successes, "channel_errors": st.channel_errors,
            "drops": st.drops})
    return {
        "seed": trace.seed,
        "rate_bps": trace.rate,
        "duration_s": trace.total_time_us * 1e-6,
        "n_slots": trace.n_slots,
        "throughput_bps": throughput(trace),
        "v_laa_hat": stats["v_laa"].value,
        "p_laa_hat": stats["p_laa"].value,
        "slot_freqs": {k: v.value for k, v in stats["slot_probs"].items()},
        "nodes": per_node,
    }


def summary_to_json(trace, path):
    with open(path, "w") as fh:
        json.dump(trace_summary(trace), fh, indent=2, sort_keys=True)
        fh.write("\n")
