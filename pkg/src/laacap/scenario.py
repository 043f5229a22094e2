"""Scenario configuration: MAC timing, PHY parameters, node placement,
channel gains, and per-user targets.

All durations are stored in microseconds. Transmit/static/idle powers are
stored in watts in memory; the JSON file format uses explicit *_dbm keys for
them and they are converted at load. The noise power spectral density is dBm
per Hz in both places.
"""

import json
import math
from dataclasses import dataclass, field, asdict, replace

import numpy as np

FCW = "FCW"
VCW = "VCW"

AREA_M = 500.0          # side of the square deployment area
MIN_DIST_M = 1.0        # clamp below this to keep the path loss finite
CARRIER_GHZ = 5.0

# JSON keys carrying dBm values and the watt fields they map to
_DBM_FIELDS = {
    "p_tot_dbm": "p_tot_w",
    "p_static_dbm": "p_static_w",
    "p_idle_dbm": "p_idle_w",
}


def dbm_to_watts(dbm):
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(w):
    return 10.0 * math.log10(w * 1e3)


@dataclass
class SystemParams:
    """Static system configuration for one coexistence scenario."""

    n_laa: int = 5              # LAA base stations sharing the channel
    m_wifi: int = 5             # WiFi nodes sharing the channel
    k_users: int = 1            # LAA users (subbands) per BS
    bandwidth_hz: float = 5e6
    w_laa: int = 16             # initial LAA contention window
    w_wifi: int = 32            # initial WiFi contention window
    k_retry_laa: int = 6        # max (re)transmissions per LAA packet
    k_retry_wifi: int = 6
    mode: str = FCW             # FCW: fixed window; VCW: doubling window
    sigma_idle_us: float = 10.0
    t_f_us: float = 1000.0      # collision-free LAA transmission slot
    t_c_us: float = 1000.0      # LAA-LAA collision slot
    t_sw_us: float = 1000.0     # WiFi success slot
    t_cw_us: float = 1000.0     # WiFi-WiFi collision slot
    t_wl_us: float = 1000.0     # LAA-WiFi cross collision slot
    cca_us: float = 34.0
    difs_us: float = 50.0
    p_tot_w: float = dbm_to_watts(23.0)
    noise_psd_dbm_hz: float = -174.0
    per: float = 0.0            # packet error rate for collision-free packets
    p_static_w: float = 0.1
    p_idle_w: float = 0.1
    xi: float = 0.1             # power amplifier efficiency
    hidden: tuple | None = None  # (h_laa, h_wifi) hidden-node counts

    def __post_init__(self):
        if self.hidden is not None:
            self.hidden = tuple(int(h) for h in self.hidden)
        self.validate()

    def validate(self):
        if self.n_laa < 1:
            raise ValueError("n_laa must be >= 1")
        if self.m_wifi < 0:
            raise ValueError("m_wifi must be >= 0")
        if self.k_users < 1:
            raise ValueError("k_users must be >= 1")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be > 0")
        if self.w_laa < 2 or self.w_wifi < 2:
            raise ValueError("contention windows must be >= 2")
        if self.k_retry_laa < 1 or self.k_retry_wifi < 1:
            raise ValueError("retry limits must be >= 1")
        if self.mode not in (FCW, VCW):
            raise ValueError(f"mode must be {FCW!r} or {VCW!r}, got {self.mode!r}")
        for name in ("sigma_idle_us", "t_f_us", "t_c_us", "t_sw_us",
                     "t_cw_us", "t_wl_us", "cca_us", "difs_us"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.per < 1.0:
            raise ValueError("per must be in [0, 1)")
        if self.p_tot_w <= 0:
            raise ValueError("p_tot_w must be > 0")
        if self.p_static_w < 0 or self.p_idle_w < 0:
            raise ValueError("static/idle powers must be >= 0")
        if not 0.0 < self.xi <= 1.0:
            raise ValueError("xi must be in (0, 1]")
        if self.hidden is not None:
            if len(self.hidden) != 2 or any(h < 0 for h in self.hidden):
                raise ValueError("hidden must be a pair of counts >= 0")
        return self

    @property
    def noise_subband_w(self):
        # per-user noise power: PSD times the per-user share B/K
        return dbm_to_watts(self.noise_psd_dbm_hz) * self.bandwidth_hz / self.k_users

    def window_laa(self, j):
        """Contention window of LAA retry stage j."""
        if not 0 <= j < self.k_retry_laa:
            raise ValueError(f"LAA retry stage {j} outside [0, {self.k_retry_laa})")
        return self.w_laa * (2 ** j if self.mode == VCW else 1)

    def window_wifi(self, j):
        """Contention window of WiFi retry stage j (always doubling)."""
        if not 0 <= j < self.k_retry_wifi:
            raise ValueError(f"WiFi retry stage {j} outside [0, {self.k_retry_wifi})")
        return self.w_wifi * 2 ** j

    def with_(self, **kw):
        return replace(self, **kw)

    def to_json_dict(self):
        d = asdict(self)
        for dbm_key, w_key in _DBM_FIELDS.items():
            w = d.pop(w_key)
            d[dbm_key] = None if w == 0 else watts_to_dbm(w)
        if d["hidden"] is not None:
            d["hidden"] = list(d["hidden"])
        return d

    @classmethod
    def from_json_dict(cls, d):
        d = dict(d)
        for dbm_key, w_key in _DBM_FIELDS.items():
            if dbm_key in d:
                v = d.pop(dbm_key)
                d[w_key] = 0.0 if v is None else dbm_to_watts(float(v))
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown scenario fields: {sorted(unknown)}")
        if d.get("hidden") is not None:
            d["hidden"] = tuple(d["hidden"])
        return cls(**d)

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json_dict(), f, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_json_dict(json.load(f))


@dataclass
class ChannelSet:
    """Per-user channel gains and the geometry they came from."""

    gains: np.ndarray          # (n_laa, k_users) linear power gains
    noise_w: float             # per-subband noise power
    pos_bs: np.ndarray         # (n_laa, 2) BS coordinates, meters
    pos_ue: np.ndarray         # (n_laa, k_users, 2) UE coordinates, meters

    def __post_init__(self):
        self.gains = np.asarray(self.gains, dtype=float)
        if self.gains.ndim == 1:
            self.gains = self.gains[None, :]
        if np.any(self.gains <= 0):
            raise ValueError("gains must be > 0")
        if self.noise_w <= 0:
            raise ValueError("noise_w must be > 0")

    @property
    def tagged_gains(self):
        """Gains of the first (tagged) BS's users."""
        return self.gains[0]


def pathloss_gain(d_m, f_ghz=CARRIER_GHZ):
    """Log-distance urban-micro NLOS surrogate, linear power gain."""
    d = np.maximum(d_m, MIN_DIST_M)
    pl_db = 22.7 + 36.7 * np.log10(d) + 26.0 * np.log10(f_ghz)
    return 10.0 ** (-pl_db / 10.0)


def generate_scenario(params, seed):
    """Drop N BSs uniformly in the area and K users around each BS.

    Each BS's users are uniform in a (500/sqrt(N))-sided square centered on
    the BS. Deterministic for a fixed (params, seed) pair.
    """
    params.validate()
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5C3]))
    n, k = params.n_laa, params.k_users
    pos_bs = rng.uniform(0.0, AREA_M, size=(n, 2))
    side = AREA_M / math.sqrt(n)
    offsets = rng.uniform(-side / 2.0, side / 2.0, size=(n, k, 2))
    pos_ue = pos_bs[:, None, :] + offsets
    dist = np.linalg.norm(offsets, axis=2)
    gains = pathloss_gain(dist)
    return ChannelSet(gains=gains, noise_w=params.noise_subband_w,
                      pos_bs=pos_bs, pos_ue=pos_ue)


def rate_of_power(p_k, g_k, params):
    """Shannon rate of one user over its B/K subband, bit/s."""
    if p_k < 0:
        raise ValueError("transmit power must be >= 0")
    snr = g_k * p_k / params.noise_subband_w
    return params.bandwidth_hz / params.k_users * math.log2(1.0 + snr)
