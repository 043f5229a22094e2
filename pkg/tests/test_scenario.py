"""Configuration, placement, path loss, and Shannon-rate helpers."""

import json
import math

import numpy as np
import pytest

import laacap as L
from _pins import PATHLOSS_GAIN_100M, PATHLOSS_GAIN_1M


def test_dbm_watt_round_trip():
    for dbm in (-174.0, 0.0, 23.0):
        assert L.watts_to_dbm(L.dbm_to_watts(dbm)) == pytest.approx(dbm)
    assert L.dbm_to_watts(30.0) == pytest.approx(1.0)


def test_pathloss_pins():
    assert L.pathloss_gain(100.0) == pytest.approx(PATHLOSS_GAIN_100M,
                                                   rel=1e-12)
    assert L.pathloss_gain(1.0) == pytest.approx(PATHLOSS_GAIN_1M, rel=1e-12)


def test_pathloss_clamps_below_one_meter():
    assert L.pathloss_gain(0.25) == L.pathloss_gain(1.0)
    assert L.pathloss_gain(0.0) == L.pathloss_gain(1.0)


def test_pathloss_monotone_in_distance():
    d = np.logspace(0, 3, 40)
    g = L.pathloss_gain(d)
    assert np.all(np.diff(g) < 0)


def test_default_params_valid():
    p = L.SystemParams()
    assert p.n_laa == 5 and p.m_wifi == 5
    assert p.mode == L.FCW
    assert p.validate() is p


@pytest.mark.parametrize("field,value", [
    ("n_laa", 0), ("m_wifi", -1), ("k_users", 0), ("bandwidth_hz", 0.0),
    ("w_laa", 1), ("k_retry_laa", 0), ("mode", "XYZ"), ("t_f_us", 0.0),
    ("per", 1.0), ("per", -0.1), ("p_tot_w", 0.0), ("xi", 0.0),
    ("xi", 1.5), ("hidden", (1,)), ("hidden", (-1, 0)),
])
def test_params_validation_errors(field, value):
    with pytest.raises(ValueError):
        L.SystemParams(**{field: value})


def test_windows_fcw_constant_vcw_doubling():
    fcw = L.SystemParams(mode=L.FCW)
    vcw = L.SystemParams(mode=L.VCW)
    for j in range(fcw.k_retry_laa):
        assert fcw.window_laa(j) == 16
        assert vcw.window_laa(j) == 16 * 2 ** j
        assert fcw.window_wifi(j) == 32 * 2 ** j
    with pytest.raises(ValueError):
        fcw.window_laa(fcw.k_retry_laa)
    with pytest.raises(ValueError):
        fcw.window_laa(-1)


def test_noise_subband_hand_value():
    p = L.SystemParams(bandwidth_hz=5e6, k_users=1)
    expect = 10 ** (-174.0 / 10.0) * 1e-3 * 5e6
    assert p.noise_subband_w == pytest.approx(expect, rel=1e-12)
    assert L.SystemParams(k_users=5).noise_subband_w == pytest.approx(
        expect / 5, rel=1e-12)


def test_json_round_trip(tmp_path):
    p = L.SystemParams(n_laa=3, mode=L.VCW, per=0.05, hidden=(1, 2))
    path = tmp_path / "scenario.json"
    p.save(path)
    raw = json.loads(path.read_text())
    assert "p_tot_dbm" in raw and "p_tot_w" not in raw
    assert raw["p_tot_dbm"] == pytest.approx(23.0)
    q = L.SystemParams.load(path)
    assert q == p


def test_json_rejects_unknown_fields():
    with pytest.raises(ValueError, match="unknown scenario fields"):
        L.SystemParams.from_json_dict({"n_laa": 2, "bogus": 1})


def test_with_override():
    p = L.SystemParams()
    q = p.with_(n_laa=7, mode=L.VCW)
    assert q.n_laa == 7 and q.mode == L.VCW
    assert p.n_laa == 5


def test_generate_scenario_deterministic_and_bounded():
    p = L.SystemParams(n_laa=4, k_users=3)
    a = L.generate_scenario(p, 11)
    b = L.generate_scenario(p, 11)
    c = L.generate_scenario(p, 12)
    assert np.array_equal(a.gains, b.gains)
    assert not np.array_equal(a.gains, c.gains)
    assert a.gains.shape == (4, 3)
    assert a.pos_bs.shape == (4, 2)
    assert a.pos_ue.shape == (4, 3, 2)
    assert np.all(a.gains > 0)
    assert np.all((a.pos_bs >= 0) & (a.pos_bs <= 500.0))
    side = 500.0 / math.sqrt(4)
    assert np.all(np.abs(a.pos_ue - a.pos_bs[:, None, :]) <= side / 2 + 1e-9)
    assert a.noise_w == pytest.approx(p.noise_subband_w)


def test_channelset_validation():
    with pytest.raises(ValueError):
        L.ChannelSet(gains=np.array([1.0, -1.0]), noise_w=1e-15,
                     pos_bs=np.zeros((1, 2)), pos_ue=np.zeros((1, 2, 2)))
    cs = L.ChannelSet(gains=np.array([1e-9, 2e-9]), noise_w=1e-15,
                      pos_bs=np.zeros((1, 2)), pos_ue=np.zeros((1, 2, 2)))
    assert cs.gains.shape == (1, 2)
    assert np.array_equal(cs.tagged_gains, [1e-9, 2e-9])


def test_rate_of_power_shannon():
    p = L.SystemParams(bandwidth_hz=5e6, k_users=1)
    g = 1e-10
    pw = 0.2
    snr = g * pw / p.noise_subband_w
    assert L.rate_of_power(pw, g, p) == pytest.approx(
        5e6 * math.log2(1 + snr), rel=1e-12)
    assert L.rate_of_power(0.0, g, p) == 0.0
    with pytest.raises(ValueError):
        L.rate_of_power(-1.0, g, p)
    # splitting the band splits the rate at high SNR only sublinearly
    p5 = L.SystemParams(bandwidth_hz=5e6, k_users=5)
    assert L.rate_of_power(pw, g, p5) < L.rate_of_power(pw, g, p)
