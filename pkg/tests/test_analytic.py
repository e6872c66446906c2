import math

import mpmath as mp
import numpy as np
import pytest

from relaylab.analytic import (
    adb_closed,
    c11_closed,
    c12_closed,
    c21_closed,
    c22_closed,
)
from relaylab.channel import ChannelConfig
from relaylab.simulate import SimConfig, sim_adb

from _oracles import capacity_mean_se, min_erlang_samples, norm_sum_samples

mp.mp.dps = 30

LN2 = math.log(2.0)


def test_single_rayleigh_value():
    # one relay, one antenna: E[log2(1+10 t)], t ~ exponential mean 2,
    # equals e^0.05 E1(0.05)/ln 2
    expect = float(mp.e**mp.mpf("0.05") * mp.e1(mp.mpf("0.05"))) / LN2
    assert c11_closed(10.0, 1, 1, 1.0) == pytest.approx(expect, rel=1e-12)
    assert c22_closed(10.0, 1, 1, 1.0) == pytest.approx(expect, rel=1e-12)
    assert c11_closed(10.0, 1, 1, 1.0) == pytest.approx(3.74297180, abs=5e-8)


def test_broadcast_term_matches_mc():
    rng = np.random.default_rng(21)
    for group, shape, power in ((2, 3, 10.0), (3, 2, 5.0), (1, 4, 0.5), (3, 1, 100.0)):
        z = min_erlang_samples(rng, 1_000_000, group, shape)
        mean, se = capacity_mean_se(z, power)
        assert abs(c11_closed(power, group, shape, 1.0) - mean) <= 3 * se


def test_broadcast_term_nonunit_sigma():
    rng = np.random.default_rng(22)
    z = min_erlang_samples(rng, 1_000_000, 2, 2, sigma2=0.4)
    mean, se = capacity_mean_se(z, 3.0)
    assert abs(c11_closed(3.0, 2, 2, 0.4) - mean) <= 3 * se


def test_beamforming_term_exact_at_single_relay():
    rng = np.random.default_rng(23)
    for shape in (1, 2, 3):
        z = norm_sum_samples(rng, 1_000_000, 1, shape) ** 2
        mean, se = capacity_mean_se(z, 10.0)
        assert abs(c22_closed(10.0, 1, shape, 1.0) - mean) <= 3 * se


def test_beamforming_term_approximation_gap():
    rng = np.random.default_rng(24)
    z = norm_sum_samples(rng, 1_000_000, 2, 3) ** 2
    mean, _ = capacity_mean_se(z, 5.0)
    assert abs(c22_closed(5.0, 2, 3, 1.0) - mean) / mean <= 0.05
    z = norm_sum_samples(rng, 1_000_000, 3, 1) ** 2
    mean, _ = capacity_mean_se(z, 0.1)
    assert abs(c22_closed(0.1, 3, 1, 1.0) - mean) / mean <= 0.12


def test_group_aliases_are_identical():
    assert c21_closed(4.0, 3, 2, 1.1) == c11_closed(4.0, 3, 2, 1.1)
    assert c12_closed(4.0, 3, 2, 1.1) == c22_closed(4.0, 3, 2, 1.1)


def test_terms_monotone_in_power():
    powers = np.geomspace(1e-2, 1e3, 20)
    for fn, (g, s) in (
        (c11_closed, (2, 3)), (c21_closed, (3, 1)),
        (c22_closed, (2, 3)), (c12_closed, (1, 4)),
    ):
        vals = [fn(float(p), g, s, 1.0) for p in powers]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_terms_vanish_at_zero_power():
    assert c11_closed(1e-9, 2, 3, 1.0) < 1e-6
    assert c22_closed(1e-9, 2, 3, 1.0) < 1e-6


def test_numerical_stability_extremes():
    boxes = [(1, 24), (2, 12), (3, 8), (4, 6), (6, 4), (8, 3), (12, 2), (24, 1)]
    for group, shape in boxes:
        for power in (1e-3, 1.0, 1e4):
            for fn in (c11_closed, c22_closed):
                v = fn(power, group, shape, 1.0)
                assert math.isfinite(v) and v >= 0.0, (fn.__name__, group, shape, power)


def test_composition_term_count_drives_cost():
    # indirect check that the multinomial expansion has the expected size:
    # group 3, shape 3 has C(5,2)=10 compositions and still evaluates fast
    from relaylab.specfun import compositions
    assert sum(1 for _ in compositions(3, 3)) == math.comb(5, 2)


def test_power_validation():
    for fn in (c11_closed, c21_closed, c22_closed, c12_closed):
        with pytest.raises(ValueError):
            fn(0.0, 2, 2, 1.0)
        with pytest.raises(ValueError):
            fn(-1.0, 2, 2, 1.0)
    with pytest.raises(ValueError):
        c11_closed(1.0, 0, 2, 1.0)
    with pytest.raises(ValueError):
        c22_closed(1.0, 2, 2, 0.0)


def test_adb_closed_symmetric_config():
    cfg = ChannelConfig(L=4, M=2, N_R=3)
    form = adb_closed(5.0, 2.0, cfg)
    assert form.c11 == form.c21
    assert form.c22 == form.c12
    assert form.c_adb == pytest.approx(min(form.c11, form.c22), rel=1e-15)


def test_adb_closed_branch_consistency():
    cfg = ChannelConfig(L=5, M=2, N_R=2)
    for ps, pr in ((0.1, 10.0), (10.0, 0.1), (3.0, 3.0), (100.0, 0.01)):
        form = adb_closed(ps, pr, cfg)
        first = "c11" if form.c11 <= form.c22 else "c22"
        second = "c21" if form.c21 <= form.c12 else "c12"
        assert form.branch == f"{first}+{second}"
        assert form.c_adb == pytest.approx(
            0.5 * min(form.c11, form.c22) + 0.5 * min(form.c21, form.c12), rel=1e-15
        )
        assert min(form.c11, form.c12, form.c21, form.c22) >= 0.0


def test_adb_closed_relay_limited_regime():
    cfg = ChannelConfig(L=4, M=2, N_R=2)
    form = adb_closed(1e4, 1e-3, cfg)
    assert form.branch == "c22+c12"
    assert form.c_adb == pytest.approx(0.5 * (form.c22 + form.c12), rel=1e-12)


def test_adb_closed_noise_scaling():
    quiet = ChannelConfig(L=4, M=2, N_R=2)
    loud = ChannelConfig(L=4, M=2, N_R=2, noise_r=2.0, noise_d=4.0)
    assert adb_closed(3.0, 2.0, loud).c_adb == pytest.approx(
        adb_closed(1.5, 0.5, quiet).c_adb, rel=1e-12
    )


def test_adb_closed_tracks_simulation():
    cfg = ChannelConfig(L=4, M=2, N_R=3)
    est = sim_adb(cfg, SimConfig(slots=200_000, seed=42), 6.0, 2.0)
    form = adb_closed(6.0, 2.0, cfg)
    assert abs(form.c_adb - est.value) / est.value <= 0.05
