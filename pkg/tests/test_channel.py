import math

import numpy as np
import pytest

from uavrelay import channel
from uavrelay.scenario import Scenario, Trajectory


def _one_user(**kw):
    return Scenario(users=[[0.0, 0.0, 0.0]], users_per_slot=1, num_slots=4, **kw)


def test_rx_power_directly_overhead():
    sc = _one_user()
    t = Trajectory((-500.0, 0.0), 500.0, 1000.0)   # slot N sits at (0, 0, 1000)
    expected = 0.01 * 1.0 * 1.0 * (0.15 / (4 * math.pi * 1000.0)) ** 2
    assert channel.rx_power_gv(sc, t, 0, 4) == pytest.approx(expected, rel=1e-12)


def test_rx_power_vb_example():
    sc = _one_user()
    t = Trajectory((2500.0, 4000.0), 500.0, 1000.0)  # slot N at (3000, 4000, 1000)
    expected = 10.0 * (0.15 / (4 * math.pi)) ** 2 / 26e6
    assert channel.rx_power_vb(sc, t, 4) == pytest.approx(expected, rel=1e-12)


def test_se_matches_power_over_noise():
    sc = Scenario(users=[[300.0, 200.0, 0.0], [-900.0, 50.0, 0.0]], users_per_slot=2, num_slots=6)
    t = Trajectory((100.0, 0.0), 700.0, 1500.0)
    N0B = 4e-21 * 1e6
    for n in range(1, 7):
        vb = math.log2(1 + channel.rx_power_vb(sc, t, n) / N0B)
        assert channel.se_vb(sc, t, n) == pytest.approx(vb, rel=1e-12)
        for g in range(2):
            gv = math.log2(1 + channel.rx_power_gv(sc, t, g, n) / (N0B / 2))
            assert channel.se_gv_user(sc, t, g, n) == pytest.approx(gv, rel=1e-12)


def test_tables_match_scalar_ops(desk, circle):
    se_gv, se_vb = channel.se_tables(desk, circle)
    for g in (0, 3, 9):
        for n in (1, 17, 64):
            assert se_gv[g, n - 1] == pytest.approx(channel.se_gv_user(desk, circle, g, n), rel=1e-12)
    for n in (1, 33, 64):
        assert se_vb[n - 1] == pytest.approx(channel.se_vb(desk, circle, n), rel=1e-12)


def test_slot_se_divides_by_M(desk, circle):
    B = np.zeros((desk.num_users, desk.num_slots))
    B[[1, 4], 9] = 1
    se_gv, _ = channel.se_tables(desk, circle)
    expect = (se_gv[1, 9] + se_gv[4, 9]) / 2
    assert channel.se_gv_slot(desk, circle, B, 10) == pytest.approx(expect, rel=1e-12)
    assert channel.slot_gv_se(se_gv, B, 2)[9] == pytest.approx(expect, rel=1e-12)


def test_se_decreasing_in_distance():
    c = channel.link_constants(_one_user())
    d = np.geomspace(1e4, 1e10, 200)
    for a in (c.a_g, c.a_b):
        se = channel.se_of_sq_dist(a, d)
        assert np.all(np.diff(se) < 0)
        assert np.all(se > 0)


def test_rotation_invariance():
    rng = np.random.default_rng(0)
    users = np.column_stack([rng.normal(3000, 800, 5), rng.normal(0, 800, 5), np.zeros(5)])
    sc = Scenario(users=users, users_per_slot=1, num_slots=16)
    t = Trajectory((3000.0, 200.0), 900.0, 1000.0)
    # rotate by a whole number of slot angles so the slot indices line up
    th = 2 * math.pi / 16 * 3
    R = np.array([[math.cos(th), -math.sin(th), 0], [math.sin(th), math.cos(th), 0], [0, 0, 1]])
    sc_r = Scenario(users=users @ R.T, users_per_slot=1, num_slots=16)
    c = R[:2, :2] @ np.array(t.center_xy)
    t_r = Trajectory(tuple(c), t.radius_m, t.altitude_m)
    g1, v1 = channel.se_tables(sc, t)
    g2, v2 = channel.se_tables(sc_r, t_r)
    assert np.allclose(np.roll(g1, 3, axis=1), g2, rtol=1e-10)
    assert np.allclose(np.roll(v1, 3), v2, rtol=1e-10)


def test_a_g_scales_with_M():
    users = [[0, 0, 0], [1, 0, 0], [2, 0, 0]]
    c1 = channel.link_constants(Scenario(users=users, users_per_slot=1, num_slots=3))
    c3 = channel.link_constants(Scenario(users=users, users_per_slot=3, num_slots=3))
    assert c3.a_g == pytest.approx(3 * c1.a_g, rel=1e-14)
    assert c3.a_b == c1.a_b


def test_a_constants_from_scratch():
    sc = _one_user()
    k = (0.15 / (4 * math.pi)) ** 2 / (4e-21 * 1e6)
    c = channel.link_constants(sc)
    assert c.a_g == pytest.approx(0.01 * k, rel=1e-13)
    assert c.a_b == pytest.approx(10.0 * k, rel=1e-13)
