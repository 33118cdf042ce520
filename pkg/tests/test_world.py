import math

import pytest
from hypothesis import given, strategies as st

from obstrack.geom import Point2, Segment, TimedPoint, square_intersects_segment
from obstrack.sim import ScenarioParams, generate_scenario
from obstrack.world import (BaseStation, EpochConfig, LinearMotion, Link, Obstacle, PathLossModel,
                            PolylineMotion, StationKind, UserEquipment, World, centers_at,
                            is_blocked, link_feasible, load_world, make_link, obstacle_center_at,
                            path_loss, save_world)

PL = PathLossModel(A=61.4, B=2.0, sigma=5.8, max_loss=120.0)


def test_path_loss_values():
    assert path_loss(PL, 10) == pytest.approx(81.4)
    assert path_loss(PL, 1) == pytest.approx(61.4)
    assert path_loss(PL, 100, 3.2) == pytest.approx(104.6)


def test_path_loss_rejects_nonpositive_distance():
    with pytest.raises(ValueError):
        path_loss(PL, 0.0)


@given(st.floats(1e-3, 1e4), st.floats(1e-3, 1e4), st.floats(-20, 20))
def test_path_loss_increasing(d1, d2, z):
    if d1 < d2:
        assert path_loss(PL, d1, z) < path_loss(PL, d2, z)


def test_link_feasible_threshold():
    s = Segment(Point2(0, 0), Point2(10, 0))
    assert link_feasible(PL, s)
    assert not link_feasible(PathLossModel(max_loss=80.0), s)
    assert link_feasible(PathLossModel(max_loss=81.4), s)


def test_max_range_matches_threshold():
    r = PL.max_range()
    assert path_loss(PL, r) == pytest.approx(PL.max_loss)


def test_linear_center():
    o = Obstacle(0, LinearMotion(Point2(0, 0), (1, 2)))
    assert obstacle_center_at(o, 3) == (3, 6)
    assert obstacle_center_at(o, 0) == (0, 0)


def test_polyline_center():
    o = Obstacle(0, PolylineMotion((TimedPoint(Point2(0, 0), 0), TimedPoint(Point2(10, 0), 5))))
    assert obstacle_center_at(o, 2.5) == (5, 0)
    assert obstacle_center_at(o, 0) == (0, 0)
    with pytest.raises(ValueError):
        obstacle_center_at(o, 6)


def test_negative_time_rejected():
    o = Obstacle(0, LinearMotion(Point2(0, 0), (1, 0)))
    with pytest.raises(ValueError):
        obstacle_center_at(o, -1)
    with pytest.raises(ValueError):
        obstacle_center_at(o, 6, T=5)


def test_polyline_validation():
    with pytest.raises(ValueError):
        PolylineMotion((TimedPoint(Point2(0, 0), 0),))
    with pytest.raises(ValueError):
        PolylineMotion((TimedPoint(Point2(0, 0), 1), TimedPoint(Point2(1, 0), 1)))


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 5), st.floats(0.01, 0.5))
def test_linear_motion_continuity(vx, vy, t, dt):
    o = Obstacle(0, LinearMotion(Point2(50, 50), (vx, vy)))
    a, b = obstacle_center_at(o, t), obstacle_center_at(o, t + dt)
    assert math.hypot(b.x - a.x, b.y - a.y) <= math.hypot(vx, vy) * dt + 1e-9


def test_centers_at_matches_scalar():
    wps = tuple(TimedPoint(Point2(x, y), t) for t, x, y in [(0, 0, 0), (1, 3, 4), (5, 3, 10)])
    for motion in (LinearMotion(Point2(1, 2), (0.5, -1)), PolylineMotion(wps)):
        o = Obstacle(0, motion)
        times = [0, 0.3, 1.0, 2.7, 5.0]
        arr = centers_at(o, times)
        for t, row in zip(times, arr):
            assert tuple(row) == pytest.approx(obstacle_center_at(o, t))


LINK = Link(0, 1, Segment(Point2(0, 0), Point2(10, 0)))


def test_is_blocked_cases():
    on = Obstacle(0, LinearMotion(Point2(5, 0), (0, 0)))
    far = Obstacle(1, LinearMotion(Point2(5, 10), (0, 0)))
    graze = Obstacle(2, LinearMotion(Point2(5, 0.5), (0, 0)))
    assert is_blocked(on, 1.0, LINK)
    assert not is_blocked(far, 1.0, LINK)
    assert is_blocked(graze, 1.0, LINK)
    assert is_blocked(graze, 1.0, LINK) == square_intersects_segment((5, 0.5), 0.5, LINK.seg)


@given(st.floats(-5, 15), st.floats(-3, 3), st.floats(0, 2))
def test_is_blocked_reversal_invariant(x, y, w):
    o = Obstacle(0, LinearMotion(Point2(x, y), (0, 0)), w)
    rev = Link(0, 1, LINK.seg.reversed())
    assert is_blocked(o, 0.0, LINK) == is_blocked(o, 0.0, rev)


def test_epoch_validation():
    assert EpochConfig().n_slots == 50 and EpochConfig().tau_slot == 30
    with pytest.raises(ValueError):
        EpochConfig(T=5, tau=5)
    with pytest.raises(ValueError):
        EpochConfig(T=5, tau=3, delta=0.07)
    with pytest.raises(ValueError):
        EpochConfig(K_max=0)


def _stations():
    return (BaseStation(0, Point2(50, 50), StationKind.LTE), BaseStation(1, Point2(10, 10)))


def test_world_requires_one_lte():
    with pytest.raises(ValueError):
        World((100, 100), (BaseStation(1, Point2(1, 1)),), (), (), ())


def test_world_rejects_duplicate_ids_and_outside_positions():
    st_ = _stations()
    with pytest.raises(ValueError):
        World((100, 100), st_ + (BaseStation(1, Point2(2, 2)),), (), (), ())
    with pytest.raises(ValueError):
        World((100, 100), st_, (UserEquipment(0, Point2(101, 5)),), (), ())


def test_world_rejects_mismatched_link():
    st_ = _stations()
    ue = UserEquipment(0, Point2(20, 20))
    bad = Link(0, 1, Segment(Point2(20, 21), Point2(10, 10)))
    with pytest.raises(ValueError):
        World((100, 100), st_, (ue,), (), (bad,))
    World((100, 100), st_, (ue,), (), (make_link(ue, st_[1]),))


def test_generated_world_deterministic():
    p = ScenarioParams()
    assert generate_scenario(p, 11) == generate_scenario(p, 11)
    assert generate_scenario(p, 11) != generate_scenario(p, 12)


def test_scenario_file_round_trip(tmp_path):
    w = generate_scenario(ScenarioParams(staggered_arrivals=True), 3)
    wps = (TimedPoint(Point2(1.5, 2.25), 0.0), TimedPoint(Point2(7.0, 1.0 / 3), 5.0))
    w = World(w.area, w.stations, w.ues, w.obstacles + (Obstacle(99, PolylineMotion(wps), 0.25),),
              w.active, w.epoch, w.pl, w.seed, w.shadowing)
    path = tmp_path / "w.ini"
    save_world(w, path)
    assert load_world(path) == w


def test_scenario_file_errors_name_the_field(tmp_path):
    w = generate_scenario(ScenarioParams(n_ue=3), 0)
    path = tmp_path / "w.ini"
    save_world(w, path)
    text = path.read_text()
    path.write_text(text.replace("tau = 3.0", "tau = three"))
    with pytest.raises(ValueError, match=r"\[epoch\] tau"):
        load_world(path)
    path.write_text(text.replace("[links]\nactive = ", "[links]\nactive = 77-1, "))
    with pytest.raises(ValueError, match="links"):
        load_world(path)
