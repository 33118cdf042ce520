import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from obstrack.geom import Point2, Segment, intersects, line_through
from obstrack.sim import DiscoveryLog, crossing_scenario, generate_scenario, run_discovery, ScenarioParams
from obstrack.track import (CandidateLine, CoverInstance, Fallback, ScaleError, UncoverableError,
                            brute_force_min_cover_size, build_instance, covered_set, exact_min_cover,
                            fallback_line, gen_candidates, greedy_cover, line_key, read_cover_csv,
                            track_blocked, track_per_bs, write_cover_csv)
from obstrack.world import BlockedLink, Link


def blocked(coords, bs_id=1, t=0.0):
    """BlockedLinks from ((ue_x, ue_y), (bs_x, bs_y)) pairs, UE ids 0.."""
    return [BlockedLink(Link(i, bs_id, Segment(Point2(*u), Point2(*b))), t + 0.1 * i)
            for i, (u, b) in enumerate(coords)]


def fan(ues, bs=(0.0, 0.0)):
    return blocked([(u, bs) for u in ues])


FOUR = blocked([((0, 0), (0, 4)), ((2, -2), (2, 2)), ((5, 1), (9, 1)), ((6, -3), (6, 0))])


def toy_instance(covers):
    dummy = CandidateLine(line_through((0, 0), (1, 0)), (0, 1))
    universe = blocked([((i, 1), (i, -1)) for i in range(1 + max(max(c) for c in covers if c))])
    return CoverInstance(universe, [dummy] * len(covers), [frozenset(c) for c in covers])


class TestCandidates:
    def test_three_links(self):
        cands = gen_candidates(fan([(10, 0), (0, 10), (-10, 3)]), dedup=False)
        assert sum(not c.is_fallback for c in cands) == 3
        assert sum(c.is_fallback for c in cands) == 3

    def test_single_link(self):
        cands = gen_candidates(fan([(10, 0)]))
        assert len(cands) == 1 and cands[0].is_fallback

    def test_coincident_ues_skip_the_pair(self):
        bl = blocked([((5, 5), (0, 0)), ((5, 5 + 1e-12), (20, 0))])
        cands = gen_candidates(bl, dedup=False)
        assert sum(not c.is_fallback for c in cands) == 0
        assert [c.gen for c in cands] == [Fallback(0), Fallback(1)]

    @pytest.mark.parametrize("n", [1, 2, 5, 13])
    def test_count_law(self, n):
        rng = random.Random(n)
        bl = fan([(rng.uniform(1, 99), rng.uniform(1, 99)) for _ in range(n)])
        assert len(gen_candidates(bl, dedup=False)) == n * (n - 1) // 2 + n

    def test_dedup_keeps_first(self):
        # three collinear UEs: all three pair lines coincide
        bl = fan([(1, 1), (2, 2), (3, 3)], bs=(10, 0))
        cands = gen_candidates(bl)
        pairs = [c for c in cands if not c.is_fallback]
        assert len(pairs) == 1 and pairs[0].gen == (0, 1)
        assert len({line_key(c.line) for c in cands}) == len(cands)

    def test_fallback_is_perpendicular_through_ue(self):
        s = Segment(Point2(3, 4), Point2(3, 10))
        L = fallback_line(s)
        assert L == pytest.approx((0.0, 1.0, -4.0))
        assert fallback_line(Segment(Point2(3, 4), Point2(3, 4))) == pytest.approx((0.0, 1.0, -4.0))


class TestCoveredSet:
    def test_pair_line_covers_its_links(self):
        bl = fan([(10, 0), (0, 10), (-10, 3)], bs=(1, 1))
        c = CandidateLine(line_through((10, 0), (0, 10)), (0, 1))
        assert {0, 1} <= covered_set(c, bl)

    def test_fallback_covers_own_link(self):
        bl = fan([(10, 0), (0, 10), (-10, 3)], bs=(1, 1))
        for j in range(3):
            assert j in covered_set(CandidateLine(fallback_line(bl[j].link.seg), Fallback(j)), bl)

    def test_line_across_a_fan_covers_all(self):
        bl = fan([(10, 2), (10, 6), (8, 10), (3, 10)])
        across = CandidateLine(line_through((5, 0), (0, 5)), (9, 9))
        assert covered_set(across, bl) == {0, 1, 2, 3}

    def test_vectorised_instance_matches_scalar(self):
        w = generate_scenario(ScenarioParams(n_ue=80, n_obstacles=10), 5)
        for bl in run_discovery(w).per_bs.values():
            inst = build_instance(bl)
            assert inst.covers == [covered_set(c, bl) for c in inst.candidates]


class TestGreedy:
    def test_single_pick(self):
        inst = toy_instance([{0, 1, 2}, {2}])
        assert len(greedy_cover(inst)) == 1

    def test_empty(self):
        assert len(greedy_cover(build_instance([]))) == 0
        assert len(track_blocked([])) == 0

    def test_tie_goes_to_smaller_index(self):
        inst = toy_instance([{0}, {1}, {0, 1}, {0, 1}])
        out = greedy_cover(inst)
        assert [inst.candidates.index(c) for c in out] == [0] or len(out) == 1
        mats = [{0, 1}, {0, 1}]
        inst = toy_instance(mats)
        inst.candidates = [CandidateLine(line_through((0, 0), (1, i)), (i, i)) for i in (1, 2)]
        assert greedy_cover(inst).lines[0].gen == (1, 1)

    def test_uncoverable(self):
        inst = toy_instance([{0}, set()])
        inst.universe = inst.universe + blocked([((7, 7), (8, 8))])
        with pytest.raises(UncoverableError):
            greedy_cover(inst)

    def test_four_link_instance(self):
        inst = build_instance(FOUR)
        assert brute_force_min_cover_size(inst) == 2
        out = greedy_cover(inst)
        assert len(out) == 2
        assert all(any(intersects(c.line, bl.link.seg) for c in out) for bl in FOUR)

    def test_deterministic(self):
        w = generate_scenario(ScenarioParams(n_ue=60, n_obstacles=8), 2)
        log = run_discovery(w)
        assert track_per_bs(log) == track_per_bs(log)


class TestExact:
    def test_one_candidate_covers_all(self):
        assert len(exact_min_cover(toy_instance([{0}, {0, 1, 2}, {1}]))) == 1

    def test_four_link_instance(self):
        assert len(exact_min_cover(build_instance(FOUR))) == 2

    def test_empty(self):
        assert len(exact_min_cover(build_instance([]))) == 0

    def test_scale_refused_without_limit(self):
        bl = fan([(i + 1, 50 - i) for i in range(20)])
        with pytest.raises(ScaleError):
            exact_min_cover(build_instance(bl))
        assert len(exact_min_cover(build_instance(bl), size_limit=3)) >= 1

    def test_lexicographic_choice(self):
        inst = toy_instance([{0}, {1}, {0, 1}, {0, 1}])
        out = exact_min_cover(inst)
        assert len(out) == 1 and out.lines[0] is inst.candidates[2]

    @settings(max_examples=150, deadline=None)
    @given(st.lists(st.sets(st.integers(0, 6), max_size=5), min_size=1, max_size=9))
    def test_matches_brute_force(self, covers):
        covers = covers + [{i} for i in range(7)]
        inst = toy_instance(covers)
        inst.universe = inst.universe[:7] if len(inst.universe) >= 7 else inst.universe
        got = exact_min_cover(inst, size_limit=7)
        assert len(got) == brute_force_min_cover_size(inst)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 40), st.integers(0, 40)), min_size=1, max_size=6,
                    unique=True),
           st.tuples(st.integers(0, 40), st.integers(0, 40)))
    def test_greedy_within_log_bound(self, ues, bs):
        bl = fan([u for u in ues if u != bs], bs=bs)
        if not bl:
            return
        inst = build_instance(bl)
        n = len(bl)
        opt = len(exact_min_cover(inst))
        assert len(greedy_cover(inst)) <= max(1, math.ceil(math.log(n))) * opt


class TestPerStation:
    def test_one_station_equals_greedy(self):
        bl = fan([(10, 2), (3, 9), (40, 12)])
        log = DiscoveryLog({1: bl})
        assert track_per_bs(log).lines == greedy_cover(build_instance(bl)).lines

    def test_empty_log(self):
        assert len(track_per_bs(DiscoveryLog())) == 0

    def test_one_obstacle_two_stations_reported_twice(self):
        # a +x moving point obstacle along y = 5 crossing fans of two stations
        a = blocked([((10, 10), (10, 0)), ((20, 10), (20, 0))], bs_id=1)
        b = blocked([((30, 0), (30, 10)), ((40, 0), (40, 10))], bs_id=2)
        b = [BlockedLink(Link(bl.link.ue + 10, 2, bl.link.seg), bl.t_block) for bl in b]
        out = track_per_bs(DiscoveryLog({1: a, 2: b}))
        assert 1 <= len(out) <= 2

    def test_merged_lines_unique(self):
        w = generate_scenario(ScenarioParams(n_ue=100, n_obstacles=10), 1)
        out = track_per_bs(run_discovery(w))
        keys = [line_key(c.line) for c in out]
        assert len(keys) == len(set(keys))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 100_000))
    def test_every_blocked_link_is_crossed(self, seed):
        w = generate_scenario(ScenarioParams(n_ue=60, n_obstacles=10), seed)
        log = run_discovery(w)
        out = track_per_bs(log)
        for bl in log.all():
            assert any(intersects(c.line, bl.link.seg) for c in out)

    @pytest.mark.parametrize("seed", range(25))
    def test_single_linear_obstacle_gives_one_line(self, seed):
        w = crossing_scenario(seed, n_links=5)
        assert len(track_per_bs(run_discovery(w))) == 1


def test_cover_csv_round_trip(tmp_path):
    p = tmp_path / "cover.csv"
    write_cover_csv(FOUR, p)
    assert p.read_text().splitlines()[0] == "link_id,ue_x,ue_y,bs_x,bs_y,t_block"
    assert read_cover_csv(p) == FOUR
