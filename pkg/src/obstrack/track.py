"""Obstacle trajectory inference from blocked links.

Blocked links are the universe of a set-cover problem; candidate
trajectories are the lines through pairs of UE endpoints (plus one
fallback per link so that every universe is coverable). ``greedy_cover``
is the tracker, ``exact_min_cover`` an exhaustive baseline for small
instances.
"""

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from .geom import (EPS_PT, Line2, Point2, Segment, intersects, line_from_normal, line_through,
                   lines_intersect_segments)
from .world import BlockedLink, Link


@dataclass(frozen=True)
class Fallback:
    link_index: int


@dataclass(frozen=True)
class CandidateLine:
    line: Line2
    # (ue id, ue id) for pair candidates, Fallback for the per-link fallback
    gen: Union[Tuple[int, int], Fallback]

    @property
    def is_fallback(self):
        return isinstance(self.gen, Fallback)


@dataclass
class CoverInstance:
    universe: List[BlockedLink]
    candidates: List[CandidateLine]
    covers: List[FrozenSet[int]]


@dataclass
class TrajectorySet:
    lines: List[CandidateLine] = field(default_factory=list)

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)


class UncoverableError(RuntimeError):
    pass


class ScaleError(ValueError):
    pass


def line_key(line: Line2):
    """Rounded coefficients used to deduplicate numerically equal lines."""
    return (round(line.a, 9) + 0.0, round(line.b, 9) + 0.0, round(line.c, 6) + 0.0)


def fallback_line(seg: Segment) -> Line2:
    """Line through the UE end of ``seg``, perpendicular to the segment
    (horizontal for a zero-length segment)."""
    (ux, uy), (bx, by) = seg
    dx, dy = bx - ux, by - uy
    if math.hypot(dx, dy) <= EPS_PT:
        return line_from_normal(seg.a, (0.0, 1.0))
    return line_from_normal(seg.a, (dx, dy))


def gen_candidates(blocked: Sequence[BlockedLink], dedup: bool = True) -> List[CandidateLine]:
    """Pair candidates for every unordered pair of blocked links whose UEs do
    not coincide, followed by one fallback per link.

    With ``dedup`` the list keeps the first occurrence of each line.
    """
    out = []
    ues = [bl.link.seg.a for bl in blocked]
    ids = [bl.link.ue for bl in blocked]
    for i, j in itertools.combinations(range(len(blocked)), 2):
        p, q = ues[i], ues[j]
        if math.hypot(q[0] - p[0], q[1] - p[1]) <= EPS_PT:
            continue
        out.append(CandidateLine(line_through(p, q), (ids[i], ids[j])))
    for i, bl in enumerate(blocked):
        out.append(CandidateLine(fallback_line(bl.link.seg), Fallback(i)))
    if not dedup:
        return out
    seen, uniq = set(), []
    for c in out:
        k = line_key(c.line)
        if k not in seen:
            seen.add(k)
            uniq.append(c)
    return uniq


def covered_set(c: CandidateLine, blocked: Sequence[BlockedLink]) -> FrozenSet[int]:
    return frozenset(i for i, bl in enumerate(blocked) if intersects(c.line, bl.link.seg))


def _cover_matrix(candidates, blocked):
    if not candidates or not blocked:
        return np.zeros((len(candidates), len(blocked)), dtype=bool)
    lines = np.array([c.line for c in candidates])
    seg_a = np.array([bl.link.seg.a for bl in blocked])
    seg_b = np.array([bl.link.seg.b for bl in blocked])
    return lines_intersect_segments(lines, seg_a, seg_b)


def build_instance(blocked: Sequence[BlockedLink], candidates=None) -> CoverInstance:
    blocked = list(blocked)
    if candidates is None:
        candidates = gen_candidates(blocked)
    mat = _cover_matrix(candidates, blocked)
    covers = [frozenset(np.flatnonzero(row).tolist()) for row in mat]
    return CoverInstance(blocked, list(candidates), covers)


def greedy_cover(inst: CoverInstance) -> TrajectorySet:
    """Greedy set cover: repeatedly take the candidate covering the most
    still-uncovered links, ties to the smaller candidate index."""
    n = len(inst.universe)
    if n == 0:
        return TrajectorySet()
    mat = np.zeros((len(inst.candidates), n), dtype=bool)
    for i, cov in enumerate(inst.covers):
        mat[i, list(cov)] = True
    uncovered = np.ones(n, dtype=bool)
    chosen = []
    while uncovered.any():
        gain = mat[:, uncovered].sum(axis=1) if len(mat) else np.zeros(0)
        if not len(gain) or gain.max() == 0:
            raise UncoverableError(f"{int(uncovered.sum())} links cannot be covered by any candidate")
        k = int(np.argmax(gain))
        chosen.append(k)
        uncovered &= ~mat[k]
    return TrajectorySet([inst.candidates[k] for k in chosen])


def _masks(inst):
    return [sum(1 << i for i in cov) for cov in inst.covers]


def exact_min_cover(inst: CoverInstance, size_limit: Optional[int] = None,
                    max_universe: int = 16, max_candidates: int = 24) -> TrajectorySet:
    """Minimum-cardinality cover by exhaustive search over increasing sizes.

    Among minimum covers the lexicographically smallest tuple of candidate
    indices is returned. Instances above the oracle scale
    (``max_universe`` links, ``max_candidates`` candidates) are refused
    unless ``size_limit`` is given, which bounds the cover sizes searched.
    """
    n, m = len(inst.universe), len(inst.candidates)
    if size_limit is None:
        if n > max_universe or m > max_candidates:
            raise ScaleError(f"instance with {n} links and {m} candidates exceeds oracle scale")
        size_limit = m
    full = (1 << n) - 1
    masks = _masks(inst)
    # identical masks: only the lowest index can appear in a lexicographically first cover
    first_of = {}
    for i, mk in enumerate(masks):
        if mk and mk not in first_of:
            first_of[mk] = i
    idx = sorted(first_of.values())
    red = [masks[i] for i in idx]

    def coverable(need, k, start):
        if need == 0:
            return True
        if k == 0:
            return False
        bit = need & -need
        return any(red[i] & bit and coverable(need & ~red[i], k - 1, start)
                   for i in range(start, len(red)))

    def lex_first(need, k, start):
        if need == 0:
            return []
        for i in range(start, len(red)):
            rest = need & ~red[i]
            if rest != need and coverable(rest, k - 1, i + 1):
                return [i] + lex_first(rest, k - 1, i + 1)
        raise AssertionError("unreachable")

    for k in range(0, size_limit + 1):
        if coverable(full, k, 0):
            chosen = lex_first(full, k, 0)
            return TrajectorySet([inst.candidates[idx[i]] for i in chosen])
    raise ScaleError(f"no cover with at most {size_limit} candidates")


def brute_force_min_cover_size(inst: CoverInstance, size_limit: Optional[int] = None) -> int:
    """Plain enumeration of candidate subsets; slow, kept as a cross-check."""
    n, m = len(inst.universe), len(inst.candidates)
    full = (1 << n) - 1
    masks = _masks(inst)
    for k in range(0, (size_limit if size_limit is not None else m) + 1):
        for combo in itertools.combinations(range(m), k):
            acc = 0
            for i in combo:
                acc |= masks[i]
            if acc == full:
                return k
    raise ScaleError("no cover found")


def track_blocked(blocked: Sequence[BlockedLink]) -> TrajectorySet:
    return greedy_cover(build_instance(blocked))


def track_per_bs(log) -> TrajectorySet:
    """Run the tracker on each station's blocked list and merge the lines,
    dropping duplicates (first station in id order wins)."""
    out, seen = [], set()
    for bs in sorted(log.per_bs):
        for c in track_blocked(log.per_bs[bs]).lines:
            k = line_key(c.line)
            if k not in seen:
                seen.add(k)
                out.append(c)
    return TrajectorySet(out)


# --- cover instance CSV ---------------------------------------------------

COVER_HEADER = ["link_id", "ue_x", "ue_y", "bs_x", "bs_y", "t_block"]


def write_cover_csv(blocked: Sequence[BlockedLink], path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(COVER_HEADER)
        for bl in blocked:
            (ux, uy), (bx, by) = bl.link.seg
            wr.writerow([f"{bl.link.ue}-{bl.link.bs}", repr(ux), repr(uy), repr(bx), repr(by),
                         repr(bl.t_block)])


def read_cover_csv(path) -> List[BlockedLink]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return out
        if [h.strip() for h in header] != COVER_HEADER:
            raise ValueError(f"unexpected cover CSV header {header}")
        for lineno, row in enumerate(reader, start=2):
            try:
                ue, bs = (int(v) for v in row[0].split("-"))
                ux, uy, bx, by, t = (float(v) for v in row[1:])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            out.append(BlockedLink(Link(ue, bs, Segment(Point2(ux, uy), Point2(bx, by))), t))
    return out
