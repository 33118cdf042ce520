"""Proactive handoff of links that a reported trajectory crosses."""

import csv
import enum
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

from .geom import Segment, intersects
from .world import BaseStation, Link, PathLossModel, StationKind, link_feasible


class HandoffReason(enum.Enum):
    TRAJECTORY_RISK = "trajectory_risk"


@dataclass(frozen=True)
class HandoffDecision:
    ue: int
    from_bs: int
    to: int
    reason: HandoffReason = HandoffReason.TRAJECTORY_RISK

    def __post_init__(self):
        if self.to == self.from_bs:
            raise ValueError("handoff target equals the source station")


def crossed(seg: Segment, trajectories) -> bool:
    return any(intersects(c.line, seg) for c in trajectories)


def at_risk(active: Sequence[Link], trajectories) -> List[Link]:
    return [a for a in active if crossed(a.seg, trajectories)]


def propose_handoffs(active: Sequence[Link], trajectories, stations: Sequence[BaseStation],
                     pl: Optional[PathLossModel] = None,
                     zeta: Optional[Callable[[int, int], float]] = None,
                     check_feasibility: bool = True) -> List[HandoffDecision]:
    """One decision per at-risk link.

    mmWave stations are scanned in ascending id order; the first one whose
    segment to the UE is crossed by no trajectory (and, with
    ``check_feasibility``, is within path-loss range) is the target.
    Otherwise the UE goes to the LTE station.
    """
    lte = [s for s in stations if s.kind is StationKind.LTE]
    if len(lte) != 1:
        raise ValueError(f"need exactly one LTE station, found {len(lte)}")
    lte = lte[0]
    mmwave = sorted((s for s in stations if s.kind is StationKind.MMWAVE), key=lambda s: s.id)
    if check_feasibility and pl is None:
        raise ValueError("feasibility check needs a path-loss model")
    zeta = zeta or (lambda u, b: 0.0)
    decisions = []
    for link in at_risk(active, trajectories):
        ue_pos = link.seg.a
        target = lte.id
        for bs in mmwave:
            if bs.id == link.bs:
                continue
            seg = Segment(ue_pos, bs.pos)
            if seg.length == 0.0 or crossed(seg, trajectories):
                continue
            if check_feasibility and not link_feasible(pl, seg, zeta(link.ue, bs.id)):
                continue
            target = bs.id
            break
        decisions.append(HandoffDecision(link.ue, link.bs, target))
    return decisions


def write_decisions_csv(decisions, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["ue_id", "from_bs", "to", "reason"])
        for d in decisions:
            wr.writerow([d.ue, d.from_bs, d.to, d.reason.value])
