"""Executable checkers for the protocol's containment guarantees.

Everything here is read-only analysis over immutable configurations and
traces: the per-process specification predicate, the inductive level floor,
area legitimacy and stability, containment membership, disruption
segmentation, activation accounting, and trace metrics.

The central objects are *areas*: sets of correct processes that a Byzantine
placement may disturb.  Checks are parameterized by an explicit area, so
radius-based notions fall out by instantiating them with
:func:`minplus.graph.radius_area` and the topology-aware notions with the
computed containment areas.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .errors import AnalysisError
from .graph import (
    ContainmentAreas,
    FaultModel,
    Topology,
    anchor_distance,
    compute_containment_areas,
)
from .protocol import Config, ProcState, _action, is_enabled
from .scheduler import Execution, slice_execution, step_budget


def spec_holds(topo: Topology, fm: FaultModel, cfg: Config, v: int) -> bool:
    """Per-process correctness: the root holds (bottom, 0); anyone else sits
    at the end of a tree path rooted at the real root or a Byzantine process,
    with levels increasing by one and every parent holding its child's
    neighborhood minimum.

    The parent chain is the only candidate path (the path condition pins
    each path member to be the previous member's parent), so the check walks
    the chain with a cycle guard instead of enumerating paths.
    """
    if v == topo.root:
        return cfg[v] == ProcState(None, 0)
    anchors = fm.byzantine | {topo.root}
    seen = set()
    cur = v
    while True:
        if cur in seen:
            return False
        seen.add(cur)
        prnt, level = cfg[cur]
        if prnt is None:
            return level == 0 and cur in anchors and cur != v
        nbrs = topo.neighbors[cur]
        if prnt not in nbrs:
            return False
        plevel = cfg[prnt].level
        if level != plevel + 1:
            return False
        if plevel != min(cfg[q].level for q in nbrs):
            return False
        cur = prnt


def level_floor_holds(topo: Topology, fm: FaultModel, cfg: Config, d: int) -> bool:
    """Every level is at least min(d, distance to the nearest of root and
    Byzantine set).  Closed under protocol steps for every d up to the
    diameter, whatever the Byzantine processes write."""
    if not 0 <= d <= topo.diameter:
        raise ValueError(f"d={d} outside 0..{topo.diameter}")
    for v in topo.processes():
        if cfg[v].level < min(d, anchor_distance(topo, fm, v)):
            return False
    return True


def _check_area(topo: Topology, fm: FaultModel, area) -> frozenset[int]:
    area = frozenset(area)
    for v in area:
        topo._check(v)
        if not fm.is_correct(v):
            raise ValueError(f"area contains Byzantine process {v}")
    return area


def _watch_set(topo: Topology, fm: FaultModel, area: frozenset[int]) -> list[int]:
    # The area-correct processes: correct and outside the area.
    return [v for v in topo.processes() if fm.is_correct(v) and v not in area]


def is_area_legitimate(topo: Topology, fm: FaultModel, cfg: Config, area) -> bool:
    """Every correct process outside the area satisfies the spec predicate."""
    area = _check_area(topo, fm, area)
    return all(spec_holds(topo, fm, cfg, v) for v in _watch_set(topo, fm, area))


def is_area_stable(
    topo: Topology,
    fm: FaultModel,
    cfg: Config,
    area,
    budget: int | None = None,
) -> bool | None:
    """Whether no correct process outside the area can ever change its
    output variables while the Byzantine processes stay silent.

    Operational check: no such process may be enabled in cfg, and running
    the protocol synchronously with Byzantine states frozen must quiesce
    without any of them changing state.  Returns None (indeterminate,
    distinct from False) if the step budget runs out first.
    """
    area = _check_area(topo, fm, area)
    watch = frozenset(_watch_set(topo, fm, area))
    if any(is_enabled(topo, cfg, v) for v in watch):
        return False
    if budget is None:
        budget = step_budget(topo)
    correct = [v for v in topo.processes() if fm.is_correct(v)]
    states = cfg
    rounds = 0
    while True:
        acting = [v for v in correct if is_enabled(topo, states, v)]
        if not acting:
            return True
        if rounds >= budget:
            return None
        new = list(states)
        for v in acting:
            new[v] = _action(topo, states, v)
            if v in watch and new[v] != states[v]:
                return False
        states = tuple(new)
        rounds += 1


def is_contained(
    topo: Topology,
    fm: FaultModel,
    cfg: Config,
    areas: ContainmentAreas | None = None,
) -> bool:
    """Membership in the strict-containment basin: legitimate outside the
    near area and the level floor holds at the diameter.  From such a
    configuration no correct process outside the near area ever acts again.
    """
    if areas is None:
        areas = compute_containment_areas(topo, fm)
    return level_floor_holds(topo, fm, cfg, topo.diameter) and is_area_legitimate(
        topo, fm, cfg, areas.near
    )


def is_strongly_contained(
    topo: Topology,
    fm: FaultModel,
    cfg: Config,
    areas: ContainmentAreas | None = None,
) -> bool:
    """Membership in the strong-containment basin: legitimate outside the
    strictly-near area (so the frontier is correct too) and the level floor
    holds at the diameter.  From here the disruption and per-process change
    bounds apply."""
    if areas is None:
        areas = compute_containment_areas(topo, fm)
    return level_floor_holds(topo, fm, cfg, topo.diameter) and is_area_legitimate(
        topo, fm, cfg, areas.strictly_near
    )


@dataclass(frozen=True)
class DisruptionSegment:
    """A maximal trace portion between two area-legitimate, area-stable
    configurations whose interior changes some process outside the area."""

    start_index: int
    end_index: int
    changed_processes: frozenset[int]


def segment_disruptions(
    ex: Execution, area, budget: int | None = None
) -> list[DisruptionSegment]:
    """Split a trace into its disruptions for a given area.

    A disruption starts at an area-legitimate, area-stable configuration,
    ends at the first later configuration with both properties again, and
    contains at least one output-variable change by a correct process
    outside the area.  Changes before the first such boundary, or after the
    last one, belong to no (completed) disruption.
    """
    topo, fm = ex.topo, ex.fm
    area = _check_area(topo, fm, area)
    watch = _watch_set(topo, fm, area)
    total = len(ex.steps)
    changes = []
    for i in range(1, total + 1):
        before, after = ex.configs[i - 1], ex.configs[i]
        if any(before[v] != after[v] for v in watch):
            changes.append(i)
    if not changes:
        return []

    memo: dict[int, bool] = {}

    def anchor(i: int) -> bool:
        if i in memo:
            return memo[i]
        cfg = ex.configs[i]
        ok = False
        if not any(is_enabled(topo, cfg, v) for v in watch):
            if is_area_legitimate(topo, fm, cfg, area):
                stable = is_area_stable(topo, fm, cfg, area, budget)
                if stable is None:
                    raise AnalysisError(
                        "area stability undecided at candidate boundary",
                        step_index=i,
                    )
                ok = stable
        memo[i] = ok
        return ok

    segments: list[DisruptionSegment] = []
    k = 0
    while k < len(changes):
        c = changes[k]
        start = next((j for j in range(c - 1, -1, -1) if anchor(j)), None)
        if start is None:
            k += 1
            continue
        end = next((j for j in range(c, total + 1) if anchor(j)), None)
        if end is None:
            break
        touched = set()
        for i in range(start + 1, end + 1):
            before, after = ex.configs[i - 1], ex.configs[i]
            touched.update(v for v in watch if before[v] != after[v])
        segments.append(DisruptionSegment(start, end, frozenset(touched)))
        while k < len(changes) and changes[k] <= end:
            k += 1
    return segments


def activation_counts(ex: Execution, from_index: int = 0) -> dict[int, int]:
    """Per-process activation counts over the steps after configuration
    ``from_index``."""
    counts = {v: 0 for v in ex.topo.processes() if ex.fm.is_correct(v)}
    for rec in ex.steps[from_index:]:
        for v in rec.activated:
            counts[v] += 1
    return counts


def change_counts(
    ex: Execution, from_index: int = 0, to_index: int | None = None
) -> dict[int, int]:
    """Per-process output-variable change counts in the steps after
    configuration ``from_index`` (up to ``to_index`` when given).

    An activation that rewrites identical values does not count as a change.
    """
    if to_index is None:
        to_index = len(ex.steps)
    counts = {v: 0 for v in ex.topo.processes() if ex.fm.is_correct(v)}
    for i in range(from_index + 1, to_index + 1):
        before, after = ex.configs[i - 1], ex.configs[i]
        for v in counts:
            if before[v] != after[v]:
                counts[v] += 1
    return counts


@dataclass(frozen=True)
class StabilizationMetrics:
    """Trace measurements against the containment guarantees.

    Disruptions and per-process changes are counted from the first
    strongly-contained configuration, which is where the bounds start to
    apply; ``actions_to_contain`` is the largest per-process change count
    spent getting there (measured, not bounded).
    """

    first_contained: int | None
    first_strongly_contained: int | None
    disruption_count: int | None
    changes_by_process: dict[int, int]
    max_settled_changes: int | None
    actions_to_contain: int | None

    @property
    def max_changes(self) -> int:
        return max(self.changes_by_process.values(), default=0)


def measure(ex: Execution) -> StabilizationMetrics:
    """Compute stabilization metrics for one execution."""
    topo, fm = ex.topo, ex.fm
    areas = compute_containment_areas(topo, fm)
    first_contained = next(
        (i for i, cfg in enumerate(ex.configs) if is_contained(topo, fm, cfg, areas)),
        None,
    )
    first_strong = None
    if first_contained is not None:
        first_strong = next(
            (
                i
                for i in range(first_contained, len(ex.configs))
                if is_strongly_contained(topo, fm, ex.configs[i], areas)
            ),
            None,
        )
    if first_strong is None:
        return StabilizationMetrics(
            first_contained=first_contained,
            first_strongly_contained=None,
            disruption_count=None,
            changes_by_process={},
            max_settled_changes=None,
            actions_to_contain=None,
        )
    segments = segment_disruptions(
        slice_execution(ex, first_strong), areas.strictly_near
    )
    changes = change_counts(ex, from_index=first_strong)
    pre = change_counts(ex, from_index=0, to_index=first_strong)
    settlers = [
        v
        for v in topo.processes()
        if fm.is_correct(v) and v not in areas.strictly_near
    ]
    return StabilizationMetrics(
        first_contained=first_contained,
        first_strongly_contained=first_strong,
        disruption_count=len(segments),
        changes_by_process=changes,
        max_settled_changes=max((changes[v] for v in settlers), default=0),
        actions_to_contain=max((pre[v] for v in settlers), default=0),
    )


def containment_violations(
    ex: Execution, from_index: int, area
) -> list[tuple[int, int]]:
    """(step, process) pairs where a correct process outside the area changed
    state after configuration ``from_index``."""
    watch = _watch_set(ex.topo, ex.fm, _check_area(ex.topo, ex.fm, area))
    out = []
    for i in range(from_index + 1, len(ex.configs)):
        before, after = ex.configs[i - 1], ex.configs[i]
        out.extend((i, v) for v in watch if before[v] != after[v])
    return out


def floor_closure_violations(ex: Execution) -> list[tuple[int, int]]:
    """(d, config index) pairs where the level floor at d held earlier in the
    trace but fails at that configuration."""
    topo, fm = ex.topo, ex.fm
    out = []
    for d in range(topo.diameter + 1):
        seen = False
        for i, cfg in enumerate(ex.configs):
            ok = level_floor_holds(topo, fm, cfg, d)
            if seen and not ok:
                out.append((d, i))
                break
            seen = seen or ok
    return out


# ---------------------------------------------------------------------------
# Exports: metrics CSV and Graphviz DOT.
# ---------------------------------------------------------------------------

METRICS_FIELDS = [
    "scenario",
    "seed",
    "n",
    "m",
    "byz",
    "first_contained",
    "first_strongly_contained",
    "disruptions",
    "max_changes",
    "error",
]


def metrics_row(
    scenario_id: str,
    seed: int,
    topo: Topology | None = None,
    fm: FaultModel | None = None,
    metrics: StabilizationMetrics | None = None,
    error: str = "",
) -> dict:
    def opt(value):
        return "" if value is None else value

    return {
        "scenario": scenario_id,
        "seed": seed,
        "n": topo.process_count if topo else "",
        "m": topo.edge_count if topo else "",
        "byz": fm.count if fm else "",
        "first_contained": opt(metrics.first_contained) if metrics else "",
        "first_strongly_contained": opt(metrics.first_strongly_contained)
        if metrics
        else "",
        "disruptions": opt(metrics.disruption_count) if metrics else "",
        "max_changes": opt(metrics.max_settled_changes) if metrics else "",
        "error": error,
    }


def metrics_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=METRICS_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_metrics_csv(rows, path) -> None:
    Path(path).write_text(metrics_csv(rows), encoding="utf-8", newline="\n")


def to_dot(
    topo: Topology,
    fm: FaultModel,
    cfg: Config,
    areas: ContainmentAreas | None = None,
) -> str:
    """Render the configuration's parent edges with role annotations."""
    if areas is None:
        areas = compute_containment_areas(topo, fm)
    lines = ["digraph parents {"]
    for v in topo.processes():
        attrs = [f'label="{v} (lvl {cfg[v].level})"']
        if v == topo.root:
            attrs.append("shape=doublecircle")
            attrs.append('role="root"')
        elif v in fm.byzantine:
            attrs.append("shape=box")
            attrs.append('role="byzantine"')
        elif v in areas.strictly_near:
            attrs.append('role="strictly_near"')
        elif v in areas.frontier:
            attrs.append('role="frontier"')
        else:
            attrs.append('role="outside"')
        lines.append(f"  n{v} [{', '.join(attrs)}];")
    for v in topo.processes():
        prnt = cfg[v].prnt
        if prnt is not None and prnt in topo.neighbors[v]:
            lines.append(f"  n{v} -> n{prnt};")
    lines.append("}")
    return "\n".join(lines) + "\n"
