"""Small-scope certification: every topology, placement, and start state.

Enumerates either every connected graph up to isomorphism with every root
placement (via the networkx graph catalog, which covers up to seven nodes),
or every labeled connected graph with root 0 (edge-set enumeration, only
sensible up to six nodes), then sweeps Byzantine placements, a panel of
initial configurations and adversaries, and asserts convergence, floor
closure, containment, and both disruption bounds on every run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .adversary import Adversary, Oscillator, Silent
from .analysis import (
    activation_counts,
    change_counts,
    compute_containment_areas,
    containment_violations,
    floor_closure_violations,
    measure,
    segment_disruptions,
)
from .graph import Topology, make_fault_model
from .scenarios import all_zero_config, corrupted_config, random_config
from .scheduler import (
    DISTRIBUTED,
    RANDOM,
    DaemonPolicy,
    StopCriterion,
    enabled_set,
    run,
    slice_execution,
    step_budget,
)

_ATLAS_MAX = 7


def connected_graph_catalog(n_max: int) -> list[tuple[int, list[tuple[int, int]]]]:
    """All connected graphs with 1..n_max nodes, one per isomorphism class."""
    if n_max > _ATLAS_MAX:
        raise ValueError(f"catalog covers up to {_ATLAS_MAX} nodes")
    import networkx as nx
    from networkx.generators.atlas import graph_atlas_g

    out = []
    for g in graph_atlas_g():
        n = g.number_of_nodes()
        if 1 <= n <= n_max and nx.is_connected(g):
            out.append((n, sorted((min(u, v), max(u, v)) for u, v in g.edges())))
    return out


def labeled_connected_graphs(n: int):
    """Every labeled connected graph on n nodes, by edge-set enumeration."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if _connected(n, edges):
            yield edges


def _connected(n: int, edges) -> bool:
    if n == 1:
        return True
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def enumerate_cases(n_max: int, f_max: int, labeled: bool = False):
    """Yield every (topology, fault model) the certification covers."""
    if labeled:
        graphs = [
            (n, edges, (0,))
            for n in range(1, n_max + 1)
            for edges in labeled_connected_graphs(n)
        ]
    else:
        graphs = [
            (n, edges, tuple(range(n)))
            for n, edges in connected_graph_catalog(n_max)
        ]
    for n, edges, roots in graphs:
        for root in roots:
            topo = Topology.from_edges(n, root, edges)
            others = [v for v in range(n) if v != root]
            for size in range(0, min(f_max, len(others)) + 1):
                for byz in combinations(others, size):
                    yield topo, make_fault_model(topo, byz)


@dataclass
class ExhaustiveReport:
    cases: int = 0
    runs: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _spanning_tree_ok(topo: Topology, cfg) -> bool:
    root = topo.root
    for v in topo.processes():
        if v == root:
            if cfg[v].prnt is not None or cfg[v].level != 0:
                return False
            continue
        prnt = cfg[v].prnt
        if prnt is None or prnt not in topo.neighbors[v]:
            return False
        if cfg[v].level != topo.hop_distance(v, root):
            return False
        if cfg[prnt].level != cfg[v].level - 1:
            return False
    return True


def run_exhaustive(
    n_max: int, f_max: int, labeled: bool = False, seed: int = 0
) -> ExhaustiveReport:
    """Run the full certification sweep and collect assertion failures."""
    report = ExhaustiveReport()
    daemon = DaemonPolicy(kind=DISTRIBUTED, fairness=RANDOM)
    for topo, fm in enumerate_cases(n_max, f_max, labeled):
        report.cases += 1
        label = (
            f"graph(n={topo.process_count}, edges={list(topo.edges)}, "
            f"root={topo.root}, byz={sorted(fm.byzantine)})"
        )
        rng = random.Random(seed * 1_000_003 + report.cases)
        inits = [
            ("zero", all_zero_config(topo)),
            ("corrupted", corrupted_config(topo, fm)),
            ("random", random_config(topo, rng)),
        ]
        adversaries: list[Adversary] = [Silent()]
        if fm.byzantine:
            adversaries.append(Oscillator(1))
        for init_name, init in inits:
            for adversary in adversaries:
                report.runs += 1
                where = f"{label} init={init_name} adversary={adversary.describe()} seed={seed}"
                ex = run(
                    topo,
                    fm,
                    init,
                    daemon,
                    adversary,
                    StopCriterion(max_steps=step_budget(topo), quiescent=True),
                    seed=seed,
                )
                report.failures.extend(
                    f"{where}: floor regressed at d={d}, config {i}"
                    for d, i in floor_closure_violations(ex)
                )
                if not fm.byzantine:
                    _check_fault_free(report, where, ex)
                else:
                    _check_faulty(report, where, ex)
    return report


def _check_fault_free(report: ExhaustiveReport, where: str, ex) -> None:
    topo, fm = ex.topo, ex.fm
    if enabled_set(topo, fm, ex.final()):
        report.failures.append(f"{where}: not quiescent within budget")
        return
    if not _spanning_tree_ok(topo, ex.final()):
        report.failures.append(
            f"{where}: final state is not the distance-exact spanning tree"
        )


def _check_faulty(report: ExhaustiveReport, where: str, ex) -> None:
    topo, fm = ex.topo, ex.fm
    areas = compute_containment_areas(topo, fm)
    metrics = measure(ex)
    if metrics.first_contained is None:
        report.failures.append(f"{where}: containment never reached")
        return
    for step_i, v in containment_violations(ex, metrics.first_contained, areas.near):
        report.failures.append(
            f"{where}: shielded process {v} changed at step {step_i}"
        )
    acts = activation_counts(ex, metrics.first_contained)
    for v in sorted(areas.frontier):
        if acts[v] > topo.degree(v):
            report.failures.append(
                f"{where}: frontier process {v} activated {acts[v]} times "
                f"(degree {topo.degree(v)})"
            )
    if metrics.first_strongly_contained is None:
        report.failures.append(f"{where}: strong containment never reached")
        return
    segments = segment_disruptions(
        slice_execution(ex, metrics.first_strongly_contained), areas.strictly_near
    )
    bound = 2 * topo.edge_count
    if len(segments) > bound:
        report.failures.append(
            f"{where}: {len(segments)} disruptions exceed bound {bound}"
        )
    changes = change_counts(ex, metrics.first_strongly_contained)
    for v in changes:
        if v not in areas.strictly_near and changes[v] > topo.max_degree:
            report.failures.append(
                f"{where}: process {v} changed {changes[v]} times "
                f"(bound {topo.max_degree})"
            )
