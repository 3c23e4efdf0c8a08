"""The min+1 spanning-tree protocol: guards, parent choice, and one step.

Every process owns two output variables: a parent pointer into its neighbor
list (or bottom, encoded as ``None``) and a nonnegative level.  The root
pins itself to ``(None, 0)``; every other process adopts a minimum-level
neighbor as parent, walking its neighbor list round-robin among the ties,
and sets its level to that minimum plus one.

All functions here are pure: a step reads every state from the pre-step
configuration and returns a fresh configuration, so simultaneous
activations of neighbors are well defined.  Levels are kept as unbounded
nonnegative integers because arbitrary initial states and Byzantine writes
may exceed any graph-derived bound.
"""

from __future__ import annotations

from pathlib import Path
from typing import NamedTuple

from .errors import ContractViolation
from .graph import FaultModel, Topology


class ProcState(NamedTuple):
    prnt: int | None
    level: int


Config = tuple[ProcState, ...]

BOTTOM = None


def is_enabled(topo: Topology, cfg: Config, v: int) -> bool:
    """Evaluate the guard of process v's rule in cfg.

    A parent pointer that does not name an actual neighbor (possible only
    from an arbitrary initial state or a Byzantine write) is treated like
    bottom, which makes the guard true.  The function evaluates the guard
    mechanically for any process; whether v is correct is the caller's
    concern.
    """
    prnt, level = cfg[v]
    if v == topo.root:
        return prnt is not None or level != 0
    nbrs = topo.neighbors[v]
    if prnt is None or prnt not in nbrs:
        return True
    lo = min(cfg[q].level for q in nbrs)
    return level != cfg[prnt].level + 1 or cfg[prnt].level != lo


def choose(topo: Topology, v: int, current_prnt: int | None, candidates) -> int:
    """Round-robin parent selection among minimum-level neighbors.

    Returns the first candidate strictly after ``current_prnt`` in v's fixed
    neighbor order, wrapping around to the order-smallest candidate when no
    candidate comes after.  Bottom (and any value that is not a neighbor)
    sorts below every neighbor, so it yields the order-smallest candidate.
    """
    order = topo.neighbors[v]
    cand = set(candidates)
    if not cand:
        raise ContractViolation(f"choose: empty candidate set for process {v}")
    if not cand <= set(order):
        raise ContractViolation(f"choose: candidates {cand} not all neighbors of {v}")
    ordered = [q for q in order if q in cand]
    if current_prnt in order:
        pos = order.index(current_prnt)
        for q in ordered:
            if order.index(q) > pos:
                return q
    return ordered[0]


def apply_rule(topo: Topology, cfg: Config, v: int) -> ProcState:
    """The state v writes when activated, evaluated against cfg.

    Raises ContractViolation when v's guard is false.
    """
    if not is_enabled(topo, cfg, v):
        raise ContractViolation(f"apply_rule: process {v} is not enabled")
    return _action(topo, cfg, v)


def _action(topo: Topology, cfg: Config, v: int) -> ProcState:
    # Guard already known to hold; used directly by the scheduler hot loop.
    if v == topo.root:
        return ProcState(None, 0)
    nbrs = topo.neighbors[v]
    lo = min(cfg[q].level for q in nbrs)
    candidates = [q for q in nbrs if cfg[q].level == lo]
    prnt = choose(topo, v, cfg[v].prnt, candidates)
    return ProcState(prnt, lo + 1)


def step(
    topo: Topology,
    fm: FaultModel,
    cfg: Config,
    activated,
    byz_writes: dict[int, ProcState] | None = None,
) -> Config:
    """Apply one simultaneous step.

    Every process in ``activated`` must be correct and enabled; it takes the
    result of its rule evaluated against cfg.  Every Byzantine process in
    ``byz_writes`` takes its written state verbatim (Byzantine behavior
    flows only through byz_writes).  All other processes are unchanged.
    """
    byz_writes = byz_writes or {}
    acts = frozenset(activated)
    bad = acts & fm.byzantine
    if bad:
        raise ContractViolation(f"cannot activate Byzantine processes {sorted(bad)}")
    for b in byz_writes:
        if b not in fm.byzantine:
            raise ContractViolation(f"Byzantine write targets correct process {b}")
    new = list(cfg)
    for v in acts:
        if not is_enabled(topo, cfg, v):
            raise ContractViolation(f"step: process {v} is not enabled")
        new[v] = _action(topo, cfg, v)
    for b, state in byz_writes.items():
        if state.level < 0:
            raise ContractViolation(f"negative level written to {b}")
        new[b] = ProcState(state.prnt, state.level)
    return tuple(new)


def normalize_config(topo: Topology, fm: FaultModel, cfg: Config) -> Config:
    """Reset corrupt parent pointers of correct processes to bottom.

    A correct process can only ever hold a neighbor or bottom once it acts;
    arbitrary initial memory naming anything else is unrepresentable in the
    protocol's state space, so it is normalized away at load time.
    Byzantine states are kept verbatim.
    """
    new = []
    for v, (prnt, level) in enumerate(cfg):
        if level < 0:
            raise ValueError(f"negative level for process {v}")
        if (
            fm.is_correct(v)
            and prnt is not None
            and prnt not in topo.neighbors[v]
        ):
            prnt = None
        new.append(ProcState(prnt, level))
    return tuple(new)


def changed_processes(before: Config, after: Config) -> frozenset[int]:
    """Processes whose output variables differ between two configurations."""
    return frozenset(v for v in range(len(before)) if before[v] != after[v])


# ---------------------------------------------------------------------------
# Configuration file format: one "id prnt level" line per process, with
# prnt = -1 encoding bottom.
# ---------------------------------------------------------------------------


def config_text(cfg: Config) -> str:
    lines = []
    for v, (prnt, level) in enumerate(cfg):
        p = -1 if prnt is None else prnt
        lines.append(f"{v} {p} {level}")
    return "\n".join(lines) + "\n"


def parse_config(text: str, n: int) -> Config:
    states: dict[int, ProcState] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"malformed configuration line: {raw!r}")
        v, p, level = int(parts[0]), int(parts[1]), int(parts[2])
        if v in states:
            raise ValueError(f"duplicate state for process {v}")
        if level < 0:
            raise ValueError(f"negative level for process {v}")
        states[v] = ProcState(None if p < 0 else p, level)
    if sorted(states) != list(range(n)):
        raise ValueError(f"expected exactly one state for each of {n} processes")
    return tuple(states[v] for v in range(n))


def read_config(path, topo: Topology, fm: FaultModel) -> Config:
    cfg = parse_config(Path(path).read_text(encoding="utf-8"), topo.process_count)
    return normalize_config(topo, fm, cfg)


def write_config(cfg: Config, path) -> None:
    Path(path).write_text(config_text(cfg), encoding="utf-8")
