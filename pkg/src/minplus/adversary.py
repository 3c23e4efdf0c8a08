"""Byzantine write strategies.

A strategy is asked once per step what the Byzantine processes write, given
the trace so far.  Writes are arbitrary states (any level, any parent value
including non-neighbors); nothing downstream may assume Byzantine state
sanity.  Strategies are replayable: after ``reset`` they are a pure
function of the trace prefix, so the same run always produces the same
writes.
"""

from __future__ import annotations

import random
from pathlib import Path

from .errors import ContractViolation
from .graph import FaultModel, Topology
from .protocol import Config, ProcState, _action, is_enabled


class Adversary:
    """Base strategy: silent (never writes)."""

    name = "silent"

    def reset(self, topo: Topology, fm: FaultModel) -> None:
        pass

    def writes(
        self, topo: Topology, fm: FaultModel, configs: list[Config], step_index: int
    ) -> dict[int, ProcState]:
        return {}

    def done(self, topo: Topology, fm: FaultModel, cfg: Config) -> bool:
        """Whether the strategy has nothing further it wants to write."""
        return True

    def describe(self) -> str:
        return self.name


Silent = Adversary


class FakeRoot(Adversary):
    """Every Byzantine process impersonates a root, holding (bottom, 0)."""

    name = "fake_root"

    def writes(self, topo, fm, configs, step_index):
        cfg = configs[-1]
        target = ProcState(None, 0)
        return {b: target for b in sorted(fm.byzantine) if cfg[b] != target}

    def done(self, topo, fm, cfg):
        return all(cfg[b] == ProcState(None, 0) for b in fm.byzantine)


class MirrorRoot(Adversary):
    """Every Byzantine process copies the root's action one step after it."""

    name = "mirror_root"

    def writes(self, topo, fm, configs, step_index):
        if len(configs) < 2:
            return {}
        r = topo.root
        if configs[-2][r] == configs[-1][r]:
            return {}
        target = configs[-1][r]
        return {b: target for b in sorted(fm.byzantine) if configs[-1][b] != target}

    def done(self, topo, fm, cfg):
        return True  # nothing pending unless the root just moved


class Oscillator(Adversary):
    """Alternate between a fake root state and a far-off level every period steps.

    The far-off level is pinned to 2*diameter+2 so it exceeds any level a
    correct process can hold once converged.
    """

    def __init__(self, period: int = 1):
        if period < 1:
            raise ValueError("period must be positive")
        self.period = period

    @property
    def name(self):
        return f"oscillator(period={self.period})"

    def writes(self, topo, fm, configs, step_index):
        cfg = configs[-1]
        low = ((step_index - 1) // self.period) % 2 == 0
        out = {}
        for b in sorted(fm.byzantine):
            if low:
                target = ProcState(None, 0)
            else:
                target = ProcState(topo.neighbors[b][0], 2 * topo.diameter + 2)
            if cfg[b] != target:
                out[b] = target
        return out

    def done(self, topo, fm, cfg):
        return False


class RandomWrites(Adversary):
    """Uniform level in [0, 2*diameter] and uniform parent in N_b + bottom."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = random.Random(seed)

    @property
    def name(self):
        return f"random(seed={self.seed})"

    def reset(self, topo, fm):
        self._rng = random.Random(self.seed)

    def writes(self, topo, fm, configs, step_index):
        out = {}
        for b in sorted(fm.byzantine):
            prnt = self._rng.choice([None] + list(topo.neighbors[b]))
            level = self._rng.randint(0, 2 * topo.diameter)
            out[b] = ProcState(prnt, level)
        return out

    def done(self, topo, fm, cfg):
        return False


class Scripted(Adversary):
    """Replay a fixed list of (step, process, state) writes."""

    def __init__(self, items):
        self.items = sorted(items, key=lambda it: (it[0], it[1]))
        self._by_step: dict[int, dict[int, ProcState]] = {}
        for step_idx, proc, state in self.items:
            self._by_step.setdefault(step_idx, {})[proc] = state
        self._last = max(self._by_step) if self._by_step else 0

    name = "scripted"

    def writes(self, topo, fm, configs, step_index):
        return dict(self._by_step.get(step_index, {}))

    def done(self, topo, fm, cfg):
        return True

    def pending_after(self, step_index: int) -> bool:
        return step_index < self._last


class WellBehaved(Adversary):
    """Byzantine processes follow the protocol as if they were correct non-roots."""

    name = "well_behaved"

    def writes(self, topo, fm, configs, step_index):
        cfg = configs[-1]
        return {
            b: _action(topo, cfg, b)
            for b in sorted(fm.byzantine)
            if is_enabled(topo, cfg, b)
        }

    def done(self, topo, fm, cfg):
        return not any(is_enabled(topo, cfg, b) for b in fm.byzantine)


def advise(
    strategy: Adversary,
    topo: Topology,
    fm: FaultModel,
    configs: list[Config],
    step_index: int,
) -> dict[int, ProcState]:
    """The Byzantine writes a strategy proposes for the upcoming step."""
    out = strategy.writes(topo, fm, configs, step_index)
    for b in out:
        if b not in fm.byzantine:
            raise ContractViolation(f"strategy targets correct process {b}")
    return out


def parse_script(text: str) -> list[tuple[int, int, ProcState]]:
    """Parse "step id prnt level" lines (prnt = -1 encodes bottom)."""
    items = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"malformed script line: {raw!r}")
        step_idx, proc, p, level = (int(tok) for tok in parts)
        if level < 0:
            raise ValueError(f"negative level in script line: {raw!r}")
        items.append((step_idx, proc, ProcState(None if p < 0 else p, level)))
    return items


def load_script(path) -> Scripted:
    return Scripted(parse_script(Path(path).read_text(encoding="utf-8")))


def make_adversary(descriptor: str) -> Adversary:
    """Build a strategy from a CLI-style descriptor like "oscillator:2"."""
    kind, _, arg = descriptor.partition(":")
    kind = kind.strip().lower()
    if kind == "silent":
        return Silent()
    if kind == "fake_root":
        return FakeRoot()
    if kind == "mirror_root":
        return MirrorRoot()
    if kind == "oscillator":
        return Oscillator(int(arg) if arg else 1)
    if kind == "random":
        return RandomWrites(int(arg) if arg else 0)
    if kind == "scripted":
        if not arg:
            raise ValueError("scripted adversary needs a file path")
        return load_script(arg)
    if kind == "well_behaved":
        return WellBehaved()
    raise ValueError(f"unknown adversary kind {kind!r}")
