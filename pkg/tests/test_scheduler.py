import pytest

from minplus import (
    CENTRAL,
    DISTRIBUTED,
    ROUND_ROBIN,
    SYNCHRONOUS,
    ContractViolation,
    DaemonPolicy,
    FairnessViolation,
    Oscillator,
    ProcState,
    RandomWrites,
    Silent,
    StopCriterion,
    Topology,
    enabled_set,
    make_fault_model,
    quiescent,
    read_trace,
    replay,
    run,
    step_budget,
    trace_text,
    verify_replay,
    write_trace,
)
from minplus.scheduler import RANDOM, parse_trace

from _oracles import floyd_warshall, is_parent_spanning_tree

ALL_FAIR = [
    DaemonPolicy(CENTRAL, ROUND_ROBIN),
    DaemonPolicy(CENTRAL, RANDOM),
    DaemonPolicy(DISTRIBUTED, ROUND_ROBIN),
    DaemonPolicy(DISTRIBUTED, RANDOM),
    DaemonPolicy(SYNCHRONOUS, ROUND_ROBIN),
]


def path_case(n, byz=()):
    topo = Topology.from_edges(n, 0, [(i, i + 1) for i in range(n - 1)])
    return topo, make_fault_model(topo, byz)


def corrupted(topo, fm):
    n = topo.process_count
    return tuple(
        ProcState(None, 0)
        if v == topo.root or v in fm.byzantine
        else ProcState(topo.neighbors[v][0], n)
        for v in topo.processes()
    )


def quiesce_stop(topo):
    return StopCriterion(max_steps=step_budget(topo), quiescent=True)


class TestEnabledSet:
    def test_settled_tree_has_nothing_enabled(self):
        topo, fm = path_case(5)
        cfg = tuple(
            ProcState(None, 0) if v == 0 else ProcState(v - 1, v)
            for v in range(5)
        )
        assert enabled_set(topo, fm, cfg) == frozenset()

    def test_two_sided_line_quiet_with_byzantine_frozen(self):
        topo, fm = path_case(6, byz=[5])
        cfg = tuple(
            ProcState(p, l)
            for p, l in [(None, 0), (0, 1), (1, 2), (4, 2), (5, 1), (None, 0)]
        )
        assert enabled_set(topo, fm, cfg) == frozenset()

    def test_corrupted_start_has_work(self):
        topo, fm = path_case(6, byz=[5])
        assert enabled_set(topo, fm, corrupted(topo, fm))

    def test_byzantine_never_in_enabled_set(self):
        topo, fm = path_case(4, byz=[3])
        cfg = (ProcState(None, 0), ProcState(0, 1), ProcState(1, 2), ProcState(None, 9))
        assert 3 not in enabled_set(topo, fm, cfg)


class TestRun:
    @pytest.mark.parametrize("daemon", ALL_FAIR, ids=lambda d: f"{d.kind}-{d.fairness}")
    def test_fault_free_path_reaches_the_bfs_fixpoint(self, daemon):
        topo, fm = path_case(5)
        ex = run(topo, fm, corrupted(topo, fm), daemon, Silent(), quiesce_stop(topo), seed=3)
        assert quiescent(topo, fm, ex.final())
        dist = floyd_warshall(5, topo.edges)
        assert [s.level for s in ex.final()] == dist[0]
        assert is_parent_spanning_tree(
            5, topo.edges, 0, [s.prnt for s in ex.final()]
        )

    def test_quiescent_start_is_a_zero_step_execution(self):
        topo, fm = path_case(4)
        settled = tuple(
            ProcState(None, 0) if v == 0 else ProcState(v - 1, v) for v in range(4)
        )
        ex = run(topo, fm, settled, DaemonPolicy(), Silent(), quiesce_stop(topo))
        assert ex.step_count == 0

    def test_same_seed_same_bytes(self):
        topo, fm = path_case(7, byz=[6])
        stop = StopCriterion(max_steps=300)
        args = (topo, fm, corrupted(topo, fm), DaemonPolicy(DISTRIBUTED, RANDOM))
        a = run(*args, RandomWrites(9), stop, seed=42)
        b = run(*args, RandomWrites(9), stop, seed=42)
        assert trace_text(a) == trace_text(b)

    def test_different_seeds_usually_differ(self):
        topo, fm = path_case(7, byz=[6])
        stop = StopCriterion(max_steps=100)
        args = (topo, fm, corrupted(topo, fm), DaemonPolicy(DISTRIBUTED, RANDOM))
        a = run(*args, Silent(), stop, seed=1)
        b = run(*args, Silent(), stop, seed=2)
        assert trace_text(a) != trace_text(b)

    def test_oscillator_never_quiesces_and_hits_budget(self):
        topo, fm = path_case(4, byz=[3])
        ex = run(
            topo,
            fm,
            corrupted(topo, fm),
            DaemonPolicy(DISTRIBUTED, RANDOM),
            Oscillator(1),
            StopCriterion(max_steps=60, quiescent=True),
            seed=0,
        )
        assert ex.step_count == 60

    def test_predicate_stop_with_tail(self):
        topo, fm = path_case(5)
        hits = []

        def settled(cfg):
            ok = all(s.prnt is not None or v == 0 for v, s in enumerate(cfg))
            if ok:
                hits.append(True)
            return ok

        ex = run(
            topo,
            fm,
            corrupted(topo, fm),
            DaemonPolicy(SYNCHRONOUS, ROUND_ROBIN),
            Silent(),
            StopCriterion(max_steps=100, predicate=settled, extra_after=0),
        )
        assert ex.step_count < 100 and hits


class TestDaemonShapes:
    def test_central_moves_one_process_per_step(self):
        topo, fm = path_case(6, byz=[5])
        ex = run(
            topo,
            fm,
            corrupted(topo, fm),
            DaemonPolicy(CENTRAL, ROUND_ROBIN),
            Oscillator(1),
            StopCriterion(max_steps=120),
            seed=1,
        )
        for rec in ex.steps:
            assert len(rec.activated) + len(rec.byz_writes) == 1

    def test_synchronous_activates_exactly_the_enabled_set(self):
        topo, fm = path_case(6, byz=[5])
        ex = run(
            topo,
            fm,
            corrupted(topo, fm),
            DaemonPolicy(SYNCHRONOUS, ROUND_ROBIN),
            Oscillator(2),
            StopCriterion(max_steps=40),
            seed=1,
        )
        for i, rec in enumerate(ex.steps):
            assert rec.activated == enabled_set(topo, fm, ex.configs[i])

    def test_distributed_activates_enabled_subset(self):
        topo, fm = path_case(8, byz=[7])
        ex = run(
            topo,
            fm,
            corrupted(topo, fm),
            DaemonPolicy(DISTRIBUTED, RANDOM),
            Oscillator(1),
            StopCriterion(max_steps=200),
            seed=5,
        )
        for i, rec in enumerate(ex.steps):
            assert rec.activated <= enabled_set(topo, fm, ex.configs[i])


def max_starvation(ex, count_byz_only_steps: bool) -> int:
    """Longest run of configs where some process stays enabled, unactivated."""
    topo, fm = ex.topo, ex.fm
    worst = 0
    streak = {v: 0 for v in topo.processes() if fm.is_correct(v)}
    for i, rec in enumerate(ex.steps):
        pre_enabled = enabled_set(topo, fm, ex.configs[i])
        counted = count_byz_only_steps or rec.activated
        for v in streak:
            if v in rec.activated or v not in pre_enabled:
                streak[v] = 0
            elif counted:
                streak[v] += 1
                worst = max(worst, streak[v])
    return worst


class TestFairness:
    @pytest.mark.parametrize("daemon", ALL_FAIR, ids=lambda d: f"{d.kind}-{d.fairness}")
    def test_bounded_starvation_under_adversary(self, daemon):
        topo, fm = path_case(7, byz=[6])
        ex = run(
            topo,
            fm,
            corrupted(topo, fm),
            daemon,
            Oscillator(1),
            StopCriterion(max_steps=400),
            seed=11,
        )
        # Byzantine-only steps are not activation opportunities under the
        # central daemon; elsewhere the window is counted in raw steps.
        raw = daemon.kind != CENTRAL
        assert max_starvation(ex, count_byz_only_steps=raw) < topo.process_count

    def test_script_runs_the_given_sets(self):
        topo, fm = path_case(3)
        script = (frozenset({1}), frozenset({2}))
        ex = run(
            topo,
            fm,
            (ProcState(None, 0), ProcState(None, 5), ProcState(None, 5)),
            DaemonPolicy(DISTRIBUTED, "script", script=script),
            Silent(),
            StopCriterion(max_steps=10),
        )
        assert [sorted(r.activated) for r in ex.steps] == [[1], [2]]

    def test_script_cannot_activate_disabled_process(self):
        topo, fm = path_case(3)
        script = (frozenset({1}), frozenset({1}))
        with pytest.raises(ContractViolation):
            run(
                topo,
                fm,
                (ProcState(None, 0), ProcState(None, 5), ProcState(2, 9)),
                DaemonPolicy(DISTRIBUTED, "script", script=script),
                Silent(),
                StopCriterion(max_steps=10),
            )

    def test_starving_script_is_rejected_with_the_culprit(self):
        topo, fm = path_case(3)
        script = (frozenset({1}),) + (frozenset(),) * 5
        with pytest.raises(FairnessViolation) as info:
            run(
                topo,
                fm,
                (ProcState(None, 0), ProcState(None, 5), ProcState(None, 5)),
                DaemonPolicy(DISTRIBUTED, "script", script=script),
                Silent(),
                StopCriterion(max_steps=10),
            )
        assert info.value.process == 2
        assert info.value.window[1] >= info.value.window[0]


class TestReplayAndTraces:
    def make_run(self):
        topo, fm = path_case(6, byz=[5])
        return run(
            topo,
            fm,
            corrupted(topo, fm),
            DaemonPolicy(DISTRIBUTED, RANDOM),
            Oscillator(1),
            StopCriterion(max_steps=80),
            seed=7,
        )

    def test_fresh_execution_replays(self):
        ex = self.make_run()
        assert replay(ex)
        assert verify_replay(ex) is None

    def test_tampered_config_reports_first_divergence(self):
        ex = self.make_run()
        k = 20
        states = list(ex.configs[k])
        states[1] = ProcState(states[1].prnt, states[1].level + 1)
        ex.configs[k] = tuple(states)
        assert verify_replay(ex) in (k, k + 1)
        assert not replay(ex)

    def test_trace_file_round_trip(self, tmp_path):
        ex = self.make_run()
        path = tmp_path / "run.trace"
        write_trace(ex, path)
        back = read_trace(path)
        assert trace_text(back) == trace_text(ex)
        assert verify_replay(back) is None
        assert back.configs == ex.configs

    def test_trace_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_trace("not a trace\n")


def test_step_budget_scales_with_size():
    topo, _ = path_case(5)
    assert step_budget(topo) == 50 * 5 * 4
    single = Topology.from_edges(1, 0, [])
    assert step_budget(single) == 50
