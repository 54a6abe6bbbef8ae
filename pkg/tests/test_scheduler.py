import pytest

from stoch_imc.circuits import CircuitKind, build_binary_adder, build_circuit
from stoch_imc.netlist import Kind, NetlistError, lower_to_primitives, parse_netlist
from stoch_imc.scheduler import (
    INIT_CYCLES_PER_PI_COLUMN,
    CapacityError,
    SubarrayDims,
    UnschedulableError,
    dump_schedule,
    partition_circuit,
    replicate_netlist,
    schedule_and_map,
    validate_schedule,
)


def _circuit(kind, **kw):
    return lower_to_primitives(build_circuit(kind, **kw))


class TestLogicCycleCounts:
    @pytest.mark.parametrize(
        "kind,cycles",
        [
            (CircuitKind.MULT, 1),
            (CircuitKind.SCALED_ADD, 4),
            (CircuitKind.ABS_SUB, 5),
        ],
    )
    def test_combinational_circuits(self, kind, cycles):
        nl = _circuit(kind)
        sched = schedule_and_map(nl, q=1)
        assert sched.logic_cycles == cycles
        validate_schedule(nl, sched)

    @pytest.mark.parametrize("n,cycles", [(4, 9), (8, 17)])
    def test_binary_adder_is_two_n_minus_one_plus_three(self, n, cycles):
        nl = build_binary_adder(n)
        sched = schedule_and_map(nl)
        assert sched.logic_cycles == cycles == 2 * (n - 1) + 3
        validate_schedule(nl, sched)

    def test_feedback_cone_expands_with_q(self):
        nl = _circuit(CircuitKind.SCALED_DIV)
        assert schedule_and_map(nl, q=1).logic_cycles == 4
        sched = schedule_and_map(nl, q=8)
        # the 2-cycle feedback cone repeats once per stacked row
        assert sched.state_cone_cycles == 2
        assert sched.logic_cycles == 2 * 8 + 2
        validate_schedule(nl, sched)

    def test_init_cycles_scale_with_pi_columns(self):
        nl = _circuit(CircuitKind.MULT)  # two primary inputs, one column each
        sched = schedule_and_map(nl, q=1)
        assert sched.p == 2
        assert sched.init_cycles == 2 * INIT_CYCLES_PER_PI_COLUMN


class TestMappingRules:
    def test_single_gate_uses_three_columns(self):
        nl = _circuit(CircuitKind.MULT)
        sched = schedule_and_map(nl, q=1)
        cols = {pl.col for pl in sched.placements}
        assert cols == {1, 2, 3}

    def test_same_cycle_ops_share_kind_and_columns(self):
        nl = _circuit(CircuitKind.ABS_SUB)
        sched = schedule_and_map(nl, q=4)
        by_cycle = {}
        for op in sched.ops:
            by_cycle.setdefault(op.cycle, []).append(op)
        for ops in by_cycle.values():
            assert len({op.kind for op in ops}) == 1
            assert len({(op.in_cols, op.out_col) for op in ops}) == 1

    def test_no_shared_fanin_within_cycle(self):
        nl = _circuit(CircuitKind.SCALED_ADD)
        sched = schedule_and_map(nl, q=2)
        gate = {g.id: g for g in nl.gates}
        by_cycle = {}
        for op in sched.ops:
            for gid in op.gate_ids:
                by_cycle.setdefault(op.cycle, []).append(gid)
        for gids in by_cycle.values():
            seen = set()
            for gid in gids:
                for net in gate[gid].inputs:
                    assert net not in seen
                    seen.add(net)

    def test_capacity_error_reports_dims(self):
        nl = _circuit(CircuitKind.EXP, c=0.8)
        with pytest.raises(CapacityError) as err:
            schedule_and_map(nl, SubarrayDims(rows=4, cols=4), q=1)
        assert err.value.dims == SubarrayDims(rows=4, cols=4)

    def test_q_must_fit_rows(self):
        nl = _circuit(CircuitKind.MULT)
        with pytest.raises(CapacityError):
            schedule_and_map(nl, SubarrayDims(rows=8, cols=64), q=16)


class TestReplication:
    def test_three_instances_batch_to_one_cycle(self):
        base = _circuit(CircuitKind.MULT)
        nl, row_block, col_group = replicate_netlist(base, 3)
        sched = schedule_and_map(nl, q=4, pi_row_block=row_block,
                                 column_group=col_group, batch_copies=True)
        assert sched.logic_cycles == 1
        validate_schedule(nl, sched)

    def test_blocks_are_disjoint(self):
        base = _circuit(CircuitKind.MULT)
        nl, row_block, col_group = replicate_netlist(base, 3)
        sched = schedule_and_map(nl, q=4, pi_row_block=row_block,
                                 column_group=col_group)
        rows_of = {}
        for pl in sched.placements:
            inst = pl.net.split(":")[0]
            rows_of.setdefault(inst, set()).add((pl.row - 1) // 4)
        blocks = list(rows_of.values())
        assert all(len(b) == 1 for b in blocks)
        assert len(set.union(*blocks)) == 3

    def test_count_validation(self):
        with pytest.raises(NetlistError):
            replicate_netlist(_circuit(CircuitKind.MULT), 0)


class TestPartitioning:
    def test_whole_circuit_single_part(self):
        plan = partition_circuit(_circuit(CircuitKind.MULT), bitstream_length=256)
        assert len(plan.parts) == 1
        assert plan.q == 256
        assert plan.pass_count == 1

    def test_q_limited_by_rows(self):
        plan = partition_circuit(
            _circuit(CircuitKind.MULT), SubarrayDims(rows=4, cols=16),
            bitstream_length=256)
        assert plan.q == 4
        assert plan.pass_count == 64

    def test_q_override(self):
        plan = partition_circuit(_circuit(CircuitKind.MULT),
                                 bitstream_length=256, q_override=32)
        assert plan.q == 32
        assert plan.pass_count == 8

    def test_po_cone_split(self):
        # two independent products cannot share a 3-column subarray
        nl = parse_netlist(
            "PI a\nPI b\nPI c\nPI d\nPO x\nPO y\n"
            "1 AND a,b -> x\n2 AND c,d -> y\n")
        plan = partition_circuit(nl, SubarrayDims(rows=8, cols=3),
                                 bitstream_length=8)
        assert len(plan.parts) == 2
        assert sorted(p.pos for p, _ in plan.parts) == [["x"], ["y"]]

    def test_unsplittable_cone(self):
        nl = _circuit(CircuitKind.EXP, c=0.8)
        with pytest.raises(CapacityError):
            partition_circuit(nl, SubarrayDims(rows=4, cols=4))

    def test_too_narrow_subarray(self):
        with pytest.raises(UnschedulableError):
            partition_circuit(_circuit(CircuitKind.MULT), SubarrayDims(rows=8, cols=2))


class TestDump:
    def test_dump_lists_every_cycle(self):
        nl = _circuit(CircuitKind.SCALED_ADD)
        sched = schedule_and_map(nl, q=1)
        text = dump_schedule(nl, sched)
        for cycle in range(1, sched.logic_cycles + 1):
            assert f"cycle {cycle}:" in text

    def test_dump_mentions_kind_and_columns(self):
        nl = _circuit(CircuitKind.MULT)
        text = dump_schedule(nl, schedule_and_map(nl, q=1))
        assert "AND" in text
        assert "out-col=" in text
