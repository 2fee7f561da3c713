import random
from fractions import Fraction as F

import pytest

from rendezsim import LabelSpace, Point, Scenario, run_scenario
from rendezsim.kernel import (
    ABSENT,
    AgentProtocolError,
    HaltForever,
    Move,
    OpaqueOrderedLevel,
    Present,
)
from rendezsim.labels import first_differing_index, transform
from rendezsim.monotone import MonotoneProgram
from rendezsim.sweep import check_monotone_run


def present(dist_sq):
    return Present(OpaqueOrderedLevel(F(dist_sq)))


def drive(program, dist_sqs):
    """Feed a sequence of squared distances, collect the actions."""
    actions = []
    for value in dist_sqs:
        actions.append(program.on_reading(present(value)))
    return actions


# -- program-level behavior -----------------------------------------------------


def test_absent_first_reading_halts_forever():
    program = MonotoneProgram(3, LabelSpace(8))
    action = program.on_reading(ABSENT)
    assert isinstance(action, HaltForever)
    assert program.phase == "inert_forever"
    with pytest.raises(AgentProtocolError):
        program.on_reading(ABSENT)  # no readings after the terminal action


def test_present_first_reading_probes_north():
    program = MonotoneProgram(3, LabelSpace(8))
    action = program.on_reading(present(100))
    assert action == Move("N", F(1))
    assert program.phase == "vertical_approach"


def test_absent_after_present_is_a_violation():
    program = MonotoneProgram(3, LabelSpace(8))
    program.on_reading(present(100))
    with pytest.raises(AgentProtocolError):
        program.on_reading(ABSENT)


def test_inert_partner_half_north_exact_sequence():
    # partner inert, exactly 1/2 North on the same column: the two probe
    # moves both leave the distance unchanged-then-larger, the agent goes
    # back and finishes the vertical phase after two half steps at vertical
    # distance exactly 1/2
    program = MonotoneProgram(5, LabelSpace(8))
    first = program.on_reading(present(F(1, 4)))  # appearance, dist 1/2
    assert first == Move("N", F(1))
    actions = drive(
        program,
        [
            F(1, 4),  # after N1: swapped sides, distance unchanged
            F(9, 4),  # after second N1: distance grew
            F(1, 4),  # after S1 back: distance shrank back
            0,  # after S 1/2: level with the partner
            F(1, 4),  # after second S 1/2: overshoot, distance grew
        ],
    )
    assert actions == [
        Move("N", F(1)),
        Move("S", F(1)),
        Move("S", F(1, 2)),
        Move("S", F(1, 2)),
        Move("E", F(1)),  # horizontal phase begins
    ]
    assert program.sim is False


def test_away_then_back_walks_south():
    # partner far South: the North probe increases the distance; the agent
    # must come back and actually walk South
    program = MonotoneProgram(1, LabelSpace(4))
    program.on_reading(present(100))  # appearance, dist 10
    act1 = program.on_reading(present(121))  # after N1: farther (11)
    assert act1 == Move("S", F(1))
    act2 = program.on_reading(present(100))  # back to 10
    assert act2 == Move("S", F(1, 2))  # the walk must start
    act3 = program.on_reading(present(F(361, 4)))  # 9.5: still closing
    assert act3 == Move("S", F(1, 2))


def test_simultaneous_dance_backtrack_branch():
    # both probes leave the distance unchanged -> simultaneous; first
    # differing bit j: "smaller" exit makes the 1-bit agent backtrack South
    # then approach North in quarter steps
    program = MonotoneProgram(1, LabelSpace(2))  # single bit, c_1 = 1
    program.on_reading(present(100))
    actions = [
        program.on_reading(present(100)),  # after N1: unchanged
        program.on_reading(present(100)),  # after N1: unchanged -> dance
    ]
    assert actions == [Move("N", F(1)), Move("N", F(1, 2))]
    assert program.phase == "dance"
    # dance bit 1 (c_1 = 1, move N 1/2): distance shrank -> smaller exit
    act = program.on_reading(present(81))
    assert act == Move("S", F(1, 2))  # backtrack by 1/2^j, j = 1
    assert program.j == 1 and program.sim is True
    # the backtrack reading is discarded; the approach starts immediately
    act = program.on_reading(present(100))
    assert act == Move("N", F(1, 4))


def test_simultaneous_dance_larger_branch_approaches():
    # "larger" exit: no backtrack, and the 1-bit agent must walk South
    program = MonotoneProgram(1, LabelSpace(2))
    program.on_reading(present(100))
    program.on_reading(present(100))
    program.on_reading(present(100))
    act = program.on_reading(present(121))  # dance move grew the distance
    assert act == Move("S", F(1, 4))  # approach runs despite the grow
    act = program.on_reading(present(100))  # closing now
    assert act == Move("S", F(1, 4))


def test_dance_runs_out_of_bits_is_a_violation():
    # equal labels cannot occur in a valid scenario; the program refuses to
    # dance past the label width
    program = MonotoneProgram(1, LabelSpace(2))
    program.on_reading(present(100))
    program.on_reading(present(100))
    program.on_reading(present(100))
    program.on_reading(present(100))  # bit 1, attempt 1: unchanged
    with pytest.raises(AgentProtocolError):
        program.on_reading(present(100))  # attempt 2 unchanged: no bits left


# -- run-level behavior ----------------------------------------------------------


def monotone_scenario(label_a, label_b, pos_a, pos_b, size=8, start_a=0, start_b=0):
    return Scenario(
        model="monotone",
        space=LabelSpace(size),
        label_a=label_a,
        label_b=label_b,
        pos_a=Point(F(pos_a[0]), F(pos_a[1])),
        pos_b=Point(F(pos_b[0]), F(pos_b[1])),
        start_a=F(start_a),
        start_b=F(start_b),
    )


def test_staggered_partner_north():
    # inert partner 10 North, 3/10 East of the later agent
    sc = Scenario(
        model="monotone",
        space=LabelSpace(8),
        label_a=2,
        label_b=5,
        pos_a=Point(F(0), F(0)),
        pos_b=Point(F(3, 10), F(10)),
        start_a=F(4),
        start_b=F(0),
    )
    report, _ = run_scenario(sc, record_trace=False)
    assert report.met
    assert check_monotone_run(report) == []
    assert report.meeting_within(sc.sep_vertical + sc.sep_horizontal + 8)
    # agent b halted immediately; agent a did all the moving
    assert report.agents["b"].final_phase == "inert_forever"
    assert report.agents["a"].final_phase in ("vertical_approach", "horizontal_approach")


def test_simultaneous_trap_pair_meets():
    # labels differing in exactly one bit j, vertical separation 2^-j, the
    # 1-bit agent South: a single dance attempt swaps them unnoticed; the
    # repeat breaks the tie and the run must still meet
    size = 16  # width 4
    label_zero_bit, label_one_bit = 4, 6  # 0100 vs 0110, differ at bit 3
    j = first_differing_index(
        transform(label_zero_bit, LabelSpace(size)), transform(label_one_bit, LabelSpace(size))
    )
    assert j == 3
    sc = Scenario(
        model="monotone",
        space=LabelSpace(size),
        label_a=label_one_bit,  # the 1-bit agent ...
        label_b=label_zero_bit,
        pos_a=Point(F(0), F(0)),  # ... sits South
        pos_b=Point(F(3), F(1, 2**j)),
    )
    report, _ = run_scenario(sc, record_trace=False)
    assert report.met
    assert check_monotone_run(report) == []
    assert report.meeting_within(sc.sep_vertical + sc.sep_horizontal + 5, strict=True)
    assert report.agents["a"].j == j
    assert report.agents["b"].j == j


def test_dance_exits_by_first_differing_bit_all_pairs():
    # for every label pair in a 64-label space, at a few offsets: the dance
    # never runs past the first differing bit of the transformed labels
    size = 64
    space = LabelSpace(size)
    rng = random.Random(90125)
    for label_a in range(size):
        label_b = (label_a * 7 + 13) % size  # deterministic partner spread
        if label_a == label_b:
            continue
        j = first_differing_index(transform(label_a, space), transform(label_b, space))
        sep_v = F(rng.randrange(0, 5 * 16), 16)
        sep_h = F(rng.randrange(1, 8 * 16), 16)
        if sep_v * sep_v + sep_h * sep_h <= 1:
            sep_h += 2
        sc = Scenario(
            model="monotone",
            space=space,
            label_a=label_a,
            label_b=label_b,
            pos_a=Point(F(0), F(0)),
            pos_b=Point(sep_h, sep_v),
        )
        report, _ = run_scenario(sc, record_trace=False)
        assert report.met, (label_a, label_b)
        assert check_monotone_run(report) == [], (label_a, label_b)
        for summary in report.agents.values():
            if summary.j is not None:
                assert summary.j <= j, (label_a, label_b, summary.j, j)


def test_all_pairs_small_space_meet_within_bound():
    # exhaustive pairs over a 8-label space, simultaneous, one geometry
    size = 8
    for label_a in range(size):
        for label_b in range(size):
            if label_a == label_b:
                continue
            sc = monotone_scenario(label_a, label_b, (0, 0), (F(5, 2), F(7, 4)), size=size)
            report, _ = run_scenario(sc, record_trace=False)
            assert report.met, (label_a, label_b)
            assert check_monotone_run(report) == [], (label_a, label_b)
