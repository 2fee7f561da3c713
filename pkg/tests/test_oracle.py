from fractions import Fraction as F

import pytest

from rendezsim import LabelSpace, Point, Scenario, run_scenario
from rendezsim.oracle import OracleConfig, oracle_run

DT = F(1, 1024)


def dual_run(scenario, dt=DT):
    report, _ = run_scenario(scenario, record_trace=False)
    result = oracle_run(OracleConfig(scenario=scenario, dt=dt))
    return report, result


def test_static_pair_at_touch_distance():
    # start distance exactly 1: both engines report the meeting at the
    # later appearance itself
    sc = Scenario(model="monotone", space=LabelSpace(4), label_a=1, label_b=2,
                  pos_a=Point(F(0), F(0)), pos_b=Point(F(1), F(0)),
                  start_a=F(0), start_b=F(2))
    report, result = dual_run(sc)
    assert report.met and result.met
    assert report.touch.exact == 2
    assert result.hit_time == 2


def test_linear_close_touch_detected_next_sample():
    # the later agent walks straight down its partner's column; the touch
    # lands exactly on the sampling grid
    sc = Scenario(model="monotone", space=LabelSpace(4), label_a=1, label_b=2,
                  pos_a=Point(F(0), F(13)), pos_b=Point(F(0), F(0)),
                  start_a=F(2), start_b=F(0))
    report, result = dual_run(sc)
    assert report.met and result.met
    # 2 (start) + 1 (probe North, away) + 1 (undo) + 12 (walk 13 -> 1)
    assert report.touch.exact == 16
    assert result.hit_time == 16


def test_irrational_touch_sampled_late_within_dt():
    sc = Scenario(model="monotone", space=LabelSpace(8), label_a=2, label_b=5,
                  pos_a=Point(F(0), F(0)), pos_b=Point(F(5), F(9)),
                  start_a=F(0), start_b=F(2))
    report, result = dual_run(sc)
    assert report.met and result.met
    assert report.touch.exact is None
    # t* <= hit <= t* + dt, decided exactly
    assert report.touch.compare_to(result.hit_time) <= 0
    assert report.touch.compare_to(result.hit_time - DT) >= 0


def test_halving_dt_halves_the_lateness_bound():
    sc = Scenario(model="monotone", space=LabelSpace(8), label_a=2, label_b=5,
                  pos_a=Point(F(0), F(0)), pos_b=Point(F(5), F(9)),
                  start_a=F(0), start_b=F(2))
    report, _ = run_scenario(sc, record_trace=False)
    for dt in (DT, DT / 2, DT / 4):
        result = oracle_run(OracleConfig(scenario=sc, dt=dt))
        assert result.met
        assert report.touch.compare_to(result.hit_time) <= 0
        assert report.touch.compare_to(result.hit_time - dt) >= 0


def test_not_met_agrees():
    sc = Scenario(model="binary", space=LabelSpace(4), label_a=1, label_b=2,
                  pos_a=Point(F(0), F(0)), pos_b=Point(F(9), F(0)), rho=F(4))
    report, result = dual_run(sc)
    assert not report.met and not result.met
    assert result.end_reason == "both_halted"


def test_binary_agreement():
    sc = Scenario(model="binary", space=LabelSpace(4), label_a=1, label_b=2,
                  pos_a=Point(F(0), F(0)), pos_b=Point(F(0), F(3)), rho=F(8))
    report, result = dual_run(sc)
    assert report.met and result.met
    assert report.touch.compare_to(result.hit_time) <= 0
    assert report.touch.compare_to(result.hit_time - DT) >= 0


def test_positions_kept_when_asked():
    sc = Scenario(model="monotone", space=LabelSpace(4), label_a=1, label_b=2,
                  pos_a=Point(F(0), F(0)), pos_b=Point(F(0), F(4)),
                  start_a=F(1), start_b=F(0))
    result = oracle_run(OracleConfig(scenario=sc, dt=F(1, 8), keep_positions=True))
    assert result.met
    assert result.positions
    times = [t for t, _pa, _pb in result.positions]
    assert times == sorted(times)
    # the sampled trajectory is exact: replay one point against kinematics
    t, pa, pb = result.positions[-1]
    assert (pa.x - pb.x) ** 2 + (pa.y - pb.y) ** 2 <= 1


def test_oracle_rejects_bad_dt():
    sc = Scenario(model="monotone", space=LabelSpace(4), label_a=1, label_b=2,
                  pos_a=Point(F(0), F(0)), pos_b=Point(F(0), F(4)))
    with pytest.raises(ValueError):
        OracleConfig(scenario=sc, dt=F(0))
