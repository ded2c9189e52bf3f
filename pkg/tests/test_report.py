import math

from pilipovic.lognum import LogReal
from pilipovic.report import CheckReport, reports_to_csv


def test_from_sides_pass_rule():
    rep = CheckReport.from_sides(LogReal(1, 1.0), LogReal(1, 2.0), params={"N": 7})
    assert rep.passed
    assert rep.ratio_log == -1.0
    assert rep.params["tolerance_factor"] == 1.0 + 1e-6

    rep = CheckReport.from_sides(LogReal(1, 2.0), LogReal(1, 1.0))
    assert not rep.passed


def test_zero_lhs_always_passes():
    rep = CheckReport.from_sides(LogReal.zero(), LogReal(1, -50.0))
    assert rep.passed
    assert rep.ratio_log == -math.inf


def test_csv_format():
    reps = [
        CheckReport.from_sides(LogReal(1, 1.0), LogReal(1, 2.0), params={"N": 5}),
        CheckReport.from_sides(LogReal(1, 3.0), LogReal(1, 2.0), params={"N": 10}),
    ]
    text = reports_to_csv(reps)
    lines = text.splitlines()
    assert lines[0] == "N,lhs_log,rhs_log,ratio_log,pass"
    assert lines[1] == "5,1.0,2.0,-1.0,true"
    assert lines[2] == "10,3.0,2.0,1.0,false"
