import pytest

from aperiodica.discrepancy import (
    deviant_implies_van_hove,
    discrepancy_report,
    exceeds,
    inscribed_radii_increasing,
    is_c_deviant,
    largest_inscribed_ball,
    van_hove_check,
)
from aperiodica.errors import InvalidParameterError
from aperiodica.geometry import Region, centered_boxes, centered_intervals, dyadic_family, fibonacci_windows
from aperiodica.pointsets import build_source
from aperiodica.scalar import PHI, QuadNum

Z = build_source("latticeZ")
EXAMPLE_L = build_source("exampleL")
FIB = build_source("fib")


def test_discrepancy_report():
    rep = discrepancy_report(Z, 1, Region.interval(0, 10))
    assert rep.count == 11
    assert rep.expected == 10
    assert rep.tube1 == 4
    assert rep.discrepancy == 1
    assert rep.ratio == QuadNum(1) / 4
    assert rep.sign == 1
    assert rep.exact

    aligned = discrepancy_report(Z, 1, Region.interval("1/2", "21/2"))
    assert aligned.count == 10
    assert aligned.ratio == 0
    assert aligned.sign == 0

    q10 = discrepancy_report(EXAMPLE_L, 1, Region.interval(0, 1025))
    assert q10.count == 1026 + 11
    assert q10.discrepancy == 12
    assert q10.ratio == 3

    below = discrepancy_report(Z, 2, Region.interval(0, 10))
    assert below.discrepancy == -9
    assert below.sign == -1
    assert below.ratio == QuadNum(9) / 4

    with pytest.raises(InvalidParameterError):
        discrepancy_report(Z, 0, Region.interval(0, 10))
    with pytest.raises(InvalidParameterError):
        discrepancy_report(Z, -1, Region.interval(0, 10))


def test_discrepancy_is_periodic_for_lattices():
    E = Region.intervals(("1/3", PHI), (5, "37/4"))
    base = discrepancy_report(Z, 1, E)
    for period in (1, 7, -12):
        shifted = discrepancy_report(Z, 1, E.translate(period))
        assert shifted.count == base.count
        assert shifted.discrepancy == base.discrepancy
        assert shifted.ratio == base.ratio


def test_exact_density_for_cut_and_project():
    rep = discrepancy_report(FIB, FIB.density_value, Region.interval(0, 100))
    assert rep.exact
    assert rep.count == FIB.count_in(Region.interval(0, 100))
    assert rep.expected == FIB.density_value * 100
    assert abs(float(rep.discrepancy)) < 3


def test_is_c_deviant():
    quarter = discrepancy_report(Z, 1, Region.interval(0, 10))
    q10 = discrepancy_report(EXAMPLE_L, 1, Region.interval(0, 1025))
    assert not is_c_deviant(quarter, 1)
    assert is_c_deviant(q10, 2)
    assert not is_c_deviant(q10, 3)
    assert is_c_deviant(quarter, 0)
    assert exceeds(0.5, "1/4")
    assert not exceeds(QuadNum(1) / 4, "1/4")


def test_van_hove_check():
    centered = van_hove_check(centered_intervals(300), [1])
    assert centered.passed
    assert centered.ratios[0][9] == pytest.approx(2 / 10)
    assert centered.failing_index is None

    with_tail = [Region.intervals((0, i), (2 * i, 2 * i + 1)) for i in range(10, 1001, 10)]
    assert van_hove_check(with_tail, [1]).passed

    constant = van_hove_check([Region.interval(i, i + 1) for i in range(1, 30)], [1])
    assert not constant.passed
    assert constant.ratios[0][-1] == 3
    assert constant.failing_eps == 1
    assert constant.failing_index == 28

    several = van_hove_check(centered_intervals(300), ["1/2", 1, 2])
    assert len(several.ratios) == 3
    assert not several.passed
    assert several.failing_eps == 2

    assert van_hove_check(fibonacci_windows(16), [1]).passed
    # unit tube of [-i,i]^2 over its area: (16 i + pi - 4) / (4 i^2), below 1e-2 once i > 400
    assert van_hove_check(centered_boxes(500), [1]).passed
    assert not van_hove_check(centered_boxes(300), [1]).passed
    relative = van_hove_check(dyadic_family(8), [1], threshold=0.1, relative=True)
    assert relative.passed
    assert relative.relative

    with pytest.raises(InvalidParameterError):
        van_hove_check([], [1])


def test_deviant_implies_van_hove():
    reports = [discrepancy_report(EXAMPLE_L, 1, Q) for Q in dyadic_family(12)]
    diagnostics = deviant_implies_van_hove(reports, [QuadNum(i) / 4 for i in range(1, 13)])
    assert diagnostics.passed

    quarter = discrepancy_report(Z, 1, Region.interval(0, 10))
    with pytest.raises(InvalidParameterError):
        deviant_implies_van_hove([quarter, quarter], [0, 1])
    with pytest.raises(InvalidParameterError):
        deviant_implies_van_hove(reports[:2], [0, 0])
    with pytest.raises(InvalidParameterError):
        deviant_implies_van_hove(reports[:2], [0])


def test_largest_inscribed_ball():
    ball = largest_inscribed_ball(Region.intervals((0, 2), (5, 11)))
    assert ball.center == (QuadNum(8),)
    assert ball.radius == 3

    box = largest_inscribed_ball(Region.box([0, 0], [4, 2]))
    assert box.center == (QuadNum(2), QuadNum(1))
    assert box.radius == 1

    tie = largest_inscribed_ball(Region.intervals((4, 6), (0, 2)))
    assert tie.center == (QuadNum(1),)

    assert [largest_inscribed_ball(E).radius for E in centered_intervals(3)] == [1, 2, 3]
    assert inscribed_radii_increasing(centered_intervals(10))
    assert not inscribed_radii_increasing([Region.interval(0, 4), Region.interval(10, 14)])
