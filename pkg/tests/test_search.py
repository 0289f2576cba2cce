from fractions import Fraction

import pytest

from aperiodica.discrepancy import discrepancy_report, exceeds
from aperiodica.errors import DimensionMismatchError, InvalidParameterError, NotFoundError, NotRepetitiveError
from aperiodica.geometry import Region
from aperiodica.pointsets import Lattice, build_source
from aperiodica.scalar import QuadNum
from aperiodica.search import (
    balancing_translates,
    derive_constants,
    find_deviant,
    find_opposite_translate,
    find_shift_robust_deviant,
    repetitivity_radius,
    scan_deviance,
    shift_bound_holds,
    verify_shifts,
)

Z = build_source("latticeZ")
EXAMPLE_L = build_source("exampleL")
FIB = build_source("fib")
HALF_FIB = build_source("halffib")


def test_derive_constants():
    line = derive_constants(Z)
    assert line.d == 1
    assert line.eta == line.eta_prime == QuadNum(Fraction(1, 2))
    assert line.q == 6

    assert derive_constants(EXAMPLE_L).q == 12

    plane = derive_constants(build_source("Z2"))
    assert plane.d == 2
    assert plane.eta == QuadNum(Fraction(1, 8))
    assert plane.eta_prime == QuadNum(Fraction(1, 3))
    assert plane.q == QuadNum(Fraction(40, 3))

    with pytest.raises(InvalidParameterError):
        derive_constants(Lattice(dimension=3))


def test_scan_deviance():
    flat = scan_deviance(Z, 1, Region.interval(0, 100))
    assert flat.best is None
    assert flat.sup_ratio == 0
    assert flat.evaluated == 100

    rich = scan_deviance(EXAMPLE_L, 1, Region.interval(0, 1100))
    assert rich.best is not None
    assert rich.best == rich.best_positive
    assert isinstance(rich.sup_ratio, QuadNum)
    assert rich.sup_ratio > QuadNum(5) / 2
    assert Region.interval(0, 1100).contains_region(rich.best.region)
    assert rich.best.region.measure() >= 8
    assert rich.best == discrepancy_report(EXAMPLE_L, 1, rich.best.region)

    truncated = scan_deviance(EXAMPLE_L, 1, Region.interval(0, 1100), budget=50)
    assert truncated.truncated
    assert truncated.evaluated == 50

    with pytest.raises(InvalidParameterError):
        scan_deviance(Z, 1, Region.interval(0, 100), min_length=1)
    with pytest.raises(DimensionMismatchError):
        scan_deviance(build_source("Z2"), 1, Region.box([0, 0], [5, 5]))


def test_find_deviant():
    found = find_deviant(EXAMPLE_L, 1, 3, Region.interval(0, 2**14))
    assert found is not None
    assert exceeds(found.c_achieved, 3)
    assert found.report.ratio == found.c_achieved
    assert found.sign == 1
    assert found.report == discrepancy_report(EXAMPLE_L, 1, found.region)

    first = find_deviant(EXAMPLE_L, 1, 3, Region.interval(0, 2**14), prefer="first")
    assert first is not None
    assert exceeds(first.c_achieved, 3)
    (_, first_hi), (_, best_hi) = first.region.components[0], found.region.components[0]
    assert first_hi <= best_hi

    assert find_deviant(Z, 1, 1, Region.interval(0, 1000)) is None
    assert find_deviant(Z, 1, 1, Region.interval(0, 1000), prefer="first") is None


def test_fibonacci_deviance_stays_bounded():
    sups = [float(scan_deviance(FIB, FIB.density_value, Region.interval(0, 10**k)).sup_ratio) for k in (3, 5)]
    assert sups == pytest.approx([0.068884, 0.069095], abs=1e-5)
    assert max(sups) < 0.07
    assert sups[1] - sups[0] < 1e-3


def test_half_fibonacci_deviance_grows():
    rho = HALF_FIB.density_value
    sups = [float(scan_deviance(HALF_FIB, rho, Region.interval(0, 10**k)).sup_ratio) for k in (2, 3, 4, 5)]
    assert sups == pytest.approx([0.246885, 0.497406, 0.747292, 0.872479], abs=1e-5)
    assert all(a < b for a, b in zip(sups, sups[1:]))


@pytest.mark.slow
def test_half_fibonacci_deviant_regions_at_scale():
    window = Region.interval(0, 10**6)
    scan = scan_deviance(HALF_FIB, HALF_FIB.density_value, window)
    assert float(scan.sup_ratio) == pytest.approx(1.122479, abs=1e-5)

    unit = find_deviant(HALF_FIB, HALF_FIB.density_value, 1, window, prefer="first")
    assert unit is not None
    assert exceeds(unit.c_achieved, 1)
    # deviance grows by about 1/4 per decade, so c = 2 lies far beyond this window
    assert find_deviant(HALF_FIB, HALF_FIB.density_value, 2, window) is None


def test_find_opposite_translate():
    E = Region.interval("-1/2", "52/5")
    opposite = find_opposite_translate(Z, 1, E, Region.interval(-20, 20))
    assert opposite.original.count == 11
    assert opposite.original.sign == 1
    assert opposite.shift == QuadNum(Fraction(9, 20))
    assert opposite.report.count == 10
    assert opposite.report.sign == -1
    assert opposite.report.region == E.translate(-opposite.shift)

    assert balancing_translates(Z, 1, E, Region.interval(-20, 20)) == (QuadNum(Fraction(9, 20)), QuadNum(0))

    with pytest.raises(InvalidParameterError):
        find_opposite_translate(Z, 1, Region.interval("1/2", "21/2"), Region.interval(-20, 20))
    with pytest.raises(NotFoundError):
        find_opposite_translate(Z, 1, E, E)


def test_opposite_translate_leaves_the_rich_region():
    Q5 = Region.interval(0, 33)
    opposite = find_opposite_translate(EXAMPLE_L, 1, Q5, Region.interval(-64, 40))
    assert opposite.original.discrepancy == 7
    assert opposite.report.sign <= 0
    assert opposite.shift > 31


def test_verify_shifts():
    Q10 = Region.interval(0, 1025)
    verification = verify_shifts(EXAMPLE_L, 1, Q10, 2, "1/2")
    assert verification.passed
    assert verification.shifts_checked > 3
    assert exceeds(verification.worst_ratio, 2)
    assert not verify_shifts(EXAMPLE_L, 1, Q10, 3, "1/2").passed


def test_find_shift_robust_deviant():
    window = Region.interval(0, 2**12)
    found = find_shift_robust_deviant(EXAMPLE_L, 1, 1, 2, window, method="scan")
    assert found is not None
    assert found.verification is not None
    assert found.verification.passed
    assert exceeds(found.verification.worst_ratio, 1)
    assert found.verification.ell == 2

    # the lemma target c + q * ell = 25 is out of reach at this scale
    assert find_shift_robust_deviant(EXAMPLE_L, 1, 1, 2, window, method="lemma") is None
    assert find_shift_robust_deviant(Z, 1, 1, 2, Region.interval(0, 500), method="scan") is None
    with pytest.raises(InvalidParameterError):
        find_shift_robust_deviant(EXAMPLE_L, 1, 1, 2, window, method="bogus")  # type: ignore


def test_shift_bound_holds():
    q = derive_constants(Z).q
    assert shift_bound_holds(Z, Region.interval(0, 10), "1/2", 1, q)
    assert shift_bound_holds(EXAMPLE_L, Region.interval(0, 1025), -2, 2, derive_constants(EXAMPLE_L).q)
    with pytest.raises(InvalidParameterError):
        shift_bound_holds(Z, Region.interval(0, 10), 3, 1, q)


def test_repetitivity_radius():
    periodic = repetitivity_radius(Z, Region.interval(0, 3), Region.interval(-50, 50))
    assert periodic.radius == QuadNum(Fraction(1, 2))
    assert periodic.occurrences == 98

    fib = repetitivity_radius(FIB, Region.interval(0, 5), Region.interval(-200, 200))
    assert fib.occurrences > 1
    assert 0 < fib.radius < 50

    with pytest.raises(NotRepetitiveError):
        repetitivity_radius(EXAMPLE_L, Region.interval(0, 3), Region.interval(0, 10_000))
