import itertools

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from aperiodica.errors import DimensionMismatchError, InvalidParameterError
from aperiodica.geometry import Region, centered_intervals, dyadic_family
from aperiodica.matcher import MatchInstance, bottleneck_match, hall_witness, lattice_bd_scan, non_bd_ratio
from aperiodica.pointsets import build_source
from aperiodica.scalar import QuadNum
from aperiodica.typing import Point

Z = build_source("latticeZ")
EXAMPLE_L = build_source("exampleL")
FIB = build_source("fib")


def line(*xs) -> list[Point]:
    return [(QuadNum.of(x),) for x in xs]


def plane(coords: np.ndarray) -> list[Point]:
    return [tuple(QuadNum.of(float(x)) for x in row) for row in coords]


def brute_force_bottleneck(left: np.ndarray, right: np.ndarray) -> float:
    distances = cdist(left, right)
    perms = np.array(list(itertools.permutations(range(len(right)))))
    return float(distances[np.arange(len(left)), perms].max(axis=1).min())


def test_bottleneck_match():
    same = bottleneck_match(MatchInstance(left=line(0, 1, 2), right=line(0, 1, 2)))
    assert same.status == "perfect"
    assert same.bottleneck_t == 0
    assert same.matching == [(0, 0), (1, 1), (2, 2)]

    shifted = bottleneck_match(MatchInstance(left=line(0, 1, 2), right=line("1/2", "3/2", "5/2")))
    assert shifted.bottleneck_t == QuadNum(1) / 2

    reordered = bottleneck_match(MatchInstance(left=line(2, 0, 1), right=line("5/2", "1/2", "3/2")))
    assert reordered.matching == [(0, 0), (1, 1), (2, 2)]

    defect = bottleneck_match(MatchInstance(left=line(0, 1, 2), right=line(0, 1)))
    assert defect.status == "defect"
    assert defect.defect_count == 1

    with pytest.raises(InvalidParameterError):
        bottleneck_match(MatchInstance(left=[], right=[]))
    with pytest.raises(DimensionMismatchError):
        bottleneck_match(MatchInstance(left=plane(np.zeros((2, 2))), right=plane(np.ones((2, 2)))), method="sorted")


def test_bottleneck_match_brute_force(rng: np.random.Generator):
    for _ in range(200):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 3))
        left = rng.integers(0, 64, size=(n, d)) / 8
        right = rng.integers(0, 64, size=(n, d)) / 8
        inst = MatchInstance(left=plane(left), right=plane(right))
        expected = brute_force_bottleneck(left, right)
        outcome = bottleneck_match(inst)
        assert float(outcome.bottleneck_t) == pytest.approx(expected)
        assert float(bottleneck_match(inst, method="matching").bottleneck_t) == pytest.approx(expected)
        assert sorted(i for i, _ in outcome.matching) == list(range(n))
        assert sorted(j for _, j in outcome.matching) == list(range(n))

        t = float(outcome.bottleneck_t)
        assert hall_witness(inst, t) is None
        if t > 0:
            witness = hall_witness(inst, t - 1e-9)
            assert witness
            coords = np.array([[float(x) for x in p] for p in witness])
            neighbors = (cdist(coords, right) <= t - 1e-9).any(axis=0).sum()
            assert neighbors < len(witness)


def test_sorted_matching_is_optimal_in_1d(rng: np.random.Generator):
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        left, right = rng.integers(-40, 40, size=n) / 4, rng.integers(-40, 40, size=n) / 4
        inst = MatchInstance(left=line(*left), right=line(*right))
        fast = bottleneck_match(inst, method="sorted")
        assert fast.bottleneck_t == bottleneck_match(inst, method="matching").bottleneck_t
        assert fast.bottleneck_t == QuadNum.of(float(np.abs(np.sort(left) - np.sort(right)).max()))


def test_bottleneck_monotone_under_paired_points(rng: np.random.Generator):
    for _ in range(100):
        n = int(rng.integers(1, 7))
        d = int(rng.integers(1, 3))
        left = rng.integers(0, 64, size=(n, d)) / 8
        right = rng.integers(0, 64, size=(n, d)) / 8
        p, q = rng.integers(0, 64, size=(2, d)) / 8
        before = float(bottleneck_match(MatchInstance(left=plane(left), right=plane(right))).bottleneck_t)
        extended = MatchInstance(left=plane(np.vstack([left, p])), right=plane(np.vstack([right, q])))
        after = float(bottleneck_match(extended).bottleneck_t)
        assert after <= max(before, float(np.linalg.norm(p - q))) + 1e-12


def test_hall_witness():
    inst = MatchInstance(left=line(0, 10), right=line(0, "1/10"))
    assert hall_witness(inst, 1) == [(QuadNum(10),)]
    assert hall_witness(inst, 10) is None

    capped = bottleneck_match(inst, t_max=1)
    assert capped.status == "witness"
    assert capped.hall_set == [(QuadNum(10),)]
    assert capped.hall_neighbors == 0
    assert capped.threshold == 1.0

    assert bottleneck_match(inst, t_max=10).status == "perfect"


def test_non_bd_ratio():
    evidence = non_bd_ratio(EXAMPLE_L, Z, dyadic_family(12))
    assert evidence.ratios == [(i, QuadNum(i + 1) / 4) for i in range(1, 13)]
    assert evidence.verdict == "ratios grow"

    same = non_bd_ratio(Z, Z, dyadic_family(12))
    assert all(ratio == 0 for _, ratio in same.ratios)
    assert same.verdict == "ratios bounded"

    shifted = non_bd_ratio(Z, build_source("lattice:t=3/10"), centered_intervals(300))
    assert all(ratio <= QuadNum(1) / 4 for _, ratio in shifted.ratios)
    assert shifted.verdict == "ratios bounded"

    with pytest.raises(InvalidParameterError):
        non_bd_ratio(Z, Z, [Region.interval(i, i + 1) for i in range(1, 30)])


def test_non_bd_ratio_van_hove_shortfall():
    # tube ratios 2/i reach 1/10 at i = 20: decayed, but not below 1e-2
    evidence = non_bd_ratio(Z, build_source("lattice:t=3/10"), centered_intervals(20))
    assert evidence.van_hove_shortfall is not None
    assert not evidence.van_hove.passed
    assert evidence.verdict == "ratios bounded"

    assert non_bd_ratio(EXAMPLE_L, Z, dyadic_family(12)).van_hove_shortfall is None
    with pytest.raises(InvalidParameterError):
        non_bd_ratio(Z, Z, dyadic_family(2))


@pytest.mark.parametrize(
    "other",
    ["lattice:t=3/10", "lattice:t=7/8", "periodic:a=2,motif=0;1/2", "periodic:a=3,motif=0;1/3;5/2"],
)
def test_non_bd_ratio_never_grows_for_bounded_distance_pairs(other: str):
    for family in (dyadic_family(16), centered_intervals(300)):
        assert non_bd_ratio(Z, build_source(other), family).verdict == "ratios bounded"


def test_non_bd_ratio_fibonacci_against_its_lattice():
    # the Fibonacci window has length phi, so the set is bounded-distance equivalent to a lattice
    lattice = build_source("lattice:a=5/2-1/2*sqrt5")
    evidence = non_bd_ratio(FIB, lattice, dyadic_family(14))
    assert evidence.verdict == "ratios bounded"
    assert max(float(ratio) for _, ratio in evidence.ratios) < 1


def test_lattice_bd_scan():
    flat = lattice_bd_scan(Z, 1, 1, [Region.interval(0, 1000)])
    assert not flat.violated
    assert flat.sup_ratio == 0

    rich = lattice_bd_scan(EXAMPLE_L, 1, 2, [Region.interval(0, 2**8), Region.interval(0, 2**12)])
    assert rich.violated
    assert rich.region is not None
    assert rich.report is not None
    assert rich.report.ratio > 2


@pytest.mark.slow
def test_lattice_bd_scan_at_scale():
    verdict = lattice_bd_scan(EXAMPLE_L, 1, 5, [Region.interval(0, 2**22)])
    assert verdict.violated
