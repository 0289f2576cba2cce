import numpy as np
import pytest

from aperiodica.errors import InvalidParameterError
from aperiodica.geometry import Box, Region
from aperiodica.pointsets import build_source
from aperiodica.scalar import PHI, QuadNum
from aperiodica.search import derive_constants
from aperiodica.suites import (
    SUITE_NAMES,
    count_bounds_suite,
    deviant_van_hove_suite,
    random_region,
    run_all,
    run_suite,
    shift_bound_suite,
    steiner_cross_check,
    steiner_kernel_suite,
    tube_inclusion_suite,
    tube_scaling_suite,
)

DYADIC_WINDOWS = [Region.interval(0, 2**k) for k in range(4, 11)]
DECADE_WINDOWS = [Region.interval(0, 10**k) for k in range(3, 7)]
HALF_FIB = build_source("halffib")


def test_random_region(rng: np.random.Generator):
    for _ in range(50):
        E = random_region(rng)
        assert E.dimension == 1
        assert 1 <= len(E) <= 5
        assert all(gap > 0 for gap in E.gaps)
        planar = random_region(rng, 2, max_components=3)
        assert planar.dimension == 2
        assert planar.measure() > 0


def test_tube_suites(seed: int):
    inclusion = tube_inclusion_suite(n_cases=40, seed=seed, n_samples=500)
    assert inclusion.passed, inclusion.detail
    assert inclusion.cases == 40

    scaling = tube_scaling_suite(n_intervals=50, n_boxes=10, seed=seed)
    assert scaling.passed, scaling.detail
    assert scaling.cases == 60 * 4


def test_lemma_suites(seed: int):
    counts = count_bounds_suite(n_cases=40, seed=seed)
    assert counts.passed, counts.detail
    assert counts.cases == 160

    shifts = shift_bound_suite(n_cases=40, seed=seed)
    assert shifts.passed, shifts.detail


@pytest.mark.parametrize(
    "spec, r, R, q",
    [
        ("latticeZ", "1/2", "1/2", 6),
        ("exampleL", "1/4", "1/2", 12),
        ("fib", "1/2", PHI / 2, 6),
        # gaps phi, phi^2 and phi^3
        ("halffib", PHI / 2, PHI**3 / 2, 6 * PHI - 6),
    ],
)
def test_count_bounds_constants(spec: str, r, R, q, seed: int):
    constants = derive_constants(build_source(spec))
    assert (constants.r, constants.R, constants.q) == (QuadNum.of(r), QuadNum.of(R), QuadNum.of(q))
    assert constants.eta == constants.eta_prime == QuadNum(1) / 2

    result = count_bounds_suite([spec], n_cases=100, seed=seed)
    assert result.passed, result.detail
    assert result.cases == 100


def test_steiner_cross_check(rng: np.random.Generator):
    assert steiner_cross_check(Box([0, 0], [4, 4]), 1, n_samples=400_000, rng=rng)
    assert steiner_kernel_suite(n_boxes=1, seed=0, n_samples=400_000).passed

    boxes = steiner_kernel_suite(n_boxes=12, seed=0, n_samples=200_000)
    assert boxes.passed, boxes.detail
    assert boxes.cases == 12


def test_deviant_van_hove_suite():
    grows = deviant_van_hove_suite(build_source("exampleL"), 1, DYADIC_WINDOWS)
    assert grows.passed, grows.detail
    assert grows.cases == len(DYADIC_WINDOWS)

    flat = deviant_van_hove_suite(build_source("latticeZ"), 1, DYADIC_WINDOWS)
    assert not flat.passed
    assert flat.failures >= 1

    golden = deviant_van_hove_suite(HALF_FIB, HALF_FIB.density_value, DECADE_WINDOWS[:2])
    assert golden.passed, golden.detail

    combined = run_suite(("deviant_van_hove", 0, 0.01))
    assert combined.passed, combined.detail
    assert combined.cases == len(DYADIC_WINDOWS) + 2


@pytest.mark.slow
def test_deviant_van_hove_suite_on_half_fibonacci_decades():
    result = deviant_van_hove_suite(HALF_FIB, HALF_FIB.density_value, DECADE_WINDOWS)
    assert result.passed, result.detail
    assert result.cases == 4


def test_run_suite():
    result = run_suite(("tube_scaling", 3, 0.01))
    assert result.name == "tube_scaling"
    assert result.passed
    with pytest.raises(InvalidParameterError):
        run_suite(("nope", 0, 1.0))


@pytest.mark.slow
def test_run_all():
    results = run_all(seed=0, scale=1.0, workers=2)
    assert [r.name for r in results] == list(SUITE_NAMES)
    assert all(r.passed for r in results), [r.detail for r in results if not r.passed]
