"""
Seeded randomized property suites for the tube, count and shift inequalities
and for the van Hove behaviour of growing deviant regions.
"""
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from aperiodica.discrepancy import deviant_implies_van_hove, inscribed_radii_increasing
from aperiodica.errors import AperiodicaError, InvalidParameterError
from aperiodica.geometry import (
    Box,
    Region,
    check_tube_inclusion,
    check_tube_scaling,
    monte_carlo_tube_measure,
    steiner_tube,
    tube_measure,
)
from aperiodica.model import Record
from aperiodica.pointsets import PointSource, build_source
from aperiodica.scalar import QuadNum, ScalarLike
from aperiodica.search import derive_constants, scan_deviance, shift_bound_holds
from aperiodica.utils import logger, parallel_map

SCALING_ELLS = (QuadNum(1), QuadNum(Fraction(3, 2)), QuadNum(2), QuadNum(4))
SUITE_SOURCES = ("latticeZ", "exampleL", "fib", "halffib")


class SuiteResult(Record):
    name: str
    cases: int
    failures: int
    passed: bool
    detail: str = ""


def _result(name: str, cases: int, failures: list[str]) -> SuiteResult:
    logger.info(f"{name}: {cases} cases, {len(failures)} failures")
    return SuiteResult(
        name=name, cases=cases, failures=len(failures), passed=not failures, detail="; ".join(failures[:5])
    )


def _combined(name: str, results: Sequence[SuiteResult]) -> SuiteResult:
    return SuiteResult(
        name=name,
        cases=sum(r.cases for r in results),
        failures=sum(r.failures for r in results),
        passed=all(r.passed for r in results),
        detail="; ".join(r.detail for r in results if r.detail),
    )


def _quarter(rng: np.random.Generator, lo: int, hi: int) -> Fraction:
    """A random multiple of 1/4 in `[lo/4, hi/4]`."""
    return Fraction(int(rng.integers(lo, hi + 1)), 4)


def random_region(
    rng: np.random.Generator, dimension: int = 1, max_components: int = 5, origin: int = 0
) -> Region:
    """A random union of disjoint intervals (or boxes in separate columns) with quarter-integer corners."""
    k = int(rng.integers(1, max_components + 1))
    boxes = []
    x = Fraction(origin) + _quarter(rng, -40, 40)
    for _ in range(k):
        length = _quarter(rng, 1, 40)
        lo = [x] + [_quarter(rng, -40, 0) for _ in range(dimension - 1)]
        hi = [x + length] + [a + _quarter(rng, 1, 40) for a in lo[1:]]
        boxes.append(Box(lo, hi))
        x += length + _quarter(rng, 1, 20)
    return Region(boxes, dimension=dimension)


def tube_inclusion_suite(n_cases: int = 1000, seed: int = 0, n_samples: int = 10_000) -> SuiteResult:
    """`(E^{+l})^{+r}` inside `E^{+(l+r)}` on random 1D and 2D regions."""
    rng = np.random.default_rng(seed)
    failures = []
    for case in range(n_cases):
        dimension = 1 + case % 2
        E = random_region(rng, dimension, max_components=5 if dimension == 1 else 3)
        l, r = _quarter(rng, 1, 16), _quarter(rng, 1, 16)
        if not check_tube_inclusion(E, l, r, n_samples=n_samples):
            failures.append(f"{E.to_literal()} l={l} r={r}")
    return _result("tube_inclusion", n_cases, failures)


def count_bounds_suite(
    sources: Sequence[str] = SUITE_SOURCES, n_cases: int = 500, seed: int = 0
) -> SuiteResult:
    """`(eta/R^d)(mu(E) - mu(E^{+R})) <= #(S & E) <= (eta'/r^d)(mu(E) + mu(E^{+r}))` on random intervals."""
    rng = np.random.default_rng(seed)
    failures = []
    cases = 0
    for spec in sources:
        S = build_source(spec)
        constants = derive_constants(S)
        r, R = QuadNum.of(constants.r), QuadNum.of(constants.R)
        for _ in range(n_cases):
            E = random_region(rng, 1, max_components=3, origin=int(rng.integers(-400, 400)))
            count = QuadNum(S.count_in(E))
            measure = E.measure()
            lower = constants.eta / R * (measure - QuadNum.of(tube_measure(E, R).value))
            upper = constants.eta_prime / r * (measure + QuadNum.of(tube_measure(E, r).value))
            cases += 1
            if not lower <= count <= upper:
                failures.append(f"{spec} {E.to_literal()}: {lower} <= {count} <= {upper}")
    return _result("count_bounds", cases, failures)


def tube_scaling_suite(
    n_intervals: int = 1000, n_boxes: int = 200, seed: int = 0, ells: Sequence[ScalarLike] = SCALING_ELLS
) -> SuiteResult:
    """`mu(E^{+l}) <= l^d mu(E^{+1})` on random 1D regions and single 2D boxes."""
    rng = np.random.default_rng(seed)
    failures = []
    regions = [random_region(rng, 1) for _ in range(n_intervals)]
    regions += [random_region(rng, 2, max_components=1) for _ in range(n_boxes)]
    for E in regions:
        for ell in ells:
            if not check_tube_scaling(E, ell):
                failures.append(f"{E.to_literal()} l={ell}")
    return _result("tube_scaling", len(regions) * len(ells), failures)


def steiner_cross_check(
    box: Box,
    eps: ScalarLike,
    n_samples: int = 10_000_000,
    rng: Optional[np.random.Generator] = None,
    sigmas: float = 3.0,
) -> bool:
    """Whether the analytic single-box tube lies within the `sigmas` band of a sampling estimate."""
    rng = rng if rng is not None else np.random.default_rng(0)
    estimate = monte_carlo_tube_measure(Region([box]), eps, n_samples, rng)
    band = estimate.error_bound * sigmas / 3
    return abs(steiner_tube(box, float(QuadNum.of(eps))) - float(estimate.value)) <= band


def steiner_kernel_suite(n_boxes: int = 24, seed: int = 0, n_samples: int = 2_000_000) -> SuiteResult:
    """Cross-validate the single-box tube formula against sampling on `[0,4]x[0,4]` and random boxes.

    Each box is judged against a four-sigma band.
    """
    rng = np.random.default_rng(seed)
    boxes = [Box([0, 0], [4, 4])] + [random_region(rng, 2, max_components=1).boxes[0] for _ in range(n_boxes - 1)]
    failures = [box.to_literal() for box in boxes if not steiner_cross_check(box, 1, n_samples, rng, sigmas=4)]
    return _result("steiner_kernel", len(boxes), failures)


def shift_bound_suite(
    sources: Sequence[str] = SUITE_SOURCES, n_cases: int = 500, seed: int = 0, max_ell: int = 8
) -> SuiteResult:
    """`|#((E + x) & S) - #(E & S)| <= q l^d mu(E^{+1})` for random `E`, `1 <= l <= max_ell`, `|x| <= l`."""
    rng = np.random.default_rng(seed)
    failures = []
    cases = 0
    for spec in sources:
        S = build_source(spec)
        q = derive_constants(S).q
        for _ in range(n_cases):
            E = random_region(rng, 1, max_components=3, origin=int(rng.integers(-400, 400)))
            ell = _quarter(rng, 4, 4 * max_ell)
            x = Fraction(int(rng.integers(-int(ell * 8), int(ell * 8) + 1)), 8)
            cases += 1
            if not shift_bound_holds(S, E, x, ell, q):
                failures.append(f"{spec} {E.to_literal()} x={x} l={ell}")
    return _result("shift_bound", cases, failures)


def deviant_van_hove_suite(
    S: PointSource,
    rho: ScalarLike,
    windows: Sequence[Region],
    relative_threshold: float = 0.1,
) -> SuiteResult:
    """The most deviant regions of growing windows: deviance grows, their tube ratio vanishes relative to
    the first one, and their inscribed radii grow."""
    failures: list[str] = []
    reports = []
    for window in windows:
        scan = scan_deviance(S, rho, window)
        if scan.best is None:
            failures.append(f"{S.spec}: no candidate in {window.to_literal()}")
            continue
        reports.append(scan.best)
    ratios = [QuadNum.of(rep.ratio) for rep in reports]
    if any(not a < b for a, b in zip(ratios, ratios[1:])):
        failures.append(f"{S.spec}: deviance does not grow: {[float(r) for r in ratios]}")
    elif reports:
        constants = [ratios[0] / 2] + ratios[:-1]
        try:
            diagnostics = deviant_implies_van_hove(
                reports, constants, threshold=relative_threshold, relative=True
            )
        except AperiodicaError as e:
            failures.append(f"{S.spec}: {e}")
        else:
            if not diagnostics.passed:
                failures.append(f"{S.spec}: van Hove check: {diagnostics.failure}")
        if not inscribed_radii_increasing([rep.region for rep in reports]):
            failures.append(f"{S.spec}: inscribed radii do not grow")
    return _result("deviant_van_hove", len(windows), failures)


SUITE_NAMES = (
    "tube_inclusion",
    "count_bounds",
    "tube_scaling",
    "steiner_kernel",
    "shift_bound",
    "deviant_van_hove",
)


def run_suite(task: tuple[str, int, float]) -> SuiteResult:
    """Run one suite by name at its default size times a scale factor."""
    name, seed, scale = task

    def n(size: int) -> int:
        return max(1, int(size * scale))

    if name == "tube_inclusion":
        return tube_inclusion_suite(n(1000), seed)
    if name == "count_bounds":
        return count_bounds_suite(n_cases=n(500), seed=seed)
    if name == "tube_scaling":
        return tube_scaling_suite(n(1000), n(200), seed)
    if name == "steiner_kernel":
        return steiner_kernel_suite(n(24), seed, n(2_000_000))
    if name == "shift_bound":
        return shift_bound_suite(n_cases=n(500), seed=seed)
    if name == "deviant_van_hove":
        dyadic = [Region.interval(0, 2**k) for k in range(4, 11)]
        decades = [Region.interval(0, 10**k) for k in range(3, 3 + max(2, min(4, n(4))))]
        half_fib = build_source("halffib")
        if half_fib.density_value is None:
            raise InvalidParameterError("halffib needs an exact density")
        return _combined(
            "deviant_van_hove",
            [
                deviant_van_hove_suite(build_source("exampleL"), 1, dyadic),
                deviant_van_hove_suite(half_fib, half_fib.density_value, decades),
            ],
        )
    raise InvalidParameterError(f"unknown suite {name!r}")


def run_all(seed: int = 0, scale: float = 1.0, workers: int = 1) -> list[SuiteResult]:
    return parallel_map(run_suite, [(name, seed, scale) for name in SUITE_NAMES], workers)
