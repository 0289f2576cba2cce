"""
Density-relative discrepancy, c-deviance and van Hove diagnostics.
"""
from typing import Optional, Sequence, Union

from aperiodica.errors import InvalidParameterError
from aperiodica.geometry import Region, tube_measure
from aperiodica.model import Record
from aperiodica.scalar import QuadNum, ScalarLike
from aperiodica.typing import Counting, Point
from aperiodica.utils import logger

VAN_HOVE_THRESHOLD = 1e-2

Number = Union[QuadNum, float]


class DiscrepancyReport(Record):
    region: Region
    count: int
    expected: Number
    tube1: Number
    discrepancy: Number
    ratio: Number
    sign: int

    @property
    def exact(self) -> bool:
        return isinstance(self.ratio, QuadNum)


class VanHoveDiagnostics(Record):
    eps: list[Number]
    ratios: list[list[float]]
    threshold: float
    relative: bool = False
    passed: bool
    failing_eps: Optional[Number] = None
    failing_index: Optional[int] = None
    failure: Optional[str] = None


class InscribedBall(Record):
    center: Point
    radius: QuadNum


def exceeds(ratio: Number, c: ScalarLike) -> bool:
    """`ratio > c`, exactly when the ratio is exact."""
    if isinstance(ratio, QuadNum):
        return ratio > QuadNum.of(c)
    return float(ratio) > float(QuadNum.of(c))


def _positive(rho: ScalarLike) -> QuadNum:
    value = QuadNum.of(rho)
    if value.sign() <= 0:
        raise InvalidParameterError(f"density must be positive: {value}")
    return value


def report_from_count(E: Region, count: int, rho: ScalarLike) -> DiscrepancyReport:
    """Build the report of `E` from an already known point count."""
    rho_ = _positive(rho)
    expected = rho_ * E.measure()
    discrepancy = QuadNum(count) - expected
    tube = tube_measure(E, 1)
    ratio: Number
    if isinstance(tube.value, QuadNum):
        ratio = abs(discrepancy) / tube.value
    else:
        ratio = abs(float(discrepancy)) / tube.value
    return DiscrepancyReport(
        region=E,
        count=count,
        expected=expected,
        tube1=tube.value,
        discrepancy=discrepancy,
        ratio=ratio,
        sign=discrepancy.sign(),
    )


def discrepancy_report(S: Counting, rho: ScalarLike, E: Region) -> DiscrepancyReport:
    """Count, expected count `rho * mu(E)`, unit tube `mu(E^{+1})` and deviance ratio of `E`.

    Raises:
        InvalidParameterError: `rho <= 0`.
    """
    _positive(rho)
    return report_from_count(E, S.count_in(E), rho)


def is_c_deviant(rep: DiscrepancyReport, c: ScalarLike) -> bool:
    return exceeds(rep.ratio, c)


def _tail_nonincreasing(values: Sequence[Number]) -> bool:
    tail = values[len(values) - max(1, len(values) // 4) :] if len(values) > 1 else values
    return all(not exceeds(b, a) for a, b in zip(tail, tail[1:]))


def van_hove_check(
    seq: Sequence[Region],
    eps_list: Sequence[ScalarLike],
    threshold: float = VAN_HOVE_THRESHOLD,
    relative: bool = False,
) -> VanHoveDiagnostics:
    """Finite evidence for `mu(A_i^{+eps}) / mu(A_i) -> 0`.

    Passes when, for every `eps`, the final ratio is below `threshold` (below
    `threshold` times the first ratio when `relative`) and the last quarter of
    the ratio sequence is nonincreasing.
    """
    if not seq:
        raise InvalidParameterError("van Hove check needs a nonempty sequence")
    all_ratios: list[list[float]] = []
    failure: Optional[tuple[QuadNum, int, str]] = None
    eps_values = [QuadNum.of(e) for e in eps_list]
    for eps in eps_values:
        ratios: list[Number] = []
        for A in seq:
            tube = tube_measure(A, eps)
            if isinstance(tube.value, QuadNum):
                ratios.append(tube.value / A.measure())
            else:
                ratios.append(tube.value / float(A.measure()))
        all_ratios.append([float(r) for r in ratios])
        if failure is not None:
            continue
        limit = threshold * float(ratios[0]) if relative else threshold
        if not float(ratios[-1]) < limit:
            failure = (eps, len(seq) - 1, f"final ratio {float(ratios[-1]):.6g} is not below {limit:.6g}")
            continue
        if not _tail_nonincreasing(ratios):
            for i in range(len(ratios) - max(1, len(ratios) // 4), len(ratios) - 1):
                if exceeds(ratios[i + 1], ratios[i]):
                    failure = (eps, i + 1, f"ratio increases at index {i + 1}")
                    break
    if failure is not None:
        logger.debug(f"van Hove check failed at eps={failure[0]}, index {failure[1]}: {failure[2]}")
        return VanHoveDiagnostics(
            eps=eps_values,
            ratios=all_ratios,
            threshold=threshold,
            relative=relative,
            passed=False,
            failing_eps=failure[0],
            failing_index=failure[1],
            failure=failure[2],
        )
    return VanHoveDiagnostics(eps=eps_values, ratios=all_ratios, threshold=threshold, relative=relative, passed=True)


def deviant_implies_van_hove(
    seq: Sequence[DiscrepancyReport],
    c_seq: Sequence[ScalarLike],
    eps_list: Sequence[ScalarLike] = (1,),
    threshold: float = VAN_HOVE_THRESHOLD,
    relative: bool = False,
) -> VanHoveDiagnostics:
    """Run the van Hove check on the regions of a sequence of reports with growing deviance.

    Raises:
        InvalidParameterError: lengths differ, `c_seq` is not strictly increasing,
            or some report is not `c_i`-deviant.
    """
    if len(seq) != len(c_seq) or not seq:
        raise InvalidParameterError(f"need one constant per report: {len(seq)} reports, {len(c_seq)} constants")
    constants = [QuadNum.of(c) for c in c_seq]
    for i, (a, b) in enumerate(zip(constants, constants[1:])):
        if not a < b:
            raise InvalidParameterError(f"deviance constants must increase strictly, index {i + 1}: {a} >= {b}")
    for i, (rep, c) in enumerate(zip(seq, constants)):
        if not is_c_deviant(rep, c):
            raise InvalidParameterError(f"report {i} has ratio {float(rep.ratio):.6g}, not {c}-deviant")
    return van_hove_check([rep.region for rep in seq], eps_list, threshold, relative)


def largest_inscribed_ball(E: Region) -> InscribedBall:
    """Largest ball inside a single box of `E`; ties go to the lexicographically smallest center."""
    if not E.boxes:
        raise InvalidParameterError("empty region has no inscribed ball")
    best: Optional[InscribedBall] = None
    for box in E.boxes:
        radius = min(box.sides) / 2
        if best is None or radius > best.radius or (radius == best.radius and box.center < best.center):
            best = InscribedBall(center=box.center, radius=radius)
    assert best is not None
    return best


def inscribed_radii_increasing(seq: Sequence[Region]) -> bool:
    radii = [largest_inscribed_ball(E).radius for E in seq]
    return all(a < b for a, b in zip(radii, radii[1:]))
