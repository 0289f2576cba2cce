"""
Bounded-distance evidence on finite windows: bottleneck matchings, Hall
witnesses, count-difference ratios and the lattice deviance scan.
"""
import bisect
from collections import deque
from typing import Literal, Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist

from aperiodica.discrepancy import (
    VAN_HOVE_THRESHOLD,
    DiscrepancyReport,
    Number,
    VanHoveDiagnostics,
    exceeds,
    van_hove_check,
)
from aperiodica.errors import DimensionMismatchError, InvalidParameterError
from aperiodica.geometry import Region, tube_measure
from aperiodica.model import Record
from aperiodica.pointsets import PointSource
from aperiodica.scalar import QuadNum, ScalarLike
from aperiodica.search import scan_deviance
from aperiodica.typing import Point
from aperiodica.utils import logger

GROWTH_FACTOR = 4
GROWTH_STEPS = 3
VAN_HOVE_DECAY = 0.1

MatchStatus = Literal["perfect", "defect", "witness"]
Verdict = Literal["ratios grow", "ratios bounded"]


class MatchInstance(Record):
    left: list[Point]
    right: list[Point]
    metric: Literal["euclidean"] = "euclidean"

    @property
    def dimension(self) -> int:
        points = self.left or self.right
        return len(points[0]) if points else 0

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.dimension
        left = np.array([[float(x) for x in p] for p in self.left], dtype=float).reshape(-1, d)
        right = np.array([[float(x) for x in p] for p in self.right], dtype=float).reshape(-1, d)
        return left, right


class MatchOutcome(Record):
    status: MatchStatus
    bottleneck_t: Optional[Number] = None
    matching: Optional[list[tuple[int, int]]] = None
    defect_count: Optional[int] = None
    hall_set: Optional[list[Point]] = None
    hall_neighbors: Optional[int] = None
    threshold: Optional[float] = None


class NonBDEvidence(Record):
    ratios: list[tuple[int, Number]]
    verdict: Verdict
    van_hove: VanHoveDiagnostics
    van_hove_shortfall: Optional[str] = None


class LatticeScanVerdict(Record):
    violated: bool
    c: QuadNum
    region: Optional[Region] = None
    report: Optional[DiscrepancyReport] = None
    sup_ratio: Number
    evaluated: int


def _distance(a: Point, b: Point) -> Number:
    if len(a) == 1:
        return abs(a[0] - b[0])
    return float(np.linalg.norm([float(x) - float(y) for x, y in zip(a, b)]))


def _maximum_matching(distances: np.ndarray, t: float) -> np.ndarray:
    """Column matched to every left vertex (or -1) in the graph `{(a, b) : |a - b| <= t}`."""
    return maximum_bipartite_matching(csr_matrix(distances <= t), perm_type="column")


def _sorted_match(inst: MatchInstance) -> list[tuple[int, int]]:
    left = sorted(range(len(inst.left)), key=lambda i: inst.left[i][0])
    right = sorted(range(len(inst.right)), key=lambda j: inst.right[j][0])
    return sorted(zip(left, right))


def _matching_search(inst: MatchInstance) -> list[tuple[int, int]]:
    left, right = inst.coordinates()
    distances = cdist(left, right)
    values = np.unique(distances)
    matched: dict[float, np.ndarray] = {}

    def feasible(t: float) -> bool:
        matching = _maximum_matching(distances, t)
        if (matching == -1).any():
            return False
        matched[t] = matching
        return True

    index = bisect.bisect_left(values, True, key=feasible)
    t = float(values[index])
    matching = matched[t] if t in matched else _maximum_matching(distances, t)
    return [(i, int(j)) for i, j in enumerate(matching)]


def bottleneck_match(
    inst: MatchInstance,
    method: Literal["auto", "sorted", "matching"] = "auto",
    t_max: Optional[ScalarLike] = None,
) -> MatchOutcome:
    """Perfect matching minimising the largest matched distance.

    In one dimension the order-preserving matching is optimal and used unless
    `method="matching"`; otherwise thresholds are bisected over the sorted
    pairwise distances with a maximum bipartite matching at each step. With
    `t_max`, an optimum above it is reported as a Hall witness at `t_max`.
    """
    if not inst.left or not inst.right:
        raise InvalidParameterError("matching needs nonempty point sets")
    if len(inst.left) != len(inst.right):
        return MatchOutcome(status="defect", defect_count=abs(len(inst.left) - len(inst.right)))
    d = inst.dimension
    if any(len(p) != d for p in inst.left + inst.right):
        raise DimensionMismatchError("matched points must share one dimension")
    if method == "sorted" and d != 1:
        raise DimensionMismatchError("the order-preserving matching is one-dimensional")
    pairs = _sorted_match(inst) if d == 1 and method != "matching" else _matching_search(inst)
    t = max(_distance(inst.left[i], inst.right[j]) for i, j in pairs)
    if t_max is not None and float(t) > float(QuadNum.of(t_max)):
        witness = hall_witness(inst, t_max)
        if witness is not None:
            return MatchOutcome(
                status="witness",
                hall_set=witness,
                hall_neighbors=_neighbor_count(inst, witness, float(QuadNum.of(t_max))),
                threshold=float(QuadNum.of(t_max)),
            )
    logger.debug(f"bottleneck matching of {len(pairs)} pairs: t = {t}")
    return MatchOutcome(status="perfect", bottleneck_t=t, matching=pairs)


def _neighbor_count(inst: MatchInstance, subset: Sequence[Point], t: float) -> int:
    left = np.array([[float(x) for x in p] for p in subset], dtype=float).reshape(len(subset), -1)
    _, right = inst.coordinates()
    return int((cdist(left, right) <= t).any(axis=0).sum())


def hall_witness(inst: MatchInstance, t: ScalarLike) -> Optional[list[Point]]:
    """A left set with fewer neighbours than members at threshold `t`, or `None` if every left point
    can be matched. Built from the vertices reachable by alternating paths from unmatched left vertices.
    """
    if not inst.left:
        return None
    left, right = inst.coordinates()
    threshold = float(QuadNum.of(t))
    adjacency = cdist(left, right) <= threshold if len(right) else np.zeros((len(left), 0), dtype=bool)
    if len(right):
        matching = maximum_bipartite_matching(csr_matrix(adjacency), perm_type="column")
    else:
        matching = np.full(len(left), -1)
    if not (matching == -1).any():
        return None
    right_mate = np.full(len(right), -1)
    for i, j in enumerate(matching):
        if j >= 0:
            right_mate[j] = i
    reached = set(np.flatnonzero(matching == -1).tolist())
    queue = deque(reached)
    seen_right: set[int] = set()
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(adjacency[i]):
            if j in seen_right:
                continue
            seen_right.add(int(j))
            mate = int(right_mate[j])
            if mate >= 0 and mate not in reached:
                reached.add(mate)
                queue.append(mate)
    return [inst.left[i] for i in sorted(reached)]


def _verdict(ratios: Sequence[Number]) -> Verdict:
    values = [float(r) for r in ratios]
    first = next((v for v in values if v > 0), None)
    if first is None or not values[-1] > GROWTH_FACTOR * first:
        return "ratios bounded"
    increases, running = 0, values[0]
    for v in values[1:]:
        if v > running:
            increases += 1
            running = v
    return "ratios grow" if increases >= GROWTH_STEPS else "ratios bounded"


def non_bd_ratio(
    S1: PointSource,
    S2: PointSource,
    seq: Sequence[Region],
    van_hove_threshold: float = VAN_HOVE_THRESHOLD,
) -> NonBDEvidence:
    """`|#(S1 & A_i) - #(S2 & A_i)| / mu(A_i^{+1})` along a van Hove sequence, with a growth verdict.

    Growing ratios are evidence that the two sets are not bounded-distance
    equivalent; bounded ratios are no evidence either way.

    A sequence whose final tube ratio misses `van_hove_threshold` is still
    accepted when that ratio has decayed below `VAN_HOVE_DECAY` times the first
    one; the miss is kept as `van_hove_shortfall`.

    Raises:
        InvalidParameterError: `seq` fails both the absolute and the decay check.
    """
    diagnostics = van_hove_check(seq, [1], van_hove_threshold)
    shortfall = None
    if not diagnostics.passed:
        decay = van_hove_check(seq, [1], VAN_HOVE_DECAY, relative=True)
        if not decay.passed:
            raise InvalidParameterError(f"region sequence is not van Hove: {diagnostics.failure}")
        shortfall = diagnostics.failure
        logger.warning(f"van Hove shortfall over {len(seq)} regions: {shortfall}")
    ratios: list[tuple[int, Number]] = []
    for i, A in enumerate(seq, start=1):
        difference = abs(S1.count_in(A) - S2.count_in(A))
        tube = tube_measure(A, 1).value
        ratio: Number = QuadNum(difference) / tube if isinstance(tube, QuadNum) else difference / tube
        ratios.append((i, ratio))
    verdict = _verdict([r for _, r in ratios])
    logger.info(f"{S1.spec} vs {S2.spec} over {len(seq)} regions: {verdict}")
    return NonBDEvidence(ratios=ratios, verdict=verdict, van_hove=diagnostics, van_hove_shortfall=shortfall)


def lattice_bd_scan(
    S: PointSource,
    rho: ScalarLike,
    c: ScalarLike,
    windows: Sequence[Region],
    candidate_budget: Optional[int] = None,
) -> LatticeScanVerdict:
    """Search the windows for a region of deviance ratio above `c`.

    A violation shows the source is not bounded-distance equivalent to a lattice
    of density `rho`; otherwise the largest ratio seen is reported.
    """
    c_ = QuadNum.of(c)
    sup: Union[QuadNum, float] = QuadNum(0)
    evaluated = 0
    for window in windows:
        scan = scan_deviance(S, rho, window, candidate_budget)
        evaluated += scan.evaluated
        if scan.best is None:
            continue
        ratio = scan.best.ratio
        if float(ratio) > float(sup):
            sup = ratio
        if exceeds(ratio, c_):
            logger.info(f"lattice criterion violated on {scan.best.region.to_literal()}")
            return LatticeScanVerdict(
                violated=True, c=c_, region=scan.best.region, report=scan.best, sup_ratio=ratio, evaluated=evaluated
            )
    return LatticeScanVerdict(violated=False, c=c_, sup_ratio=sup, evaluated=evaluated)
