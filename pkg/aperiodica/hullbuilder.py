"""
Nested deviant/normal patch towers indexed by words over `{D, N}`.

Level 1 takes a `c_1`-deviant interval `D'` and an opposite translate
`N' = D' - y`. Every later level takes a region that stays `c_{i+1}`-deviant
under all shifts up to `ell_{i+1}`, its opposite translate, and embeds the
previous level's patch inside the selected region near its center. Patches are
stored in tower coordinates: level `i` holds `(S & R_i) - offset_i`, so the
levels nest as plain sets.
"""
import math
from pathlib import Path
from typing import Optional, Sequence, Union

from pydantic import ValidationError, validator

from aperiodica.discrepancy import (
    DiscrepancyReport,
    Number,
    discrepancy_report,
    exceeds,
    inscribed_radii_increasing,
    largest_inscribed_ball,
    van_hove_check,
)
from aperiodica.errors import (
    InvalidParameterError,
    NotFoundError,
    NotRepetitiveError,
    PartialTowerError,
)
from aperiodica.geometry import Region, tube_measure
from aperiodica.model import Record
from aperiodica.pointsets import PointSource, build_source, occurrences
from aperiodica.scalar import QuadNum, ScalarLike
from aperiodica.search import (
    MIN_CANDIDATE_LENGTH,
    RobustMethod,
    ShiftVerification,
    find_deviant,
    find_opposite_translate,
    find_shift_robust_deviant,
    repetitivity_radius,
)
from aperiodica.typing import Letter
from aperiodica.utils import logger

ELL_MARGIN = 1
DISTINGUISH_SLACK = QuadNum(9) / 10
ALPHABET = frozenset("DN")


class WordPrefix(Record):
    letters: str

    @validator("letters")
    def _over_alphabet(cls, v: str) -> str:
        if not v or not set(v) <= ALPHABET:
            raise ValueError(f"a word is a nonempty string over D and N, got {v!r}")
        return v

    def __len__(self) -> int:
        return len(self.letters)

    def letter(self, i: int) -> Letter:
        """The letter of level `i`, counted from 1."""
        return "D" if self.letters[i - 1] == "D" else "N"


class TowerBudget(Record):
    """Scan windows start at `window_length` and grow by `growth` until they pass `max_window`."""

    window_start: int = 0
    window_length: int = 1_000
    growth: int = 10
    max_window: int = 1_000_000
    scan_budget: Optional[int] = None
    robust_method: RobustMethod = "scan"
    robust_candidates: int = 64
    repetitivity_factor: int = 20
    max_depth: int = 3

    @validator("growth")
    def _growing(cls, v: int) -> int:
        if v < 2:
            raise ValueError(f"window growth must be at least 2, got {v}")
        return v

    @validator("max_window")
    def _capped_above_start(cls, v: int, values: dict) -> int:
        if "window_length" in values and v < values["window_length"]:
            raise ValueError(f"window cap {v} is below the first window length {values['window_length']}")
        return v


class TowerLevel(Record):
    index: int
    kind: Letter
    support: Region
    offset: QuadNum
    points: list[QuadNum]
    c_level: QuadNum
    ell_level: Optional[QuadNum] = None
    deviant_region: Region
    normal_region: Region
    deviant_report: DiscrepancyReport
    normal_report: DiscrepancyReport
    verification: Optional[ShiftVerification] = None

    @property
    def region(self) -> Region:
        """The selected region in source coordinates."""
        return self.support.translate(self.offset)


class PatchTower(Record):
    source: str
    rho: QuadNum
    word: WordPrefix
    c_seq: list[QuadNum]
    levels: list[TowerLevel]
    repetitivity: list[QuadNum] = []
    failure_level: Optional[int] = None
    failure_reason: Optional[str] = None

    @property
    def complete(self) -> bool:
        return self.failure_level is None and len(self.levels) == len(self.word)

    @property
    def depth(self) -> int:
        return len(self.levels)


class HullElementWindow(Record):
    points: list[QuadNum]
    support: Region
    recentering: QuadNum
    word: WordPrefix
    depth: int


class TowerCheck(Record):
    name: str
    passed: bool
    detail: str = ""


class DistinguishEvidence(Record):
    level: int
    letters: tuple[Letter, Letter]
    overlay_shift: QuadNum
    count_deviant: int
    count_normal: int
    tube1: Number
    ratio: Number
    c: QuadNum
    shift_bound: QuadNum
    within_shift_bound: bool
    passed: bool


def _windows(budget: TowerBudget, min_length: QuadNum) -> list[Region]:
    """Growing scan windows up to the cap, each at least four times `min_length` long."""
    floor = math.ceil(float(min_length)) * 4
    lengths: list[int] = []
    length = budget.window_length
    while length <= budget.max_window:
        size = max(length, floor)
        if size <= budget.max_window and (not lengths or size > lengths[-1]):
            lengths.append(size)
        length *= budget.growth
    return [Region.interval(budget.window_start, budget.window_start + n) for n in lengths]


def _widened(window: Region) -> Region:
    (lo, hi) = window.components[0]
    return Region.interval(lo - (hi - lo), hi + (hi - lo))


def _nearest_point(S: PointSource, region: Region) -> QuadNum:
    """The source point nearest the centroid of `region`, the leftmost on ties."""
    (lo, hi) = region.components[0]
    centroid = (lo + hi) / 2
    points = S.sample(lo, hi).points()
    if not points:
        raise NotFoundError(f"region {region.to_literal()} holds no source point")
    return min(points, key=lambda p: (abs(p - centroid), p))


def _patch(S: PointSource, region: Region, offset: QuadNum) -> list[QuadNum]:
    (lo, hi) = region.components[0]
    return [p - offset for p in S.sample(lo, hi).points()]


def _repetitivity(S: PointSource, region: Region, budget: TowerBudget) -> Optional[QuadNum]:
    """Repetitivity radius of the patch on `region`, or None when no search window fits under the cap.

    Raises:
        NotRepetitiveError: the patch does not recur in any window under the cap.
    """
    (lo, hi) = region.components[0]
    length = hi - lo
    center = (lo + hi) / 2
    tried = False
    k = 0
    while float(length) * budget.repetitivity_factor * budget.growth**k <= budget.max_window:
        half = length * budget.repetitivity_factor * budget.growth**k / 2
        tried = True
        k += 1
        try:
            return repetitivity_radius(S, region, Region.interval(center - half, center + half)).radius
        except NotRepetitiveError:
            continue
    if not tried:
        return None
    raise NotRepetitiveError(f"patch on {region.to_literal()} of {S.spec} does not recur at the tested scales")


def _embed(
    S: PointSource, previous: TowerLevel, region: Region, ell: QuadNum
) -> Optional[QuadNum]:
    """Occurrence of the previous patch inside `region` nearest its ball center, within `ell / 2`."""
    ball = largest_inscribed_ball(region)
    center = ball.center[0]
    (slo, shi) = previous.support.components[0]
    candidates = occurrences(S, previous.support, previous.points, region)
    best: Optional[QuadNum] = None
    for x in candidates:
        distance = abs((slo + shi) / 2 + x - center)
        if distance <= ell / 2 and (best is None or distance < abs((slo + shi) / 2 + best - center)):
            best = x
    return best


def _partial(tower: PatchTower, level: int, reason: str) -> PatchTower:
    logger.info(f"tower {tower.word.letters} stops at level {level}: {reason}")
    return tower.copy(update={"failure_level": level, "failure_reason": reason})


def build_tower(
    S: PointSource,
    word: Union[WordPrefix, str],
    c_seq: Sequence[ScalarLike],
    budget: Optional[TowerBudget] = None,
    rho: Optional[ScalarLike] = None,
) -> PatchTower:
    """Build the patch tower of `word`, one level per letter.

    A search that finds nothing inside its windows ends the tower early: the
    result is a partial tower naming the failed level and the reason.

    Raises:
        InvalidParameterError: malformed word or constants, or no density.
        NotRepetitiveError: a level patch never recurs at the tested scales.
    """
    budget = budget or TowerBudget()
    if not isinstance(word, WordPrefix):
        try:
            word = WordPrefix(letters=word)
        except ValidationError as e:
            raise InvalidParameterError(f"invalid word {word!r}") from e
    constants = [QuadNum.of(c) for c in c_seq]
    if len(constants) < len(word):
        raise InvalidParameterError(f"word of length {len(word)} needs as many constants, got {len(constants)}")
    if any(not a < b for a, b in zip(constants, constants[1:])):
        raise InvalidParameterError("deviance constants must increase strictly")
    if len(word) > budget.max_depth:
        raise InvalidParameterError(f"depth {len(word)} exceeds the configured maximum {budget.max_depth}")
    if rho is None:
        if S.density_value is None:
            raise InvalidParameterError(f"source {S.spec} has no exact density; pass rho")
        rho = S.density_value
    rho_ = QuadNum.of(rho)
    tower = PatchTower(source=S.spec, rho=rho_, word=word, c_seq=constants, levels=[])

    # level 1
    c1 = constants[0]
    found = None
    window = None
    for window in _windows(budget, QuadNum(MIN_CANDIDATE_LENGTH)):
        found = find_deviant(S, rho_, c1, window, budget.scan_budget, prefer="first")
        if found is not None:
            break
    if found is None or window is None:
        return _partial(tower, 1, f"no {c1}-deviant region within windows up to {budget.max_window}")
    try:
        opposite = find_opposite_translate(S, rho_, found.region, _widened(window))
    except NotFoundError as e:
        return _partial(tower, 1, str(e))
    x1 = _nearest_point(S, found.region)
    normal_region = found.region.translate(-opposite.shift)
    offset = x1 if word.letter(1) == "D" else x1 - opposite.shift
    selected = found.region if word.letter(1) == "D" else normal_region
    level = TowerLevel(
        index=1,
        kind=word.letter(1),
        support=selected.translate(-offset),
        offset=offset,
        points=_patch(S, selected, offset),
        c_level=c1,
        deviant_region=found.region,
        normal_region=normal_region,
        deviant_report=found.report,
        normal_report=opposite.report,
    )
    tower = tower.copy(update={"levels": [level]})
    logger.debug(f"tower {word.letters} level 1: {selected.to_literal()} with {len(level.points)} points")

    for i in range(2, len(word) + 1):
        previous = tower.levels[-1]
        measured = [_repetitivity(S, previous.deviant_region, budget), _repetitivity(S, previous.normal_region, budget)]
        radii = [r for r in measured if r is not None]
        if len(radii) < len(measured):
            return _partial(tower, i, f"level {i - 1} patches need recurrence windows beyond {budget.max_window}")
        ell = 2 * max(radii) + ELL_MARGIN
        (slo, shi) = previous.support.components[0]
        min_length = 2 * ((shi - slo) + ell)
        c = constants[i - 1]
        robust = None
        for window in _windows(budget, min_length):
            robust = find_shift_robust_deviant(
                S,
                rho_,
                c,
                ell,
                window,
                budget.scan_budget,
                method=budget.robust_method,
                min_length=min_length,
                max_candidates=budget.robust_candidates,
            )
            if robust is not None:
                break
        if robust is None or window is None:
            reason = f"no shift-robust {c}-deviant region within windows up to {budget.max_window}"
            return _partial(tower.copy(update={"repetitivity": radii}), i, reason)
        try:
            opposite = find_opposite_translate(S, rho_, robust.region, _widened(window))
        except NotFoundError as e:
            return _partial(tower, i, str(e))
        normal_region = robust.region.translate(-opposite.shift)
        selected = robust.region if word.letter(i) == "D" else normal_region
        x = _embed(S, previous, selected, ell)
        if x is None:
            return _partial(tower, i, f"level {i - 1} patch does not occur within {ell}/2 of the center")
        level = TowerLevel(
            index=i,
            kind=word.letter(i),
            support=selected.translate(-x),
            offset=x,
            points=_patch(S, selected, x),
            c_level=c,
            ell_level=ell,
            deviant_region=robust.region,
            normal_region=normal_region,
            deviant_report=robust.report,
            normal_report=opposite.report,
            verification=robust.verification,
        )
        tower = tower.copy(update={"levels": [*tower.levels, level], "repetitivity": [*tower.repetitivity, *radii]})
        logger.debug(f"tower {word.letters} level {i}: {selected.to_literal()} with {len(level.points)} points")
    return tower


def emit_hull_element(t: PatchTower) -> HullElementWindow:
    """The top patch recentered so that the largest ball of its support is centered at the origin.

    Raises:
        PartialTowerError: the tower stopped before its declared depth.
    """
    if not t.complete:
        raise PartialTowerError(f"tower {t.word.letters} is partial, failed at level {t.failure_level}")
    top = t.levels[-1]
    center = largest_inscribed_ball(top.support).center[0]
    return HullElementWindow(
        points=[p - center for p in top.points],
        support=top.support.translate(-center),
        recentering=center,
        word=t.word,
        depth=t.depth,
    )


def distinguish(tu: PatchTower, tv: PatchTower, i: int) -> DistinguishEvidence:
    """Count-difference evidence between two towers at a level where their words differ.

    The D-side support is moved onto the N-side support by aligning the centers
    of their largest balls; counts are taken through the source. The evidence only
    passes when that overlay moves by at most the level's `ell` (1 at level 1).

    Raises:
        InvalidParameterError: different sources or constants, a missing level, or equal letters at `i`.
    """
    if tu.source != tv.source or tu.c_seq != tv.c_seq:
        raise InvalidParameterError("towers must share source and deviance constants")
    if i < 1 or i > min(tu.depth, tv.depth):
        raise InvalidParameterError(f"level {i} is not built in both towers")
    lu, lv = tu.levels[i - 1], tv.levels[i - 1]
    if lu.kind == lv.kind:
        raise InvalidParameterError(f"words agree at letter {i}")
    deviant, normal = (lu, lv) if lu.kind == "D" else (lv, lu)
    S = build_source(tu.source)
    shift = largest_inscribed_ball(normal.support).center[0] - largest_inscribed_ball(deviant.support).center[0]
    overlay = deviant.support.translate(shift)
    count_d = S.count_in(deviant.region)
    count_n = S.count_in(overlay.translate(normal.offset))
    tube = tube_measure(overlay, 1).value
    ratio: Number = (
        abs(QuadNum(count_d - count_n)) / tube if isinstance(tube, QuadNum) else abs(count_d - count_n) / tube
    )
    c = tu.c_seq[i - 1]
    bound = max(lu.ell_level or QuadNum(ELL_MARGIN), lv.ell_level or QuadNum(ELL_MARGIN))
    within = abs(shift) <= bound
    if not within:
        logger.warning(f"distinguish at level {i}: overlay shift {float(shift):.6g} exceeds ell = {float(bound):.6g}")
    passed = within and exceeds(ratio, DISTINGUISH_SLACK * c)
    logger.info(f"distinguish at level {i}: counts {count_d} vs {count_n}, ratio {float(ratio):.6g}, c = {c}")
    return DistinguishEvidence(
        level=i,
        letters=(lu.kind, lv.kind),
        overlay_shift=shift,
        count_deviant=count_d,
        count_normal=count_n,
        tube1=tube,
        ratio=ratio,
        c=c,
        shift_bound=bound,
        within_shift_bound=within,
        passed=passed,
    )


def verify_tower(t: PatchTower, S: Optional[PointSource] = None) -> list[TowerCheck]:
    """Re-check a tower against its source: patches, nesting, letters, deviance and the support trends."""
    S = S or build_source(t.source)
    checks: list[TowerCheck] = []
    for level in t.levels:
        recount = _patch(S, level.region, level.offset)
        checks.append(TowerCheck(name=f"points[{level.index}]", passed=recount == level.points))
        checks.append(TowerCheck(name=f"kind[{level.index}]", passed=level.kind == t.word.letter(level.index)))
        deviant = discrepancy_report(S, t.rho, level.deviant_region)
        normal = discrepancy_report(S, t.rho, level.normal_region)
        checks.append(
            TowerCheck(
                name=f"deviant[{level.index}]",
                passed=exceeds(deviant.ratio, level.c_level),
                detail=f"ratio {float(deviant.ratio):.6g}",
            )
        )
        checks.append(
            TowerCheck(
                name=f"opposite[{level.index}]",
                passed=deviant.sign * normal.sign <= 0,
                detail=f"signs {deviant.sign} and {normal.sign}",
            )
        )
    for lower, upper in zip(t.levels, t.levels[1:]):
        nested = set(lower.points) <= set(upper.points) and upper.support.contains_region(lower.support)
        checks.append(TowerCheck(name=f"nested[{lower.index}]", passed=nested))
    supports = [level.support for level in t.levels]
    if len(supports) >= 2:
        trend = van_hove_check(supports, [1], threshold=1.0, relative=True)
        checks.append(TowerCheck(name="van_hove", passed=trend.passed, detail=trend.failure or ""))
        checks.append(TowerCheck(name="inscribed_radii", passed=inscribed_radii_increasing(supports)))
    return checks


def load_tower(path: Union[str, Path]) -> PatchTower:
    """Read a tower written by `PatchTower.to_json` and recheck its patches against the source.

    Raises:
        InvalidParameterError: a stored patch differs from the source's points.
    """
    tower = PatchTower.parse_file(path)
    S = build_source(tower.source)
    for level in tower.levels:
        if _patch(S, level.region, level.offset) != level.points:
            raise InvalidParameterError(f"{path}: level {level.index} points differ from {tower.source}")
    return tower
