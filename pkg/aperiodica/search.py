"""
Constructive searches over one-dimensional point sources.

Candidate intervals have their endpoints at midpoints between consecutive
points, where the count is locally constant, so a scan over a window is
complete. With `F(t) = (t + 1) - rho * m_t` for the midpoint `m_t` after the
point of index `t`, the discrepancy of `[m_a, m_b]` is `F(b) - F(a)`; a running
minimum and maximum of `F` give the best interval ending at every midpoint in
one pass. Floats only screen candidates: every returned region is re-evaluated
exactly.
"""
from fractions import Fraction
from typing import Literal, Optional, Sequence, Union

import numpy as np

from aperiodica.discrepancy import DiscrepancyReport, Number, discrepancy_report, exceeds, report_from_count
from aperiodica.errors import (
    DimensionMismatchError,
    InternalInvariantError,
    InvalidParameterError,
    NotFoundError,
    NotRepetitiveError,
)
from aperiodica.geometry import Region, tube_measure
from aperiodica.model import Record
from aperiodica.pointsets import PointSource, Sample, occurrences
from aperiodica.scalar import QuadNum, ScalarLike
from aperiodica.utils import logger

MIN_CANDIDATE_LENGTH = 8
SHIFT_GRID_POINTS = 101
FLOAT_TIE = 1e-9
MAX_TIE_CANDIDATES = 64

Prefer = Literal["max", "first"]
RobustMethod = Literal["lemma", "scan"]


class ConstantsTable(Record):
    d: int
    r: Number
    R: Number
    eta: QuadNum
    eta_prime: QuadNum
    q: Number


class DeviantFind(Record):
    region: Region
    report: DiscrepancyReport
    c_requested: Number
    c_achieved: Number
    sign: int
    evaluated: int = 0
    verification: Optional["ShiftVerification"] = None


class ScanResult(Record):
    window: Region
    best: Optional[DiscrepancyReport] = None
    best_positive: Optional[DiscrepancyReport] = None
    best_negative: Optional[DiscrepancyReport] = None
    sup_ratio: Number = QuadNum(0)
    evaluated: int = 0
    truncated: bool = False


class OppositeTranslate(Record):
    shift: QuadNum
    original: DiscrepancyReport
    report: DiscrepancyReport
    candidates: int


class ShiftVerification(Record):
    region: Region
    c: Number
    ell: QuadNum
    shifts_checked: int
    worst_shift: QuadNum
    worst_ratio: Number
    passed: bool


class RepetitivityEstimate(Record):
    radius: QuadNum
    occurrences: int
    lower_bound: bool = True


DeviantFind.update_forward_refs(ShiftVerification=ShiftVerification)


def _require_1d(S: PointSource, *regions: Region) -> None:
    if S.dimension != 1 or any(E.dimension != 1 for E in regions):
        raise DimensionMismatchError("interval searches are one-dimensional")


def _positive(value: ScalarLike, name: str) -> QuadNum:
    v = QuadNum.of(value)
    if v.sign() <= 0:
        raise InvalidParameterError(f"{name} must be positive: {v}")
    return v


def derive_constants(S: PointSource) -> ConstantsTable:
    """Packing and covering constants of a source and the shift-bound factor `q = 2 (eta'/r^d)(1 + 2^d)`.

    In dimension one the balls are intervals of length `2r` and `2R`, so
    `eta = eta' = 1/2`. In dimension two the cube tiling of side `2R` and the
    disjoint `r`-balls give `eta = 1/8` and `eta' = 1/3`.
    """
    r, R = S.r_param, S.R_param
    d = S.dimension
    if d == 1:
        eta, eta_prime = QuadNum(Fraction(1, 2)), QuadNum(Fraction(1, 2))
    elif d == 2:
        eta, eta_prime = QuadNum(Fraction(1, 8)), QuadNum(Fraction(1, 3))
    else:
        raise InvalidParameterError(f"constants are derived for d <= 2, got {d}")
    q: Number
    if isinstance(r, QuadNum):
        q = 2 * (eta_prime / r**d) * (1 + 2**d)
    else:
        q = 2 * (float(eta_prime) / float(r) ** d) * (1 + 2**d)
    return ConstantsTable(d=d, r=r, R=R, eta=eta, eta_prime=eta_prime, q=q)


class _MidpointProfile:
    """Midpoints of a sample and the running extremes of `F`."""

    def __init__(self, sample: Sample, rho: QuadNum, budget: Optional[int], min_length: QuadNum) -> None:
        coords = sample.coords
        self.sample = sample
        self.rho = rho
        mids = (coords[:-1] + coords[1:]) / 2
        self.truncated = budget is not None and budget < len(mids)
        if self.truncated:
            mids = mids[:budget]
        self.mids = mids
        self.F = np.arange(1, len(mids) + 1) - float(rho) * mids
        idx = np.searchsorted(mids, mids - float(min_length), side="right") - 1
        self.valid = idx >= 0
        self.left = np.where(self.valid, idx, 0)
        self.min_length = min_length
        positions = np.arange(len(mids))
        if len(mids):
            running_min = np.minimum.accumulate(self.F)
            running_max = np.maximum.accumulate(self.F)
            new_min = np.r_[True, self.F[1:] < running_min[:-1]]
            new_max = np.r_[True, self.F[1:] > running_max[:-1]]
            self.argmin = np.maximum.accumulate(np.where(new_min, positions, 0))
            self.argmax = np.maximum.accumulate(np.where(new_max, positions, 0))
            self.gain = np.where(self.valid, self.F - running_min[self.left], -np.inf)
            self.loss = np.where(self.valid, running_max[self.left] - self.F, -np.inf)
        else:
            self.argmin = self.argmax = positions
            self.gain = self.loss = np.zeros(0)

    def __len__(self) -> int:
        return len(self.mids)

    def midpoint(self, t: int) -> QuadNum:
        return (self.sample.exact_at(t) + self.sample.exact_at(t + 1)) / 2

    def report(self, b: int, positive: bool) -> Optional[DiscrepancyReport]:
        """Exact report of the best interval ending at midpoint `b`."""
        if not self.valid[b]:
            return None
        a = int(self.argmin[self.left[b]] if positive else self.argmax[self.left[b]])
        lo, hi = self.midpoint(a), self.midpoint(int(b))
        if hi - lo < self.min_length:
            return None
        return report_from_count(Region.interval(lo, hi), int(b) - a, self.rho)


def _better(candidate: DiscrepancyReport, incumbent: Optional[DiscrepancyReport]) -> bool:
    """Larger ratio first, then the leftmost left endpoint, then the shortest region."""
    if incumbent is None:
        return True
    if exceeds(candidate.ratio, incumbent.ratio):
        return True
    if exceeds(incumbent.ratio, candidate.ratio):
        return False
    (clo, chi), (ilo, ihi) = candidate.region.components[0], incumbent.region.components[0]
    return (clo, chi) < (ilo, ihi)


def _best_of(profile: _MidpointProfile, values: np.ndarray, positive: bool) -> Optional[DiscrepancyReport]:
    if len(values) == 0 or not np.isfinite(values.max()):
        return None
    top = values.max()
    ties = np.flatnonzero(values >= top - FLOAT_TIE)[:MAX_TIE_CANDIDATES]
    best: Optional[DiscrepancyReport] = None
    for b in ties:
        rep = profile.report(int(b), positive)
        if rep is not None and _better(rep, best):
            best = rep
    return best


def scan_deviance(
    S: PointSource,
    rho: ScalarLike,
    scan_window: Region,
    budget: Optional[int] = None,
    min_length: ScalarLike = MIN_CANDIDATE_LENGTH,
) -> ScanResult:
    """Exact scan of every midpoint-aligned interval of length at least `min_length` in the window.

    Args:
        S: a 1D source.
        rho: the density used for expected counts.
        scan_window: the window; each component is scanned separately.
        budget: number of midpoints scanned per component, all when `None`.
        min_length: the candidate size floor, at least 2 so that `mu(E^{+1}) = 4`.

    Returns:
        The best positive, best negative and overall best candidates with the sup ratio.
    """
    _require_1d(S, scan_window)
    rho_ = _positive(rho, "density")
    floor = QuadNum.of(min_length)
    if floor < 2:
        raise InvalidParameterError(f"candidate length floor must be at least 2, got {floor}")
    best_pos: Optional[DiscrepancyReport] = None
    best_neg: Optional[DiscrepancyReport] = None
    evaluated = 0
    truncated = False
    for lo, hi in scan_window.components:
        profile = _MidpointProfile(S.sample(lo, hi), rho_, budget, floor)
        evaluated += len(profile)
        truncated = truncated or profile.truncated
        pos = _best_of(profile, profile.gain, positive=True)
        neg = _best_of(profile, profile.loss, positive=False)
        if pos is not None and pos.sign > 0 and _better(pos, best_pos):
            best_pos = pos
        if neg is not None and neg.sign < 0 and _better(neg, best_neg):
            best_neg = neg
    candidates = [rep for rep in (best_pos, best_neg) if rep is not None]
    best: Optional[DiscrepancyReport] = None
    for rep in candidates:
        if _better(rep, best):
            best = rep
    logger.debug(
        f"scan of {scan_window.to_literal()}: {evaluated} midpoints, "
        f"sup ratio {float(best.ratio) if best else 0.0:.6g}"
    )
    return ScanResult(
        window=scan_window,
        best=best,
        best_positive=best_pos,
        best_negative=best_neg,
        sup_ratio=best.ratio if best is not None else QuadNum(0),
        evaluated=evaluated,
        truncated=truncated,
    )


def _first_exceeding(profile: _MidpointProfile, c: QuadNum) -> Optional[DiscrepancyReport]:
    threshold = 4 * float(c) - FLOAT_TIE
    hits = np.flatnonzero((profile.gain > threshold) | (profile.loss > threshold))
    for b in hits:
        for positive in (True, False):
            rep = profile.report(int(b), positive)
            if rep is not None and exceeds(rep.ratio, c):
                return rep
    return None


def find_deviant(
    S: PointSource,
    rho: ScalarLike,
    c: ScalarLike,
    scan_window: Region,
    budget: Optional[int] = None,
    min_length: ScalarLike = MIN_CANDIDATE_LENGTH,
    prefer: Prefer = "max",
) -> Optional[DeviantFind]:
    """A `c`-deviant midpoint-aligned interval inside the window.

    `prefer="max"` returns the candidate of largest ratio, `prefer="first"` the one
    whose right endpoint comes first. Returns `None` when no candidate exceeds `c`.
    """
    _require_1d(S, scan_window)
    c_ = _positive(c, "deviance constant")
    rho_ = _positive(rho, "density")
    evaluated = 0
    found: Optional[DiscrepancyReport] = None
    if prefer == "first":
        for lo, hi in scan_window.components:
            profile = _MidpointProfile(S.sample(lo, hi), rho_, budget, QuadNum.of(min_length))
            evaluated += len(profile)
            found = _first_exceeding(profile, c_)
            if found is not None:
                break
    else:
        scan = scan_deviance(S, rho_, scan_window, budget, min_length)
        evaluated = scan.evaluated
        if scan.best is not None and exceeds(scan.best.ratio, c_):
            found = scan.best
        else:
            logger.info(f"no {c_}-deviant region in {scan_window.to_literal()}, sup ratio {float(scan.sup_ratio):.6g}")
    if found is None:
        return None
    logger.debug(f"{c_}-deviant region {found.region.to_literal()} with ratio {float(found.ratio):.6g}")
    return DeviantFind(
        region=found.region,
        report=found,
        c_requested=c_,
        c_achieved=found.ratio,
        sign=found.sign,
        evaluated=evaluated,
    )


def _shifted_counts(sample: Sample, E: Region, shifts: np.ndarray) -> np.ndarray:
    """Float-screened counts of `E - s` for every shift `s`."""
    counts = np.zeros(len(shifts), dtype=np.int64)
    for lo, hi in E.components:
        left = np.searchsorted(sample.coords, float(lo) - shifts, side="left")
        right = np.searchsorted(sample.coords, float(hi) - shifts, side="right")
        counts += right - left
    return counts


def _exact_count(sample: Sample, E: Region) -> int:
    return sum(sample.count_between(lo, hi) for lo, hi in E.components)


def find_opposite_translate(S: PointSource, rho: ScalarLike, E: Region, scan_window: Region) -> OppositeTranslate:
    """The translation `x` of smallest `|x|` such that `E - x` inside the window has discrepancy of
    opposite sign to `E`, or zero.

    Raises:
        InvalidParameterError: the discrepancy of `E` is zero.
        NotFoundError: no such translate inside the window; the message carries the count profile.
    """
    _require_1d(S, E, scan_window)
    rho_ = _positive(rho, "density")
    original = discrepancy_report(S, rho_, E)
    if original.sign == 0:
        raise InvalidParameterError(f"region {E.to_literal()} has zero discrepancy")
    (e_lo, _), (_, e_hi) = E.components[0], E.components[-1]
    (w_lo, _), (_, w_hi) = scan_window.components[0], scan_window.components[-1]
    # E - s inside the window
    s_min, s_max = e_hi - w_hi, e_lo - w_lo
    if s_max < s_min:
        raise NotFoundError(f"region {E.to_literal()} does not fit in {scan_window.to_literal()}")
    sample = S.sample(w_lo, w_hi)
    coords = sample.coords
    endpoints = [p for lo, hi in E.components for p in (lo, hi)]
    events = np.concatenate([float(p) - coords for p in endpoints])
    sources = np.concatenate(
        [np.stack([np.full(len(coords), j), np.arange(len(coords))], axis=1) for j in range(len(endpoints))]
    )
    inside = (events >= float(s_min) - 1e-9) & (events <= float(s_max) + 1e-9)
    events, sources = events[inside], sources[inside]
    order = np.argsort(events, kind="stable")
    events, sources = events[order], sources[order]

    def exact_event(i: int) -> QuadNum:
        j, k = sources[i]
        return endpoints[int(j)] - sample.exact_at(int(k))

    # candidates: every event and the midpoint between neighbouring events, nearest to zero first
    mids = (events[:-1] + events[1:]) / 2
    shifts = np.concatenate([events, mids])
    kinds = np.concatenate([np.arange(len(events)), -1 - np.arange(len(mids))])
    order = np.lexsort((shifts, np.abs(shifts)))
    shifts, kinds = shifts[order], kinds[order]
    counts = _shifted_counts(sample, E, shifts)
    expected = float(original.expected)
    qualifies = (counts - expected) * original.sign <= 1e-9
    for i in np.flatnonzero(qualifies):
        kind = int(kinds[i])
        s = exact_event(kind) if kind >= 0 else (exact_event(-1 - kind) + exact_event(-kind)) / 2
        if not s or s < s_min or s > s_max:
            continue
        moved = E.translate(-s)
        report = report_from_count(moved, _exact_count(sample, moved), rho_)
        if report.sign * original.sign <= 0:
            logger.debug(f"opposite translate of {E.to_literal()}: shift {s}, discrepancy sign {report.sign}")
            return OppositeTranslate(shift=s, original=original, report=report, candidates=int(i) + 1)
    profile = f"counts in [{counts.min() if len(counts) else 0}, {counts.max() if len(counts) else 0}]"
    raise NotFoundError(f"no opposite translate of {E.to_literal()} in {scan_window.to_literal()}: {profile}")


def balancing_translates(
    S: PointSource, rho: ScalarLike, E: Region, scan_window: Region
) -> tuple[QuadNum, QuadNum]:
    """Shifts `x_le`, `x_ge` with `#(S & (E - x_le)) <= rho mu(E) <= #(S & (E - x_ge))`."""
    rep = discrepancy_report(S, rho, E)
    if rep.sign == 0:
        return QuadNum(0), QuadNum(0)
    other = find_opposite_translate(S, rho, E, scan_window).shift
    return (other, QuadNum(0)) if rep.sign > 0 else (QuadNum(0), other)


def _shift_candidates(sample: Sample, E: Region, ell: QuadNum) -> list[QuadNum]:
    """Every count-distinct shift `x` in `[-ell, ell]` of `E + x`: crossing events, points between them,
    the extremes and zero, plus a uniform grid."""
    shifts = {QuadNum(0), ell, -ell}
    for k in range(SHIFT_GRID_POINTS):
        shifts.add(-ell + 2 * ell * Fraction(k, SHIFT_GRID_POINTS - 1))
    for lo, hi in E.components:
        for bound in (lo, hi):
            first = sample.lower_index(bound - ell)
            last = sample.upper_index(bound + ell)
            for k in range(first, last):
                shifts.add(sample.exact_at(k) - bound)
    ordered = sorted(s for s in shifts if -ell <= s <= ell)
    return sorted(set(ordered) | {(a + b) / 2 for a, b in zip(ordered, ordered[1:])})


def verify_shifts(
    S: PointSource, rho: ScalarLike, E: Region, c: ScalarLike, ell: ScalarLike, sample: Optional[Sample] = None
) -> ShiftVerification:
    """Check `E + x` is `c`-deviant for every count-distinct shift `|x| <= ell`."""
    _require_1d(S, E)
    ell_ = _positive(ell, "shift radius")
    rho_ = _positive(rho, "density")
    (lo, _), (_, hi) = E.components[0], E.components[-1]
    if sample is None:
        sample = S.sample(lo - ell_ - 1, hi + ell_ + 1)
    worst_ratio: Optional[Number] = None
    worst_shift = QuadNum(0)
    shifts = _shift_candidates(sample, E, ell_)
    for x in shifts:
        moved = E.translate(x)
        rep = report_from_count(moved, _exact_count(sample, moved), rho_)
        if worst_ratio is None or exceeds(worst_ratio, rep.ratio):
            worst_ratio, worst_shift = rep.ratio, x
    assert worst_ratio is not None
    return ShiftVerification(
        region=E,
        c=QuadNum.of(c),
        ell=ell_,
        shifts_checked=len(shifts),
        worst_shift=worst_shift,
        worst_ratio=worst_ratio,
        passed=exceeds(worst_ratio, c),
    )


def _window_extremes(sample: Sample, centers: np.ndarray, ell: float, rho: float) -> tuple[np.ndarray, np.ndarray]:
    """Bounds below and above `N(t) - rho t` and `N(t-) - rho t` on `[m - ell, m + ell]` for every center `m`.

    `N` counts the sample's points up to `t`. Between points both functions
    decrease, so their extremes sit next to a point or at an end of the window.
    """
    coords = sample.coords
    before = np.arange(len(coords)) - rho * coords
    lo, hi = centers - ell, centers + ell
    starts = np.searchsorted(coords, lo, side="left")
    stops = np.searchsorted(coords, hi, side="right")
    bounds = np.column_stack([starts, stops]).ravel()
    empty = stops <= starts
    low = np.where(empty, np.inf, np.minimum.reduceat(np.append(before, np.inf), bounds)[::2])
    high = np.where(empty, -np.inf, np.maximum.reduceat(np.append(before + 1, -np.inf), bounds)[::2])
    at_lo = np.searchsorted(coords, lo, side="right") - rho * lo
    before_hi = np.searchsorted(coords, hi, side="left") - rho * hi
    return np.minimum(low, before_hi), np.maximum(high, at_lo)


def _robust_order(profile: _MidpointProfile, low: np.ndarray, high: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right ends ranked by a lower bound on their deviance under every shift, and the left end for each.

    Over shifts up to `ell` the interval `[m_a, m_b]` keeps discrepancy at least
    `low[b] - high[a]` and at most `high[b] - low[a]`.
    """
    positions = np.arange(len(profile))
    running_high = np.minimum.accumulate(high)
    running_low = np.maximum.accumulate(low)
    arg_high = np.maximum.accumulate(np.where(np.r_[True, high[1:] < running_high[:-1]], positions, 0))
    arg_low = np.maximum.accumulate(np.where(np.r_[True, low[1:] > running_low[:-1]], positions, 0))
    left = profile.left
    gain = np.where(profile.valid, low - running_high[left], -np.inf)
    loss = np.where(profile.valid, running_low[left] - high, -np.inf)
    partner = np.where(gain > loss, arg_high[left], arg_low[left])
    values = np.maximum(gain, loss)
    order = np.argsort(-values, kind="stable")
    return order[np.isfinite(values[order])], partner


def find_shift_robust_deviant(
    S: PointSource,
    rho: ScalarLike,
    c: ScalarLike,
    ell: ScalarLike,
    scan_window: Region,
    budget: Optional[int] = None,
    method: RobustMethod = "lemma",
    min_length: ScalarLike = MIN_CANDIDATE_LENGTH,
    max_candidates: int = 256,
) -> Optional[DeviantFind]:
    """A region that stays `c`-deviant under every shift of norm at most `ell`.

    `method="lemma"` asks `find_deviant` for a `(c + q ell^d)`-deviant region and
    verifies it; `method="scan"` ranks midpoint-aligned candidates by a lower
    bound on their discrepancy under every shift, then verifies at most
    `max_candidates` of those whose own ratio exceeds `c`, returning the first
    whose worst shifted ratio also does.

    Raises:
        InternalInvariantError: a `(c + q ell^d)`-deviant region fails the shift check.
    """
    _require_1d(S, scan_window)
    c_, ell_ = _positive(c, "deviance constant"), _positive(ell, "shift radius")
    rho_ = _positive(rho, "density")
    if method == "lemma":
        q = derive_constants(S).q
        target = c_ + q * ell_ if isinstance(q, QuadNum) else c_ + QuadNum.of(float(q)) * ell_
        found = find_deviant(S, rho_, target, scan_window, budget, min_length)
        if found is None:
            return None
        verification = verify_shifts(S, rho_, found.region, c_, ell_)
        if not verification.passed:
            raise InternalInvariantError(
                f"{target}-deviant region {found.region.to_literal()} has shift {verification.worst_shift} "
                f"with ratio {float(verification.worst_ratio):.6g} <= {c_}"
            )
        return found.copy(update={"verification": verification, "c_requested": c_})
    if method != "scan":
        raise InvalidParameterError(f"unknown robust search method: {method}")
    evaluated = 0
    threshold = 4 * float(c_) - FLOAT_TIE
    for lo, hi in scan_window.components:
        (inner_lo, inner_hi) = (lo + ell_, hi - ell_)
        if not inner_lo < inner_hi:
            continue
        sample = S.sample(lo, hi)
        profile = _MidpointProfile(S.sample(inner_lo, inner_hi), rho_, budget, QuadNum.of(min_length))
        evaluated += len(profile)
        if not len(profile):
            continue
        low, high = _window_extremes(sample, profile.mids, float(ell_), float(rho_))
        order, partner = _robust_order(profile, low, high)
        order = order[np.abs(profile.F[order] - profile.F[partner[order]]) > threshold]
        tried = 0
        for b in order:
            if tried >= max_candidates:
                break
            a = int(partner[b])
            start, stop = profile.midpoint(a), profile.midpoint(int(b))
            if stop - start < profile.min_length:
                continue
            rep = report_from_count(Region.interval(start, stop), int(b) - a, rho_)
            if not exceeds(rep.ratio, c_):
                continue
            tried += 1
            verification = verify_shifts(S, rho_, rep.region, c_, ell_, sample=sample)
            if verification.passed:
                logger.debug(
                    f"shift-robust region {rep.region.to_literal()} after {tried} candidates: "
                    f"worst ratio {float(verification.worst_ratio):.6g}"
                )
                return DeviantFind(
                    region=rep.region,
                    report=rep,
                    c_requested=c_,
                    c_achieved=rep.ratio,
                    sign=rep.sign,
                    evaluated=evaluated,
                    verification=verification,
                )
    logger.info(f"no shift-robust {c_}-deviant region at ell={ell_} in {scan_window.to_literal()}")
    return None


def repetitivity_radius(
    S: PointSource,
    patch_support: Region,
    scan_window: Region,
    patch_points: Optional[Sequence[QuadNum]] = None,
) -> RepetitivityEstimate:
    """Half the largest gap between consecutive occurrences of a patch inside the window.

    The patch defaults to the points of `S` in `patch_support`. The radius is a
    lower-bound estimate: occurrences outside the window are not seen.

    Raises:
        NotRepetitiveError: the patch has no occurrence other than one inside the window.
    """
    _require_1d(S, patch_support, scan_window)
    if patch_points is None:
        patch_points = [p[0] for p in S.enumerate(patch_support)]
    if not patch_points:
        raise InvalidParameterError(f"patch {patch_support.to_literal()} holds no points")
    found = occurrences(S, patch_support, patch_points, scan_window)
    if len(found) <= 1:
        raise NotRepetitiveError(
            f"patch on {patch_support.to_literal()} does not recur inside {scan_window.to_literal()}"
        )
    radius = max(b - a for a, b in zip(found, found[1:])) / 2
    logger.debug(f"repetitivity radius of {patch_support.to_literal()}: {radius} from {len(found)} occurrences")
    return RepetitivityEstimate(radius=radius, occurrences=len(found))


def shift_bound_holds(S: PointSource, E: Region, x: ScalarLike, ell: ScalarLike, q: Union[QuadNum, float]) -> bool:
    """`|#((E + x) & S) - #(E & S)| <= q ell^d mu(E^{+1})` for `|x| <= ell`, exactly in 1D."""
    x_, ell_ = QuadNum.of(x), QuadNum.of(ell)
    if abs(x_) > ell_:
        raise InvalidParameterError(f"shift {x_} exceeds ell {ell_}")
    difference = abs(S.count_in(E.translate(x_)) - S.count_in(E))
    tube = tube_measure(E, 1).value
    if isinstance(q, QuadNum) and isinstance(tube, QuadNum):
        return QuadNum(difference) <= q * ell_**E.dimension * tube
    return difference <= float(q) * float(ell_) ** E.dimension * float(tube) * (1 + 1e-12)

