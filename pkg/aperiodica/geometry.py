"""
Region algebra for finite disjoint unions of axis-aligned boxes.

Measures are exact. Tube measures `mu(E^{+eps})`, with `E^{+eps}` the set of points
within Euclidean distance `eps` of the boundary of `E`, are exact for every 1D
region (union of endpoint intervals) and analytic for a single box in any
dimension (Steiner formula for the dilation minus the eroded box). Other unions
fall back to an adaptive grid with a bracketing error bound.
"""
import itertools
import math
import re
from typing import Iterator, Optional, Sequence, Union

import numpy as np
from pydantic import root_validator

from aperiodica.errors import DimensionMismatchError, InvalidParameterError, InvalidRegionError, LiteralParseError
from aperiodica.model import Record
from aperiodica.scalar import ONE, QuadNum, ScalarLike, format_scalar, parse_scalar
from aperiodica.typing import Point, SupportsLiteral, Vector, as_point
from aperiodica.utils import logger

# a 1e-6 bracket needs cells near 2e-6 wide, past the cell budget for two small squares
GRID_RELATIVE_TOLERANCE = 1e-4
GRID_CELL_BUDGET = 10**7
STEINER_RELATIVE_TOLERANCE = 1e-9


class Box(SupportsLiteral):
    __slots__ = ("lo", "hi")

    lo: Point
    hi: Point

    def __init__(self, lo: Sequence[ScalarLike], hi: Sequence[ScalarLike]) -> None:
        lo_, hi_ = as_point(lo), as_point(hi)
        if len(lo_) != len(hi_) or not lo_:
            raise DimensionMismatchError(f"box corners differ in dimension: {len(lo_)} != {len(hi_)}")
        for k, (a, b) in enumerate(zip(lo_, hi_)):
            if not a < b:
                raise InvalidRegionError(f"empty box on axis {k}: [{a}, {b}]")
        object.__setattr__(self, "lo", lo_)
        object.__setattr__(self, "hi", hi_)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Box is immutable")

    def __reduce__(self) -> tuple[type, tuple[Point, Point]]:
        return Box, (self.lo, self.hi)

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> tuple[QuadNum, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    @property
    def center(self) -> Point:
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))

    def volume(self) -> QuadNum:
        result = ONE
        for side in self.sides:
            result = result * side
        return result

    def translate(self, x: Vector) -> "Box":
        return Box([a + t for a, t in zip(self.lo, x)], [b + t for b, t in zip(self.hi, x)])

    def scaled(self, s: QuadNum) -> "Box":
        return Box([a * s for a in self.lo], [b * s for b in self.hi])

    def contains(self, point: Point) -> bool:
        return all(a <= p <= b for a, p, b in zip(self.lo, point, self.hi))

    def meets(self, other: "Box") -> bool:
        return all(a <= d and c <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def to_literal(self) -> str:
        return "x".join(f"[{format_scalar(a)},{format_scalar(b)}]" for a, b in zip(self.lo, self.hi))

    @classmethod
    def from_literal(cls, text: str) -> "Box":
        boxes = parse_region(text).boxes
        if len(boxes) != 1:
            raise LiteralParseError(f"not a single box: {text!r}")
        return boxes[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Box):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f'Box("{self.to_literal()}")'


class Region(SupportsLiteral):
    """A finite union of pairwise disjoint closed boxes of one dimension, in canonical (sorted) order."""

    __slots__ = ("boxes", "dimension")

    boxes: tuple[Box, ...]
    dimension: int

    def __init__(self, boxes: Sequence[Box], dimension: Optional[int] = None) -> None:
        if not boxes and dimension is None:
            raise InvalidRegionError("an empty region needs an explicit dimension")
        dim = dimension if dimension is not None else boxes[0].dimension
        if any(box.dimension != dim for box in boxes):
            raise DimensionMismatchError(f"all boxes of a region must have dimension {dim}")
        ordered = tuple(sorted(boxes, key=lambda box: box.lo))
        if dim == 1:
            for left, right in zip(ordered, ordered[1:]):
                if not left.hi[0] < right.lo[0]:
                    raise InvalidRegionError(f"intervals are not disjoint: {left.to_literal()} {right.to_literal()}")
        else:
            for i, j in itertools.combinations(range(len(ordered)), 2):
                if ordered[i].meets(ordered[j]):
                    raise InvalidRegionError(
                        f"boxes are not disjoint: {ordered[i].to_literal()} {ordered[j].to_literal()}"
                    )
        object.__setattr__(self, "boxes", ordered)
        object.__setattr__(self, "dimension", dim)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Region is immutable")

    def __reduce__(self) -> tuple[type, tuple[tuple[Box, ...], int]]:
        return Region, (self.boxes, self.dimension)

    @classmethod
    def interval(cls, lo: ScalarLike, hi: ScalarLike) -> "Region":
        return cls([Box([lo], [hi])])

    @classmethod
    def intervals(cls, *pairs: tuple[ScalarLike, ScalarLike]) -> "Region":
        return cls([Box([lo], [hi]) for lo, hi in pairs], dimension=1)

    @classmethod
    def box(cls, lo: Sequence[ScalarLike], hi: Sequence[ScalarLike]) -> "Region":
        return cls([Box(lo, hi)])

    @property
    def components(self) -> list[tuple[QuadNum, QuadNum]]:
        """The `(lo, hi)` pairs of a 1D region, left to right."""
        self._require_1d()
        return [(box.lo[0], box.hi[0]) for box in self.boxes]

    @property
    def gaps(self) -> list[QuadNum]:
        return [b[0] - a[1] for a, b in zip(self.components, self.components[1:])]

    def measure(self) -> QuadNum:
        return sum((box.volume() for box in self.boxes), start=QuadNum(0))

    def translate(self, x: Union[Vector, ScalarLike]) -> "Region":
        vector = _as_vector(x, self.dimension)
        return Region([box.translate(vector) for box in self.boxes], dimension=self.dimension)

    def scaled(self, s: ScalarLike) -> "Region":
        factor = QuadNum.of(s)
        if factor.sign() <= 0:
            raise InvalidParameterError(f"scale factor must be positive: {factor}")
        return Region([box.scaled(factor) for box in self.boxes], dimension=self.dimension)

    def bounding_box(self) -> Box:
        if not self.boxes:
            raise InvalidRegionError("empty region has no bounding box")
        lo = [min(box.lo[k] for box in self.boxes) for k in range(self.dimension)]
        hi = [max(box.hi[k] for box in self.boxes) for k in range(self.dimension)]
        return Box(lo, hi)

    def contains(self, point: Union[Point, ScalarLike]) -> bool:
        p = _as_vector(point, self.dimension)
        return any(box.contains(p) for box in self.boxes)

    def contains_region(self, other: "Region") -> bool:
        """Whether every box of `other` lies inside a single box of this region."""
        return all(any(_box_inside(b, a) for a in self.boxes) for b in other.boxes)

    def to_literal(self) -> str:
        return "u".join(box.to_literal() for box in self.boxes)

    @classmethod
    def from_literal(cls, text: str) -> "Region":
        return parse_region(text)

    def __iter__(self) -> Iterator[Box]:
        return iter(self.boxes)

    def __len__(self) -> int:
        return len(self.boxes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Region):
            return NotImplemented
        return self.dimension == other.dimension and self.boxes == other.boxes

    def __hash__(self) -> int:
        return hash((self.dimension, self.boxes))

    def __repr__(self) -> str:
        return f'Region("{self.to_literal()}")'

    def _require_1d(self) -> None:
        if self.dimension != 1:
            raise DimensionMismatchError(f"operation needs a 1D region, got dimension {self.dimension}")


def _box_inside(inner: Box, outer: Box) -> bool:
    return all(a <= c and d <= b for a, b, c, d in zip(outer.lo, outer.hi, inner.lo, inner.hi))


def _as_vector(x: Union[Vector, ScalarLike], dimension: int) -> Vector:
    if isinstance(x, (tuple, list)):
        vector = as_point(x)
    else:
        vector = (QuadNum.of(x),)
    if len(vector) != dimension:
        raise DimensionMismatchError(f"vector of dimension {len(vector)} used with dimension {dimension}")
    return vector


class TubeMeasureResult(Record):
    value: Union[QuadNum, float]
    exact: bool
    error_bound: float = 0.0
    kernel: str

    @root_validator(skip_on_failure=True)
    def _exact_has_no_error(cls, values: dict) -> dict:
        if values["exact"] and values["error_bound"] != 0:
            raise ValueError("an exact tube measure carries no error bound")
        return values

    @property
    def upper(self) -> float:
        return float(self.value) + self.error_bound

    @property
    def lower(self) -> float:
        return float(self.value) - self.error_bound


def measure(E: Region) -> QuadNum:
    return E.measure()


def translate(E: Region, x: Union[Vector, ScalarLike]) -> Region:
    return E.translate(x)


def _merge(intervals: Sequence[tuple[QuadNum, QuadNum]]) -> list[tuple[QuadNum, QuadNum]]:
    merged: list[tuple[QuadNum, QuadNum]] = []
    for lo, hi in sorted(intervals, key=lambda iv: iv[0]):
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def tube_intervals(E: Region, eps: ScalarLike) -> list[tuple[QuadNum, QuadNum]]:
    """The tube `E^{+eps}` of a 1D region as merged closed intervals around its endpoints."""
    e = QuadNum.of(eps)
    endpoints = [p for lo, hi in E.components for p in (lo, hi)]
    return _merge([(p - e, p + e) for p in endpoints])


def _interval_tube(E: Region, eps: QuadNum) -> TubeMeasureResult:
    total = sum((hi - lo for lo, hi in tube_intervals(E, eps)), start=QuadNum(0))
    return TubeMeasureResult(value=total, exact=True, kernel="interval")


def ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _elementary_symmetric(values: Sequence[float]) -> list[float]:
    coefficients = [1.0]
    for v in values:
        coefficients = [a + v * b for a, b in zip(coefficients + [0.0], [0.0] + coefficients)]
    return coefficients


def steiner_tube(box: Box, eps: float) -> float:
    """`vol(box + B_eps) - vol(box - B_eps)` for a single box, any dimension."""
    sides = [float(s) for s in box.sides]
    d = len(sides)
    e = _elementary_symmetric(sides)
    dilation = sum(e[k] * ball_volume(d - k) * eps ** (d - k) for k in range(d + 1))
    erosion = math.prod(max(s - 2 * eps, 0.0) for s in sides)
    return dilation - erosion


def boundary_distance(E: Region, points: np.ndarray) -> np.ndarray:
    """Euclidean distance from each row of `points` to the boundary of a union of disjoint boxes."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    result = np.full(pts.shape[0], np.inf)
    for box in E.boxes:
        center = np.array([float(c) for c in box.center])
        half = np.array([float(s) / 2 for s in box.sides])
        q = np.abs(pts - center) - half
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
        inside = np.minimum(q.max(axis=1), 0.0)
        result = np.minimum(result, np.abs(outside + inside))
    return result


def _grid_tube(
    E: Region,
    eps: float,
    relative_tolerance: float = GRID_RELATIVE_TOLERANCE,
    cell_budget: int = GRID_CELL_BUDGET,
) -> TubeMeasureResult:
    d = E.dimension
    bbox = E.bounding_box()
    lo = np.array([float(a) for a in bbox.lo]) - eps
    hi = np.array([float(b) for b in bbox.hi]) + eps
    h = eps / 2
    axes = [np.arange(a + h / 2, b + h / 2, h) for a, b in zip(lo, hi)]
    centers = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    offsets = np.array(list(itertools.product((-1.0, 1.0), repeat=d)))
    inside = 0.0
    processed = 0
    upper = math.inf
    while True:
        cell = h**d
        half_diagonal = h * math.sqrt(d) / 2
        dist = np.concatenate(
            [boundary_distance(E, chunk) for chunk in np.array_split(centers, max(1, len(centers) // 2**20))]
        )
        processed += len(centers)
        full = dist + half_diagonal <= eps
        ambiguous = ~full & (dist - half_diagonal <= eps)
        inside += float(full.sum()) * cell
        upper = inside + float(ambiguous.sum()) * cell
        estimate = (inside + upper) / 2
        error = (upper - inside) / 2
        if error <= relative_tolerance * estimate or processed + int(ambiguous.sum()) * 2**d > cell_budget:
            break
        centers = (centers[ambiguous][:, None, :] + offsets[None, :, :] * (h / 4)).reshape(-1, d)
        h /= 2
    logger.debug(f"grid tube measure: {processed} cells, estimate {estimate}, error {error}")
    return TubeMeasureResult(value=estimate, exact=False, error_bound=error, kernel="grid")


def tube_measure(E: Region, eps: ScalarLike) -> TubeMeasureResult:
    """Measure of the `eps`-tube of the boundary of `E`.

    Args:
        E: a region.
        eps: tube radius, positive.

    Returns:
        Exact `QuadNum` value for 1D regions, an analytic float for a single box,
        otherwise a grid estimate carrying its error bound.

    Raises:
        InvalidParameterError: `eps <= 0`.
    """
    e = QuadNum.of(eps)
    if e.sign() <= 0:
        raise InvalidParameterError(f"tube radius must be positive: {e}")
    if not E.boxes:
        return TubeMeasureResult(value=QuadNum(0), exact=True, kernel="interval")
    if E.dimension == 1:
        return _interval_tube(E, e)
    if len(E.boxes) == 1:
        return TubeMeasureResult(value=steiner_tube(E.boxes[0], float(e)), exact=True, kernel="steiner")
    return _grid_tube(E, float(e))


def monte_carlo_tube_measure(
    E: Region, eps: ScalarLike, n_samples: int, rng: np.random.Generator, chunk: int = 2**20
) -> TubeMeasureResult:
    """Unbiased sampling estimate of the tube measure with a three-sigma error bound."""
    e = float(QuadNum.of(eps))
    bbox = E.bounding_box()
    lo = np.array([float(a) for a in bbox.lo]) - e
    hi = np.array([float(b) for b in bbox.hi]) + e
    volume = float(np.prod(hi - lo))
    hits = 0
    remaining = n_samples
    while remaining > 0:
        n = min(chunk, remaining)
        points = rng.uniform(lo, hi, size=(n, E.dimension))
        hits += int((boundary_distance(E, points) <= e).sum())
        remaining -= n
    p = hits / n_samples
    sigma = volume * math.sqrt(p * (1 - p) / n_samples)
    return TubeMeasureResult(value=volume * p, exact=False, error_bound=3 * sigma, kernel="monte_carlo")


def _rectangle_points(x0: float, y0: float, x1: float, y1: float, s: np.ndarray) -> np.ndarray:
    """Points at arc length `s` along the rectangle boundary, counterclockwise from `(x0, y0)`."""
    w, h = x1 - x0, y1 - y0
    s = np.mod(s, 2 * (w + h))
    edges = [s < w, s < w + h, s < 2 * w + h]
    x = np.select(edges, [x0 + s, np.full_like(s, x1), x1 - (s - w - h)], x0)
    y = np.select(edges, [np.full_like(s, y0), y0 + s - w, np.full_like(s, y1)], y1 - (s - 2 * w - h))
    return np.stack([x, y], axis=1)


def _rounded_rectangle_points(x0: float, y0: float, x1: float, y1: float, l: float, s: np.ndarray) -> np.ndarray:
    """Points at arc length `s` along the curve at distance `l` outside a rectangle, counterclockwise from
    `(x0, y0 - l)`: four edges joined by quarter circles around the corners."""
    quarter = math.pi * l / 2
    ends = np.cumsum([x1 - x0, quarter, y1 - y0, quarter, x1 - x0, quarter, y1 - y0, quarter])
    s = np.mod(s, ends[-1])
    segment = np.minimum(np.searchsorted(ends, s, side="right"), 7)
    t = s - np.r_[0.0, ends[:-1]][segment]
    edges = [segment == 0, segment == 2, segment == 4, segment == 6]
    x = np.select(edges, [x0 + t, np.full_like(t, x1 + l), x1 - t, np.full_like(t, x0 - l)], 0.0)
    y = np.select(edges, [np.full_like(t, y0 - l), y0 + t, np.full_like(t, y1 + l), y1 - t], 0.0)
    corner = segment // 2
    centers = np.array([[x1, y0], [x1, y1], [x0, y1], [x0, y0]])
    angle = np.array([-math.pi / 2, 0.0, math.pi / 2, math.pi])[corner] + t / l
    arc = segment % 2 == 1
    x = np.where(arc, centers[corner, 0] + l * np.cos(angle), x)
    y = np.where(arc, centers[corner, 1] + l * np.sin(angle), y)
    return np.stack([x, y], axis=1)


def _offset_curve_grid(box: Box, l: float, n: int) -> np.ndarray:
    """Evenly spaced points at distance `l` from the boundary of a 2D box, `n` outside and `n // 2` inside."""
    (x0, y0), (x1, y1) = [float(v) for v in box.lo], [float(v) for v in box.hi]
    perimeter = 2 * (x1 - x0 + y1 - y0) + 2 * math.pi * l
    out = _rounded_rectangle_points(x0, y0, x1, y1, l, (np.arange(n) + 0.5) * perimeter / n)
    ix0, iy0, ix1, iy1 = x0 + l, y0 + l, x1 - l, y1 - l
    inner_perimeter = 2 * (ix1 - ix0 + iy1 - iy0)
    m = n // 2
    if m and ix0 <= ix1 and iy0 <= iy1 and inner_perimeter > 0:
        inner = _rectangle_points(ix0, iy0, ix1, iy1, (np.arange(m) + 0.5) * inner_perimeter / m)
        out = np.concatenate([out, inner])
    return out


def _disc_grid(r: float, n: int) -> np.ndarray:
    """About `n` vectors of norm at most `r`: concentric rings out to `r`, each with equally spaced directions."""
    rings = max(1, round(math.sqrt(n) / 5))
    per_ring = max(4, n // rings)
    radii = r * np.arange(1, rings + 1) / rings
    angle = 2 * math.pi * np.arange(per_ring) / per_ring
    vectors = radii[:, None, None] * np.stack([np.cos(angle), np.sin(angle)], axis=1)[None, :, :]
    return vectors.reshape(-1, 2)


def check_tube_inclusion(E: Region, l: ScalarLike, r: ScalarLike, n_samples: int = 10_000) -> bool:
    """Check `(E^{+l})^{+r}` lies inside `E^{+(l+r)}`.

    1D regions are decided exactly with interval algebra. 2D regions are
    checked on a grid of about `n_samples` points: evenly spaced points at
    distance `l` from the boundary of `E`, each moved by every vector of a
    polar grid of radius `r`, must stay within `l + r` of the boundary.
    """
    l_, r_ = QuadNum.of(l), QuadNum.of(r)
    if l_.sign() <= 0 or r_.sign() <= 0:
        raise InvalidParameterError(f"tube radii must be positive: l={l_}, r={r_}")
    if E.dimension == 1:
        inner = tube_intervals(E, l_)
        nested = _merge([(p - r_, p + r_) for lo, hi in inner for p in (lo, hi)])
        outer = tube_intervals(E, l_ + r_)
        return all(any(a <= lo and hi <= b for a, b in outer) for lo, hi in nested)
    if E.dimension != 2:
        raise InvalidParameterError(f"grid inclusion check supports d <= 2, got {E.dimension}")
    lf, rf = float(l_), float(r_)
    side = max(4, math.isqrt(n_samples))
    per_box = max(1, side // len(E.boxes))
    level = np.concatenate([_offset_curve_grid(box, lf, per_box) for box in E.boxes])
    level = level[boundary_distance(E, level) >= lf - 1e-9]
    if len(level) == 0:
        logger.info("tube inclusion check: no level-set points, inconclusive")
        return True
    moves = _disc_grid(rf, side)
    violations = 0
    for chunk in np.array_split(level, max(1, len(level) * len(moves) // 2**20)):
        samples = (chunk[:, None, :] + moves[None, :, :]).reshape(-1, 2)
        violations += int((boundary_distance(E, samples) > lf + rf + 1e-9).sum())
    logger.debug(f"tube inclusion check: {len(level)} x {len(moves)} grid points, {violations} counterexamples")
    return violations == 0


def check_tube_scaling(E: Region, l: ScalarLike) -> bool:
    """Check `mu(E^{+l}) <= l^d mu(E^{+1})` for `l >= 1`, folding in error bounds of estimated values."""
    l_ = QuadNum.of(l)
    if l_ < 1:
        raise InvalidParameterError(f"scaling check needs l >= 1, got {l_}")
    wide, unit = tube_measure(E, l_), tube_measure(E, 1)
    factor = l_**E.dimension
    if isinstance(wide.value, QuadNum) and isinstance(unit.value, QuadNum):
        return wide.value <= factor * unit.value
    bound = float(factor) * unit.upper
    return wide.lower <= bound * (1 + STEINER_RELATIVE_TOLERANCE)


_INTERVAL = re.compile(r"^\[([^,\[\]]+),([^,\[\]]+)\]$")


def parse_region(text: str) -> Region:
    """Parse region literals such as `[0,1]u[3,4]` or `[0,3]x[0,2]`; `x` binds tighter than `u`."""
    cleaned = text.strip().replace(" ", "")
    if not cleaned:
        raise LiteralParseError("empty region literal")
    boxes = []
    for term in cleaned.split("u"):
        lo, hi = [], []
        for factor in term.split("x"):
            match = _INTERVAL.match(factor)
            if match is None:
                raise LiteralParseError(f"invalid interval {factor!r} in region literal {text!r}")
            a, b = parse_scalar(match.group(1)), parse_scalar(match.group(2))
            lo.append(a)
            hi.append(b)
        boxes.append(Box(lo, hi))
    return Region(boxes)


def format_region(E: Region) -> str:
    return E.to_literal()


def centered_intervals(n: int) -> list[Region]:
    return [Region.interval(-i, i) for i in range(1, n + 1)]


def centered_boxes(n: int, d: int = 2) -> list[Region]:
    return [Region.box([-i] * d, [i] * d) for i in range(1, n + 1)]


def dyadic_family(n: int) -> list[Region]:
    """The intervals `[0, 2^i + 1]`, `i = 1..n`."""
    return [Region.interval(0, 2**i + 1) for i in range(1, n + 1)]


def fibonacci_windows(n: int) -> list[Region]:
    """The intervals `[0, F_k]` over the first `n` distinct Fibonacci numbers from 1."""
    windows, a, b = [], 1, 2
    for _ in range(n):
        windows.append(Region.interval(0, a))
        a, b = b, a + b
    return windows


FAMILIES = {
    "centered": centered_intervals,
    "Qi": dyadic_family,
    "fibonacci": fibonacci_windows,
}
