"""
Generators for the Delone sets under study, with exact coordinates.

A source enumerates its points inside any bounded region. One-dimensional
sources also hand out a `Sample`: the points of a window as a sorted float array
with exact access by index, so that large scans screen in floating point and
decide every boundary case exactly.
"""
import itertools
import math
from abc import ABCMeta
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, ClassVar, Iterator, Optional, Sequence, Union, no_type_check

import numpy as np
from scipy.spatial import cKDTree
from typing_extensions import override

from aperiodica.errors import (
    DimensionMismatchError,
    InsufficientDataError,
    InvalidParameterError,
    LiteralParseError,
)
from aperiodica.geometry import Region
from aperiodica.model import Record
from aperiodica.scalar import ONE, PHI, PHI_STAR, SQRT5, SQRT5_FLOAT, QuadNum, ScalarLike, format_scalar
from aperiodica.typing import Point, as_point
from aperiodica.utils import logger

BOUNDARY_SLACK = 1e-7
PHI_FLOAT = float(PHI)
PHI_STAR_FLOAT = float(PHI_STAR)

FIBONACCI_WINDOW = (QuadNum(-1), PHI - 1)
HALF_FIBONACCI_LEFT = (QuadNum(-1), PHI / 2 - 1)
HALF_FIBONACCI_RIGHT = (PHI / 2 - 1, PHI - 1)

ExactAt = Callable[[int], QuadNum]


def _lower_index(coords: np.ndarray, exact: ExactAt, bound: QuadNum) -> int:
    """First index whose point is `>= bound`."""
    b = float(bound)
    i = int(np.searchsorted(coords, b - BOUNDARY_SLACK, side="left"))
    while i < len(coords) and coords[i] <= b + BOUNDARY_SLACK and exact(i) < bound:
        i += 1
    return i


def _upper_index(coords: np.ndarray, exact: ExactAt, bound: QuadNum) -> int:
    """First index whose point is `> bound`."""
    b = float(bound)
    i = int(np.searchsorted(coords, b - BOUNDARY_SLACK, side="left"))
    while i < len(coords) and coords[i] <= b + BOUNDARY_SLACK and exact(i) <= bound:
        i += 1
    return i


class Sample:
    """The points of a 1D source inside the closed window `[lo, hi]`."""

    __slots__ = ("lo", "hi", "coords", "_exact", "_start")

    def __init__(self, lo: QuadNum, hi: QuadNum, coords: np.ndarray, exact: ExactAt) -> None:
        """`coords` must be sorted and `exact(i)` must return the exact value of `coords[i]`."""
        start = _lower_index(coords, exact, lo)
        stop = _upper_index(coords, exact, hi)
        self.lo, self.hi = lo, hi
        self.coords = coords[start:stop]
        self._exact = exact
        self._start = start

    def __len__(self) -> int:
        return len(self.coords)

    def exact_at(self, i: int) -> QuadNum:
        return self._exact(self._start + int(i))

    def lower_index(self, bound: QuadNum) -> int:
        return _lower_index(self.coords, self.exact_at, bound)

    def upper_index(self, bound: QuadNum) -> int:
        return _upper_index(self.coords, self.exact_at, bound)

    def count_between(self, a: QuadNum, b: QuadNum) -> int:
        """Exact number of points in `[a, b]`, for a query inside the sample window."""
        if b < a:
            return 0
        return max(0, self.upper_index(b) - self.lower_index(a))

    def points(self) -> list[QuadNum]:
        return [self.exact_at(i) for i in range(len(self))]


class SourceMeta(ABCMeta):
    __sources__: ClassVar[dict[str, type["PointSource"]]] = {}

    @no_type_check
    def __new__(metacls, name, bases, classdict, **kwds):
        cls = super().__new__(metacls, name, bases, classdict, **kwds)
        kind = classdict.get("kind")
        if kind is not None:
            metacls.__sources__[kind] = cls
        return cls

    def __getitem__(cls, kind: str) -> type["PointSource"]:
        try:
            return SourceMeta.__sources__[kind]
        except KeyError:
            raise InvalidParameterError(f"unknown source kind: {kind}") from None

    def __contains__(cls, kind: str) -> bool:
        return kind in SourceMeta.__sources__

    def __iter__(cls) -> Iterator[str]:
        return iter(SourceMeta.__sources__)


class PointSource(metaclass=SourceMeta):
    """A Delone set that enumerates its points inside bounded regions."""

    kind: ClassVar[Optional[str]] = None
    dimension: int
    spec: str

    @property
    def density_value(self) -> Optional[QuadNum]:
        """The exact density when it is known in closed form, else `None`."""
        return None

    @cached_property
    def delone_params(self) -> "DeloneEstimate":
        return estimate_delone_params(self, self.default_window())

    @property
    def r_param(self) -> Union[QuadNum, float]:
        return self.delone_params.r_est

    @property
    def R_param(self) -> Union[QuadNum, float]:
        return self.delone_params.R_est

    def default_window(self) -> Region:
        if self.dimension == 1:
            return Region.interval(-1000, 1000)
        return Region.box([-20] * self.dimension, [20] * self.dimension)

    def sample(self, lo: ScalarLike, hi: ScalarLike) -> Sample:
        if self.dimension != 1:
            raise DimensionMismatchError(f"samples are one-dimensional, source has dimension {self.dimension}")
        lo_, hi_ = QuadNum.of(lo), QuadNum.of(hi)
        coords, exact = self._candidates(float(lo_) - 1.0, float(hi_) + 1.0)
        return Sample(lo_, hi_, coords, exact)

    def _candidates(self, lo: float, hi: float) -> tuple[np.ndarray, ExactAt]:
        """Sorted float coordinates covering `[lo, hi]` with an exact accessor; extras are trimmed by `Sample`."""
        raise NotImplementedError

    def enumerate(self, E: Region) -> list[Point]:
        """The points of the set in `E`, sorted lexicographically."""
        self._check_dimension(E)
        if self.dimension == 1:
            return [(x,) for lo, hi in E.components for x in self.sample(lo, hi).points()]
        return sorted(p for box in E.boxes for p in self._box_points(box.lo, box.hi))

    def count_in(self, E: Region) -> int:
        self._check_dimension(E)
        if self.dimension == 1:
            return sum(len(self.sample(lo, hi)) for lo, hi in E.components)
        return sum(1 for box in E.boxes for _ in self._box_points(box.lo, box.hi))

    def _box_points(self, lo: Point, hi: Point) -> Iterator[Point]:
        raise NotImplementedError

    def _check_dimension(self, E: Region) -> None:
        if E.dimension != self.dimension:
            raise DimensionMismatchError(f"region of dimension {E.dimension} queried on a {self.dimension}D source")

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}("{self.spec}")'


def _axis_range(lo: QuadNum, hi: QuadNum, spacing: QuadNum, offset: QuadNum) -> range:
    return range(math.ceil((lo - offset) / spacing), math.floor((hi - offset) / spacing) + 1)


class Lattice(PointSource):
    """`spacing * Z^d + offset`."""

    kind = "lattice"

    def __init__(
        self,
        spacing: ScalarLike = 1,
        offset: Union[ScalarLike, Sequence[ScalarLike]] = 0,
        dimension: int = 1,
        spec: Optional[str] = None,
    ) -> None:
        self.spacing = QuadNum.of(spacing)
        if self.spacing.sign() <= 0:
            raise InvalidParameterError(f"lattice spacing must be positive: {self.spacing}")
        self.offset = as_point(offset) if isinstance(offset, (tuple, list)) else (QuadNum.of(offset),) * dimension
        if len(self.offset) != dimension:
            raise DimensionMismatchError(f"offset of dimension {len(self.offset)} for a {dimension}D lattice")
        self.dimension = dimension
        self.spec = spec or f"lattice:a={format_scalar(self.spacing)},t={format_scalar(self.offset[0])}"

    @property
    def density_value(self) -> QuadNum:
        return ONE / self.spacing**self.dimension

    @cached_property
    def delone_params(self) -> "DeloneEstimate":
        half = self.spacing / 2
        covering: Union[QuadNum, float] = half if self.dimension == 1 else float(half) * math.sqrt(self.dimension)
        return DeloneEstimate(r_est=half, R_est=covering, points=0, estimate=False)

    @override
    def _candidates(self, lo: float, hi: float) -> tuple[np.ndarray, ExactAt]:
        a, t = self.spacing, self.offset[0]
        k0 = math.floor((lo - float(t)) / float(a))
        k1 = math.ceil((hi - float(t)) / float(a))
        ks = np.arange(k0, k1 + 1)
        return ks * float(a) + float(t), lambda i: a * (k0 + i) + t

    @override
    def count_in(self, E: Region) -> int:
        self._check_dimension(E)
        total = 0
        for box in E.boxes:
            ranges = [_axis_range(l, h, self.spacing, t) for l, h, t in zip(box.lo, box.hi, self.offset)]
            total += math.prod(len(r) for r in ranges)
        return total

    @override
    def _box_points(self, lo: Point, hi: Point) -> Iterator[Point]:
        ranges = [_axis_range(l, h, self.spacing, t) for l, h, t in zip(lo, hi, self.offset)]
        for ks in itertools.product(*ranges):
            yield tuple(self.spacing * k + t for k, t in zip(ks, self.offset))


class Periodic(PointSource):
    """A motif repeated over `spacing * Z^d`; motif points lie in `[0, spacing)^d`."""

    kind = "periodic"

    def __init__(
        self,
        spacing: ScalarLike,
        motif: Sequence[Union[ScalarLike, Sequence[ScalarLike]]],
        dimension: int = 1,
        spec: Optional[str] = None,
    ) -> None:
        self.spacing = QuadNum.of(spacing)
        self.motif = sorted(as_point(m) if isinstance(m, (tuple, list)) else (QuadNum.of(m),) for m in motif)
        if not self.motif:
            raise InvalidParameterError("periodic source needs a nonempty motif")
        for m in self.motif:
            if len(m) != dimension:
                raise DimensionMismatchError(f"motif point {m} in a {dimension}D periodic source")
            if not all(0 <= x < self.spacing for x in m):
                raise InvalidParameterError(f"motif point outside the fundamental cell: {m}")
        if len(set(self.motif)) != len(self.motif):
            raise InvalidParameterError("motif points must be distinct")
        self.dimension = dimension
        self._layers = [Lattice(self.spacing, m, dimension) for m in self.motif]
        motif_literal = ";".join(format_scalar(m[0]) for m in self.motif)
        self.spec = spec or f"periodic:a={format_scalar(self.spacing)},motif={motif_literal}"

    @property
    def density_value(self) -> QuadNum:
        return QuadNum(len(self.motif)) / self.spacing**self.dimension

    @cached_property
    def delone_params(self) -> "DeloneEstimate":
        if self.dimension != 1:
            return estimate_delone_params(self, self.default_window())
        xs = [m[0] for m in self.motif] + [self.motif[0][0] + self.spacing]
        gaps = [b - a for a, b in zip(xs, xs[1:])]
        return DeloneEstimate(r_est=min(gaps) / 2, R_est=max(gaps) / 2, points=0, estimate=False)

    @override
    def _candidates(self, lo: float, hi: float) -> tuple[np.ndarray, ExactAt]:
        parts = [layer._candidates(lo, hi) for layer in self._layers]
        coords = np.concatenate([c for c, _ in parts])
        layer = np.concatenate([np.full(len(c), j) for j, (c, _) in enumerate(parts)])
        local = np.concatenate([np.arange(len(c)) for c, _ in parts])
        order = np.argsort(coords, kind="stable")
        return coords[order], lambda i: parts[layer[order[i]]][1](int(local[order[i]]))

    @override
    def count_in(self, E: Region) -> int:
        return sum(layer.count_in(E) for layer in self._layers)

    @override
    def _box_points(self, lo: Point, hi: Point) -> Iterator[Point]:
        for layer in self._layers:
            yield from layer._box_points(lo, hi)


class ExampleL(PointSource):
    """The integers together with the points `1/2 + 2^n`, `n >= 0`."""

    kind = "example_L"
    dimension = 1
    spec = "exampleL"

    @property
    def density_value(self) -> QuadNum:
        return ONE

    @cached_property
    def delone_params(self) -> "DeloneEstimate":
        return DeloneEstimate(r_est=QuadNum(Fraction(1, 4)), R_est=QuadNum(Fraction(1, 2)), points=0, estimate=False)

    @override
    def _candidates(self, lo: float, hi: float) -> tuple[np.ndarray, ExactAt]:
        integers = np.arange(math.floor(lo), math.ceil(hi) + 1, dtype=float)
        extras = [0.5 + 2.0**n for n in range(0, max(0, math.ceil(math.log2(max(hi, 1.0)))) + 2)]
        coords = np.sort(np.concatenate([integers, np.array(extras)]))
        # every coordinate is an integer or a half-integer, exact in binary floating point
        return coords, lambda i: QuadNum(Fraction(float(coords[i])))


class CutProject1D(PointSource):
    """`{m + n*phi : m + n*phi* in [window_lo, window_hi)}` with the golden ratio `phi`."""

    kind = "cut_project_1d"
    dimension = 1

    def __init__(self, window_lo: ScalarLike, window_hi: ScalarLike, spec: Optional[str] = None) -> None:
        self.window_lo, self.window_hi = QuadNum.of(window_lo), QuadNum.of(window_hi)
        if not self.window_lo < self.window_hi:
            raise InvalidParameterError(f"empty window [{self.window_lo}, {self.window_hi})")
        self.spec = spec or f"cp:lo={format_scalar(self.window_lo)},hi={format_scalar(self.window_hi)}"

    @property
    def density_value(self) -> QuadNum:
        return (self.window_hi - self.window_lo) / SQRT5

    def accepts(self, m: int, n: int) -> bool:
        """Exact window test for the lattice point `(m, n)`."""
        internal = QuadNum(m + Fraction(n, 2), Fraction(-n, 2))
        return self.window_lo <= internal < self.window_hi

    @staticmethod
    def point(m: int, n: int) -> QuadNum:
        return QuadNum(m + Fraction(n, 2), Fraction(n, 2))

    @override
    def _candidates(self, lo: float, hi: float) -> tuple[np.ndarray, ExactAt]:
        wlo, whi = float(self.window_lo), float(self.window_hi)
        n = np.arange(math.floor((lo - whi) / SQRT5_FLOAT) - 1, math.ceil((hi - wlo) / SQRT5_FLOAT) + 2, dtype=np.int64)
        span = math.ceil(whi - wlo) + 2
        base = np.floor(wlo - n * PHI_STAR_FLOAT).astype(np.int64) - 1
        m = (base[:, None] + np.arange(span + 1, dtype=np.int64)[None, :]).ravel()
        nn = np.repeat(n, span + 1)
        internal = m + nn * PHI_STAR_FLOAT
        keep = (internal > wlo - BOUNDARY_SLACK) & (internal < whi + BOUNDARY_SLACK)
        border = keep & ((np.abs(internal - wlo) <= BOUNDARY_SLACK) | (np.abs(internal - whi) <= BOUNDARY_SLACK))
        for j in np.flatnonzero(border):
            keep[j] = self.accepts(int(m[j]), int(nn[j]))
        m, nn = m[keep], nn[keep]
        coords = m + nn * PHI_FLOAT
        order = np.argsort(coords, kind="stable")
        m, nn, coords = m[order], nn[order], coords[order]
        return coords, lambda i: self.point(int(m[i]), int(nn[i]))


class Substitution1D(PointSource):
    """Left endpoints of the tiling of `[0, total)` by the tiles of an iterated substitution word."""

    kind = "substitution_1d"
    dimension = 1

    def __init__(
        self,
        rules: dict[str, str],
        lengths: dict[str, ScalarLike],
        seed: str,
        depth: int,
        spec: Optional[str] = None,
    ) -> None:
        if seed not in rules or set(rules) != set(lengths):
            raise InvalidParameterError("seed letter and tile lengths must cover the substitution alphabet")
        if depth < 0:
            raise InvalidParameterError(f"iteration depth must be nonnegative: {depth}")
        self.rules, self.seed, self.depth = rules, seed, depth
        self.lengths = {letter: QuadNum.of(v) for letter, v in lengths.items()}
        self.alphabet = sorted(rules)
        self.spec = spec or f"sub:depth={depth}"

    @cached_property
    def word(self) -> str:
        word = self.seed
        for _ in range(self.depth):
            word = "".join(self.rules[c] for c in word)
        return word

    @cached_property
    def _tile_counts(self) -> np.ndarray:
        """Per-letter tile counts before each left endpoint, one column per letter."""
        letters = np.frombuffer(self.word.encode(), dtype=np.uint8)
        onehot = np.stack([letters == ord(c) for c in self.alphabet], axis=1).astype(np.int64)
        return np.vstack([np.zeros((1, len(self.alphabet)), dtype=np.int64), np.cumsum(onehot, axis=0)[:-1]])

    @property
    def total_length(self) -> QuadNum:
        return sum((self.lengths[c] for c in self.word), start=QuadNum(0))

    @cached_property
    def delone_params(self) -> "DeloneEstimate":
        return DeloneEstimate(
            r_est=min(self.lengths.values()) / 2, R_est=max(self.lengths.values()) / 2, points=0, estimate=False
        )

    @override
    def _candidates(self, lo: float, hi: float) -> tuple[np.ndarray, ExactAt]:
        counts = self._tile_counts
        weights = np.array([float(self.lengths[c]) for c in self.alphabet])
        coords = counts @ weights
        exact_lengths = [self.lengths[c] for c in self.alphabet]

        def exact(i: int) -> QuadNum:
            return sum((length * int(k) for length, k in zip(exact_lengths, counts[i])), start=QuadNum(0))

        return coords, exact


def fibonacci_substitution(depth: int = 20) -> Substitution1D:
    return Substitution1D({"a": "ab", "b": "a"}, {"a": PHI, "b": 1}, "a", depth, spec=f"sub:depth={depth}")


class DeloneEstimate(Record):
    r_est: Union[QuadNum, float]
    R_est: Union[QuadNum, float]
    points: int
    estimate: bool = True


class DensityEstimate(Record):
    value: Union[QuadNum, float]
    exact: bool
    ratios: list[float]
    increments: list[float]


def count_in(S: PointSource, E: Region) -> int:
    return S.count_in(E)


def enumerate_points(S: PointSource, E: Region) -> list[Point]:
    return S.enumerate(E)


def estimate_delone_params(S: PointSource, window: Region) -> DeloneEstimate:
    """Empirical `(r, R)` on a window: half the smallest and largest 1D gap, or for `d >= 2` half the
    smallest nearest-neighbour distance and the covering radius of a grid inside the window's interior.

    Raises:
        InsufficientDataError: the window holds fewer than two points.
    """
    if S.dimension == 1:
        gaps: list[QuadNum] = []
        total = 0
        for lo, hi in window.components:
            sample = S.sample(lo, hi)
            total += len(sample)
            if len(sample) >= 2:
                diffs = np.diff(sample.coords)
                for j in {int(np.argmin(diffs)), int(np.argmax(diffs))}:
                    gaps.append(sample.exact_at(j + 1) - sample.exact_at(j))
        if total < 2 or not gaps:
            raise InsufficientDataError(f"need at least two points to estimate Delone parameters, got {total}")
        return DeloneEstimate(r_est=min(gaps) / 2, R_est=max(gaps) / 2, points=total)
    points = np.array([[float(x) for x in p] for p in S.enumerate(window)])
    if len(points) < 2:
        raise InsufficientDataError(f"need at least two points to estimate Delone parameters, got {len(points)}")
    tree = cKDTree(points)
    nearest = tree.query(points, k=2)[0][:, 1]
    r_est = float(nearest.min()) / 2
    bbox = window.bounding_box()
    margin = 2 * float(nearest.max())
    lo = np.array([float(a) for a in bbox.lo]) + margin
    hi = np.array([float(b) for b in bbox.hi]) - margin
    if np.any(lo >= hi):
        lo, hi = lo - margin, hi + margin
    axes = [np.arange(a, b + 1e-12, r_est / 2) for a, b in zip(lo, hi)]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    R_est = float(tree.query(grid)[0].max())
    logger.debug(f"delone estimate on {len(points)} points: r={r_est}, R={R_est}")
    return DeloneEstimate(r_est=r_est, R_est=R_est, points=len(points))


def density(S: PointSource, sequence: Sequence[Region], threshold: float = 1e-2) -> DensityEstimate:
    """Density of `S`: exact when known in closed form, else the last ratio `#(A_i & S) / mu(A_i)`.

    Raises:
        InvalidParameterError: the density is not known exactly and `sequence` fails the van Hove check.
    """
    if not sequence:
        raise InvalidParameterError("density needs a nonempty region sequence")
    ratios = [float(QuadNum(S.count_in(A)) / A.measure()) for A in sequence]
    increments = [abs(b - a) for a, b in zip(ratios, ratios[1:])]
    if S.density_value is not None:
        return DensityEstimate(value=S.density_value, exact=True, ratios=ratios, increments=increments)
    from aperiodica.discrepancy import van_hove_check

    diagnostics = van_hove_check(sequence, [1], threshold)
    if not diagnostics.passed:
        raise InvalidParameterError(f"density sequence is not van Hove: {diagnostics.failure}")
    return DensityEstimate(value=ratios[-1], exact=False, ratios=ratios, increments=increments)


def occurrences(
    S: PointSource, patch_support: Region, patch_points: Sequence[QuadNum], scan_window: Region
) -> list[QuadNum]:
    """Translations `x` with `S & (patch_support + x) == patch_points + x` and `patch_support + x` inside
    the scan window, in increasing order.
    """
    if S.dimension != 1 or patch_support.dimension != 1:
        raise DimensionMismatchError("occurrence search is one-dimensional")
    if not patch_points:
        raise InvalidParameterError("occurrence search needs a nonempty patch")
    patch = sorted(patch_points)
    support_lo = patch_support.components[0][0]
    support_hi = patch_support.components[-1][1]
    offsets = np.array([float(p - patch[0]) for p in patch])
    k = len(patch)
    found: list[QuadNum] = []
    for window_lo, window_hi in scan_window.components:
        sample = S.sample(window_lo - (support_hi - support_lo), window_hi + (support_hi - support_lo))
        coords = sample.coords
        n = len(coords)
        if n < k:
            continue
        starts = np.arange(n - k + 1)
        shift = coords[starts] - float(patch[0])
        inside = (shift + float(support_lo) >= float(window_lo) - 1e-6) & (
            shift + float(support_hi) <= float(window_hi) + 1e-6
        )
        starts = starts[inside]
        # narrow the candidates one patch point at a time
        for j in range(1, k):
            if not len(starts):
                break
            starts = starts[np.abs(coords[starts + j] - coords[starts] - offsets[j]) < 1e-6]
        for start in starts:
            x = sample.exact_at(int(start)) - patch[0]
            region = patch_support.translate(x)
            if not (window_lo <= support_lo + x and support_hi + x <= window_hi):
                continue
            if any(sample.exact_at(int(start) + j) != p + x for j, p in enumerate(patch)):
                continue
            if sum(sample.count_between(lo, hi) for lo, hi in region.components) == k:
                found.append(x)
    logger.debug(f"patch of {k} points: {len(found)} occurrences")
    return sorted(set(found))


def read_points(path: Union[str, Path]) -> tuple[list[Point], dict[str, str]]:
    """Read a point-set file; returns the points and the header fields."""
    header: dict[str, str] = {}
    points: list[Point] = []
    for number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for field in line[1:].split():
                key, _, value = field.partition("=")
                header[key] = value
            continue
        try:
            points.append(as_point(line.split("\t")))
        except LiteralParseError as e:
            raise LiteralParseError(f"{path}:{number}: {e}") from e
    dims = {len(p) for p in points}
    if len(dims) > 1:
        raise DimensionMismatchError(f"{path}: points of mixed dimension {sorted(dims)}")
    declared = header.get("dim")
    if declared is not None and dims and int(declared) not in dims:
        raise DimensionMismatchError(f"{path}: header declares dim={declared}, points have {dims.pop()}")
    return points, header


def format_points(points: Sequence[Point], source: str, dimension: int) -> str:
    lines = [f"# dim={dimension} source={source}"]
    lines += ["\t".join(format_scalar(x) for x in p) for p in points]
    return "\n".join(lines) + "\n"


def write_points(path: Union[str, Path], points: Sequence[Point], source: str, dimension: int) -> None:
    Path(path).write_text(format_points(points, source, dimension))


def _spec_params(text: str) -> dict[str, str]:
    params: dict[str, str] = {}
    for item in filter(None, text.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            params[item.strip()] = ""
        else:
            params[key.strip()] = value.strip()
    return params


def build_source(spec: str) -> PointSource:
    """Build a source from a spec string such as `latticeZ`, `lattice:a=2,t=1/2`, `periodic:a=3,motif=0;1`,
    `exampleL`, `fib`, `halffib`, `halffib:right`, `cp:lo=-1,hi=1/2`, `sub`, `sub:depth=18`, `Z2`.
    """
    name, _, rest = spec.strip().partition(":")
    params: dict[str, Any] = _spec_params(rest)
    canonical = spec.strip()
    try:
        if name in ("latticeZ", "Z"):
            return Lattice(spec=canonical)
        if name == "lattice":
            return Lattice(params.get("a", "1"), params.get("t", "0"), spec=canonical)
        if name in ("lattice2", "Z2"):
            return Lattice(params.get("a", "1"), params.get("t", "0"), dimension=2, spec=canonical)
        if name == "periodic":
            motif = [m for m in params.get("motif", "0").split(";") if m]
            return Periodic(params.get("a", "1"), motif, spec=canonical)
        if name == "exampleL":
            return ExampleL()
        if name == "fib":
            return CutProject1D(*FIBONACCI_WINDOW, spec=canonical)
        if name == "halffib":
            window = HALF_FIBONACCI_RIGHT if "right" in params else HALF_FIBONACCI_LEFT
            return CutProject1D(*window, spec=canonical)
        if name == "cp":
            return CutProject1D(params["lo"], params["hi"], spec=canonical)
        if name == "sub":
            source = fibonacci_substitution(int(params.get("depth", "20")))
            source.spec = canonical
            return source
    except KeyError as e:
        raise InvalidParameterError(f"source spec {spec!r} misses parameter {e}") from e
    except ValueError as e:
        if isinstance(e, InvalidParameterError):
            raise
        raise InvalidParameterError(f"invalid source spec {spec!r}: {e}") from e
    raise InvalidParameterError(f"unknown source spec: {spec!r}")
