from abc import abstractmethod
from typing import Any, Callable, Iterator, Literal, Protocol, Sequence, runtime_checkable

from typing_extensions import Self, TypeAlias

from aperiodica.scalar import QuadNum

Point: TypeAlias = tuple[QuadNum, ...]
Vector: TypeAlias = tuple[QuadNum, ...]
Letter: TypeAlias = Literal["D", "N"]


class SupportsLiteral:
    """Values with an exact text literal that parses back to an equal value."""

    @abstractmethod
    def to_literal(self) -> str:
        raise NotImplementedError

    @classmethod
    @abstractmethod
    def from_literal(cls, text: str) -> Self:
        raise NotImplementedError

    @classmethod
    def __get_validators__(cls) -> Iterator[Callable[..., Any]]:
        yield cls._validate

    @classmethod
    def _validate(cls, value: Any) -> Self:
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls.from_literal(value)
        raise TypeError(f"expected {cls.__name__} or literal string, got {type(value).__name__}")


@runtime_checkable
class Counting(Protocol):
    """Anything that counts points in a region, as point sources and patch towers do."""

    dimension: int

    def count_in(self, region: Any) -> int:
        raise NotImplementedError


def as_point(values: Sequence[Any]) -> Point:
    return tuple(QuadNum.of(v) for v in values)
