from fractions import Fraction
from typing import Any

import pydantic

from aperiodica.scalar import QuadNum, format_scalar
from aperiodica.typing import SupportsLiteral


class Record(pydantic.BaseModel):
    """Immutable result record; exact scalars serialise as literals, regions as region literals."""

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True
        smart_union = True
        json_encoders = {
            QuadNum: format_scalar,
            Fraction: str,
            SupportsLiteral: lambda v: v.to_literal(),
        }

    def to_json(self, **extra: Any) -> str:
        return self.json(sort_keys=True, indent=2, **extra)
