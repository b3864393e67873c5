"""Expansion specifications, parsed from JSON with pydantic.

JSON forms:
  {"type": "fpca", "pve": 0.99}  |  {"type": "fpca", "npc": 5}
  {"type": "dct", "qThresh": 0.9}
  {"type": "given", "functionsFile": "basis.json", "ortho": true}
"""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator
from pydantic import ValidationError as PydanticValidationError

from fda_engine.config import get_default
from fda_engine.core.models import DenseFunData
from fda_engine.core.serializer import load_fundata
from fda_engine.errors import ValidationError


class FpcaSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    type: Literal["fpca"] = "fpca"
    pve: float = Field(default_factory=lambda: get_default("fpca", "pve"), gt=0, le=1)
    npc: int | None = Field(default=None, ge=1)


class DctSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    type: Literal["dct"] = "dct"
    q_thresh: float = Field(default=0.0, ge=0, lt=1, alias="qThresh")


class GivenSpec(BaseModel):
    """Given basis functions, from memory or from a container JSON file.

    ``scores``, when present, are used as-is (N x K); otherwise they are
    computed by projection.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    type: Literal["given"] = "given"
    functions: Any = None
    functions_file: str | None = Field(default=None, alias="functionsFile")
    scores: Any = None
    ortho: bool = False

    @field_validator("functions")
    @classmethod
    def _dense_functions(cls, value: Any) -> Any:
        if value is not None and not isinstance(value, DenseFunData):
            raise ValueError("functions must be a DenseFunData object")
        return value

    @field_validator("scores")
    @classmethod
    def _score_matrix(cls, value: Any) -> Any:
        if value is None:
            return None
        scores = np.array(value, dtype=np.float64)
        if scores.ndim != 2 or not np.all(np.isfinite(scores)):
            raise ValueError("scores must be a finite N x K matrix")
        scores.setflags(write=False)
        return scores

    def resolve(self, base_dir: str | Path | None = None) -> GivenSpec:
        """Load ``functions_file`` (relative to ``base_dir``) into ``functions``."""
        if self.functions is not None:
            return self
        if self.functions_file is None:
            raise ValidationError("Given expansion needs functions or functionsFile")
        path = Path(self.functions_file)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        functions = load_fundata(path)
        if not isinstance(functions, DenseFunData):
            raise ValidationError(f"{path}: basis functions must be dense data")
        return self.model_copy(update={"functions": functions})


ExpansionSpec = Annotated[FpcaSpec | DctSpec | GivenSpec, Field(discriminator="type")]

_SPEC_LIST = TypeAdapter(list[ExpansionSpec])


def parse_expansion_specs(
    raw: Any, base_dir: str | Path | None = None
) -> list[FpcaSpec | DctSpec | GivenSpec]:
    """Validate a JSON array of expansion specs, loading given-basis files.

    Raises:
        ValidationError: On malformed specs.
    """
    try:
        specs = _SPEC_LIST.validate_python(raw)
    except PydanticValidationError as e:
        raise ValidationError(f"Invalid expansion specification: {e}") from e
    return [s.resolve(base_dir) if isinstance(s, GivenSpec) else s for s in specs]
