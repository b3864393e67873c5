"""Run an expansion spec on one data element."""

from __future__ import annotations

from fda_engine.core.models import DenseFunData
from fda_engine.errors import ValidationError
from fda_engine.expansions.base import ExpansionResult
from fda_engine.expansions.dct import expand_dct
from fda_engine.expansions.fpca import expand_fpca
from fda_engine.expansions.given import expand_given
from fda_engine.expansions.specs import DctSpec, FpcaSpec, GivenSpec
from fda_engine.ops.quadrature import QuadRule


def expand(
    spec: FpcaSpec | DctSpec | GivenSpec,
    data: DenseFunData,
    rule: QuadRule | str | None = None,
) -> ExpansionResult:
    if isinstance(spec, FpcaSpec):
        return expand_fpca(data, pve=spec.pve, npc=spec.npc, rule=rule)
    if isinstance(spec, DctSpec):
        return expand_dct(data, q_thresh=spec.q_thresh, rule=rule)
    if isinstance(spec, GivenSpec):
        spec = spec.resolve()
        return expand_given(data, spec.functions, spec.scores, spec.ortho, rule)
    raise ValidationError(f"Unknown expansion spec: {type(spec).__name__}")
