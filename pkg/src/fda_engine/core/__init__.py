"""Functional data containers, coercion and serialization.

Provides:
- DenseFunData / IrregFunData / MultiFunData containers
- Constructors, accessors and observation subsetting
- Coercion between container kinds
- Canonical JSON and long-format (CSV) serialization
"""

from fda_engine.core.coercion import dense_to_irreg, dense_to_multi, irreg_to_dense
from fda_engine.core.models import (
    DenseFunData,
    FunData,
    IrregFunData,
    MultiFunData,
    as_axis,
    concat_obs,
    describe,
    dim_supp,
    extract_obs,
    make_dense,
    make_irreg,
    make_multi,
    n_obs,
    n_obs_points,
    rename,
)
from fda_engine.core.serializer import (
    from_long,
    fundata_from_dict,
    fundata_to_dict,
    load_fundata,
    load_long_csv,
    save_fundata,
    save_long_csv,
    to_long,
)

__all__ = [
    "DenseFunData",
    "FunData",
    "IrregFunData",
    "MultiFunData",
    "as_axis",
    "concat_obs",
    "dense_to_irreg",
    "dense_to_multi",
    "describe",
    "dim_supp",
    "extract_obs",
    "from_long",
    "fundata_from_dict",
    "fundata_to_dict",
    "irreg_to_dense",
    "load_fundata",
    "load_long_csv",
    "make_dense",
    "make_irreg",
    "make_multi",
    "n_obs",
    "n_obs_points",
    "rename",
    "save_fundata",
    "save_long_csv",
    "to_long",
]
