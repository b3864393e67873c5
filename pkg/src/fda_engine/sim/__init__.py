"""Simulation toolbox: eigen systems, Karhunen-Loeve sampling, noise and sparsification."""

from fda_engine.sim.basis import BasisKind, DecayKind, eigenvalues, eval_basis, eval_basis_on
from fda_engine.sim.simulate import Construction, SimResult, sim_fundata, sim_multifundata
from fda_engine.sim.transform import add_error, sparsify

__all__ = [
    "BasisKind",
    "Construction",
    "DecayKind",
    "SimResult",
    "add_error",
    "eigenvalues",
    "eval_basis",
    "eval_basis_on",
    "sim_fundata",
    "sim_multifundata",
    "sparsify",
]
