"""FDA Engine: functional data containers, KL simulation and multivariate FPCA."""

__version__ = "0.1.0"
