"""Physics-informed kernel learning on truncated Fourier bases.

Typical use::

    from pikl import ModeSet, Cube, GramSpec, assemble_M, fit_predictor
    from pikl.diffop import harmonic_oscillator

    modes = ModeSet(m=50, d=1, L=np.pi)
    spec = GramSpec(modes, s=2, lam=1e-8, mu=1e2,
                    op=harmonic_oscillator(), dom=Cube(1, np.pi))
    model = fit_predictor(spec, Dataset(X, Y))
    yhat = model.predict(xq)
"""
from ._accel import BACKEND
from .diffop import LinearDiffOp, symbol
from .domain import Ball2D, Cube, DisjointUnion, Product, Scaled, Torus, Translated
from .effdim import compute_spectrum, effective_dimension
from .estimator import (Dataset, PiklModel, SufficientStats, accumulate, fit,
                        fit_predictor, predict, stats_from_data)
from .fourier import ModeSet, feature_map, synthesize
from .gram import GramSpec, HermitianMatrix, assemble_C, assemble_M

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "LinearDiffOp", "symbol", "Ball2D", "Cube", "DisjointUnion",
    "Product", "Scaled", "Torus", "Translated", "compute_spectrum",
    "effective_dimension", "Dataset", "PiklModel", "SufficientStats", "accumulate",
    "fit", "fit_predictor", "predict", "stats_from_data", "ModeSet", "feature_map",
    "synthesize", "GramSpec", "HermitianMatrix", "assemble_C", "assemble_M",
]
