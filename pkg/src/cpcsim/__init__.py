"""Simulator for nonlinear-sign-gate dynamics of two-photon wavepackets
under coherent photon conversion with a non-instantaneous response kernel."""

from .grids import Axis, ComplexGrid1D, ComplexGrid2D, SimState, load_grid, save_grid
from .kernel import GaussianKernel
from .propagator import RunRecord, SimConfig, run
from .waveshapes import PRESETS, WaveshapeSpec, build_preset, build_waveshape

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "ComplexGrid1D",
    "ComplexGrid2D",
    "GaussianKernel",
    "PRESETS",
    "RunRecord",
    "SimConfig",
    "SimState",
    "WaveshapeSpec",
    "build_preset",
    "build_waveshape",
    "load_grid",
    "run",
    "save_grid",
    "__version__",
]
