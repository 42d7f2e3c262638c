"""Fractional reaction-diffusion on 2D grids with pluggable history memory.

The heavy imports (numpy) live in the submodules; importing the package
itself stays cheap so the command line entry point can configure the
process before any numerics load.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
