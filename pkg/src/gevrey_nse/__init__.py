"""Spectral Navier-Stokes toolkit for Gevrey-class norms and bounds on the 3-torus."""

__version__ = "0.1.0"
