"""Simulator and verification harness for the 2D MHD-Boussinesq system."""

__version__ = "0.1.0"
