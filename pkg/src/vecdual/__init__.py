"""Perturbation duality for vector optimization over polyhedral cones."""

__version__ = "0.1.0"
