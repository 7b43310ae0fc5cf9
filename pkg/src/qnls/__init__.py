"""Toolkit for stability analysis of low-dimensional invariant tori of the
quintic nonlinear Schrodinger equation on the circle: exact resonance
enumeration, effective-Hamiltonian block spectra, nonresonance verification,
and direct split-step simulation."""

__version__ = "0.1.0"

from . import cli, normal_form, resonance, sim, small_divisors  # noqa: F401
