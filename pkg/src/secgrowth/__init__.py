"""Desk-scale numerical laboratory for secular growths in thermal
perturbative field theory: free/thermal propagators, the mass-quench toy
model, first-order corrections in external electromagnetic potentials,
loop-diagram growth analysis, truncated-function combinatorics, and
power-law growth detection."""

__version__ = "0.1.0"
