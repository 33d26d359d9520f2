"""Desk-scale simulation of tripartite path-spin-energy entanglement in a
single-neutron interferometer.

Subpackages:
    hilbert: Composite Hilbert space, basis labels, two-copy machinery
    states: Target states, separable samplers, noise channels
    witnesses: Nonlinear entanglement witnesses
    beamline: Operator-level interferometer simulation
    experiment: Contrast scans, element extraction, campaigns

For command-line usage,
$ python -m neutronsim -h
"""

__version__ = '0.4.0'
