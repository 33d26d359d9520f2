"""Nonlinear entanglement witnesses for GHZ-, W- and k-separability tests."""
