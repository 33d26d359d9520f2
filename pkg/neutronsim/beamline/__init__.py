"""Interferometer model: components, flippers, beam propagation, presets."""
