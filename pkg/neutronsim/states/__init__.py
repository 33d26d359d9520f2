"""Target states, separable-state samplers and noise channels."""
