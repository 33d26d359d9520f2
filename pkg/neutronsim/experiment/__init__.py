"""Simulated measurement campaigns: scans, fits, element extraction."""
