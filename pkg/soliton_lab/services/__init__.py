"""Numerical services: series, profiles, wings, flow solver and experiments."""
