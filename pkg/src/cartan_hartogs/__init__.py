"""Numerics for Cartan-Hartogs domains: Bergman kernels, Lu Qi-Keng zero tests,
invariant metrics, the reduced Monge-Ampere ODE and representative coordinates."""

__version__ = "0.1.0"
