"""State-vector simulation and verification of two-way teleportation of
two-qubit states through a six-qubit cluster channel."""

__version__ = "0.1.0"
