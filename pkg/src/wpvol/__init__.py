"""wpvol - Weil-Petersson volumes from topological recursion."""

__version__ = "0.1.0"
