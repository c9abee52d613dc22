"""Walls, median duals and stable cylinders on finite quasitree instances."""

__version__ = "0.1.0"
