"""Register a virtual floorplan onto a dissimilar physical one with grid-wise
relative translation gains."""

__version__ = "0.1.0"
