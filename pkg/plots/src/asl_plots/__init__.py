"""Figure scripts over the asl metrics CSV schema.

These consume the versioned CSV files produced by the `asl` CLI and never
recompute any quantity; they are deliberately independent of the asl package
so the CSV format remains the only contract between the two.
"""

__version__ = "0.1.0"
