"""Figure renderers for the experiment CSV artifacts.

This package is deliberately independent of the solver/analysis package:
it consumes the documented CSV schema and nothing else, and every plotted
series is a CSV column. There is no numerical recomputation of predicted
quantities here, which the test suite enforces by code inspection.
"""

__version__ = "0.1.0"
