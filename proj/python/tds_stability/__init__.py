"""Exponential stability certificates for linear time-delay systems.

The heavy lifting lives in the compiled extension ``_core``; this package
re-exports its operations under stable names.
"""

from ._core import (
    TdsError,
    analyze,
    certificate,
    critical_delay,
    lyapunov_matrix,
    order,
    simulate,
)

__all__ = [
    "TdsError",
    "analyze",
    "certificate",
    "critical_delay",
    "lyapunov_matrix",
    "order",
    "simulate",
]
