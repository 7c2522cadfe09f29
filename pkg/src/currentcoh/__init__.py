"""Relative Lie algebra cohomology of current superalgebras g[z+, z-, theta1, theta2, theta3]."""
from __future__ import annotations

from .exactla import ArithmeticDisagreement
from .kernels import BACKEND as KERNEL_BACKEND
from .liealg import LieAlgebraSpec, build_algebra
from .superspace import AMonomial, charges, level

__version__ = "0.1.0"

__all__ = [
    "AMonomial",
    "ArithmeticDisagreement",
    "KERNEL_BACKEND",
    "LieAlgebraSpec",
    "build_algebra",
    "charges",
    "level",
    "__version__",
]
