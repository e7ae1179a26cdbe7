"""Numerical reducibility of one-frequency analytic SL(2,R) cocycles."""

from .arithmetic import CFExpansion, expand, liouville_approximant, parse_frequency
from .cocycle import (Cocycle, almost_mathieu, classify, cond_test, constant_cocycle, iterate,
                      lyapunov, rotation_cocycle, schrodinger)
from .corona import KernelSolution, bezout_solve, kernel_vector, real_symmetrize, zero_determinant
from .reducer import (ReductionConfig, ReductionResult, factor_multiplier, reduce,
                      transfer_to_irrational)
from .strip import MatrixFunction, StripFunction

__all__ = [
    "CFExpansion", "Cocycle", "KernelSolution", "MatrixFunction", "ReductionConfig",
    "ReductionResult", "StripFunction", "almost_mathieu", "bezout_solve", "classify",
    "cond_test", "constant_cocycle", "expand", "factor_multiplier", "iterate", "kernel_vector",
    "liouville_approximant", "lyapunov", "parse_frequency", "real_symmetrize", "reduce",
    "rotation_cocycle", "schrodinger", "transfer_to_irrational", "zero_determinant",
]
