"""Exact verification of level-1 U_q(sp4-hat) modules built from level-2 U_q(sl2-hat) data."""

from .qfield import ONE, Q, ZERO, Scalar, qint, qpow

__version__ = "0.1.0"

__all__ = ["Scalar", "ONE", "ZERO", "Q", "qint", "qpow", "__version__"]
