"""Contraction-based self-triggered control under quantization.

Thin Python layer over the C++ core: certification of Lur'e plants,
logarithmic/zooming quantizers, self-triggering design constants, and the
closed-loop simulators.
"""

from ._core import *  # noqa: F401,F403

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
