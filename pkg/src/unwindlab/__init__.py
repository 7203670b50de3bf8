"""Exact computations with Witt vectors, graded Hopf algebras, divided powers
and unwinding envelopes over F_p, Z/p^n and F_p[eps]/eps^2."""

from .algebra import (Presentation, TensorPresentation, TruncationError, apply_hom, binomial,
                      tensor_power, tensor_presentation)
from .rings import DualNumbers, ZMod

__version__ = "0.1.0"

__all__ = ["Presentation", "TensorPresentation", "TruncationError", "apply_hom", "binomial", "tensor_power",
           "tensor_presentation", "DualNumbers", "ZMod"]
