"""Sideways addition and parity under restricted instruction sets."""

from .bitword import BitWord, from_hex, to_hex
from .isa_model import CountingContext, InstructionModel, ModelViolation, OpClass

__all__ = [
    "BitWord",
    "from_hex",
    "to_hex",
    "CountingContext",
    "InstructionModel",
    "ModelViolation",
    "OpClass",
]
