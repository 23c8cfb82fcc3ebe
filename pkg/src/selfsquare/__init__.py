"""Finite, exactly checkable computations with products of compacta built
from ordinals, rank compactifications Z(n) and the spaces X(M)."""

from __future__ import annotations

from .algebra import (
    CANTOR,
    FIN,
    NormalForm,
    O,
    X,
    Z,
    decide_homeo,
    family_generate,
    invariants,
    normalize,
    replay_certificate,
)
from .epset import EPSet
from .expr import ParseError, RangeError, parse_expr
from .ordinal import Ordinal, ScatteredForm, natural_sum, product_form

__all__ = [
    "CANTOR",
    "FIN",
    "NormalForm",
    "O",
    "X",
    "Z",
    "EPSet",
    "Ordinal",
    "ScatteredForm",
    "ParseError",
    "RangeError",
    "decide_homeo",
    "family_generate",
    "invariants",
    "natural_sum",
    "normalize",
    "parse_expr",
    "product_form",
    "replay_certificate",
]

__version__ = "0.1.0"
