"""Distance-based cryptanalysis of the Shpilrain-Ushakov protocol in
Thompson's group F."""

from .fgroup import (
    IDENTITY,
    IndexBoundError,
    Letter,
    NormalForm,
    WordParseError,
    equals,
    format_word,
    inverse_nf,
    invert_word,
    letter_counts,
    multiply,
    multiply_letter,
    nf_length,
    normalize,
    parse_word,
)

__version__ = "0.1.0"
