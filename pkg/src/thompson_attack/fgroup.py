"""Exact arithmetic in Thompson's group F.

F is presented by generators x_0, x_1, ... with relations
x_i^-1 x_k x_i = x_{k+1} for k > i. Elements are kept in their unique
normal form ``x_{i_1}...x_{i_p} x_{j_n}^-1...x_{j_1}^-1`` with both index
sequences non-decreasing and no (NF2) violation.
"""

from __future__ import annotations

import re
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import _kernels

MAX_INDEX = 2**32 - 2

_TOKEN = re.compile(r"x(0|[1-9][0-9]*)(\^-1)?")


class WordParseError(ValueError):
    pass


class IndexBoundError(OverflowError):
    """A generator index exceeded ``MAX_INDEX``."""


@dataclass(frozen=True, slots=True)
class Letter:
    index: int
    exponent: int = 1

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"negative generator index {self.index}")
        if self.index > MAX_INDEX:
            raise IndexBoundError(f"generator index {self.index} exceeds {MAX_INDEX}")
        if self.exponent not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {self.exponent}")

    def inverse(self) -> "Letter":
        return Letter(self.index, -self.exponent)

    def __str__(self):
        return f"x{self.index}" if self.exponent == 1 else f"x{self.index}^-1"


Word = tuple  # tuple[Letter, ...]; the empty tuple is the identity


def word(*letters: tuple[int, int]) -> Word:
    """Build a word from ``(index, exponent)`` pairs."""
    return tuple(Letter(i, e) for i, e in letters)


def parse_word(text: str) -> Word:
    tokens = text.split()
    if tokens == ["1"]:
        return ()
    if not tokens:
        raise WordParseError("empty word text; use '1' for the identity")
    out = []
    for tok in tokens:
        m = _TOKEN.fullmatch(tok)
        if m is None:
            raise WordParseError(f"malformed token {tok!r}")
        out.append(Letter(int(m.group(1)), -1 if m.group(2) else 1))
    return tuple(out)


def format_word(w: Iterable[Letter]) -> str:
    text = " ".join(str(x) for x in w)
    return text or "1"


def word_to_json(w: Iterable[Letter]) -> list[list[int]]:
    return [[x.index, x.exponent] for x in w]


def word_from_json(data: Sequence[Sequence[int]]) -> Word:
    out = []
    for pair in data:
        if len(pair) != 2 or any(isinstance(v, bool) or not isinstance(v, int) for v in pair):
            raise WordParseError(f"bad letter encoding {pair!r}")
        out.append(Letter(pair[0], pair[1]))
    return tuple(out)


def invert_word(w: Sequence[Letter]) -> Word:
    return tuple(x.inverse() for x in reversed(w))


def _check_bound(values: Iterable[int]) -> None:
    for v in values:
        if v > MAX_INDEX:
            raise IndexBoundError(f"index {v} produced by rewriting exceeds {MAX_INDEX}")


def violates_nf2(pos: Sequence[int], neg: Sequence[int]) -> list[int]:
    """Indices i with x_i and x_i^-1 both present but no x_{i+1}^{+-1}."""
    present = set(pos) | set(neg)
    return sorted(i for i in set(pos) & set(neg) if i + 1 not in present)


def is_normal_form(pos: Sequence[int], neg: Sequence[int]) -> bool:
    """Independent (NF1) + (NF2) check on raw index sequences."""
    if any(v < 0 for v in pos) or any(v < 0 for v in neg):
        return False
    if any(a > b for a, b in zip(pos, pos[1:])):
        return False
    if any(a > b for a, b in zip(neg, neg[1:])):
        return False
    return not violates_nf2(pos, neg)


@dataclass(frozen=True, slots=True)
class NormalForm:
    """Canonical representative of an element of F.

    ``neg`` is stored ascending, so it is spelled in reverse:
    ``NormalForm((3, 7), (4, 9))`` is ``x3 x7 x9^-1 x4^-1``.
    """

    pos: tuple[int, ...] = ()
    neg: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pos", tuple(int(v) for v in self.pos))
        object.__setattr__(self, "neg", tuple(int(v) for v in self.neg))
        if not is_normal_form(self.pos, self.neg):
            raise ValueError(f"not a normal form: pos={self.pos} neg={self.neg}")
        _check_bound(self.pos)
        _check_bound(self.neg)

    @classmethod
    def _trusted(cls, pos, neg) -> "NormalForm":
        # Skips validation; for kernel output only.
        nf = object.__new__(cls)
        object.__setattr__(nf, "pos", tuple(int(v) for v in pos))
        object.__setattr__(nf, "neg", tuple(int(v) for v in neg))
        _check_bound(nf.pos[-1:])
        _check_bound(nf.neg[-1:])
        return nf

    @classmethod
    def from_arrays(cls, pos: np.ndarray, neg: np.ndarray) -> "NormalForm":
        return cls._trusted(pos.tolist(), neg.tolist())

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array(self.pos, dtype=np.int64), np.array(self.neg, dtype=np.int64))

    def spelling(self) -> Word:
        return tuple(Letter(i, 1) for i in self.pos) + tuple(
            Letter(j, -1) for j in reversed(self.neg)
        )

    def __len__(self):
        return len(self.pos) + len(self.neg)

    def __mul__(self, other: "NormalForm") -> "NormalForm":
        return multiply(self, other)

    def __invert__(self) -> "NormalForm":
        return inverse_nf(self)

    def __str__(self):
        return format_word(self.spelling())


IDENTITY = NormalForm()


# -- Lemma-1 letter insertion (reference normalizer) -----------------------


def _insert_left(pos: list[int], neg: list[int], t: int, e: int) -> tuple[list[int], list[int]]:
    """Normal form of x_t^e * (pos, neg), following the case analysis of
    the letter-insertion lemma. Inputs must already be normal."""
    if e == 1:
        # (R1) until x_v settles in front of the first letter >= v.
        v, k = t, 0
        while k < len(pos) and pos[k] < v:
            v += 1
            k += 1
        b = bisect_left(neg, v)
        clash = b < len(neg) and neg[b] == v
        if clash and (v + 1) not in pos and bisect_left(neg, v + 1) == bisect_right(neg, v + 1):
            # (x_v, x_v^-1) would violate (NF2): cancel it and shift down
            # everything above, which sits at v + 2 or higher.
            new_pos = pos[:k] + [i - 1 for i in pos[k:]]
            new_neg = neg[:b] + [j - 1 if j > v else j for j in neg[b + 1:]]
            return new_pos, new_neg
        return pos[:k] + [v] + pos[k:], neg
    # Negative letter travels right: (R2) past smaller positives.
    v, k = t, 0
    while k < len(pos) and pos[k] < v:
        v += 1
        k += 1
    if k < len(pos) and pos[k] == v:
        # (R5) cancels it outright.
        return pos[:k] + pos[k + 1:], neg
    # (R3) past the remaining positives, (R4) into the negative part.
    b = bisect_right(neg, v)
    new_pos = pos[:k] + [i + 1 for i in pos[k:]]
    new_neg = neg[:b] + [v] + [j + 1 for j in neg[b:]]
    return new_pos, new_neg


def multiply_letter(nf: NormalForm, x: Letter, side: str = "left") -> NormalForm:
    """Multiply a normal form by one letter on the given side."""
    if side == "left":
        pos, neg = _insert_left(list(nf.pos), list(nf.neg), x.index, x.exponent)
        _check_bound(pos[-1:] + neg[-1:])
        return NormalForm._trusted(pos, neg)
    if side == "right":
        # w x = (x^-1 w^-1)^-1, and inversion just swaps the two parts.
        neg, pos = _insert_left(list(nf.neg), list(nf.pos), x.index, -x.exponent)
        _check_bound(pos[-1:] + neg[-1:])
        return NormalForm._trusted(pos, neg)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def normalize(w: Sequence[Letter]) -> NormalForm:
    """Normal form of a word, built by inserting its letters right to left."""
    pos: list[int] = []
    neg: list[int] = []
    for x in reversed(w):
        pos, neg = _insert_left(pos, neg, x.index, x.exponent)
        if (pos and pos[-1] > MAX_INDEX) or (neg and neg[-1] > MAX_INDEX):
            _check_bound(pos[-1:] + neg[-1:])
    return NormalForm._trusted(pos, neg)


# -- element-level operations ---------------------------------------------


ElementLike = Union[NormalForm, Sequence[Letter]]


def as_nf(u: ElementLike) -> NormalForm:
    return u if isinstance(u, NormalForm) else normalize(u)


def multiply(u: NormalForm, v: NormalForm) -> NormalForm:
    """Group product in normal form, linear in ``len(u) + len(v)``."""
    p, n = _kernels.nf_multiply(*u.arrays(), *v.arrays())
    return NormalForm.from_arrays(p, n)


def product(*factors: NormalForm) -> NormalForm:
    out = IDENTITY
    for f in factors:
        out = multiply(out, f)
    return out


def inverse_nf(u: NormalForm) -> NormalForm:
    return NormalForm._trusted(u.neg, u.pos)


def nf_length(u: NormalForm) -> int:
    return len(u.pos) + len(u.neg)


def equals(u: ElementLike, v: ElementLike) -> bool:
    return as_nf(u) == as_nf(v)


def letter_counts(u: NormalForm) -> dict[int, tuple[int, int]]:
    """Map index i -> (occurrences of x_i, occurrences of x_i^-1)."""
    cp = Counter(u.pos)
    cn = Counter(u.neg)
    return {i: (cp[i], cn[i]) for i in sorted(set(cp) | set(cn))}


def generator(i: int) -> NormalForm:
    return NormalForm((i,), ())


def parse_nf(text: str) -> NormalForm:
    return normalize(parse_word(text))
