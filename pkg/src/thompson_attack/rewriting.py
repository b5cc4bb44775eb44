"""Literal rule-based normalizer.

Slow on purpose: it applies the rewriting rules R1-R5 one match at a
time until the word is seminormal, then removes (NF2) violations one
pair at a time. Used as an independent check on the fast paths.
"""

from __future__ import annotations

from typing import Sequence

from .fgroup import Letter, NormalForm, violates_nf2


def _rewrite_once(w: list[tuple[int, int]]) -> bool:
    for q in range(len(w) - 1):
        (a, ea), (b, eb) = w[q], w[q + 1]
        if ea == 1 and eb == 1 and a > b:  # R1: x_k x_i -> x_i x_{k+1}
            w[q : q + 2] = [(b, 1), (a + 1, 1)]
            return True
        if ea == -1 and eb == 1:
            if a > b:  # R2: x_k^-1 x_i -> x_i x_{k+1}^-1
                w[q : q + 2] = [(b, 1), (a + 1, -1)]
            elif a < b:  # R3: x_i^-1 x_k -> x_{k+1} x_i^-1
                w[q : q + 2] = [(b + 1, 1), (a, -1)]
            else:  # R5: x_i^-1 x_i -> 1
                del w[q : q + 2]
            return True
        if ea == -1 and eb == -1 and a < b:  # R4: x_i^-1 x_k^-1 -> x_{k+1}^-1 x_i^-1
            w[q : q + 2] = [(b + 1, -1), (a, -1)]
            return True
    return False


def seminormal(w: Sequence[Letter]) -> tuple[list[int], list[int]]:
    """Rewrite to seminormal form; returns ascending (pos, neg)."""
    work = [(x.index, x.exponent) for x in w]
    while _rewrite_once(work):
        pass
    pos = [i for i, e in work if e == 1]
    neg = [i for i, e in work if e == -1][::-1]
    return pos, neg


def eliminate_nf2(pos: list[int], neg: list[int]) -> tuple[list[int], list[int]]:
    """Cancel (NF2)-violating pairs, innermost (nearest the boundary) first."""
    pos, neg = list(pos), list(neg)
    while True:
        bad = violates_nf2(pos, neg)
        if not bad:
            return pos, neg
        i = bad[-1]
        a = len(pos) - 1 - pos[::-1].index(i)
        b = len(neg) - 1 - neg[::-1].index(i)
        # Inverse R1 / R4 carry the pair inward past the enclosed subword,
        # whose indices all drop by one, then the pair cancels.
        pos = pos[:a] + [v - 1 for v in pos[a + 1 :]]
        neg = neg[:b] + [v - 1 for v in neg[b + 1 :]]


def normalize_by_rules(w: Sequence[Letter]) -> NormalForm:
    pos, neg = eliminate_nf2(*seminormal(w))
    return NormalForm(pos, neg)
