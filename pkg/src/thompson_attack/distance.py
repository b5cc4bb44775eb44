"""Subgroup distance functions on normal forms.

Positions are 1-based inside each part; for the negative part the
position counts from the right end of the spelled word, i.e. inside the
ascending ``neg`` tuple.
"""

from __future__ import annotations

import enum

from . import _kernels
from .fgroup import NormalForm
from .subgroups import GeneratorSet, check_s


class DistanceFunction(str, enum.Enum):
    DB = "dB"
    DB_WEIGHTED = "dBw"
    DA = "dA"
    DA_WEIGHTED = "dAw"
    DA_MAX = "dAmax"

    @property
    def target(self) -> GeneratorSet:
        """The subgroup this function measures distance to."""
        return GeneratorSet.B if self in (DistanceFunction.DB, DistanceFunction.DB_WEIGHTED) else GeneratorSet.A

    @property
    def kernel_id(self) -> int:
        return _KERNEL_IDS[self]

    @classmethod
    def parse(cls, text: str) -> "DistanceFunction":
        key = text.strip()
        if key in _ALIASES:
            return _ALIASES[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown distance function {text!r}") from None


_KERNEL_IDS = {
    DistanceFunction.DB: _kernels.DIST_DB,
    DistanceFunction.DB_WEIGHTED: _kernels.DIST_DB_WEIGHTED,
    DistanceFunction.DA: _kernels.DIST_DA,
    DistanceFunction.DA_WEIGHTED: _kernels.DIST_DA_WEIGHTED,
    DistanceFunction.DA_MAX: _kernels.DIST_DA_MAX,
}

_ALIASES = {
    "dB_weighted": DistanceFunction.DB_WEIGHTED,
    "dA_weighted": DistanceFunction.DA_WEIGHTED,
    "dA_max": DistanceFunction.DA_MAX,
}


def d_B(u: NormalForm, s: int) -> int:
    check_s(s)
    return sum(1 for i in u.pos if i <= s) + sum(1 for j in u.neg if j <= s)


def d_B_weighted(u: NormalForm, s: int) -> int:
    check_s(s)
    return sum(s + 1 - i for i in u.pos if i <= s) + sum(s + 1 - j for j in u.neg if j <= s)


def _excesses(part, s):
    # i_k - k - s + 1 for 1-based k; positive exactly for the bad letters.
    return [i - k - s + 1 for k, i in enumerate(part, 1)]


def d_A(u: NormalForm, s: int) -> int:
    check_s(s)
    bad = sum(1 for e in _excesses(u.pos, s) + _excesses(u.neg, s) if e > 0)
    return bad + abs(len(u.pos) - len(u.neg))


def d_A_weighted(u: NormalForm, s: int) -> int:
    check_s(s)
    weight = sum(e for e in _excesses(u.pos, s) + _excesses(u.neg, s) if e > 0)
    return weight + abs(len(u.pos) - len(u.neg))


def a_max_decomposition(u: NormalForm, s: int) -> dict[str, int]:
    """The quantities m_p, m_n, p, n behind the maximum-based distance."""
    check_s(s)
    return {
        "m_p": max([0] + _excesses(u.pos, s)),
        "m_n": max([0] + _excesses(u.neg, s)),
        "p": len(u.pos),
        "n": len(u.neg),
    }


def d_A_max(u: NormalForm, s: int) -> int:
    d = a_max_decomposition(u, s)
    return d["m_p"] + d["m_n"] + abs((d["p"] + d["m_p"]) - (d["n"] + d["m_n"]))


_DIRECT = {
    DistanceFunction.DB: d_B,
    DistanceFunction.DB_WEIGHTED: d_B_weighted,
    DistanceFunction.DA: d_A,
    DistanceFunction.DA_WEIGHTED: d_A_weighted,
    DistanceFunction.DA_MAX: d_A_max,
}


def evaluate(fn: DistanceFunction | str, u: NormalForm, s: int) -> int:
    fn = fn if isinstance(fn, DistanceFunction) else DistanceFunction.parse(fn)
    return _DIRECT[fn](u, s)


def evaluate_fast(fn: DistanceFunction | str, u: NormalForm, s: int) -> int:
    """Same value via the array kernel used inside the attack loop."""
    fn = fn if isinstance(fn, DistanceFunction) else DistanceFunction.parse(fn)
    check_s(s)
    return int(_kernels.distance(fn.kernel_id, *u.arrays(), s))
