"""The commuting subgroups A_s, B_s of F and key sampling.

A_s is generated by x_0 x_1^-1, ..., x_0 x_s^-1; B_s by x_{s+1}, ..., x_{2s};
x_0, ..., x_{s+2} generate all of F.
"""

from __future__ import annotations

import enum

import numpy as np

from . import _kernels
from .fgroup import IDENTITY, Letter, NormalForm, Word

STEP_BUDGET_PER_LETTER = 1000
MAX_RESTARTS = 10


class GeneratorSet(str, enum.Enum):
    A = "A"
    B = "B"
    W = "W"


class ParameterError(ValueError):
    pass


class SamplingError(RuntimeError):
    pass


def check_s(s: int) -> None:
    if not isinstance(s, (int, np.integer)) or s < 2:
        raise ParameterError(f"s must be an integer >= 2, got {s!r}")


def generating_set(which: GeneratorSet | str, s: int) -> list[Word]:
    check_s(s)
    which = GeneratorSet(which)
    if which is GeneratorSet.A:
        return [(Letter(0, 1), Letter(t, -1)) for t in range(1, s + 1)]
    if which is GeneratorSet.B:
        return [(Letter(k, 1),) for k in range(s + 1, 2 * s + 1)]
    return [(Letter(k, 1),) for k in range(0, s + 3)]


def signed_generators(which: GeneratorSet | str, s: int) -> list[NormalForm]:
    """S_X followed by the inverses, each list in ascending order.

    This order is also the tie-breaking order of the greedy attack.
    """
    check_s(s)
    which = GeneratorSet(which)
    if which is GeneratorSet.A:
        gens = [NormalForm((0,), (t,)) for t in range(1, s + 1)]
    elif which is GeneratorSet.B:
        gens = [NormalForm((k,), ()) for k in range(s + 1, 2 * s + 1)]
    else:
        gens = [NormalForm((k,), ()) for k in range(0, s + 3)]
    return gens + [NormalForm(g.neg, g.pos) for g in gens]


def letter_table(gens: list[NormalForm]) -> tuple[np.ndarray, np.ndarray]:
    """Kernel encoding of generators with at most one letter per sign."""
    gp = np.array([g.pos[0] if g.pos else -1 for g in gens], dtype=np.int64)
    gn = np.array([g.neg[0] if g.neg else -1 for g in gens], dtype=np.int64)
    return gp, gn


def is_member_A(u: NormalForm, s: int) -> bool:
    check_s(s)
    if len(u.pos) != len(u.neg):
        return False
    return all(i - k < s for k, i in enumerate(u.pos, 1)) and all(
        j - k < s for k, j in enumerate(u.neg, 1)
    )


def is_member_B(u: NormalForm, s: int) -> bool:
    check_s(s)
    return all(i >= s + 1 for i in u.pos) and all(j >= s + 1 for j in u.neg)


def is_member(which: GeneratorSet | str, u: NormalForm, s: int) -> bool:
    which = GeneratorSet(which)
    if which is GeneratorSet.A:
        return is_member_A(u, s)
    if which is GeneratorSet.B:
        return is_member_B(u, s)
    check_s(s)
    return True


def sample_element(which: GeneratorSet | str, s: int, length: int, rng: np.random.Generator) -> NormalForm:
    """Random walk from the identity, right-multiplying by uniformly chosen
    generators or inverses, stopping the first time the normal form has
    exactly ``length`` letters."""
    check_s(s)
    which = GeneratorSet(which)
    if length < 0:
        raise ParameterError(f"length must be >= 0, got {length}")
    if which is GeneratorSet.A and length % 2:
        raise ParameterError(f"elements of A_s have even length; got L={length}")
    if length == 0:
        return IDENTITY
    gp, gn = letter_table(signed_generators(which, s))
    budget = STEP_BUDGET_PER_LETTER * length
    empty = np.zeros(0, dtype=np.int64)
    for _ in range(MAX_RESTARTS + 1):
        picks = rng.integers(0, len(gp), size=budget)
        pos, neg, steps = _kernels.random_walk(empty, empty, gp, gn, picks, length)
        if steps >= 0:
            return NormalForm.from_arrays(pos, neg)
    raise SamplingError(
        f"no element of length {length} reached in {MAX_RESTARTS + 1} walks of {budget} steps"
    )
