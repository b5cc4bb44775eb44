"""Greedy subgroup-distance attack on the decomposition problem.

Given z and u = x z y with x in X and y in Y (X, Y commuting), the search
grows a product x~ of generators of X one letter at a time, always moving
to the candidate whose complement z^-1 x~^-1 u is closest to Y.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import _kernels
from .distance import DistanceFunction, evaluate
from .fgroup import IDENTITY, NormalForm, inverse_nf, multiply, product
from .protocol import PublicView
from .subgroups import GeneratorSet, check_s, is_member, letter_table, signed_generators


class EquationId(str, enum.Enum):
    U1 = "U1"  # u1 = a1 z b1
    U2 = "U2"  # u2 = b2 z a2
    U1_INV = "U1_INV"  # u1^-1 = b1^-1 z^-1 a1^-1
    U2_INV = "U2_INV"  # u2^-1 = a2^-1 z^-1 b2^-1


ATTACKED_SIDE = {
    EquationId.U1: GeneratorSet.A,
    EquationId.U2: GeneratorSet.B,
    EquationId.U1_INV: GeneratorSet.B,
    EquationId.U2_INV: GeneratorSet.A,
}

DEFAULT_CHOICE = {GeneratorSet.A: DistanceFunction.DB, GeneratorSet.B: DistanceFunction.DA_MAX}


class PairingError(ValueError):
    """Distance function does not measure the partner subgroup."""


def partner(side: GeneratorSet) -> GeneratorSet:
    return GeneratorSet.B if side is GeneratorSet.A else GeneratorSet.A


def check_pairing(side: GeneratorSet, fn: DistanceFunction) -> None:
    if side not in (GeneratorSet.A, GeneratorSet.B):
        raise PairingError(f"can only attack A or B, got {side.value}")
    if fn.target is not partner(side):
        raise PairingError(
            f"{fn.value} measures distance to {fn.target.value}, but attacking "
            f"{side.value} needs a function for {partner(side).value}"
        )


@dataclass(frozen=True)
class DecompositionProblem:
    z: NormalForm
    u: NormalForm
    s: int
    attacked_side: GeneratorSet
    distance_fn: DistanceFunction
    max_iterations: int

    def __post_init__(self):
        check_s(self.s)
        check_pairing(self.attacked_side, self.distance_fn)
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class AttackOutcome:
    success: bool
    x_tilde_gens: tuple[int, ...]
    x_tilde: NormalForm
    y_tilde: NormalForm
    iterations_used: int
    final_distance: int
    distance_trace: tuple[int, ...]


@dataclass
class InstanceAttackReport:
    outcomes: dict[EquationId, AttackOutcome]
    overall_success: bool
    recovered_key: Optional[NormalForm] = None
    solved_by: Optional[EquationId] = None
    distance_choice: dict[GeneratorSet, DistanceFunction] = field(default_factory=dict)


def complement(z: NormalForm, x_tilde: NormalForm, u: NormalForm) -> NormalForm:
    """The y with x_tilde * z * y == u."""
    return product(inverse_nf(z), inverse_nf(x_tilde), u)


def greedy_descent(p: DecompositionProblem) -> AttackOutcome:
    gens = signed_generators(p.attacked_side, p.s)
    # Candidate i is x~ g_i; the kernel needs g_i^-1 to form (x~ g_i)^-1 u.
    gp, gn = letter_table([inverse_nf(g) for g in gens])
    zinv_p, zinv_n = inverse_nf(p.z).arrays()
    ok, choices, iters, final, trace, yp, yn = _kernels.greedy(
        zinv_p, zinv_n, *p.u.arrays(), gp, gn, p.distance_fn.kernel_id, p.s, p.max_iterations
    )
    choices = tuple(int(c) for c in choices)
    x_tilde = product(*(gens[c] for c in choices))
    return AttackOutcome(
        success=bool(ok),
        x_tilde_gens=choices,
        x_tilde=x_tilde,
        y_tilde=NormalForm.from_arrays(yp, yn),
        iterations_used=int(iters),
        final_distance=int(final),
        distance_trace=tuple(int(t) for t in trace),
    )


def equations(
    v: PublicView,
    max_iterations: Optional[int] = None,
    distance_choice: Optional[Mapping[GeneratorSet, DistanceFunction]] = None,
) -> dict[EquationId, DecompositionProblem]:
    n = 2 * v.L if max_iterations is None else max_iterations
    choice = dict(DEFAULT_CHOICE if distance_choice is None else distance_choice)
    zi = inverse_nf(v.z)
    rhs = {
        EquationId.U1: (v.z, v.u1),
        EquationId.U2: (v.z, v.u2),
        EquationId.U1_INV: (zi, inverse_nf(v.u1)),
        EquationId.U2_INV: (zi, inverse_nf(v.u2)),
    }
    return {
        eq: DecompositionProblem(z, u, v.s, ATTACKED_SIDE[eq], choice[ATTACKED_SIDE[eq]], n)
        for eq, (z, u) in rhs.items()
    }


def recover_shared_key(eq: EquationId | str, x_tilde: NormalForm, y_tilde: NormalForm, v: PublicView) -> NormalForm:
    eq = EquationId(eq)
    if eq is EquationId.U1:
        return product(x_tilde, v.u2, y_tilde)
    if eq is EquationId.U2:
        return product(x_tilde, v.u1, y_tilde)
    # x~ z^-1 y~ = u^-1 turns into y~^-1 z x~^-1 = u, a decomposition of u.
    a, b = inverse_nf(y_tilde), inverse_nf(x_tilde)
    if eq is EquationId.U1_INV:
        return product(a, v.u2, b)
    return product(a, v.u1, b)


def is_sound(p: DecompositionProblem, out: AttackOutcome) -> bool:
    """Re-check a reported success from scratch."""
    gens = signed_generators(p.attacked_side, p.s)
    return (
        out.success
        and evaluate(p.distance_fn, out.y_tilde, p.s) == 0
        and is_member(partner(p.attacked_side), out.y_tilde, p.s)
        and product(*(gens[c] for c in out.x_tilde_gens)) == out.x_tilde
        and multiply(out.x_tilde, multiply(p.z, out.y_tilde)) == p.u
    )


def attack_instance(
    v: PublicView,
    distance_choice: Optional[Mapping[GeneratorSet, DistanceFunction]] = None,
    max_iterations: Optional[int] = None,
    which: Optional[list[EquationId]] = None,
    threads: int = 1,
) -> InstanceAttackReport:
    choice = dict(DEFAULT_CHOICE if distance_choice is None else distance_choice)
    problems = equations(v, max_iterations, choice)
    order = list(EquationId) if which is None else [EquationId(e) for e in which]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda e: greedy_descent(problems[e]), order))
    else:
        results = [greedy_descent(problems[e]) for e in order]
    outcomes = dict(zip(order, results))
    report = InstanceAttackReport(outcomes, False, distance_choice=choice)
    for eq in order:
        out = outcomes[eq]
        if out.success:
            report.overall_success = True
            report.solved_by = eq
            report.recovered_key = recover_shared_key(eq, out.x_tilde, out.y_tilde, v)
            break
    return report
