import random

import numpy as np
import pytest

from thompson_attack.attack import (
    ATTACKED_SIDE,
    AttackOutcome,
    DecompositionProblem,
    EquationId,
    PairingError,
    attack_instance,
    complement,
    equations,
    greedy_descent,
    is_sound,
    recover_shared_key,
)
from thompson_attack.distance import DistanceFunction as D
from thompson_attack.fgroup import IDENTITY, inverse_nf, invert_word, multiply, nf_length, parse_nf, product
from thompson_attack.protocol import ProtocolInstance, generate_instance, public_view
from thompson_attack.rewriting import normalize_by_rules
from thompson_attack.subgroups import GeneratorSet as G, is_member_A, is_member_B, signed_generators

from conftest import random_nf


def test_complement_examples(rng):
    z = parse_nf("x1 x4 x2^-1")
    assert complement(z, IDENTITY, z) == IDENTITY
    x, u = parse_nf("x0 x1^-1"), parse_nf("x0 x4 x1^-1")
    assert str(complement(IDENTITY, x, u)) == "x3"
    assert str(normalize_by_rules(invert_word(x.spelling()) + u.spelling())) == "x3"
    for _ in range(10_000):
        z, x, u = (random_nf(rng, 20, 10) for _ in range(3))
        assert multiply(x, multiply(z, complement(z, x, u))) == u


def test_greedy_trivial_secrets():
    z = parse_nf("x0 x3 x5^-1 x1^-1")
    out = greedy_descent(DecompositionProblem(z, z, 3, G.A, D.DB, 10))
    assert out.success and out.iterations_used == 0
    assert out.x_tilde == IDENTITY and out.y_tilde == IDENTITY
    assert out.distance_trace == ()


def test_greedy_first_iteration_by_enumeration():
    u = parse_nf("x0 x4 x1^-1")
    assert product(parse_nf("x0 x1^-1"), parse_nf("x3")) == u
    # Oracle: literal rewriting of z^-1 g^-1 u for every candidate in order.
    found = []
    for g in signed_generators(G.A, 2):
        y = normalize_by_rules(invert_word(g.spelling()) + u.spelling())
        found.append((str(g), str(y), sum(1 for i in y.pos + y.neg if i <= 2)))
    assert found[0] == ("x0 x1^-1", "x3", 0)
    out = greedy_descent(DecompositionProblem(IDENTITY, u, 2, G.A, D.DB, 4))
    assert out.success and out.iterations_used == 1
    assert str(out.x_tilde) == "x0 x1^-1" and str(out.y_tilde) == "x3"
    assert out.x_tilde_gens == (0,)


def test_pairing_is_checked():
    with pytest.raises(PairingError):
        DecompositionProblem(IDENTITY, IDENTITY, 3, G.A, D.DA_MAX, 5)
    with pytest.raises(PairingError):
        DecompositionProblem(IDENTITY, IDENTITY, 3, G.B, D.DB, 5)
    with pytest.raises(ValueError):
        DecompositionProblem(IDENTITY, IDENTITY, 3, G.B, D.DA, 0)


@pytest.fixture(scope="module")
def small_instances():
    rng = np.random.default_rng(77)
    return [generate_instance(3, 24, rng) for _ in range(40)]


def test_equations_layout(small_instances):
    inst = small_instances[0]
    v = public_view(inst)
    probs = equations(v, 17)
    assert {p.s for p in probs.values()} == {3}
    assert {p.max_iterations for p in probs.values()} == {17}
    assert probs[EquationId.U1_INV].u == inverse_nf(inst.u1)
    assert probs[EquationId.U2_INV].z == inverse_nf(inst.z)
    assert equations(v)[EquationId.U1].max_iterations == 2 * v.L
    # true secrets solve each equation with the attacked element on the left
    truths = {
        EquationId.U1: (inst.a1, inst.b1),
        EquationId.U2: (inst.b2, inst.a2),
        EquationId.U1_INV: (inverse_nf(inst.b1), inverse_nf(inst.a1)),
        EquationId.U2_INV: (inverse_nf(inst.a2), inverse_nf(inst.b2)),
    }
    for eq, (x, y) in truths.items():
        p = probs[eq]
        assert p.attacked_side is ATTACKED_SIDE[eq]
        assert complement(p.z, x, p.u) == y
        assert recover_shared_key(eq, x, y, v) == inst.K


def test_soundness_and_determinism(small_instances):
    hits = 0
    for inst in small_instances:
        v = public_view(inst)
        for fn_a in (D.DB, D.DB_WEIGHTED):
            for fn_b in (D.DA, D.DA_WEIGHTED, D.DA_MAX):
                for eq, p in equations(v, None, {G.A: fn_a, G.B: fn_b}).items():
                    out = greedy_descent(p)
                    assert out.iterations_used <= p.max_iterations
                    assert len(out.distance_trace) == out.iterations_used
                    assert out == greedy_descent(p)
                    assert product(*(signed_generators(p.attacked_side, 3)[c] for c in out.x_tilde_gens)) == out.x_tilde
                    assert multiply(out.x_tilde, multiply(p.z, out.y_tilde)) == p.u
                    if out.success:
                        hits += 1
                        assert is_sound(p, out)
                        assert recover_shared_key(eq, out.x_tilde, out.y_tilde, v) == inst.K
                    else:
                        assert out.final_distance == out.distance_trace[-1] > 0
    assert hits > 0


def test_attack_instance_identity_secrets():
    z = parse_nf("x1 x2 x7^-1")
    inst = ProtocolInstance.from_secrets(3, 2, IDENTITY, IDENTITY, IDENTITY, IDENTITY, z)
    rep = attack_instance(public_view(inst))
    assert rep.overall_success and rep.recovered_key == z
    assert rep.solved_by is EquationId.U1


def test_attack_instance_threads_match_sequential(small_instances):
    for inst in small_instances[:10]:
        v = public_view(inst)
        seq = attack_instance(v)
        par = attack_instance(v, threads=4)
        assert seq.outcomes == par.outcomes
        assert seq.recovered_key == par.recovered_key
        assert seq.overall_success == any(o.success for o in seq.outcomes.values())
        if seq.recovered_key is not None:
            assert seq.recovered_key == inst.K
