"""Shpilrain-Ushakov key agreement over (A_s, B_s) in F."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .fgroup import NormalForm, multiply, product, word_from_json, word_to_json, normalize
from .subgroups import GeneratorSet, ParameterError, check_s, sample_element

RECOMMENDED_S = tuple(range(3, 9))
RECOMMENDED_L = tuple(range(256, 321, 2))


@dataclass(frozen=True)
class PublicView:
    s: int
    L: int
    z: NormalForm
    u1: NormalForm
    u2: NormalForm


@dataclass(frozen=True)
class ProtocolInstance:
    s: int
    L: int
    a1: NormalForm
    b1: NormalForm
    a2: NormalForm
    b2: NormalForm
    z: NormalForm
    u1: NormalForm
    u2: NormalForm
    K: NormalForm

    @classmethod
    def from_secrets(cls, s: int, L: int, a1, b1, a2, b2, z) -> "ProtocolInstance":
        """Run steps 1-4 of the protocol for the given secrets."""
        u1 = product(a1, z, b1)
        u2 = product(b2, z, a2)
        k_a = alice_shared_key(a1, b1, u2)
        k_b = bob_shared_key(b2, a2, u1)
        if k_a != k_b:
            raise ArithmeticError("shared keys disagree; secrets do not commute")
        return cls(s, L, a1, b1, a2, b2, z, u1, u2, k_a)


def alice_shared_key(a1: NormalForm, b1: NormalForm, u2: NormalForm) -> NormalForm:
    return product(a1, u2, b1)


def bob_shared_key(b2: NormalForm, a2: NormalForm, u1: NormalForm) -> NormalForm:
    return product(b2, u1, a2)


def generate_instance(s: int, L: int, rng: np.random.Generator) -> ProtocolInstance:
    check_s(s)
    if L < 2 or L % 2:
        raise ParameterError(f"L must be even and >= 2, got {L}")
    a1 = sample_element(GeneratorSet.A, s, L, rng)
    b1 = sample_element(GeneratorSet.B, s, L, rng)
    a2 = sample_element(GeneratorSet.A, s, L, rng)
    b2 = sample_element(GeneratorSet.B, s, L, rng)
    z = sample_element(GeneratorSet.W, s, L, rng)
    return ProtocolInstance.from_secrets(s, L, a1, b1, a2, b2, z)


def public_view(inst: ProtocolInstance) -> PublicView:
    return PublicView(inst.s, inst.L, inst.z, inst.u1, inst.u2)


# -- JSON schema ---------------------------------------------------------


def _enc(u: NormalForm) -> list[list[int]]:
    return word_to_json(u.spelling())


def _dec(data) -> NormalForm:
    return normalize(word_from_json(data))


def instance_to_dict(obj: ProtocolInstance | PublicView) -> dict[str, Any]:
    out: dict[str, Any] = {"s": obj.s, "L": obj.L, "z": _enc(obj.z), "u1": _enc(obj.u1), "u2": _enc(obj.u2)}
    if isinstance(obj, ProtocolInstance):
        out["secrets"] = {k: _enc(getattr(obj, k)) for k in ("a1", "b1", "a2", "b2", "K")}
    return out


def instance_from_dict(data: dict[str, Any]) -> tuple[PublicView, Optional[ProtocolInstance]]:
    """Parse the instance schema; the second item is set only when the
    document carries secrets."""
    try:
        s, L = int(data["s"]), int(data["L"])
        view = PublicView(s, L, _dec(data["z"]), _dec(data["u1"]), _dec(data["u2"]))
    except KeyError as exc:
        raise ValueError(f"instance is missing field {exc.args[0]!r}") from None
    check_s(s)
    secrets = data.get("secrets")
    if not secrets:
        return view, None
    sec = {k: _dec(secrets[k]) for k in ("a1", "b1", "a2", "b2")}
    inst = ProtocolInstance.from_secrets(s, L, z=view.z, **sec)
    if inst.u1 != view.u1 or inst.u2 != view.u2:
        raise ValueError("secrets do not reproduce the public elements")
    if "K" in secrets and _dec(secrets["K"]) != inst.K:
        raise ValueError("stored K does not match the secrets")
    return view, inst


def dumps(obj: ProtocolInstance | PublicView, **kw) -> str:
    return json.dumps(instance_to_dict(obj), **kw)


def loads(text: str) -> tuple[PublicView, Optional[ProtocolInstance]]:
    return instance_from_dict(json.loads(text))
