"""Fiat-Shamir compiled sigma protocols for linear relations.

A statement is a list of equations ``lhs = sum(w_name * base)`` over any of
the three groups. Witness names shared between equations are proven equal
because they receive a single response. Proofs are stored as
``(challenge, responses)``; the verifier recomputes the commit messages

    T = sum(s_name * base) + challenge * lhs

and accepts iff hashing them reproduces the challenge.
"""

from __future__ import annotations

from dataclasses import dataclass

from .group import Elem, length_prefixed


@dataclass(frozen=True)
class Equation:
    lhs: Elem
    terms: tuple  # ((base, witness_name), ...)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class SigmaProof:
    challenge: int
    responses: tuple

    def __post_init__(self):
        object.__setattr__(self, "responses", tuple(self.responses))


def witness_names(equations) -> list[str]:
    names = []
    for eq in equations:
        for _, name in eq.terms:
            if name not in names:
                names.append(name)
    return names


def _challenge(pp, tag: bytes, equations, names, commitments, context: bytes) -> int:
    parts = [context]
    for eq, t in zip(equations, commitments):
        parts.append(eq.lhs.group.encode())
        parts.append(eq.lhs.to_bytes())
        for base, name in eq.terms:
            parts.append(base.to_bytes())
            parts.append(names.index(name).to_bytes(2, "big"))
        parts.append(t.to_bytes())
    return pp.hash_to_scalar(tag, [length_prefixed(parts)])


def _combine(eq, values: dict, extra=None):
    acc = eq.lhs.backend.identity(eq.lhs.group) if extra is None else extra
    for base, name in eq.terms:
        acc = acc + base * values[name]
    return acc


def prove(pp, tag: bytes, equations, witnesses: dict, context: bytes, rng) -> SigmaProof:
    names = witness_names(equations)
    nonces = {n: pp.random_scalar(rng, nonzero=False) for n in names}
    commitments = [_combine(eq, nonces) for eq in equations]
    c = _challenge(pp, tag, equations, names, commitments, context)
    q = pp.q
    return SigmaProof(c, [(nonces[n] - c * witnesses[n]) % q for n in names])


def commitments_from(equations, proof: SigmaProof) -> list:
    names = witness_names(equations)
    responses = dict(zip(names, proof.responses))
    return [_combine(eq, responses, eq.lhs * proof.challenge) for eq in equations]


def verify(pp, tag: bytes, equations, proof: SigmaProof, context: bytes) -> bool:
    names = witness_names(equations)
    if not isinstance(proof, SigmaProof) or len(proof.responses) != len(names):
        return False
    if not all(isinstance(s, int) and 0 <= s < pp.q for s in proof.responses):
        return False
    if not isinstance(proof.challenge, int) or not 0 <= proof.challenge < pp.q:
        return False
    commitments = commitments_from(equations, proof)
    return _challenge(pp, tag, equations, names, commitments, context) == proof.challenge


def simulate(pp, equations, challenge: int, rng):
    """Zero-knowledge simulator with a programmed challenge.

    Returns ``(commitments, proof)`` satisfying every verification equation
    without using any witness. The hash is not consulted, which is what
    "programmable" means here.
    """
    names = witness_names(equations)
    proof = SigmaProof(challenge % pp.q, [pp.random_scalar(rng, nonzero=False) for _ in names])
    return commitments_from(equations, proof), proof


def check_equations(equations, witnesses: dict) -> bool:
    """Witness-side sanity check (used by provers that refuse bad inputs)."""
    return all(_combine(eq, witnesses) == eq.lhs for eq in equations)
