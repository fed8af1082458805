"""Hiding, position-binding vector commitment over G1.

    com = m0*g + sum_i m_i*Z_i

``m0`` is the hiding randomness (the "advice" kept by the committer together
with the vector). Positional openings are Fiat-Shamir sigma proofs of size
O(l) that reveal one coordinate and prove knowledge of all the others.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import sigma
from .errors import InvalidLengthError, PositionError
from .group import Elem, length_prefixed

OPEN_TAG = b"vcred/vc-open/v1"


@dataclass(frozen=True)
class VCParams:
    pp: object = field(repr=False)
    g: Elem = field(repr=False)
    bases: tuple = field(repr=False)

    @property
    def l(self) -> int:
        return len(self.bases)

    @classmethod
    def from_issuer_key(cls, pk):
        """Commit under an issuer's Z_i so the issuer can sign the result."""
        return cls(pk.pp, pk.pp.g, tuple(pk.Z))

    def digest_parts(self) -> list[bytes]:
        return [self.pp.digest(), self.g.to_bytes()] + [z.to_bytes() for z in self.bases]


@dataclass(frozen=True)
class Opening:
    m0: int


@dataclass(frozen=True)
class Commitment:
    c: Elem
    l: int


@dataclass(frozen=True)
class PositionProof:
    position: int
    challenge: int
    responses: tuple

    def __post_init__(self):
        object.__setattr__(self, "responses", tuple(self.responses))


def vc_setup(pp, l: int) -> VCParams:
    if l < 1:
        raise InvalidLengthError("vector length must be at least 1")
    bases = tuple(pp.hash_to_g1(b"vc-base", i.to_bytes(4, "big")) for i in range(1, l + 1))
    return VCParams(pp, pp.g, bases)


def check_vector(params: VCParams, M) -> tuple:
    M = tuple(M)
    if len(M) != params.l:
        raise InvalidLengthError(f"expected {params.l} attributes, got {len(M)}")
    return tuple(int(m) % params.pp.q for m in M)


def commit_value(params: VCParams, M, m0: int) -> Elem:
    acc = params.g * m0
    for m, z in zip(M, params.bases):
        acc = acc + z * m
    return acc


def vc_commit(params: VCParams, M, rng, m0: int | None = None):
    """Commit to ``M``. Passing ``m0`` pins the randomness (tests only)."""
    M = check_vector(params, M)
    if m0 is None:
        m0 = params.pp.random_scalar(rng, nonzero=False)
    m0 %= params.pp.q
    return Commitment(commit_value(params, M, m0), params.l), Opening(m0)


def _check_position(params, j):
    if not 1 <= j <= params.l:
        raise PositionError(f"position {j} outside 1..{params.l}")


def vc_update(params, com: Commitment, old, new, j: int, opening: Opening, rng, m0=None):
    """Replace coordinate ``j`` and refresh the hiding randomness."""
    _check_position(params, j)
    q = params.pp.q
    if m0 is None:
        m0 = params.pp.random_scalar(rng, nonzero=False)
    m0 %= q
    c = com.c + params.bases[j - 1] * ((new - old) % q) + params.g * ((m0 - opening.m0) % q)
    return Commitment(c, com.l), Opening(m0)


def opening_equation(params: VCParams, com: Commitment, public: dict, prefix="m"):
    """``com - sum(public) = m0*g + sum(hidden m_k * Z_k)`` as a sigma equation."""
    lhs = com.c
    terms = [(params.g, f"{prefix}0")]
    for k in range(1, params.l + 1):
        if k in public:
            lhs = lhs - params.bases[k - 1] * (public[k] % params.pp.q)
        else:
            terms.append((params.bases[k - 1], f"{prefix}{k}"))
    return sigma.Equation(lhs, terms)


def opening_witnesses(M, opening: Opening, prefix="m") -> dict:
    w = {f"{prefix}0": opening.m0}
    w.update({f"{prefix}{k}": m for k, m in enumerate(M, start=1)})
    return w


def _open_context(params, com, public: dict) -> bytes:
    parts = params.digest_parts() + [com.c.to_bytes()]
    for k in sorted(public):
        parts += [k.to_bytes(4, "big"), params.pp.scalar_bytes(public[k])]
    return length_prefixed(parts)


def prove_positions(params, com, M, opening, public_positions, rng, tag=OPEN_TAG, context=b""):
    """Open several coordinates at once; the rest stay hidden."""
    M = check_vector(params, M)
    for k in public_positions:
        _check_position(params, k)
    public = {k: M[k - 1] for k in public_positions}
    eq = opening_equation(params, com, public)
    ctx = length_prefixed([_open_context(params, com, public), context])
    return sigma.prove(params.pp, tag, [eq], opening_witnesses(M, opening), ctx, rng)


def verify_positions(params, com, public: dict, proof, tag=OPEN_TAG, context=b"") -> bool:
    try:
        for k in public:
            _check_position(params, k)
        if com.l != params.l:
            return False
        public = {k: v % params.pp.q for k, v in public.items()}
        eq = opening_equation(params, com, public)
    except (PositionError, TypeError, AttributeError):
        return False
    ctx = length_prefixed([_open_context(params, com, public), context])
    return sigma.verify(params.pp, tag, [eq], proof, ctx)


def vc_open(params, com, M, opening, i: int, rng) -> PositionProof:
    _check_position(params, i)
    p = prove_positions(params, com, M, opening, [i], rng)
    return PositionProof(i, p.challenge, p.responses)


def vc_verify(params, com, m: int, i: int, proof: PositionProof) -> bool:
    if not isinstance(proof, PositionProof) or proof.position != i:
        return False
    return verify_positions(
        params, com, {i: m}, sigma.SigmaProof(proof.challenge, proof.responses)
    )
