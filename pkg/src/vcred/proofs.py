"""Zero-knowledge proofs used by the credential protocol.

* opening proofs for a vector commitment (issuance request),
* presentation proofs: possession of a CL signature with selective
  disclosure, range predicates, a hidden serial commitment for revocation and
  an optional link to a known commitment,
* update-link proofs between two commitments that differ at one position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import sigma
from .cl import IssuerPublicKey, Signature, cl_randomize, structure_ok
from .commitment import (
    Commitment,
    PositionProof,
    VCParams,
    check_vector,
    opening_equation,
    opening_witnesses,
    vc_open,
    vc_verify,
)
from .errors import (
    CannotSatisfyError,
    InvalidLengthError,
    PolicyError,
    PositionError,
    RedundantPredicateError,
)
from .group import Elem, length_prefixed
from .rangeproof import OPS, check_capacity, pedersen_base, prove_range, verify_range

OPENING_TAG = b"vcred/opening/v1"
PRESENTATION_TAG = b"vcred/presentation/v1"
LINK_TAG = b"vcred/update-link/v1"

SERIAL_POSITION = 2


def signed(value: int, q: int) -> int:
    """Map a scalar back to the signed integer it most plausibly encodes."""
    value %= q
    return value - q if value > q // 2 else value


def make_context(pp, pk, verifier_id: str, nonce: bytes) -> bytes:
    """Challenge context shared by every sub-proof of one presentation."""
    return length_prefixed(
        [b"vcred/ctx/v1", pp.digest(), pk.fingerprint_bytes(), verifier_id.encode(), nonce]
    )


# -- opening ----------------------------------------------------------------


@dataclass(frozen=True)
class ProofOfOpening:
    challenge: int
    responses: tuple

    def __post_init__(self):
        object.__setattr__(self, "responses", tuple(self.responses))


def _opening_ctx(params, com, context):
    return length_prefixed(params.digest_parts() + [com.c.to_bytes(), context])


def prove_opening(pp, params: VCParams, com: Commitment, M, opening, context: bytes, rng):
    M = check_vector(params, M)
    eq = opening_equation(params, com, {})
    p = sigma.prove(pp, OPENING_TAG, [eq], opening_witnesses(M, opening),
                    _opening_ctx(params, com, context), rng)
    return ProofOfOpening(p.challenge, p.responses)


def verify_opening(pp, params: VCParams, com: Commitment, proof, context: bytes) -> bool:
    if not isinstance(proof, ProofOfOpening) or not isinstance(com, Commitment):
        return False
    if com.l != params.l:
        return False
    eq = opening_equation(params, com, {})
    return sigma.verify(pp, OPENING_TAG, [eq], sigma.SigmaProof(proof.challenge, proof.responses),
                        _opening_ctx(params, com, context))


# -- presentation -------------------------------------------------------------


@dataclass(frozen=True)
class Predicate:
    position: int
    op: str
    threshold: int
    n_bits: int = 16

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown predicate operator {self.op!r}")
        if not 1 <= self.n_bits <= 64:
            raise ValueError("n_bits must lie in 1..64")


@dataclass(frozen=True)
class PresentationProof:
    signature: Signature = field(repr=False)
    disclosed: tuple  # ((position, scalar), ...) sorted by position
    predicates: tuple
    attribute_commitments: tuple = field(repr=False)
    range_proofs: tuple = field(repr=False)
    serial_position: int  # 0 when no serial commitment is attached
    serial_commitment: Elem | None = field(repr=False)
    challenge: int = field(repr=False)
    responses: tuple = field(repr=False)

    def __post_init__(self):
        for name in ("disclosed", "predicates", "attribute_commitments", "range_proofs", "responses"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def disclosed_map(self) -> dict:
        return dict(self.disclosed)


def _normalize_disclosed(disclosed, q) -> tuple:
    return tuple(sorted((int(k), int(v) % q) for k, v in dict(disclosed).items()))


def presentation_statement(pk: IssuerPublicKey, sig: Signature, disclosed: dict, predicates,
                           attribute_commitments, serial_position, serial_commitment, link=None):
    """Sigma equations proven by a presentation; shared by prover, verifier and simulator."""
    pp = pk.pp
    q = pp.q
    H = pedersen_base(pp)
    vx = pp.pair(sig.a, pk.X)
    lhs = vx
    terms = [(pp.pair(sig.c, pp.h), "rho"), (-pp.pair(sig.b, pk.X), "m0")]
    for i, Bi in enumerate(sig.B, start=1):
        V = pp.pair(Bi, pk.X)
        if i in disclosed:
            lhs = lhs + V * (disclosed[i] % q)
        else:
            terms.append((-V, f"m{i}"))
    equations = [sigma.Equation(lhs, terms)]
    for pred, C in zip(predicates, attribute_commitments):
        equations.append(sigma.Equation(C, [(pp.g, f"m{pred.position}"), (H, f"r{pred.position}")]))
    if serial_position:
        equations.append(sigma.Equation(serial_commitment, [(pp.g, f"m{serial_position}"), (H, "rs")]))
    if link is not None:
        params, com = link
        equations.append(opening_equation(params, com, disclosed))
    return equations


def _presentation_ctx(pk, sig, disclosed, predicates, serial_position, context, link):
    parts = [context, pk.pp.digest(), pk.fingerprint_bytes()]
    parts += [e.to_bytes() for e in sig.elements()]
    for k, v in disclosed:
        parts += [k.to_bytes(4, "big"), pk.pp.scalar_bytes(v)]
    for p in predicates:
        parts += [p.position.to_bytes(4, "big"), p.op.encode(), pk.pp.scalar_bytes(p.threshold),
                  p.n_bits.to_bytes(2, "big")]
    parts.append(serial_position.to_bytes(4, "big"))
    if link is not None:
        parts += link[0].digest_parts() + [link[1].c.to_bytes()]
    return length_prefixed(parts)


def _range_ctx(context, position, C):
    return length_prefixed([b"range", context, position.to_bytes(4, "big"), C.to_bytes()])


def prove_presentation(pk: IssuerPublicKey, sig: Signature, M, m0: int, disclose, predicates,
                       context: bytes, rng, serial_position=SERIAL_POSITION, serial_blind=None,
                       link=None) -> PresentationProof:
    """Show possession of ``sig`` on ``(M, m0)``, revealing only ``disclose``.

    ``serial_position`` (0 or None disables it) gets a Pedersen commitment
    that the revocation layer proves statements about; ``serial_blind`` is its
    blinding, chosen by the caller so that it can be reused there. ``link``
    is ``(VCParams, Commitment)`` for a commitment that must open to the same
    hidden attributes.
    """
    pp = pk.pp
    q = pp.q
    M = tuple(int(m) % q for m in M)
    if len(M) != pk.l:
        raise InvalidLengthError(f"expected {pk.l} attributes, got {len(M)}")
    disclose = set(disclose)
    for i in disclose:
        if not 1 <= i <= pk.l:
            raise PositionError(f"position {i} outside 1..{pk.l}")
    serial_position = serial_position or 0
    if serial_position and serial_position in disclose:
        raise PolicyError("the serial position cannot be disclosed")
    predicates = tuple(predicates)
    seen = set()
    for p in predicates:
        if not 1 <= p.position <= pk.l:
            raise PositionError(f"predicate position {p.position} outside 1..{pk.l}")
        if p.position in disclose:
            raise RedundantPredicateError(f"position {p.position} is both disclosed and predicated")
        if p.position == serial_position or p.position in seen:
            raise PolicyError(f"position {p.position} cannot carry a predicate here")
        seen.add(p.position)
        check_capacity(signed(M[p.position - 1], q), p.threshold, p.n_bits, p.op)

    rsig = cl_randomize(sig, rng)
    public = rsig.public()
    disclosed = {i: M[i - 1] for i in disclose}
    disclosed_t = _normalize_disclosed(disclosed, q)

    H = pedersen_base(pp)
    witnesses = {"rho": pow(rsig.r_prime, -1, q), "m0": m0 % q}
    witnesses.update({f"m{i}": M[i - 1] for i in range(1, pk.l + 1)})
    attr_coms = []
    for p in predicates:
        r_i = pp.random_scalar(rng, nonzero=False)
        witnesses[f"r{p.position}"] = r_i
        attr_coms.append(pp.g * M[p.position - 1] + H * r_i)
    serial_com = None
    if serial_position:
        if serial_blind is None:
            serial_blind = pp.random_scalar(rng, nonzero=False)
        witnesses["rs"] = serial_blind % q
        serial_com = pp.g * M[serial_position - 1] + H * serial_blind

    equations = presentation_statement(pk, public, disclosed, predicates, attr_coms,
                                       serial_position, serial_com, link)
    ctx = _presentation_ctx(pk, public, disclosed_t, predicates, serial_position, context, link)
    sp = sigma.prove(pp, PRESENTATION_TAG, equations, witnesses, ctx, rng)

    range_proofs = []
    for p, C in zip(predicates, attr_coms):
        range_proofs.append(
            prove_range(pp, C, signed(M[p.position - 1], q), witnesses[f"r{p.position}"],
                        p.threshold, p.n_bits, rng, op=p.op,
                        context=_range_ctx(ctx, p.position, C))
        )
    return PresentationProof(
        signature=public,
        disclosed=disclosed_t,
        predicates=predicates,
        attribute_commitments=attr_coms,
        range_proofs=range_proofs,
        serial_position=serial_position,
        serial_commitment=serial_com,
        challenge=sp.challenge,
        responses=sp.responses,
    )


def verify_presentation(pk: IssuerPublicKey, proof: PresentationProof, disclosed, predicates,
                        context: bytes, serial_position=SERIAL_POSITION, link=None) -> bool:
    pp = pk.pp
    q = pp.q
    if not isinstance(proof, PresentationProof):
        return False
    try:
        disclosed_t = _normalize_disclosed(disclosed, q)
        predicates = tuple(predicates)
        serial_position = serial_position or 0
        if proof.disclosed != disclosed_t or proof.predicates != predicates:
            return False
        if proof.serial_position != serial_position:
            return False
        if serial_position and (
            proof.serial_commitment is None or serial_position in dict(disclosed_t)
        ):
            return False
        if len(proof.attribute_commitments) != len(predicates):
            return False
        if len(proof.range_proofs) != len(predicates):
            return False
        if any(not 1 <= k <= pk.l for k, _ in disclosed_t):
            return False
        if any(p.position in dict(disclosed_t) for p in predicates):
            return False
        sig = proof.signature
        if not structure_ok(pk, sig) or sig.c.is_identity():
            return False
        equations = presentation_statement(
            pk, sig, dict(disclosed_t), predicates, proof.attribute_commitments,
            serial_position, proof.serial_commitment, link,
        )
    except (AttributeError, TypeError, ValueError, IndexError):
        return False
    ctx = _presentation_ctx(pk, sig, disclosed_t, predicates, serial_position, context, link)
    if not sigma.verify(pp, PRESENTATION_TAG, equations,
                        sigma.SigmaProof(proof.challenge, proof.responses), ctx):
        return False
    for p, C, rp in zip(predicates, proof.attribute_commitments, proof.range_proofs):
        if not verify_range(pp, C, p.threshold, p.n_bits, rp, op=p.op,
                            context=_range_ctx(ctx, p.position, C)):
            return False
    return True


# -- update link --------------------------------------------------------------


@dataclass(frozen=True)
class UpdateLinkProof:
    position: int
    new_value: int
    challenge: int
    responses: tuple
    position_proof: PositionProof

    def __post_init__(self):
        object.__setattr__(self, "responses", tuple(self.responses))


def _link_statement(params, com, com_new, j):
    eq_old = opening_equation(params, com, {})
    terms = [(params.g, "n0")]
    for k, Z in enumerate(params.bases, start=1):
        terms.append((Z, f"n{k}" if k == j else f"m{k}"))
    return [eq_old, sigma.Equation(com_new.c, terms)]


def _link_ctx(params, com, com_new, j, context):
    return length_prefixed(
        params.digest_parts() + [com.c.to_bytes(), com_new.c.to_bytes(), j.to_bytes(4, "big"), context]
    )


def prove_update_link(params: VCParams, com, com_new, M, M_new, openings, j: int, rng,
                      context: bytes = b"") -> UpdateLinkProof:
    """Prove ``com`` and ``com_new`` agree everywhere except position ``j``.

    ``openings`` is ``(old_opening, new_opening)``.
    """
    M = check_vector(params, M)
    M_new = check_vector(params, M_new)
    if not 1 <= j <= params.l:
        raise PositionError(f"position {j} outside 1..{params.l}")
    if any(a != b for k, (a, b) in enumerate(zip(M, M_new), start=1) if k != j):
        raise CannotSatisfyError("vectors differ outside the updated position")
    old, new = openings
    witnesses = opening_witnesses(M, old)
    witnesses["n0"] = new.m0
    witnesses[f"n{j}"] = M_new[j - 1]
    eqs = _link_statement(params, com, com_new, j)
    p = sigma.prove(params.pp, LINK_TAG, eqs, witnesses, _link_ctx(params, com, com_new, j, context), rng)
    pos = vc_open(params, com_new, M_new, new, j, rng)
    return UpdateLinkProof(j, M_new[j - 1], p.challenge, p.responses, pos)


def verify_update_link(params: VCParams, com, com_new, j: int, proof, context: bytes = b"") -> bool:
    if not isinstance(proof, UpdateLinkProof) or proof.position != j:
        return False
    if not 1 <= j <= params.l or com.l != params.l or com_new.l != params.l:
        return False
    eqs = _link_statement(params, com, com_new, j)
    ok = sigma.verify(params.pp, LINK_TAG, eqs, sigma.SigmaProof(proof.challenge, proof.responses),
                      _link_ctx(params, com, com_new, j, context))
    return ok and vc_verify(params, com_new, proof.new_value, j, proof.position_proof)
