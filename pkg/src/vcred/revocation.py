"""Revocation registry with per-epoch tags and blinded non-membership proofs.

The issuer publishes, for every epoch ``e``, the sorted list of tags
``t(s, e) = (1/(s+e))*g`` of revoked serials ``s``. A holder never reveals its
own tag. Instead it sends a fresh G2 pair ``(U, V = (s+e)*U)`` and proves
knowledge of ``s`` (the same ``s`` hidden in its presentation's serial
commitment). For each published tag the verifier evaluates the tag equation

    pair(t, V) == pair(g, U)

which holds exactly when ``t`` is the holder's own tag, i.e. when the
credential is revoked. Two presentations in the same epoch therefore share
no element.
"""

from __future__ import annotations

import hashlib
import logging
import struct
from dataclasses import dataclass, field

from . import sigma
from .errors import DegenerateSerialError, StaleEpochError
from .group import G2, Elem, length_prefixed
from .rangeproof import pedersen_base

log = logging.getLogger(__name__)

NONMEM_TAG = b"vcred/non-membership/v1"


def epoch_tag(pp, serial: int, epoch: int) -> Elem:
    k = (serial + epoch) % pp.q
    if k == 0:
        raise DegenerateSerialError("serial + epoch vanishes mod q")
    return pp.g * pow(k, -1, pp.q)


def _chain(prev: bytes, epoch: int, tags) -> bytes:
    return hashlib.sha256(
        length_prefixed(
            [b"vcred/registry-chain/v1", prev, struct.pack(">QI", epoch, len(tags))]
            + [t.to_bytes() for t in tags]
        )
    ).digest()


def _genesis(pp) -> bytes:
    return hashlib.sha256(b"vcred/registry-genesis/v1" + pp.digest()).digest()


@dataclass(frozen=True)
class EpochPublication:
    """What verifiers download: epoch number, sorted tags, chained digest."""

    epoch: int
    tags: tuple = field(repr=False)
    digest: bytes = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(self.tags))

    def contains_tag(self, tag: Elem) -> bool:
        return tag in self.tags


class RevocationRegistry:
    """Issuer-side list of revoked serials and the history of published tags.

    Single writer. ``revoked_serials`` is issuer-private; ``published`` maps
    epoch to the tag tuple that was made public.
    """

    def __init__(self, pp, epoch=0, revoked_serials=(), published=None):
        self.pp = pp
        self.epoch = epoch
        self.revoked_serials = set(revoked_serials)
        if published is None:
            published = {0: ()}
        self.published = {e: tuple(t) for e, t in published.items()}
        self.digest = self.recompute_digest()

    def recompute_digest(self) -> bytes:
        d = _genesis(self.pp)
        for e in sorted(self.published):
            d = _chain(d, e, self.published[e])
        return d

    def is_revoked(self, serial: int) -> bool:
        return serial % self.pp.q in self.revoked_serials

    def revoke(self, serial: int) -> bool:
        """Mark ``serial`` revoked from the next publication. False if it already was."""
        serial %= self.pp.q
        if serial in self.revoked_serials:
            log.warning("serial already revoked; ignoring")
            return False
        self.revoked_serials.add(serial)
        return True

    def tags_for(self, epoch: int) -> tuple:
        tags = []
        for s in self.revoked_serials:
            try:
                tags.append(epoch_tag(self.pp, s, epoch))
            except DegenerateSerialError:
                # such a credential cannot produce a proof for this epoch either
                continue
        return tuple(sorted(tags, key=lambda t: t.to_bytes()))

    def publish(self) -> EpochPublication:
        self.epoch += 1
        tags = self.tags_for(self.epoch)
        self.published[self.epoch] = tags
        self.digest = _chain(self.digest, self.epoch, tags)
        return self.current()

    def current(self) -> EpochPublication:
        return EpochPublication(self.epoch, self.published[self.epoch], self.digest)


def revoke(registry: RevocationRegistry, serial: int) -> RevocationRegistry:
    registry.revoke(serial)
    return registry


def publish_epoch(registry: RevocationRegistry) -> EpochPublication:
    return registry.publish()


@dataclass(frozen=True)
class NonMembershipProof:
    epoch: int
    U: Elem = field(repr=False)
    V: Elem = field(repr=False)
    challenge: int = field(repr=False)
    responses: tuple = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "responses", tuple(self.responses))


def _statement(pp, epoch, U, V, serial_commitment):
    return [
        sigma.Equation(V - U * (epoch % pp.q), [(U, "s")]),
        sigma.Equation(serial_commitment, [(pp.g, "s"), (pedersen_base(pp), "rs")]),
    ]


def _ctx(pp, epoch, context, serial_commitment):
    return length_prefixed(
        [context, pp.digest(), struct.pack(">Q", epoch), serial_commitment.to_bytes()]
    )


def prove_non_membership(pp, serial: int, epoch: int, serial_commitment: Elem, serial_blind: int,
                         context: bytes, rng) -> NonMembershipProof:
    """Blinded epoch token plus a proof that it carries the committed serial."""
    k = (serial + epoch) % pp.q
    if k == 0:
        raise DegenerateSerialError("serial + epoch vanishes mod q")
    U = pp.h * pp.random_scalar(rng)
    V = U * k
    eqs = _statement(pp, epoch, U, V, serial_commitment)
    p = sigma.prove(pp, NONMEM_TAG, eqs, {"s": serial % pp.q, "rs": serial_blind % pp.q},
                    _ctx(pp, epoch, context, serial_commitment), rng)
    return NonMembershipProof(epoch, U, V, p.challenge, p.responses)


def token_revoked(pp, proof: NonMembershipProof, publication: EpochPublication) -> bool:
    """True when some published tag satisfies the tag equation for this token."""
    base = pp.pair(pp.g, proof.U)
    return any(pp.pair(t, proof.V) == base for t in publication.tags)


def verify_non_membership(pp, proof: NonMembershipProof, publication: EpochPublication,
                          serial_commitment: Elem, context: bytes) -> bool:
    """Accept iff no published tag matches and the serial link verifies.

    Raises :class:`StaleEpochError` when the proof targets another epoch.
    """
    if not isinstance(proof, NonMembershipProof) or serial_commitment is None:
        return False
    if proof.epoch != publication.epoch:
        raise StaleEpochError(f"proof for epoch {proof.epoch}, current is {publication.epoch}")
    U, V = proof.U, proof.V
    if not (isinstance(U, Elem) and isinstance(V, Elem)) or U.group != G2 or V.group != G2:
        return False
    if U.is_identity() or V.is_identity():
        return False
    if token_revoked(pp, proof, publication):
        return False
    eqs = _statement(pp, proof.epoch, U, V, serial_commitment)
    return sigma.verify(pp, NONMEM_TAG, eqs, sigma.SigmaProof(proof.challenge, proof.responses),
                        _ctx(pp, proof.epoch, context, serial_commitment))
