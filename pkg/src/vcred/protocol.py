"""The four roles (authority, wallet, issuer, verifier) and the end-to-end flows.

Message flow for issuance::

    wallet --AuthRequest--> authority --AuthResponse--> wallet
    wallet --(AuthResponse, IssueQuery)--> issuer --IssueResponse--> wallet

The authority checks the document and attests the commitment the wallet will
later hand to the issuer, so the issuer never sees the document yet knows the
commitment encodes an authenticated one. The issuer folds its own serial into
the commitment before signing.
"""

from __future__ import annotations

import datetime as dt
import enum
import logging
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from . import sigma
from .cl import IssuerPublicKey, IssuerSecretKey, Signature, cl_issue_on_commitment, cl_keygen, cl_verify
from .commitment import Commitment, VCParams, prove_positions, vc_commit, vc_update, verify_positions
from .errors import PolicyError, Rejected, SchemaError, StaleEpochError, UsageError, VcredError
from .group import length_prefixed
from .proofs import (
    Predicate,
    PresentationProof,
    ProofOfOpening,
    UpdateLinkProof,
    make_context,
    prove_opening,
    prove_presentation,
    prove_update_link,
    verify_opening,
    verify_presentation,
    verify_update_link,
)
from .revocation import (
    EpochPublication,
    NonMembershipProof,
    RevocationRegistry,
    prove_non_membership,
    token_revoked,
    verify_non_membership,
)
from .schemas import (
    RESERVED,
    SCHEMA_POSITION,
    SERIAL_POSITION,
    Document,
    builtin_schemas,
    days_since_epoch,
    encode_attributes,
    encode_field_value,
    schema_scalar,
    validate_document,
    years_before,
)

log = logging.getLogger(__name__)

BIND_TAG = b"vcred/auth-bind/v1"
DEFAULT_L = 16


class Reason(enum.Enum):
    OK = "ok"
    AUTH_INVALID = "auth-invalid"
    AUTH_DENIED = "auth-denied"
    AUTH_MISMATCH = "auth-mismatch"
    BAD_PROOF = "bad-proof"
    SCHEMA_MISMATCH = "schema-mismatch"
    REPLAY = "replay"
    COVERAGE = "coverage"
    REVOKED = "revoked"
    STALE_EPOCH = "stale-epoch"
    POLICY = "policy"
    BAD_SIGNATURE = "bad-signature"


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Reason
    detail: str = ""

    def __bool__(self):
        return self.accepted


def new_session_id(rng) -> bytes:
    return rng.randrange(1 << 128).to_bytes(16, "big")


def _issue_context(pk, wid, schema_id, session_id) -> bytes:
    return length_prefixed([b"vcred/issue/v1", pk.fingerprint_bytes(), wid.encode(),
                            schema_id.encode(), session_id])


def _bind_context(pk, wid, schema_id) -> bytes:
    return length_prefixed([b"vcred/auth/v1", pk.fingerprint_bytes(), wid.encode(), schema_id.encode()])


def _update_context(pk, session_id) -> bytes:
    return length_prefixed([b"vcred/update/v1", pk.fingerprint_bytes(), session_id])


# -- messages -----------------------------------------------------------------


@dataclass(frozen=True)
class AuthRequest:
    """Document plus the commitment the wallet wants attested.

    ``binding`` opens every position of ``com`` to the document's encoding
    and proves knowledge of the hiding randomness.
    """

    doc: Document
    com: Commitment = field(repr=False)
    binding: sigma.SigmaProof = field(repr=False)


@dataclass(frozen=True)
class AuthResponse:
    wid: str
    verdict: int
    schema_id: str
    com: Commitment = field(repr=False)
    signature: bytes = field(repr=False)

    def signed_bytes(self, issuer_fp: bytes) -> bytes:
        return auth_payload(self.wid, self.verdict, self.schema_id, self.com, issuer_fp)


def auth_payload(wid, verdict, schema_id, com, issuer_fp) -> bytes:
    return length_prefixed([b"vcred/auth-response/v1", wid.encode(), bytes([verdict]),
                            schema_id.encode(), com.c.to_bytes(), issuer_fp])


@dataclass(frozen=True)
class IssueQuery:
    com: Commitment = field(repr=False)
    proof: ProofOfOpening = field(repr=False)
    wid: str = ""
    schema_id: str = ""
    session_id: bytes = b""


@dataclass(frozen=True)
class IssueResponse:
    session_id: bytes
    signature: Signature = field(repr=False)
    serial: int = field(repr=False)


@dataclass(frozen=True)
class Credential:
    signature: Signature = field(repr=False)
    attributes: tuple = field(repr=False)
    m0: int = field(repr=False)
    serial: int = field(repr=False)
    issuer_fp: bytes = field(repr=False)
    schema_id: str = ""
    doc: Document = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))

    @property
    def wid(self) -> str:
        return self.doc.wid

    def verify(self, pk) -> bool:
        return (pk.fingerprint_bytes() == self.issuer_fp
                and cl_verify(pk, self.attributes, self.m0, self.signature))


@dataclass(frozen=True)
class PredicateSpec:
    field: str
    op: str
    threshold: int
    n_bits: int = 16


@dataclass(frozen=True)
class Criterion:
    """What a verifier demands: disclosed fields and predicates over others."""

    verifier_id: str
    schema_id: str
    disclose: tuple = ()
    predicates: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "disclose", tuple(sorted(set(self.disclose))))
        object.__setattr__(self, "predicates", tuple(self.predicates))

    def resolve(self, schema, l):
        """Positions to disclose and the :class:`Predicate` list; validates field names."""
        if schema.schema_id != self.schema_id:
            raise SchemaError(f"criterion is for {self.schema_id}, not {schema.schema_id}")
        positions = set()
        for name in self.disclose:
            if name == "serial":
                raise PolicyError("the serial cannot be disclosed")
            if name == "schema":
                continue
            positions.add(schema.position(name))
        preds = []
        for p in self.predicates:
            if p.field in RESERVED:
                raise PolicyError(f"no predicates on reserved attribute {p.field!r}")
            if not schema.field(p.field).range:
                raise SchemaError(f"field {p.field!r} is not range-capable")
            preds.append(Predicate(schema.position(p.field), p.op, p.threshold, p.n_bits))
        preds.sort(key=lambda p: p.position)
        positions.add(SCHEMA_POSITION)
        for p in preds:
            if p.position > l:
                raise SchemaError("criterion needs more positions than the key has")
        return positions, tuple(preds)


def age_at_least(years: int, reference: dt.date, field_name="birthdate", n_bits=16) -> PredicateSpec:
    """Holder was born on or before ``reference`` minus ``years``."""
    return PredicateSpec(field_name, "<=", days_since_epoch(years_before(reference, years)), n_bits)


@dataclass(frozen=True)
class VerifierChallenge:
    verifier_id: str
    nonce: bytes


@dataclass(frozen=True)
class Presentation:
    schema_id: str
    verifier_id: str
    nonce: bytes
    epoch: int
    disclosed: tuple  # ((field name, plaintext value), ...) sorted by name
    proof: PresentationProof = field(repr=False)
    non_membership: NonMembershipProof = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "disclosed", tuple(sorted(self.disclosed)))


@dataclass(frozen=True)
class UpdateRequest:
    session_id: bytes
    schema_id: str
    field_name: str
    new_value: object
    old_serial: int
    old_com: Commitment = field(repr=False)
    new_com: Commitment = field(repr=False)
    possession: PresentationProof = field(repr=False)
    link: UpdateLinkProof = field(repr=False)


def _nonmem_context(ctx, proof) -> bytes:
    return length_prefixed([ctx, b"non-membership", proof.challenge.to_bytes(64, "big")])


# -- authority ------------------------------------------------------------------


@dataclass(frozen=True)
class AuthorityPublicKey:
    """Raw Ed25519 verification key the issuer trusts."""

    key: bytes


class Authority:
    """Trusted document checker. Keeps a signing key and nothing about claimants.

    ``issuer_pk`` may be left unset until the issuer's key exists; it is needed
    to check the commitment in an :class:`AuthRequest`.
    """

    def __init__(self, signing_key: Ed25519PrivateKey, issuer_pk: IssuerPublicKey | None = None,
                 schemas=None, today=None):
        self.signing_key = signing_key
        self.issuer_pk = issuer_pk
        self.schemas = builtin_schemas() if schemas is None else schemas
        self.today = today

    @classmethod
    def create(cls, issuer_pk, rng, **kw):
        """Deterministic key from ``rng`` (tests pin it; the CLI passes a system RNG)."""
        return cls(Ed25519PrivateKey.from_private_bytes(rng.randrange(1 << 256).to_bytes(32, "big")),
                   issuer_pk, **kw)

    @property
    def public_key(self) -> Ed25519PublicKey:
        return self.signing_key.public_key()

    def public_key_bytes(self) -> bytes:
        return self.public_key.public_bytes(Encoding.Raw, PublicFormat.Raw)

    def public(self) -> AuthorityPublicKey:
        return AuthorityPublicKey(self.public_key_bytes())

    def _check(self, request: AuthRequest) -> list:
        doc = request.doc
        schema = self.schemas.get(doc.schema_id)
        if schema is None:
            return [f"unknown schema {doc.schema_id!r}"]
        problems = validate_document(doc, schema, self.today)
        if problems:
            return problems
        pk = self.issuer_pk
        params = VCParams.from_issuer_key(pk)
        try:
            M, _ = encode_attributes(pk.pp, doc, schema, pk.l)
        except SchemaError as exc:
            return [str(exc)]
        if not isinstance(request.com, Commitment) or request.com.l != pk.l:
            return ["commitment has the wrong length"]
        public = dict(enumerate(M, start=1))
        if not verify_positions(params, request.com, public, request.binding, tag=BIND_TAG,
                                context=_bind_context(pk, doc.wid, doc.schema_id)):
            return ["commitment does not encode the document"]
        return []

    def respond(self, request: AuthRequest) -> AuthResponse:
        if self.issuer_pk is None:
            raise UsageError("the authority needs the issuer public key")
        problems = self._check(request)
        verdict = 0 if problems else 1
        if problems:
            log.info("authentication refused: %s", "; ".join(problems))
        doc = request.doc
        payload = auth_payload(doc.wid, verdict, doc.schema_id, request.com,
                               self.issuer_pk.fingerprint_bytes())
        return AuthResponse(doc.wid, verdict, doc.schema_id, request.com, self.signing_key.sign(payload))


def faith_auth(authority: Authority, request: AuthRequest) -> AuthResponse:
    return authority.respond(request)


# -- wallet ---------------------------------------------------------------------


@dataclass
class _PendingIssue:
    doc: Document
    M: tuple
    m0: int
    com: Commitment


@dataclass
class _PendingUpdate:
    cred_id: bytes
    doc: Document
    M: tuple
    m0: int


class Wallet:
    """Claimant state: credentials keyed by id plus in-flight sessions."""

    def __init__(self, issuer_pk: IssuerPublicKey, wid: str, schemas=None,
                 credentials=None, pending=None, pending_updates=None):
        self.pk = issuer_pk
        self.wid = wid
        self.schemas = builtin_schemas() if schemas is None else schemas
        self.credentials = dict(credentials or {})
        self.pending = dict(pending or {})
        self.pending_updates = dict(pending_updates or {})

    @property
    def pp(self):
        return self.pk.pp

    def _schema(self, schema_id):
        try:
            return self.schemas[schema_id]
        except KeyError:
            raise SchemaError(f"unknown schema {schema_id!r}") from None

    def ask(self, doc: Document, rng, session_id=None):
        """Commit to the document's attributes; returns ``(AuthRequest, IssueQuery)``."""
        if doc.wid != self.wid:
            raise UsageError("document is bound to another wallet id")
        schema = self._schema(doc.schema_id)
        pk = self.pk
        params = VCParams.from_issuer_key(pk)
        M, _ = encode_attributes(self.pp, doc, schema, pk.l)
        com, opening = vc_commit(params, M, rng)
        binding = prove_positions(params, com, M, opening, range(1, pk.l + 1), rng, tag=BIND_TAG,
                                  context=_bind_context(pk, doc.wid, doc.schema_id))
        session_id = new_session_id(rng) if session_id is None else session_id
        proof = prove_opening(self.pp, params, com, M, opening,
                              _issue_context(pk, doc.wid, doc.schema_id, session_id), rng)
        self.pending[session_id] = _PendingIssue(doc, M, opening.m0, com)
        return AuthRequest(doc, com, binding), IssueQuery(com, proof, doc.wid, doc.schema_id, session_id)

    def receive(self, response: IssueResponse) -> bytes:
        """Finish issuance; returns the new credential's id."""
        pend = self.pending.get(response.session_id)
        if pend is None:
            raise Rejected(Reason.REPLAY, "no pending issuance for this session")
        M = list(pend.M)
        M[SERIAL_POSITION - 1] = response.serial % self.pp.q
        cred = Credential(response.signature, M, pend.m0, response.serial % self.pp.q,
                          self.pk.fingerprint_bytes(), pend.doc.schema_id, pend.doc)
        if not cred.verify(self.pk):
            raise Rejected(Reason.BAD_SIGNATURE, "issued signature does not verify")
        del self.pending[response.session_id]
        self.credentials[response.session_id] = cred
        return response.session_id

    def show(self, cred_id: bytes, criterion: Criterion, publication: EpochPublication,
             challenge: VerifierChallenge, rng) -> Presentation:
        cred = self.credentials[cred_id]
        pk = self.pk
        pp = self.pp
        if criterion.verifier_id != challenge.verifier_id:
            raise UsageError("challenge and criterion name different verifiers")
        schema = self._schema(cred.schema_id)
        positions, preds = criterion.resolve(schema, pk.l)
        ctx = make_context(pp, pk, challenge.verifier_id, challenge.nonce)
        serial_blind = pp.random_scalar(rng, nonzero=False)
        proof = prove_presentation(pk, cred.signature, cred.attributes, cred.m0, positions, preds,
                                   ctx, rng, serial_position=SERIAL_POSITION, serial_blind=serial_blind)
        nonmem = prove_non_membership(pp, cred.serial, publication.epoch, proof.serial_commitment,
                                      serial_blind, _nonmem_context(ctx, proof), rng)
        disclosed = tuple((n, cred.wid if n == "wid" else cred.doc.get(n))
                          for n in criterion.disclose if n != "schema")
        return Presentation(cred.schema_id, challenge.verifier_id, challenge.nonce,
                            publication.epoch, disclosed, proof, nonmem)

    def request_update(self, cred_id: bytes, field_name: str, new_value, rng) -> UpdateRequest:
        cred = self.credentials[cred_id]
        schema = self._schema(cred.schema_id)
        if field_name in RESERVED:
            raise PolicyError(f"reserved attribute {field_name!r} cannot be updated")
        if not schema.field(field_name).updatable:
            raise PolicyError(f"field {field_name!r} is not updatable")
        pk, pp = self.pk, self.pp
        j = schema.position(field_name)
        params = VCParams.from_issuer_key(pk)
        new_scalar = encode_field_value(pp, schema, field_name, new_value)
        M_old = cred.attributes
        M_new = list(M_old)
        M_new[j - 1] = new_scalar
        old_com, old_open = vc_commit(params, M_old, rng, m0=cred.m0)
        new_com, new_open = vc_update(params, old_com, M_old[j - 1], new_scalar, j, old_open, rng)
        session_id = new_session_id(rng)
        ctx = _update_context(pk, session_id)
        possession = prove_presentation(pk, cred.signature, M_old, cred.m0, {SERIAL_POSITION}, (),
                                        ctx, rng, serial_position=None, link=(params, old_com))
        link = prove_update_link(params, old_com, new_com, M_old, M_new, (old_open, new_open), j, rng,
                                 context=ctx)
        self.pending_updates[session_id] = _PendingUpdate(
            cred_id, cred.doc.replace_field(field_name, new_value), tuple(M_new), new_open.m0)
        return UpdateRequest(session_id, cred.schema_id, field_name, new_value, cred.serial,
                             old_com, new_com, possession, link)

    def finish_update(self, response: IssueResponse) -> bytes:
        pend = self.pending_updates.get(response.session_id)
        if pend is None:
            raise Rejected(Reason.REPLAY, "no pending update for this session")
        M = list(pend.M)
        M[SERIAL_POSITION - 1] = response.serial % self.pp.q
        cred = Credential(response.signature, M, pend.m0, response.serial % self.pp.q,
                          self.pk.fingerprint_bytes(), pend.doc.schema_id, pend.doc)
        if not cred.verify(self.pk):
            raise Rejected(Reason.BAD_SIGNATURE, "re-issued signature does not verify")
        del self.pending_updates[response.session_id]
        self.credentials[response.session_id] = cred
        self.credentials.pop(pend.cred_id, None)
        return response.session_id


def faith_ask(wallet: Wallet, doc: Document, rng):
    return wallet.ask(doc, rng)


def faith_show(wallet: Wallet, cred_id, criterion, publication, challenge, rng) -> Presentation:
    return wallet.show(cred_id, criterion, publication, challenge, rng)


# -- issuer ---------------------------------------------------------------------


class Issuer:
    """Holds the CL key, the issuance counter and the revocation registry.

    No credentials or attributes are stored.
    """

    def __init__(self, sk: IssuerSecretKey, pk: IssuerPublicKey, authority_key: bytes,
                 registry: RevocationRegistry | None = None, counter=0, schemas=None, today=None):
        self.sk = sk
        self.pk = pk
        self.authority_key = authority_key
        self.registry = registry if registry is not None else RevocationRegistry(pk.pp)
        self.counter = counter
        self.schemas = builtin_schemas() if schemas is None else schemas
        self.today = today

    @classmethod
    def create(cls, pp, rng, authority_key=b"", l=DEFAULT_L, **kw):
        sk, pk = cl_keygen(pp, l, rng)
        return cls(sk, pk, authority_key, **kw)

    @property
    def pp(self):
        return self.pk.pp

    def _sign_with_serial(self, com: Commitment, rng, placeholder=0):
        pp = self.pp
        serial = pp.random_scalar(rng)
        while self.registry.is_revoked(serial):
            serial = pp.random_scalar(rng)
        delta = (serial - placeholder) % pp.q
        final = Commitment(com.c + self.pk.Z[SERIAL_POSITION - 1] * delta, com.l)
        sig = cl_issue_on_commitment(self.sk, self.pk, final, rng)
        self.counter += 1
        return sig, serial

    def _check_auth(self, R: AuthResponse):
        if not isinstance(R, AuthResponse) or not isinstance(R.com, Commitment):
            raise Rejected(Reason.AUTH_INVALID, "malformed authentication response")
        try:
            key = Ed25519PublicKey.from_public_bytes(self.authority_key)
            key.verify(R.signature, R.signed_bytes(self.pk.fingerprint_bytes()))
        except (InvalidSignature, ValueError, TypeError):
            raise Rejected(Reason.AUTH_INVALID, "authority signature does not verify") from None
        if R.verdict != 1:
            raise Rejected(Reason.AUTH_DENIED, "authority refused the document")

    def issue(self, R: AuthResponse, Q: IssueQuery, rng) -> IssueResponse:
        self._check_auth(R)
        if R.wid != Q.wid:
            raise Rejected(Reason.AUTH_MISMATCH, "response and query name different wallets")
        if R.schema_id != Q.schema_id:
            raise Rejected(Reason.AUTH_MISMATCH, "response and query name different schemas")
        if not isinstance(Q.com, Commitment) or R.com != Q.com:
            raise Rejected(Reason.AUTH_MISMATCH, "query commitment was not attested")
        if Q.schema_id not in self.schemas:
            raise Rejected(Reason.SCHEMA_MISMATCH, f"unknown schema {Q.schema_id!r}")
        params = VCParams.from_issuer_key(self.pk)
        if not verify_opening(self.pp, params, Q.com, Q.proof,
                              _issue_context(self.pk, Q.wid, Q.schema_id, Q.session_id)):
            raise Rejected(Reason.BAD_PROOF, "opening proof does not verify")
        sig, serial = self._sign_with_serial(Q.com, rng)
        return IssueResponse(Q.session_id, sig, serial)

    def process_update(self, req: UpdateRequest, rng) -> IssueResponse:
        pk, pp = self.pk, self.pp
        schema = self.schemas.get(req.schema_id)
        if schema is None:
            raise Rejected(Reason.SCHEMA_MISMATCH, f"unknown schema {req.schema_id!r}")
        if req.field_name in RESERVED:
            raise Rejected(Reason.POLICY, f"reserved attribute {req.field_name!r}")
        try:
            fspec = schema.field(req.field_name)
            j = schema.position(req.field_name)
            new_scalar = encode_field_value(pp, schema, req.field_name, req.new_value)
        except SchemaError as exc:
            raise Rejected(Reason.SCHEMA_MISMATCH, str(exc)) from None
        if not fspec.updatable:
            raise Rejected(Reason.POLICY, f"field {req.field_name!r} is not updatable")
        if req.field_name == schema.expiry_field:
            today = self.today or dt.date.today()
            if days_since_epoch(req.new_value) <= days_since_epoch(today):
                raise Rejected(Reason.POLICY, "new expiry date is not in the future")
        params = VCParams.from_issuer_key(pk)
        ctx = _update_context(pk, req.session_id)
        old_serial = req.old_serial % pp.q
        try:
            ok = verify_presentation(pk, req.possession, {SERIAL_POSITION: old_serial}, (), ctx,
                                     serial_position=None, link=(params, req.old_com))
        except (AttributeError, TypeError):
            ok = False
        if not ok:
            raise Rejected(Reason.BAD_PROOF, "possession proof does not verify")
        if self.registry.is_revoked(old_serial):
            raise Rejected(Reason.REVOKED, "credential was already revoked")
        link = req.link
        if not (isinstance(link, UpdateLinkProof) and link.new_value == new_scalar
                and verify_update_link(params, req.old_com, req.new_com, j, link, context=ctx)):
            raise Rejected(Reason.BAD_PROOF, "update link does not verify")
        self.registry.revoke(old_serial)
        sig, serial = self._sign_with_serial(req.new_com, rng, placeholder=old_serial)
        return IssueResponse(req.session_id, sig, serial)

    def revoke(self, serial: int) -> bool:
        return self.registry.revoke(serial)

    def publish_epoch(self) -> EpochPublication:
        return self.registry.publish()


def faith_issue(issuer: Issuer, R: AuthResponse, Q: IssueQuery, rng) -> IssueResponse:
    return issuer.issue(R, Q, rng)


def faith_update(wallet: Wallet, issuer: Issuer, cred_id: bytes, field_name: str, new_value, rng) -> bytes:
    """Run both update phases in-process; returns the new credential id."""
    req = wallet.request_update(cred_id, field_name, new_value, rng)
    return wallet.finish_update(issuer.process_update(req, rng))


# -- verifier -------------------------------------------------------------------


class Verifier:
    def __init__(self, issuer_pk: IssuerPublicKey, verifier_id: str,
                 publication: EpochPublication | None = None, issued=(), used=(), schemas=None):
        self.pk = issuer_pk
        self.verifier_id = verifier_id
        self.publication = publication
        self.issued = set(issued)
        self.used = set(used)
        self.schemas = builtin_schemas() if schemas is None else schemas

    @property
    def pp(self):
        return self.pk.pp

    def challenge(self, rng) -> VerifierChallenge:
        nonce = rng.randrange(1 << 128).to_bytes(16, "big")
        self.issued.add(nonce)
        return VerifierChallenge(self.verifier_id, nonce)

    def update_publication(self, publication: EpochPublication):
        if self.publication is not None and publication.epoch < self.publication.epoch:
            raise StaleEpochError("refusing to roll the epoch back")
        self.publication = publication

    def verify(self, pres: Presentation, criterion: Criterion) -> Verdict:
        try:
            verdict = self._verify(pres, criterion)
        except (VcredError, ValueError, TypeError, AttributeError, IndexError, KeyError) as exc:
            # malformed input that slipped past the structural checks
            verdict = Verdict(False, Reason.BAD_PROOF, f"malformed presentation: {exc}")
        if verdict.reason is not Reason.REPLAY and isinstance(pres, Presentation):
            # any presentation that reached the checks burns its nonce
            self.issued.discard(pres.nonce)
            self.used.add(pres.nonce)
        return verdict

    def _verify(self, pres, criterion) -> Verdict:
        def no(reason, detail=""):
            return Verdict(False, reason, detail)

        if not isinstance(pres, Presentation):
            return no(Reason.BAD_PROOF, "not a presentation")
        pp, pk = self.pp, self.pk
        if pres.schema_id != criterion.schema_id:
            return no(Reason.SCHEMA_MISMATCH, "presentation is for another schema")
        schema = self.schemas.get(criterion.schema_id)
        if schema is None:
            return no(Reason.SCHEMA_MISMATCH, "unknown schema")
        if pres.verifier_id != self.verifier_id or criterion.verifier_id != self.verifier_id:
            return no(Reason.BAD_PROOF, "presentation addressed to another verifier")
        try:
            positions, preds = criterion.resolve(schema, pk.l)
        except (SchemaError, PolicyError) as exc:
            return no(Reason.POLICY, str(exc))

        names = tuple(n for n, _ in pres.disclosed)
        wanted = tuple(n for n in criterion.disclose if n != "schema")
        if names != wanted:
            return no(Reason.COVERAGE, "disclosed fields differ from the criterion")
        proof = pres.proof
        if not isinstance(proof, PresentationProof) or tuple(proof.predicates) != preds:
            return no(Reason.COVERAGE, "predicates differ from the criterion")

        if pres.nonce in self.used or pres.nonce not in self.issued:
            return no(Reason.REPLAY, "nonce was not issued or is already spent")
        pub = self.publication
        if pub is None or pres.epoch != pub.epoch:
            return no(Reason.STALE_EPOCH, "presentation is not for the current epoch")

        disclosed = {SCHEMA_POSITION: schema_scalar(pp, schema.schema_id)}
        try:
            for name, value in pres.disclosed:
                disclosed[schema.position(name)] = encode_field_value(pp, schema, name, value)
        except (SchemaError, TypeError, AttributeError):
            return no(Reason.BAD_PROOF, "disclosed value does not match its field type")
        if set(disclosed) != positions:
            return no(Reason.COVERAGE, "disclosed positions differ from the criterion")

        ctx = make_context(pp, pk, self.verifier_id, pres.nonce)
        if not verify_presentation(pk, proof, disclosed, preds, ctx, serial_position=SERIAL_POSITION):
            return no(Reason.BAD_PROOF, "presentation proof does not verify")
        nm = pres.non_membership
        try:
            if not isinstance(nm, NonMembershipProof) or nm.epoch != pres.epoch:
                return no(Reason.BAD_PROOF, "malformed non-membership proof")
            if token_revoked(pp, nm, pub):
                return no(Reason.REVOKED, "credential is revoked")
            if not verify_non_membership(pp, nm, pub, proof.serial_commitment,
                                         _nonmem_context(ctx, proof)):
                return no(Reason.BAD_PROOF, "non-membership proof does not verify")
        except (StaleEpochError, AttributeError, TypeError, ValueError):
            return no(Reason.BAD_PROOF, "non-membership proof does not verify")
        return Verdict(True, Reason.OK)


def faith_verify_presentation(verifier: Verifier, pres: Presentation, criterion: Criterion) -> Verdict:
    return verifier.verify(pres, criterion)
