"""Canonical binary encoding of every artifact, plus the JSON envelope.

Binary layout::

    b"VCRD" | version (1) | type tag (1) | params digest prefix (8) | body | sha256 (32)

The trailing hash covers everything before it. Bodies use fixed-width
scalars and group elements, 4-byte big-endian lengths and counts, and sorted
collections, so equal artifacts always encode to equal bytes and the decoder
refuses every other encoding.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import json
import struct

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from cryptography.hazmat.primitives.serialization import Encoding, NoEncryption, PrivateFormat

from .cl import IssuerPublicKey, IssuerSecretKey, Signature
from .commitment import Commitment, Opening, PositionProof
from .errors import ConfigError, DecodeError, IntegrityError, UsageError, VcredError, VersionError
from .group import G1, G2, PublicParams, params_from_group_id
from .proofs import Predicate, PresentationProof, ProofOfOpening, UpdateLinkProof
from .protocol import (
    Authority,
    AuthorityPublicKey,
    AuthRequest,
    AuthResponse,
    Credential,
    Criterion,
    IssueQuery,
    IssueResponse,
    Issuer,
    PredicateSpec,
    Presentation,
    UpdateRequest,
    Verifier,
    VerifierChallenge,
    Wallet,
    _PendingIssue,
    _PendingUpdate,
)
from .rangeproof import RangeProof
from .revocation import EpochPublication, NonMembershipProof, RevocationRegistry
from .schemas import Document
from .sigma import SigmaProof

MAGIC = b"VCRD"
VERSION = 1
HEADER = len(MAGIC) + 2 + 8
TRAILER = 32


class Writer:
    def __init__(self, pp):
        self.pp = pp
        self.buf = bytearray()

    def raw(self, data: bytes):
        self.buf += data

    def u8(self, v):
        self.buf += struct.pack(">B", v)

    def u32(self, v):
        self.buf += struct.pack(">I", v)

    def u64(self, v):
        self.buf += struct.pack(">Q", v)

    def blob(self, data: bytes):
        self.u32(len(data))
        self.buf += data

    def str(self, s: str):
        self.blob(s.encode("utf-8"))

    def sint(self, v: int):
        """Sign byte plus minimal big-endian magnitude."""
        mag = abs(v)
        self.u8(1 if v < 0 else 0)
        self.blob(mag.to_bytes((mag.bit_length() + 7) // 8, "big"))

    def scalar(self, v: int):
        self.buf += self.pp.scalar_bytes(v)

    def elem(self, e):
        self.buf += e.to_bytes()

    def seq(self, items, fn):
        items = list(items)
        self.u32(len(items))
        for it in items:
            fn(it)

    def opt(self, value, fn):
        if value is None:
            self.u8(0)
        else:
            self.u8(1)
            fn(value)


class Reader:
    def __init__(self, pp, data: bytes, offset=0, end=None):
        self.pp = pp
        self.data = data
        self.pos = offset
        self.end = len(data) if end is None else end

    def fail(self, msg):
        raise DecodeError(msg, self.pos)

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > self.end:
            self.fail(f"truncated input: need {n} bytes")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return bytes(out)

    def u8(self):
        return self.take(1)[0]

    def u32(self):
        return struct.unpack(">I", self.take(4))[0]

    def u64(self):
        return struct.unpack(">Q", self.take(8))[0]

    def blob(self):
        return self.take(self.u32())

    def str(self):
        at = self.pos
        try:
            return self.blob().decode("utf-8")
        except UnicodeDecodeError:
            raise DecodeError("invalid UTF-8", at) from None

    def sint(self):
        at = self.pos
        sign = self.u8()
        mag = self.blob()
        if sign > 1 or (mag and mag[0] == 0) or (sign == 1 and not mag):
            raise DecodeError("non-canonical integer", at)
        v = int.from_bytes(mag, "big")
        return -v if sign else v

    def boolean(self):
        at = self.pos
        v = self.u8()
        if v > 1:
            raise DecodeError("boolean must be 0 or 1", at)
        return bool(v)

    def scalar(self):
        at = self.pos
        width = len(self.pp.scalar_bytes(0))
        data = self.take(width)
        v = int.from_bytes(data, "big")
        if v >= self.pp.q:
            raise DecodeError("non-canonical scalar", at)
        return v

    def elem(self, group):
        at = self.pos
        data = self.take(self.pp.backend.width(group))
        try:
            return self.pp.decode(group, data)
        except DecodeError as exc:
            raise DecodeError(str(exc), at) from None

    def seq(self, fn, sorted_by=None):
        at = self.pos
        n = self.u32()
        if n > self.end - self.pos:
            raise DecodeError(f"count {n} exceeds remaining input", at)
        items = [fn() for _ in range(n)]
        if sorted_by is not None:
            keys = [sorted_by(x) for x in items]
            if any(a >= b for a, b in zip(keys, keys[1:])):
                raise DecodeError("collection is not strictly sorted", at)
        return items

    def opt(self, fn):
        return fn() if self.boolean() else None


# -- per-type bodies ------------------------------------------------------------


def _w_value(w, v):
    if v is None:
        w.u8(0)
    elif isinstance(v, str):
        w.u8(1)
        w.str(v)
    elif isinstance(v, int) and not isinstance(v, bool):
        w.u8(2)
        w.sint(v)
    else:
        raise TypeError(f"cannot encode document value {v!r}")


def _r_value(r):
    at = r.pos
    kind = r.u8()
    if kind == 0:
        return None
    if kind == 1:
        return r.str()
    if kind == 2:
        return r.sint()
    raise DecodeError(f"unknown value kind {kind}", at)


def _w_pp(w, pp):
    w.str(pp.group_id)
    w.str(pp.security_level)


def _r_pp(r):
    at = r.pos
    group_id, level = r.str(), r.str()
    try:
        return params_from_group_id(group_id, level)
    except ConfigError as exc:
        raise DecodeError(str(exc), at) from None


def _w_pk(w, pk):
    w.u32(pk.l)
    w.elem(pk.X)
    w.elem(pk.Y)
    for z in pk.Z:
        w.elem(z)
    for x in pk.W:
        w.elem(x)


def _r_pk(r):
    l = _count(r)
    X, Y = r.elem(G2), r.elem(G2)
    Z = [r.elem(G1) for _ in range(l)]
    W = [r.elem(G2) for _ in range(l)]
    return IssuerPublicKey(r.pp, X, Y, tuple(Z), tuple(W))


def _count(r):
    at = r.pos
    n = r.u32()
    if n > r.end - r.pos:
        raise DecodeError(f"count {n} exceeds remaining input", at)
    return n


def _w_sk(w, sk):
    w.scalar(sk.x)
    w.scalar(sk.y)
    w.seq(sk.z, w.scalar)


def _r_sk(r):
    return IssuerSecretKey(r.scalar(), r.scalar(), tuple(r.seq(r.scalar)))


def _w_com(w, c):
    w.u32(c.l)
    w.elem(c.c)


def _r_com(r):
    l = r.u32()
    return Commitment(r.elem(G1), l)


def _w_sigma(w, p):
    w.scalar(p.challenge)
    w.seq(p.responses, w.scalar)


def _r_sigma_parts(r):
    return r.scalar(), tuple(r.seq(r.scalar))


def _w_sig(w, s):
    w.u32(len(s.A))
    w.elem(s.a)
    for x in s.A:
        w.elem(x)
    w.elem(s.b)
    for x in s.B:
        w.elem(x)
    w.elem(s.c)


def _r_sig(r):
    l = _count(r)
    a = r.elem(G1)
    A = [r.elem(G1) for _ in range(l)]
    b = r.elem(G1)
    B = [r.elem(G1) for _ in range(l)]
    return Signature(a, A, b, B, r.elem(G1))


def _w_position_proof(w, p):
    w.u32(p.position)
    _w_sigma(w, p)


def _r_position_proof(r):
    pos = r.u32()
    return PositionProof(pos, *_r_sigma_parts(r))


def _w_range(w, p):
    w.seq(p.bit_commitments, w.elem)
    w.scalar(p.challenge)
    w.seq(p.c0, w.scalar)
    w.seq(p.s0, w.scalar)
    w.seq(p.s1, w.scalar)
    w.scalar(p.s_rec)


def _r_range(r):
    bits = r.seq(lambda: r.elem(G1))
    c = r.scalar()
    return RangeProof(bits, c, r.seq(r.scalar), r.seq(r.scalar), r.seq(r.scalar), r.scalar())


def _w_predicate(w, p):
    w.u32(p.position)
    w.str(p.op)
    w.sint(p.threshold)
    w.u32(p.n_bits)


def _r_predicate(r):
    at = r.pos
    pos, op, thr, n = r.u32(), r.str(), r.sint(), r.u32()
    try:
        return Predicate(pos, op, thr, n)
    except ValueError as exc:
        raise DecodeError(str(exc), at) from None


def _w_presentation_proof(w, p):
    _w_sig(w, p.signature)
    w.seq(p.disclosed, lambda kv: (w.u32(kv[0]), w.scalar(kv[1])))
    w.seq(p.predicates, lambda x: _w_predicate(w, x))
    w.seq(p.attribute_commitments, w.elem)
    w.seq(p.range_proofs, lambda x: _w_range(w, x))
    w.u32(p.serial_position)
    w.opt(p.serial_commitment, w.elem)
    _w_sigma(w, p)


def _r_presentation_proof(r):
    sig = _r_sig(r)
    disclosed = r.seq(lambda: (r.u32(), r.scalar()), sorted_by=lambda kv: kv[0])
    preds = r.seq(lambda: _r_predicate(r))
    coms = r.seq(lambda: r.elem(G1))
    rps = r.seq(lambda: _r_range(r))
    sp = r.u32()
    sc = r.opt(lambda: r.elem(G1))
    c, resp = _r_sigma_parts(r)
    return PresentationProof(sig, tuple(disclosed), preds, coms, rps, sp, sc, c, resp)


def _w_nonmem(w, p):
    w.u64(p.epoch)
    w.elem(p.U)
    w.elem(p.V)
    _w_sigma(w, p)


def _r_nonmem(r):
    e = r.u64()
    U, V = r.elem(G2), r.elem(G2)
    return NonMembershipProof(e, U, V, *_r_sigma_parts(r))


def _w_publication(w, p):
    w.u64(p.epoch)
    w.seq(p.tags, w.elem)
    w.raw(p.digest)


def _tag_key(t):
    return t.to_bytes()


def _r_publication(r):
    e = r.u64()
    tags = r.seq(lambda: r.elem(G1), sorted_by=_tag_key)
    return EpochPublication(e, tags, r.take(32))


def _w_link(w, p):
    w.u32(p.position)
    w.scalar(p.new_value)
    _w_sigma(w, p)
    _w_position_proof(w, p.position_proof)


def _r_link(r):
    pos, val = r.u32(), r.scalar()
    c, resp = _r_sigma_parts(r)
    return UpdateLinkProof(pos, val, c, resp, _r_position_proof(r))


def _w_doc(w, d):
    w.str(d.schema_id)
    w.str(d.wid)
    w.seq(d.fields, lambda kv: (w.str(kv[0]), _w_value(w, kv[1])))


def _r_doc(r):
    sid, wid = r.str(), r.str()
    at = r.pos
    fields = r.seq(lambda: (r.str(), _r_value(r)))
    if len({k for k, _ in fields}) != len(fields):
        raise DecodeError("duplicate document field", at)
    return Document(sid, tuple(fields), wid)


def _w_cred(w, c):
    _w_sig(w, c.signature)
    w.seq(c.attributes, w.scalar)
    w.scalar(c.m0)
    w.scalar(c.serial)
    w.blob(c.issuer_fp)
    w.str(c.schema_id)
    _w_doc(w, c.doc)


def _r_cred(r):
    sig = _r_sig(r)
    M = r.seq(r.scalar)
    m0, serial, fp, sid = r.scalar(), r.scalar(), r.blob(), r.str()
    return Credential(sig, M, m0, serial, fp, sid, _r_doc(r))


def _w_auth_req(w, a):
    _w_doc(w, a.doc)
    _w_com(w, a.com)
    _w_sigma(w, a.binding)


def _r_auth_req(r):
    doc, com = _r_doc(r), _r_com(r)
    return AuthRequest(doc, com, SigmaProof(*_r_sigma_parts(r)))


def _w_auth_resp(w, a):
    w.str(a.wid)
    w.u8(a.verdict)
    w.str(a.schema_id)
    _w_com(w, a.com)
    w.blob(a.signature)


def _r_auth_resp(r):
    wid = r.str()
    verdict = r.boolean()
    return AuthResponse(wid, int(verdict), r.str(), _r_com(r), r.blob())


def _w_query(w, q):
    _w_com(w, q.com)
    _w_sigma(w, q.proof)
    w.str(q.wid)
    w.str(q.schema_id)
    w.blob(q.session_id)


def _r_query(r):
    com = _r_com(r)
    proof = ProofOfOpening(*_r_sigma_parts(r))
    return IssueQuery(com, proof, r.str(), r.str(), r.blob())


def _w_issue_resp(w, x):
    w.blob(x.session_id)
    _w_sig(w, x.signature)
    w.scalar(x.serial)


def _r_issue_resp(r):
    sid = r.blob()
    return IssueResponse(sid, _r_sig(r), r.scalar())


def _w_pspec(w, p):
    w.str(p.field)
    w.str(p.op)
    w.sint(p.threshold)
    w.u32(p.n_bits)


def _r_pspec(r):
    return PredicateSpec(r.str(), r.str(), r.sint(), r.u32())


def _w_criterion(w, c):
    w.str(c.verifier_id)
    w.str(c.schema_id)
    w.seq(c.disclose, w.str)
    w.seq(c.predicates, lambda p: _w_pspec(w, p))


def _r_criterion(r):
    vid, sid = r.str(), r.str()
    disclose = r.seq(r.str, sorted_by=lambda s: s)
    return Criterion(vid, sid, tuple(disclose), tuple(r.seq(lambda: _r_pspec(r))))


def _w_challenge(w, c):
    w.str(c.verifier_id)
    w.blob(c.nonce)


def _r_challenge(r):
    return VerifierChallenge(r.str(), r.blob())


def _w_presentation(w, p):
    w.str(p.schema_id)
    w.str(p.verifier_id)
    w.blob(p.nonce)
    w.u64(p.epoch)
    w.seq(p.disclosed, lambda kv: (w.str(kv[0]), _w_value(w, kv[1])))
    _w_presentation_proof(w, p.proof)
    _w_nonmem(w, p.non_membership)


def _r_presentation(r):
    sid, vid, nonce, epoch = r.str(), r.str(), r.blob(), r.u64()
    disclosed = r.seq(lambda: (r.str(), _r_value(r)), sorted_by=lambda kv: kv[0])
    proof = _r_presentation_proof(r)
    return Presentation(sid, vid, nonce, epoch, tuple(disclosed), proof, _r_nonmem(r))


def _w_update(w, u):
    w.blob(u.session_id)
    w.str(u.schema_id)
    w.str(u.field_name)
    _w_value(w, u.new_value)
    w.scalar(u.old_serial)
    _w_com(w, u.old_com)
    _w_com(w, u.new_com)
    _w_presentation_proof(w, u.possession)
    _w_link(w, u.link)


def _r_update(r):
    sid, schema_id, name, value, serial = r.blob(), r.str(), r.str(), _r_value(r), r.scalar()
    old, new = _r_com(r), _r_com(r)
    return UpdateRequest(sid, schema_id, name, value, serial, old, new,
                         _r_presentation_proof(r), _r_link(r))


def _w_registry(w, reg):
    w.u64(reg.epoch)
    w.seq(sorted(reg.revoked_serials), w.scalar)
    w.seq(sorted(reg.published.items()), lambda kv: (w.u64(kv[0]), w.seq(kv[1], w.elem)))
    w.raw(reg.digest)


def _r_registry(r):
    epoch = r.u64()
    revoked = r.seq(r.scalar, sorted_by=lambda s: s)
    at = r.pos
    published = r.seq(lambda: (r.u64(), tuple(r.seq(lambda: r.elem(G1), sorted_by=_tag_key))),
                      sorted_by=lambda kv: kv[0])
    if not published or published[-1][0] != epoch:
        raise DecodeError("registry history does not end at the current epoch", at)
    digest = r.take(32)
    reg = RevocationRegistry(r.pp, epoch, revoked, dict(published))
    if reg.digest != digest:
        raise IntegrityError("registry chain digest does not recompute", r.pos - 32)
    return reg


def _w_wallet(w, x):
    _w_pk(w, x.pk)
    w.str(x.wid)
    w.seq(sorted(x.credentials.items()), lambda kv: (w.blob(kv[0]), _w_cred(w, kv[1])))

    def pend(kv):
        s, p = kv
        w.blob(s)
        _w_doc(w, p.doc)
        w.seq(p.M, w.scalar)
        w.scalar(p.m0)
        _w_com(w, p.com)

    def pend_up(kv):
        s, p = kv
        w.blob(s)
        w.blob(p.cred_id)
        _w_doc(w, p.doc)
        w.seq(p.M, w.scalar)
        w.scalar(p.m0)

    w.seq(sorted(x.pending.items()), pend)
    w.seq(sorted(x.pending_updates.items()), pend_up)


def _r_wallet(r):
    pk = _r_pk(r)
    wid = r.str()
    creds = r.seq(lambda: (r.blob(), _r_cred(r)), sorted_by=lambda kv: kv[0])

    def pend():
        s, doc = r.blob(), _r_doc(r)
        M = tuple(r.seq(r.scalar))
        return s, _PendingIssue(doc, M, r.scalar(), _r_com(r))

    def pend_up():
        s, cid, doc = r.blob(), r.blob(), _r_doc(r)
        M = tuple(r.seq(r.scalar))
        return s, _PendingUpdate(cid, doc, M, r.scalar())

    pending = r.seq(pend, sorted_by=lambda kv: kv[0])
    updates = r.seq(pend_up, sorted_by=lambda kv: kv[0])
    return Wallet(pk, wid, credentials=dict(creds), pending=dict(pending),
                  pending_updates=dict(updates))


def _w_issuer(w, x):
    _w_sk(w, x.sk)
    _w_pk(w, x.pk)
    w.blob(x.authority_key)
    w.u64(x.counter)
    _w_registry(w, x.registry)


def _r_issuer(r):
    sk, pk = _r_sk(r), _r_pk(r)
    key, counter = r.blob(), r.u64()
    return Issuer(sk, pk, key, _r_registry(r), counter)


def _w_authority(w, a):
    w.blob(a.signing_key.private_bytes(Encoding.Raw, PrivateFormat.Raw, NoEncryption()))
    w.opt(a.issuer_pk, lambda pk: _w_pk(w, pk))


def _r_authority(r):
    at = r.pos
    raw = r.blob()
    if len(raw) != 32:
        raise DecodeError("authority key must be 32 bytes", at)
    return Authority(Ed25519PrivateKey.from_private_bytes(raw), r.opt(lambda: _r_pk(r)))


def _r_authority_pub(r):
    at = r.pos
    raw = r.blob()
    if len(raw) != 32:
        raise DecodeError("authority key must be 32 bytes", at)
    return AuthorityPublicKey(raw)


def _w_verifier(w, v):
    _w_pk(w, v.pk)
    w.str(v.verifier_id)
    w.opt(v.publication, lambda p: _w_publication(w, p))
    w.seq(sorted(v.issued), w.blob)
    w.seq(sorted(v.used), w.blob)


def _r_verifier(r):
    pk, vid = _r_pk(r), r.str()
    pub = r.opt(lambda: _r_publication(r))
    issued = r.seq(r.blob, sorted_by=lambda b: b)
    used = r.seq(r.blob, sorted_by=lambda b: b)
    return Verifier(pk, vid, pub, issued, used)


# (tag, class, message type name, writer, reader)
_TYPES = [
    (1, PublicParams, "public-params", _w_pp, _r_pp),
    (2, IssuerPublicKey, "issuer-public-key", _w_pk, _r_pk),
    (3, IssuerSecretKey, "issuer-secret-key", _w_sk, _r_sk),
    (4, Commitment, "commitment", _w_com, _r_com),
    (5, Opening, "opening", lambda w, o: w.scalar(o.m0), lambda r: Opening(r.scalar())),
    (6, PositionProof, "position-proof", _w_position_proof, _r_position_proof),
    (7, SigmaProof, "sigma-proof", _w_sigma, lambda r: SigmaProof(*_r_sigma_parts(r))),
    (8, ProofOfOpening, "proof-of-opening", _w_sigma, lambda r: ProofOfOpening(*_r_sigma_parts(r))),
    (9, Signature, "signature", _w_sig, _r_sig),
    (10, RangeProof, "range-proof", _w_range, _r_range),
    (11, Predicate, "predicate", _w_predicate, _r_predicate),
    (12, PresentationProof, "presentation-proof", _w_presentation_proof, _r_presentation_proof),
    (13, NonMembershipProof, "non-membership-proof", _w_nonmem, _r_nonmem),
    (14, EpochPublication, "epoch-publication", _w_publication, _r_publication),
    (15, UpdateLinkProof, "update-link-proof", _w_link, _r_link),
    (16, Document, "document", _w_doc, _r_doc),
    (17, Credential, "credential", _w_cred, _r_cred),
    (18, AuthRequest, "auth-request", _w_auth_req, _r_auth_req),
    (19, AuthResponse, "auth-response", _w_auth_resp, _r_auth_resp),
    (20, IssueQuery, "issue-query", _w_query, _r_query),
    (21, IssueResponse, "issue-response", _w_issue_resp, _r_issue_resp),
    (22, Criterion, "criterion", _w_criterion, _r_criterion),
    (23, VerifierChallenge, "verifier-challenge", _w_challenge, _r_challenge),
    (24, Presentation, "presentation", _w_presentation, _r_presentation),
    (25, UpdateRequest, "update-request", _w_update, _r_update),
    (26, RevocationRegistry, "registry", _w_registry, _r_registry),
    (27, Wallet, "wallet-state", _w_wallet, _r_wallet),
    (28, Issuer, "issuer-state", _w_issuer, _r_issuer),
    (29, Authority, "authority-state", _w_authority, _r_authority),
    (30, Verifier, "verifier-state", _w_verifier, _r_verifier),
    (31, AuthorityPublicKey, "authority-public-key", lambda w, a: w.blob(a.key), _r_authority_pub),
]
_BY_CLASS = {cls: (tag, name, w) for tag, cls, name, w, _ in _TYPES}
_BY_TAG = {tag: (cls, name, r) for tag, cls, name, _, r in _TYPES}
_BY_NAME = {name: tag for tag, _, name, _, _ in _TYPES}
MESSAGE_TYPES = tuple(_BY_NAME)


def type_name(obj_or_cls) -> str:
    cls = obj_or_cls if isinstance(obj_or_cls, type) else type(obj_or_cls)
    try:
        return _BY_CLASS[cls][1]
    except KeyError:
        raise TypeError(f"{cls.__name__} is not a registered artifact type") from None


def _params_of(obj):
    if isinstance(obj, PublicParams):
        return obj
    for attr in ("pp", "pk", "issuer_pk"):
        v = getattr(obj, attr, None)
        if isinstance(v, PublicParams):
            return v
        if v is not None and isinstance(getattr(v, "pp", None), PublicParams):
            return v.pp
    return None


def encode(obj, pp=None) -> bytes:
    """Canonical bytes for ``obj``; ``pp`` is needed when ``obj`` does not carry it."""
    cls = type(obj)
    if cls not in _BY_CLASS:
        raise TypeError(f"{cls.__name__} is not a registered artifact type")
    tag, _, write = _BY_CLASS[cls]
    pp = _params_of(obj) or pp
    if pp is None:
        raise TypeError(f"encoding a {cls.__name__} needs public parameters")
    w = Writer(pp)
    w.raw(MAGIC)
    w.u8(VERSION)
    w.u8(tag)
    w.raw(pp.digest()[:8])
    write(w, obj)
    body = bytes(w.buf)
    return body + hashlib.sha256(body).digest()


def decode(data: bytes, pp=None, expected=None):
    """Inverse of :func:`encode`. Raises :class:`DecodeError` (with offset) on any defect."""
    data = bytes(data)
    if len(data) < HEADER + TRAILER:
        raise DecodeError("truncated input", len(data))
    if data[:4] != MAGIC:
        raise DecodeError("bad magic", 0)
    if data[4] != VERSION:
        raise VersionError(f"unsupported version {data[4]}", 4)
    body, trailer = data[:-TRAILER], data[-TRAILER:]
    if hashlib.sha256(body).digest() != trailer:
        raise IntegrityError("digest mismatch", len(body))
    tag = data[5]
    if tag not in _BY_TAG:
        raise DecodeError(f"unknown artifact tag {tag}", 5)
    cls, name, read = _BY_TAG[tag]
    if expected is not None and cls is not expected:
        raise DecodeError(f"expected {type_name(expected)}, found {name}", 5)
    prefix = data[6:HEADER]
    if cls is PublicParams:
        r = Reader(None, data, HEADER, len(body))
    else:
        if pp is None:
            raise UsageError("decoding needs public parameters")
        if pp.digest()[:8] != prefix:
            raise DecodeError("artifact was made under different public parameters", 6)
        r = Reader(pp, data, HEADER, len(body))
    try:
        obj = read(r)
    except DecodeError:
        raise
    except (VcredError, ValueError, TypeError, IndexError) as exc:
        raise DecodeError(f"invalid {name}: {exc}", r.pos) from None
    if r.pos != r.end:
        raise DecodeError("trailing bytes after artifact", r.pos)
    if cls is PublicParams and obj.digest()[:8] != prefix:
        raise DecodeError("parameter digest prefix does not match", 6)
    return obj


# -- envelope -------------------------------------------------------------------

ROLES = ("authority", "wallet", "issuer", "verifier", "public")


def wrap(obj, role: str, session_id: bytes = b"", pp=None) -> str:
    """JSON envelope around the canonical payload; the digest is over the binary."""
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")
    payload = encode(obj, pp)
    env = {
        "version": VERSION,
        "role": role,
        "msg_type": type_name(obj),
        "session_id": session_id.hex(),
        "payload": base64.urlsafe_b64encode(payload).decode("ascii"),
        "digest": hashlib.sha256(payload).hexdigest(),
    }
    return json.dumps(env, sort_keys=True, indent=1) + "\n"


def unwrap_envelope(text):
    """Parse and check an envelope; returns ``(header dict, payload bytes)``."""
    try:
        env = json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise DecodeError(f"envelope is not JSON: {exc}", 0) from None
    if not isinstance(env, dict):
        raise DecodeError("envelope must be an object", 0)
    keys = {"version", "role", "msg_type", "session_id", "payload", "digest"}
    if set(env) != keys:
        raise DecodeError(f"envelope keys must be {sorted(keys)}", 0)
    if env["version"] != VERSION:
        raise VersionError(f"unsupported envelope version {env['version']!r}", 0)
    if env["msg_type"] not in _BY_NAME:
        raise DecodeError(f"unknown message type {env['msg_type']!r}", 0)
    if env["role"] not in ROLES:
        raise DecodeError(f"unknown role {env['role']!r}", 0)
    try:
        payload = base64.urlsafe_b64decode(env["payload"].encode("ascii"))
        bytes.fromhex(env["session_id"])
    except (binascii.Error, ValueError, AttributeError, UnicodeEncodeError):
        raise DecodeError("envelope payload or session id is malformed", 0) from None
    if hashlib.sha256(payload).hexdigest() != env["digest"]:
        raise IntegrityError("envelope digest mismatch", 0)
    return env, payload


def unwrap(text, pp=None, expected=None):
    env, payload = unwrap_envelope(text)
    obj = decode(payload, pp, expected)
    if type_name(obj) != env["msg_type"]:
        raise DecodeError("envelope type does not match its payload", 0)
    return obj


def session_of(text) -> bytes:
    return bytes.fromhex(unwrap_envelope(text)[0]["session_id"])
