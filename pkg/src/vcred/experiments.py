"""Scripted adversaries against honest roles, and the unlinkability statistic.

Every strategy plays the claimant (possibly colluding with stolen material)
against an honest authority, issuer and verifier, and the verifier's verdicts
are tallied. Must-reject strategies pass only with zero acceptances.

Runs are reproducible: each trial draws from ``random.Random(f"{seed}:{name}:{i}")``.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import math
import random
from collections import Counter
from dataclasses import dataclass, field

from . import wire
from .cl import Signature
from .errors import VcredError
from .group import G1, G2, GT, Elem, setup
from .protocol import (
    Authority,
    Criterion,
    Issuer,
    PredicateSpec,
    Presentation,
    Reason,
    Verdict,
    Verifier,
    Wallet,
    age_at_least,
    faith_update,
)
from .schemas import Document, builtin_schemas, days_since_epoch

REFERENCE_DATE = dt.date(2024, 6, 1)
NAMES = ("Ana Silva", "Bo Chen", "Chidi Okafor", "Dana Levi", "Eero Virtanen", "Fatima Zahra")
NATIONS = ("PT", "CN", "NG", "IL", "FI", "MA", "BR", "IN")


# -- sample data ------------------------------------------------------------------


def _date(rng, start: dt.date, end: dt.date) -> str:
    return (start + dt.timedelta(days=rng.randrange((end - start).days))).isoformat()


def sample_document(schema_id: str, wid: str, rng, today=REFERENCE_DATE) -> Document:
    """Random valid document of the given built-in schema (holder is an adult)."""
    name = rng.choice(NAMES)
    born = _date(rng, dt.date(1950, 1, 1), dt.date(2005, 12, 31))
    expires = _date(rng, today + dt.timedelta(days=30), today + dt.timedelta(days=3650))
    if schema_id == "passport":
        fields = {"name": name, "nationality": rng.choice(NATIONS), "birthdate": born,
                  "expiry": expires, "passport_number": f"P{rng.randrange(10**8):08d}"}
    elif schema_id == "driving_license":
        fields = {"name": name, "birthdate": born, "license_class": rng.choice("ABC"),
                  "expiry": expires, "penalty_points": rng.choice([None, *range(7)])}
    elif schema_id == "medical_certificate":
        fields = {"name": name, "blood_type": rng.choice(["A+", "A-", "B+", "O+", "O-", "AB+"]),
                  "vaccinated": 1, "fitness_score": rng.choice([None, *range(50, 101)]),
                  "valid_until": expires}
    else:
        raise KeyError(schema_id)
    return Document(schema_id, fields, wid)


def standard_criteria(schema_id: str, verifier_id: str, today=REFERENCE_DATE) -> list:
    """Three criteria per built-in schema: bare possession, a disclosure, predicates."""
    base = Criterion(verifier_id, schema_id)
    if schema_id == "passport":
        return [base, Criterion(verifier_id, schema_id, ["nationality"]),
                Criterion(verifier_id, schema_id, ["name"],
                          [age_at_least(18, today),
                           PredicateSpec("expiry", ">=", days_since_epoch(today))])]
    if schema_id == "driving_license":
        return [base, Criterion(verifier_id, schema_id, ["license_class"]),
                Criterion(verifier_id, schema_id, [],
                          [age_at_least(18, today), PredicateSpec("penalty_points", "<=", 6, 4)])]
    if schema_id == "medical_certificate":
        return [base, Criterion(verifier_id, schema_id, ["blood_type"]),
                Criterion(verifier_id, schema_id, [],
                          [PredicateSpec("vaccinated", ">=", 1, 1),
                           PredicateSpec("valid_until", ">=", days_since_epoch(today))])]
    raise KeyError(schema_id)


# -- world ----------------------------------------------------------------------------


class World:
    """Honest authority, issuer and a verifier sharing one set of keys."""

    def __init__(self, pp=None, seed=0, l=None, today=REFERENCE_DATE, verifier_id="verifier-A"):
        self.pp = pp or setup("standard", "mock")
        self.today = today
        rng = random.Random(f"{seed}:world")
        schemas = builtin_schemas()
        if l is None:
            l = max(s.min_length for s in schemas.values())
        self.issuer = Issuer.create(self.pp, rng, l=l, today=today)
        self.authority = Authority.create(self.issuer.pk, rng, today=today)
        self.issuer.authority_key = self.authority.public_key_bytes()
        self.publication = self.issuer.publish_epoch()
        self.verifier = self.new_verifier(verifier_id)

    @property
    def pk(self):
        return self.issuer.pk

    def new_verifier(self, verifier_id):
        return Verifier(self.pk, verifier_id, self.publication)

    def publish(self):
        self.publication = self.issuer.publish_epoch()
        self.verifier.update_publication(self.publication)
        return self.publication

    def enroll(self, wid, rng, schema_id="passport", doc=None):
        """Honest issuance; returns ``(wallet, credential id, issue response)``."""
        wallet = Wallet(self.pk, wid)
        doc = doc or sample_document(schema_id, wid, rng, self.today)
        areq, Q = wallet.ask(doc, rng)
        R = self.authority.respond(areq)
        resp = self.issuer.issue(R, Q, rng)
        return wallet, wallet.receive(resp), resp

    def show(self, wallet, cred_id, criterion, rng, verifier=None):
        verifier = verifier or self.verifier
        return wallet.show(cred_id, criterion, self.publication, verifier.challenge(rng), rng)


def _criterion(world, rng):
    crits = standard_criteria("passport", world.verifier.verifier_id, world.today)
    return crits[2] if rng.random() < 0.5 else crits[1]


def _attempt(world, presentation, criterion, verifier=None):
    verifier = verifier or world.verifier
    try:
        return verifier.verify(presentation, criterion)
    except VcredError as exc:  # pragma: no cover - the verifier should never raise
        return _reject(Reason.BAD_PROOF, f"verifier raised {exc}")


def _reject(reason, detail=""):
    return Verdict(False, reason, detail)


def _reverify(verifier, pres, crit, nonce):
    """Verify with the nonce freshly outstanding, isolating proof soundness from replay."""
    verifier.issued = {nonce}
    verifier.used = set()
    try:
        return verifier.verify(pres, crit)
    except Exception as exc:  # noqa: BLE001 - a crash would count as a harness bug, not an accept
        return _reject(Reason.BAD_PROOF, f"verifier raised {type(exc).__name__}")


# -- transcript walking ------------------------------------------------------------------


def leaves(obj, path=()):
    """``(path, value)`` for every scalar, element, string or bytes inside ``obj``."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        for f in dataclasses.fields(obj):
            yield from leaves(getattr(obj, f.name), path + (f.name,))
    elif isinstance(obj, tuple):
        for i, x in enumerate(obj):
            yield from leaves(x, path + (i,))
    elif isinstance(obj, (Elem, str, bytes)) or (isinstance(obj, int) and not isinstance(obj, bool)):
        yield path, obj


def nodes(obj, path=()):
    """Every sub-object (not only leaves), outermost first, excluding the root."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        children = [(f.name, getattr(obj, f.name)) for f in dataclasses.fields(obj)]
    elif isinstance(obj, tuple):
        children = list(enumerate(obj))
    else:
        return
    for key, child in children:
        yield path + (key,), child
        yield from nodes(child, path + (key,))


def get_at(obj, path):
    for key in path:
        obj = obj[key] if isinstance(key, int) else getattr(obj, key)
    return obj


def replace_at(obj, path, value):
    if not path:
        return value
    head, rest = path[0], path[1:]
    if isinstance(head, int):
        items = list(obj)
        items[head] = replace_at(items[head], rest, value)
        return tuple(items)
    return dataclasses.replace(obj, **{head: replace_at(getattr(obj, head), rest, value)})


def _mutated(value, pp, rng):
    if isinstance(value, Elem):
        gen = {G1: pp.g, G2: pp.h, GT: pp.gt}[value.group]
        return value + gen * pp.random_scalar(rng)
    if isinstance(value, int):
        if value < 1 << 16:  # positions, epochs, bit counts: stay encodable
            return value + 1 + rng.randrange(255)
        return (value + pp.random_scalar(rng)) % pp.q
    if isinstance(value, str):
        return value + "x"
    if isinstance(value, bytes):
        return bytes([value[0] ^ 1]) + value[1:] if value else b"\x01"
    raise TypeError(type(value))


# -- strategies --------------------------------------------------------------------------


@dataclass(frozen=True)
class AdversaryStrategy:
    name: str
    expect: str  # "accept" or "reject"
    description: str
    run: object = field(repr=False)


def _honest(world, rng, i):
    wallet, cid, _ = world.enroll(f"wallet-{i}", rng)
    if i % 2:
        # exercise the optional update step on every other trial
        cid = faith_update(wallet, world.issuer, cid, "expiry",
                           (world.today + dt.timedelta(days=4000)).isoformat(), rng)
        world.publish()
    crit = _criterion(world, rng)
    pres = world.show(wallet, cid, crit, rng)
    return [(_attempt(world, pres, crit), pres)]


def _forged_doc(world, rng, i):
    """Reuse an authority response obtained for a real document with a query for a fake one."""
    wid = f"wallet-{i}"
    wallet = Wallet(world.pk, wid)
    real = sample_document("passport", wid, rng, world.today)
    fake = real.replace_field("birthdate", "1900-01-01")
    areq, _ = wallet.ask(real, rng)
    R = world.authority.respond(areq)
    variant = i % 3
    if variant == 0:
        _, Q = wallet.ask(fake, rng)
    elif variant == 1:
        # never show the fake to anyone: sign an AuthResponse with a self-made key
        rogue = Authority.create(world.pk, rng, today=world.today)
        areq2, Q = wallet.ask(fake, rng)
        R = rogue.respond(areq2)
    else:
        # present the fake to the authority with the real document's commitment
        areq2, Q = wallet.ask(fake, rng)
        R = world.authority.respond(dataclasses.replace(areq, doc=fake))
    return _issue_and_show(world, wallet, R, Q, rng)


def _issue_and_show(world, wallet, R, Q, rng):
    try:
        resp = world.issuer.issue(R, Q, rng)
    except VcredError as exc:
        return [(_reject(getattr(exc, "reason", Reason.BAD_PROOF), str(exc)), None)]
    try:
        cid = wallet.receive(resp)
    except VcredError as exc:
        return [(_reject(getattr(exc, "reason", Reason.BAD_SIGNATURE), str(exc)), None)]
    crit = _criterion(world, rng)
    pres = world.show(wallet, cid, crit, rng)
    return [(_attempt(world, pres, crit), pres)]


def _wid_mismatch(world, rng, i):
    """Stolen document: authority attested wid A, the query claims wid B."""
    victim = Wallet(world.pk, f"victim-{i}")
    thief = Wallet(world.pk, f"thief-{i}")
    doc = sample_document("passport", victim.wid, rng, world.today)
    areq, Q = victim.ask(doc, rng)
    R = world.authority.respond(areq)
    if i % 2 == 0:
        Q = dataclasses.replace(Q, wid=thief.wid)
    else:
        stolen = Document(doc.schema_id, doc.fields, thief.wid)
        _, Q = thief.ask(stolen, rng)
    thief.pending.update(victim.pending)
    return _issue_and_show(world, thief, R, Q, rng)


def _tampered_signature(world, rng, i):
    wid = f"wallet-{i}"
    wallet = Wallet(world.pk, wid)
    doc = sample_document("passport", wid, rng, world.today)
    variant = i % 3
    if variant == 0:
        # expired document gets verdict 0; flip it to 1
        doc = doc.replace_field("expiry", (world.today - dt.timedelta(days=1)).isoformat())
        areq, Q = wallet.ask(doc, rng)
        R = world.authority.respond(areq)
        R = dataclasses.replace(R, verdict=1)
    else:
        areq, Q = wallet.ask(doc, rng)
        R = world.authority.respond(areq)
        sig = bytearray(R.signature)
        if variant == 1:
            sig[rng.randrange(len(sig))] ^= 1 << rng.randrange(8)
            R = dataclasses.replace(R, signature=bytes(sig))
        else:
            R = dataclasses.replace(R, wid=R.wid + "-other")
            Q = dataclasses.replace(Q, wid=R.wid)
    return _issue_and_show(world, wallet, R, Q, rng)


MUTATION_STRIDE = 1


def _mutated_proof(world, rng, i):
    """Single-field mutations of an honest presentation; trial ``i`` covers sites ``k = i mod stride``."""
    wallet, cid, _ = world.enroll(f"wallet-{i}", rng)
    crit = standard_criteria("passport", world.verifier.verifier_id, world.today)[2]
    pres = world.show(wallet, cid, crit, rng)
    out = []
    sites = list(leaves(pres))
    for k, (path, value) in enumerate(sites):
        if k % MUTATION_STRIDE != i % MUTATION_STRIDE:
            continue
        try:
            bad = replace_at(pres, path, _mutated(value, world.pp, rng))
        except (VcredError, ValueError, TypeError):
            continue  # not even constructible
        out.append((_reverify(world.verifier, bad, crit, pres.nonce), bad))
    return out


def _transcript_splice(world, rng, i):
    """Combine sub-proofs of two honest presentations (two credentials, same criterion)."""
    crit = standard_criteria("passport", world.verifier.verifier_id, world.today)[2]
    w1, c1, _ = world.enroll(f"adult-{i}", rng)
    w2, c2, _ = world.enroll(f"other-{i}", rng)
    p1 = world.show(w1, c1, crit, rng)
    p2 = world.show(w2, c2, crit, rng)
    out = []
    for k, (path, value) in enumerate(nodes(p1)):
        if k % MUTATION_STRIDE != i % MUTATION_STRIDE:
            continue
        try:
            other = get_at(p2, path)
        except (IndexError, AttributeError):
            continue
        if other == value:
            continue
        try:
            spliced = replace_at(p1, path, other)
        except (VcredError, ValueError, TypeError):
            continue
        out.append((_reverify(world.verifier, spliced, crit, p1.nonce), spliced))
    return out


def _revoked(world, rng, i):
    wallet, cid, resp = world.enroll(f"wallet-{i}", rng)
    world.issuer.revoke(resp.serial)
    world.publish()
    crit = _criterion(world, rng)
    pres = world.show(wallet, cid, crit, rng)
    return [(_attempt(world, pres, crit), pres)]


def _replayed(world, rng, i):
    wallet, cid, _ = world.enroll(f"wallet-{i}", rng)
    crit = _criterion(world, rng)
    pres = world.show(wallet, cid, crit, rng)
    first = _attempt(world, pres, crit)
    if not first.accepted:
        return [(first, pres)]  # an honest first show must pass; surface it as an accept mismatch
    return [(_attempt(world, pres, crit), pres)]


def _stale(world, rng, i):
    wallet, cid, resp = world.enroll(f"wallet-{i}", rng)
    crit = _criterion(world, rng)
    old_pub = world.publication
    if i % 2:
        world.issuer.revoke(resp.serial)  # the stale epoch predates the revocation
    world.publish()
    ch = world.verifier.challenge(rng)
    pres = wallet.show(cid, crit, old_pub, ch, rng)
    if i % 4 == 3:
        pres = dataclasses.replace(pres, epoch=world.publication.epoch)
    return [(_attempt(world, pres, crit), pres)]


def _forged_signature(world, rng, i):
    """Show with a signature the issuer never produced."""
    pp, pk = world.pp, world.pk
    wallet, cid, _ = world.enroll(f"wallet-{i}", rng)
    cred = wallet.credentials[cid]
    variant = i % 3
    if variant == 0:
        rand = lambda: pp.g * pp.random_scalar(rng)  # noqa: E731
        sig = Signature(rand(), [rand() for _ in range(pk.l)], rand(), [rand() for _ in range(pk.l)], rand())
    elif variant == 1:
        # well-formed a, A_i from public Z_i; b, B_i, c guessed
        alpha = pp.random_scalar(rng)
        a = pp.g * alpha
        A = [z * alpha for z in pk.Z]
        s = cred.signature
        sig = Signature(a, A, s.b, s.B, s.c)
    else:
        # a genuine signature claimed for different attributes
        sig = cred.signature
        attrs = list(cred.attributes)
        attrs[5] = (attrs[5] + 1) % pp.q  # birthdate one day later
        cred = dataclasses.replace(cred, attributes=tuple(attrs))
    wallet.credentials[cid] = dataclasses.replace(cred, signature=sig)
    crit = _criterion(world, rng)
    try:
        pres = world.show(wallet, cid, crit, rng)
    except VcredError as exc:
        return [(_reject(Reason.BAD_PROOF, str(exc)), None)]
    return [(_attempt(world, pres, crit), pres)]


STRATEGIES = {
    s.name: s
    for s in [
        AdversaryStrategy("honest", "accept", "honest claimant, optional update", _honest),
        AdversaryStrategy("forged-doc", "reject", "document never authenticated", _forged_doc),
        AdversaryStrategy("wid-mismatch", "reject", "stolen document, other wallet", _wid_mismatch),
        AdversaryStrategy("tampered-signature", "reject", "altered authority response", _tampered_signature),
        AdversaryStrategy("mutated-proof", "reject", "single-field proof mutations", _mutated_proof),
        AdversaryStrategy("transcript-splice", "reject", "sub-proofs from two presentations", _transcript_splice),
        AdversaryStrategy("revoked-credential", "reject", "show after revocation", _revoked),
        AdversaryStrategy("replayed-nonce", "reject", "resend an accepted presentation", _replayed),
        AdversaryStrategy("stale-epoch", "reject", "proof against an old epoch", _stale),
        AdversaryStrategy("forged-signature", "reject", "signature not made by the issuer", _forged_signature),
    ]
}


@dataclass(frozen=True)
class ExperimentResult:
    strategy: str
    trials: int
    attempts: int
    accepts: int
    expect: str
    digest: str
    reasons: tuple = ()

    @property
    def passed(self) -> bool:
        if self.expect == "accept":
            return self.accepts == self.attempts == self.trials
        return self.accepts == 0

    def line(self) -> str:
        return (f"strategy={self.strategy} trials={self.trials} attempts={self.attempts} "
                f"accepts={self.accepts} expect={self.expect} "
                f"result={'PASS' if self.passed else 'FAIL'} digest={self.digest}")


def run_upriv_experiment(strategy: str, trials: int, seed=0, pp=None, world=None) -> ExperimentResult:
    """Play ``strategy`` for ``trials`` independent rounds and tally verifier accepts."""
    if strategy not in STRATEGIES:
        raise KeyError(f"unknown strategy {strategy!r}; choose from {sorted(STRATEGIES)}")
    strat = STRATEGIES[strategy]
    world = world or World(pp, seed)
    log = hashlib.sha256()
    accepts = attempts = 0
    reasons = Counter()
    for i in range(trials):
        rng = random.Random(f"{seed}:{strategy}:{i}")
        for verdict, pres in strat.run(world, rng, i):
            attempts += 1
            accepts += bool(verdict.accepted)
            reasons[verdict.reason.value] += 1
            log.update(f"{i}:{verdict.reason.value}:".encode())
            if pres is not None:
                log.update(_transcript_digest(pres, world.pp))
    return ExperimentResult(strategy, trials, attempts, accepts, strat.expect, log.hexdigest(),
                            tuple(sorted(reasons.items())))


def _transcript_digest(pres, pp) -> bytes:
    try:
        return hashlib.sha256(wire.encode(pres, pp)).digest()
    except (TypeError, ValueError, OverflowError):
        return hashlib.sha256(repr(pres).encode()).digest()


def write_report(results, path):
    with open(path, "w") as fh:
        for r in results:
            fh.write(r.line() + "\n")


# -- unlinkability -----------------------------------------------------------------------

# fields that carry statement data (disclosures, criterion, epoch, addressing), not prover randomness
_STATEMENT_KEYS = {"schema_id", "verifier_id", "nonce", "epoch", "disclosed", "predicates",
                   "serial_position"}


def prover_values(pres: Presentation, pp) -> list:
    """Canonical bytes of every prover-chosen element and scalar in ``pres``."""
    out = []
    for path, value in leaves(pres):
        if _STATEMENT_KEYS.intersection(k for k in path if isinstance(k, str)):
            continue
        if isinstance(value, Elem):
            out.append(value.to_bytes())
        elif isinstance(value, int):
            out.append(pp.scalar_bytes(value))
    return out


def transcript_shape(pres: Presentation) -> tuple:
    return tuple((path, type(v).__name__, len(v.to_bytes()) if isinstance(v, Elem) else None)
                 for path, v in leaves(pres)
                 if not isinstance(v, str))


@dataclass(frozen=True)
class UnlinkabilityReport:
    pairs: int
    collisions: int
    matches: int
    expected: float
    z: float

    @property
    def passed(self) -> bool:
        return self.collisions == 0 and abs(self.z) <= 3.0


def byte_correlation(pairs_bytes) -> tuple:
    """Aligned equal-byte count across pairs against its chance expectation.

    The per-position chance of a match is estimated from all samples pooled
    (unbiased: sum n_v(n_v-1) / n(n-1)); returns ``(matches, expected, z)``.
    """
    n_pairs = len(pairs_bytes)
    width = len(pairs_bytes[0][0])
    pooled = [x for pair in pairs_bytes for x in pair]
    n = len(pooled)
    matches = sum(sum(a == b for a, b in zip(x, y)) for x, y in pairs_bytes)
    p_sum = var = 0.0
    for pos in range(width):
        counts = Counter(s[pos] for s in pooled)
        p = sum(c * (c - 1) for c in counts.values()) / (n * (n - 1))
        p_sum += p
        var += p * (1 - p)
    expected = n_pairs * p_sum
    sd = math.sqrt(n_pairs * var)
    z = 0.0 if sd == 0 else (matches - expected) / sd
    return matches, expected, z


def run_unlinkability_trial(world: World, wallet, cred_id, criteria, trials: int, seed=0):
    """Show ``trials`` pairs of presentations of one credential to two verifiers.

    ``criteria`` is a pair ``(criterion_a, criterion_b)`` whose verifier ids name
    the two contexts.
    """
    crit_a, crit_b = criteria
    va = world.new_verifier(crit_a.verifier_id)
    vb = world.new_verifier(crit_b.verifier_id)
    rng = random.Random(f"{seed}:unlinkability")
    collisions = 0
    pair_bytes = []
    for _ in range(trials):
        pa = world.show(wallet, cred_id, crit_a, rng, va)
        pb = world.show(wallet, cred_id, crit_b, rng, vb)
        if not (va.verify(pa, crit_a).accepted and vb.verify(pb, crit_b).accepted):
            raise AssertionError("honest presentation rejected during unlinkability run")
        xa, xb = prover_values(pa, world.pp), prover_values(pb, world.pp)
        collisions += len(set(xa) & set(xb))
        pair_bytes.append((b"".join(xa), b"".join(xb)))
    matches, expected, z = byte_correlation(pair_bytes)
    return UnlinkabilityReport(trials, collisions, matches, expected, z)
