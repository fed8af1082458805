"""``vcred`` command line: every role driven through files.

Messages and state files are JSON envelopes around canonical binary payloads
(see :mod:`vcred.wire`). State files are locked while a command mutates them.
Exit status is 0 on success and a distinct code per rejection reason.
"""

from __future__ import annotations

import argparse
import contextlib
import datetime as dt
import fcntl
import json
import logging
import os
import random
import secrets
import sys
import tempfile

from . import wire
from .cl import IssuerPublicKey
from .errors import (
    CannotSatisfyError,
    CapacityError,
    ConfigError,
    DecodeError,
    PolicyError,
    Rejected,
    SchemaError,
    UsageError,
    VcredError,
)
from .experiments import (
    STRATEGIES,
    World,
    run_unlinkability_trial,
    run_upriv_experiment,
    standard_criteria,
    write_report,
)
from .group import PublicParams, setup
from .protocol import (
    DEFAULT_L,
    Authority,
    AuthorityPublicKey,
    AuthRequest,
    AuthResponse,
    Criterion,
    IssueQuery,
    IssueResponse,
    Issuer,
    PredicateSpec,
    Presentation,
    Reason,
    UpdateRequest,
    Verifier,
    VerifierChallenge,
    Wallet,
    age_at_least,
)
from .revocation import EpochPublication
from .schemas import Document, days_since_epoch

log = logging.getLogger("vcred")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_DECODE = 3
EXIT_CONFIG = 4
EXIT_EXPERIMENT = 5
EXIT_CANNOT_SATISFY = 6
EXIT_REASON = {
    Reason.AUTH_INVALID: 10,
    Reason.AUTH_DENIED: 11,
    Reason.AUTH_MISMATCH: 12,
    Reason.BAD_PROOF: 13,
    Reason.SCHEMA_MISMATCH: 14,
    Reason.REPLAY: 15,
    Reason.COVERAGE: 16,
    Reason.REVOKED: 17,
    Reason.STALE_EPOCH: 18,
    Reason.POLICY: 19,
    Reason.BAD_SIGNATURE: 20,
}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# -- file helpers ----------------------------------------------------------------


def _read_text(path):
    try:
        with open(path) as fh:
            return fh.read()
    except FileNotFoundError:
        raise CliError(EXIT_USAGE, f"no such file: {path}") from None
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc}") from None


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".vcred-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def write_artifact(path, obj, role, pp, session_id=b""):
    if not path:
        raise CliError(EXIT_USAGE, "--out is required")
    _write_atomic(path, wire.wrap(obj, role, session_id, pp))


def load_pp(path) -> PublicParams:
    if not path:
        raise CliError(EXIT_USAGE, "--pp is required")
    return wire.unwrap(_read_text(path), None, PublicParams)


def _plain_json(text, pp):
    data = json.loads(text)
    if isinstance(data, dict) and "payload" in data and "msg_type" in data:
        return None
    if isinstance(data, dict) and "fields" in data:
        return Document.from_dict(data)
    if isinstance(data, dict) and "verifier_id" in data and "schema_id" in data:
        return criterion_from_json(data)
    raise CliError(EXIT_USAGE, "unrecognised JSON input")


def load_input(path, pp):
    text = _read_text(path)
    try:
        plain = _plain_json(text, pp)
    except ValueError:
        raise CliError(EXIT_DECODE, f"{path}: not JSON") from None
    if plain is not None:
        return plain
    return wire.unwrap(text, pp)


def gather_inputs(paths, pp) -> dict:
    """Inputs keyed by type; a type given twice is a usage error."""
    out = {}
    for p in paths or []:
        obj = load_input(p, pp)
        if type(obj) in out:
            raise CliError(EXIT_USAGE, f"two inputs of type {wire.type_name(obj)}")
        out[type(obj)] = obj
    return out


def need(inputs, cls, what):
    if cls not in inputs:
        raise CliError(EXIT_USAGE, f"missing input: {what}")
    return inputs[cls]


@contextlib.contextmanager
def locked(path):
    if not path:
        raise CliError(EXIT_USAGE, "--state is required")
    if not os.path.exists(path):
        raise CliError(EXIT_USAGE, f"no such file: {path}")
    with open(path + ".lock", "a") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def load_state(path, pp, expected=None):
    if not path:
        raise CliError(EXIT_USAGE, "--state is required")
    return wire.unwrap(_read_text(path), pp, expected)


def state_type(path) -> str:
    env, _ = wire.unwrap_envelope(_read_text(path))
    return env["msg_type"]


def save_state(path, obj, role, pp):
    _write_atomic(path, wire.wrap(obj, role, b"", pp))


def criterion_from_json(data: dict) -> Criterion:
    """Plain-JSON criterion. Dates may be given as ISO strings; ``age_at_least`` is sugar."""
    preds = []
    for p in data.get("predicates", []):
        thr = p["threshold"]
        if isinstance(thr, str):
            thr = days_since_epoch(thr)
        preds.append(PredicateSpec(p["field"], p["op"], int(thr), int(p.get("n_bits", 16))))
    if "age_at_least" in data:
        ref = dt.date.fromisoformat(data.get("reference_date", dt.date.today().isoformat()))
        preds.append(age_at_least(int(data["age_at_least"]), ref))
    return Criterion(data["verifier_id"], data["schema_id"], tuple(data.get("disclose", [])), tuple(preds))


def make_rng(seed):
    if seed is None:
        return secrets.SystemRandom()
    try:
        return random.Random(int(seed, 16))
    except ValueError:
        raise CliError(EXIT_USAGE, "--seed must be hexadecimal") from None


def _today(args):
    return dt.date.fromisoformat(args.today) if args.today else None


def _pick_credential(wallet, cred_hex):
    if cred_hex:
        try:
            cid = bytes.fromhex(cred_hex)
        except ValueError:
            raise CliError(EXIT_USAGE, "--cred must be hexadecimal") from None
        if cid not in wallet.credentials:
            raise CliError(EXIT_USAGE, "no such credential in the wallet")
        return cid
    if len(wallet.credentials) != 1:
        raise CliError(EXIT_USAGE, f"wallet holds {len(wallet.credentials)} credentials; pass --cred")
    return next(iter(wallet.credentials))


def _parse_value(text):
    if text is None:
        return None
    try:
        return int(text)
    except ValueError:
        return text


# -- commands ----------------------------------------------------------------------


def cmd_setup(args, rng):
    try:
        pp = setup(args.level, args.backend or "curve", args.q)
    except ConfigError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    write_artifact(args.out, pp, "public", pp)
    print(f"group={pp.group_id} level={pp.security_level}")


def cmd_keygen(args, rng):
    pp = load_pp(args.pp)
    inputs = gather_inputs(args.inputs, pp)
    if not args.state:
        raise CliError(EXIT_USAGE, "--state is required")
    if args.role == "authority":
        auth = Authority.create(inputs.get(IssuerPublicKey), rng)
        save_state(args.state, auth, "authority", pp)
        if args.out:
            write_artifact(args.out, auth.public(), "authority", pp)
    elif args.role == "issuer":
        akey = need(inputs, AuthorityPublicKey, "authority public key")
        issuer = Issuer.create(pp, rng, authority_key=akey.key, l=args.l)
        save_state(args.state, issuer, "issuer", pp)
        write_artifact(args.out, issuer.pk, "issuer", pp)
    elif args.role in ("wallet", "verifier"):
        pk = need(inputs, IssuerPublicKey, "issuer public key")
        if not args.id:
            raise CliError(EXIT_USAGE, "--id is required")
        if args.role == "wallet":
            save_state(args.state, Wallet(pk, args.id), "wallet", pp)
        else:
            save_state(args.state, Verifier(pk, args.id, inputs.get(EpochPublication)), "verifier", pp)
    print(f"{args.role} state written to {args.state}")


def cmd_auth(args, rng):
    pp = load_pp(args.pp)
    inputs = gather_inputs(args.inputs, pp)
    req = need(inputs, AuthRequest, "auth request")
    with locked(args.state):
        auth = load_state(args.state, pp, Authority)
        if IssuerPublicKey in inputs:
            auth.issuer_pk = inputs[IssuerPublicKey]
            save_state(args.state, auth, "authority", pp)
        auth.today = _today(args)
        resp = auth.respond(req)
    write_artifact(args.out, resp, "authority", pp)
    print(f"verdict={resp.verdict}")


def cmd_request(args, rng):
    pp = load_pp(args.pp)
    inputs = gather_inputs(args.inputs, pp)
    with locked(args.state):
        wallet = load_state(args.state, pp, Wallet)
        if IssueResponse in inputs:
            cid = wallet.receive(inputs[IssueResponse])
            save_state(args.state, wallet, "wallet", pp)
            print(f"credential={cid.hex()}")
            return
        doc = need(inputs, Document, "document (JSON)")
        if not args.query_out:
            raise CliError(EXIT_USAGE, "--query-out is required")
        areq, query = wallet.ask(doc, rng)
        save_state(args.state, wallet, "wallet", pp)
    write_artifact(args.out, areq, "wallet", pp, query.session_id)
    write_artifact(args.query_out, query, "wallet", pp, query.session_id)
    print(f"session={query.session_id.hex()}")


def cmd_issue(args, rng):
    pp = load_pp(args.pp)
    inputs = gather_inputs(args.inputs, pp)
    R = need(inputs, AuthResponse, "authority response")
    Q = need(inputs, IssueQuery, "issue query")
    with locked(args.state):
        issuer = load_state(args.state, pp, Issuer)
        resp = issuer.issue(R, Q, rng)
        save_state(args.state, issuer, "issuer", pp)
    write_artifact(args.out, resp, "issuer", pp, resp.session_id)
    print(f"serial={resp.serial:x}")


def cmd_show(args, rng):
    pp = load_pp(args.pp)
    inputs = gather_inputs(args.inputs, pp)
    crit = need(inputs, Criterion, "criterion")
    ch = need(inputs, VerifierChallenge, "verifier challenge")
    pub = need(inputs, EpochPublication, "epoch publication")
    wallet = load_state(args.state, pp, Wallet)
    cid = _pick_credential(wallet, args.cred)
    pres = wallet.show(cid, crit, pub, ch, rng)
    write_artifact(args.out, pres, "wallet", pp)
    print("presentation written")


def cmd_verify(args, rng):
    pp = load_pp(args.pp)
    inputs = gather_inputs(args.inputs, pp)
    with locked(args.state):
        ver = load_state(args.state, pp, Verifier)
        if EpochPublication in inputs:
            ver.update_publication(inputs[EpochPublication])
        if args.challenge:
            ch = ver.challenge(rng)
            save_state(args.state, ver, "verifier", pp)
            write_artifact(args.out, ch, "verifier", pp)
            print(f"nonce={ch.nonce.hex()}")
            return
        pres = need(inputs, Presentation, "presentation")
        crit = need(inputs, Criterion, "criterion")
        verdict = ver.verify(pres, crit)
        save_state(args.state, ver, "verifier", pp)
    if not verdict.accepted:
        raise Rejected(verdict.reason, verdict.detail)
    print("accept")


def cmd_update(args, rng):
    pp = load_pp(args.pp)
    inputs = gather_inputs(args.inputs, pp)
    kind = state_type(args.state) if args.state else None
    with locked(args.state):
        if kind == "issuer-state":
            req = need(inputs, UpdateRequest, "update request")
            issuer = load_state(args.state, pp, Issuer)
            issuer.today = _today(args)
            resp = issuer.process_update(req, rng)
            save_state(args.state, issuer, "issuer", pp)
            write_artifact(args.out, resp, "issuer", pp, resp.session_id)
            print(f"serial={resp.serial:x}")
            return
        wallet = load_state(args.state, pp, Wallet)
        if IssueResponse in inputs:
            cid = wallet.finish_update(inputs[IssueResponse])
            save_state(args.state, wallet, "wallet", pp)
            print(f"credential={cid.hex()}")
            return
        if not args.field:
            raise CliError(EXIT_USAGE, "--field is required")
        cid = _pick_credential(wallet, args.cred)
        req = wallet.request_update(cid, args.field, _parse_value(args.value), rng)
        save_state(args.state, wallet, "wallet", pp)
    write_artifact(args.out, req, "wallet", pp, req.session_id)
    print(f"session={req.session_id.hex()}")


def cmd_revoke(args, rng):
    pp = load_pp(args.pp)
    inputs = gather_inputs(args.inputs, pp)
    serials = [int(s, 16) for s in args.serial or []]
    if IssueResponse in inputs:
        serials.append(inputs[IssueResponse].serial)
    if not serials:
        raise CliError(EXIT_USAGE, "give --serial or an issue response")
    with locked(args.state):
        issuer = load_state(args.state, pp, Issuer)
        fresh = sum(issuer.revoke(s) for s in serials)
        save_state(args.state, issuer, "issuer", pp)
    print(f"revoked={fresh}")


def cmd_publish(args, rng):
    pp = load_pp(args.pp)
    with locked(args.state):
        issuer = load_state(args.state, pp, Issuer)
        pub = issuer.publish_epoch()
        save_state(args.state, issuer, "issuer", pp)
    write_artifact(args.out, pub, "issuer", pp)
    print(f"epoch={pub.epoch} tags={len(pub.tags)}")


def cmd_experiment(args, rng):
    try:
        pp = load_pp(args.pp) if args.pp else setup("standard", args.backend or "mock")
    except ConfigError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    seed = int(args.seed, 16) if args.seed else 0
    lines = []
    ok = True
    if args.kind == "upriv":
        names = sorted(STRATEGIES) if args.strategy in (None, "all") else [args.strategy]
        if any(n not in STRATEGIES for n in names):
            raise CliError(EXIT_USAGE, f"unknown strategy; choose from {sorted(STRATEGIES)}")
        results = [run_upriv_experiment(n, args.trials, seed, pp) for n in names]
        ok = all(r.passed for r in results)
        lines = [r.line() for r in results]
        if args.out:
            write_report(results, args.out)
    else:
        world = World(pp, seed)
        wrng = random.Random(f"{seed}:holder")
        wallet, cid, _ = world.enroll("holder", wrng)
        crits = (standard_criteria("passport", "verifier-A", world.today)[1],
                 standard_criteria("passport", "verifier-B", world.today)[1])
        rep = run_unlinkability_trial(world, wallet, cid, crits, args.trials, seed)
        ok = rep.passed
        lines = [f"unlinkability pairs={rep.pairs} collisions={rep.collisions} matches={rep.matches} "
                 f"expected={rep.expected:.1f} z={rep.z:.3f} result={'PASS' if ok else 'FAIL'}"]
        if args.out:
            _write_atomic(args.out, lines[0] + "\n")
    for line in lines:
        print(line)
    if not ok:
        raise CliError(EXIT_EXPERIMENT, "experiment failed")


COMMANDS = {
    "setup": cmd_setup,
    "keygen": cmd_keygen,
    "auth": cmd_auth,
    "request": cmd_request,
    "issue": cmd_issue,
    "show": cmd_show,
    "verify": cmd_verify,
    "update": cmd_update,
    "revoke": cmd_revoke,
    "publish-epoch": cmd_publish,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pp", help="public parameters file")
    common.add_argument("--state", help="role state file (locked while mutated)")
    common.add_argument("--in", dest="inputs", action="append", default=[], metavar="FILE",
                        help="input file; repeat for several")
    common.add_argument("--out", help="output file")
    common.add_argument("--seed", help="hex seed for a reproducible run (default: system RNG)")
    common.add_argument("--backend", choices=["curve", "mock"], help="group backend")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="vcred", description="Privacy-preserving credentials.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", parents=[common], help="generate public parameters")
    p.add_argument("--level", choices=["standard", "toy"], default="standard")
    p.add_argument("--q", type=int, help="mock group order")
    p = sub.add_parser("keygen", parents=[common], help="create a role's state")
    p.add_argument("--role", required=True, choices=["authority", "issuer", "wallet", "verifier"])
    p.add_argument("--id", help="wallet id or verifier id")
    p.add_argument("--l", type=int, default=DEFAULT_L, help="attribute positions (issuer)")
    p = sub.add_parser("auth", parents=[common], help="authority: check a document")
    p.add_argument("--today", help="reference date (ISO), default today")
    p = sub.add_parser("request", parents=[common], help="wallet: ask for / receive a credential")
    p.add_argument("--query-out", help="where to write the issue query")
    sub.add_parser("issue", parents=[common], help="issuer: sign an attested commitment")
    p = sub.add_parser("show", parents=[common], help="wallet: build a presentation")
    p.add_argument("--cred", help="credential id (hex)")
    p = sub.add_parser("verify", parents=[common], help="verifier: challenge or check")
    p.add_argument("--challenge", action="store_true", help="emit a fresh challenge instead")
    p = sub.add_parser("update", parents=[common], help="update a credential field")
    p.add_argument("--field")
    p.add_argument("--value")
    p.add_argument("--cred", help="credential id (hex)")
    p.add_argument("--today", help="reference date (ISO), default today")
    p = sub.add_parser("revoke", parents=[common], help="issuer: revoke serials")
    p.add_argument("--serial", action="append", help="serial (hex); repeatable")
    sub.add_parser("publish-epoch", parents=[common], help="issuer: publish the next epoch")
    p = sub.add_parser("experiment", parents=[common], help="run adversarial experiments")
    p.add_argument("kind", choices=["upriv", "unlinkability"])
    p.add_argument("--strategy", help="strategy name or 'all'")
    p.add_argument("--trials", type=int, default=100)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="vcred: %(message)s")
    try:
        COMMANDS[args.command](args, make_rng(args.seed))
    except CliError as exc:
        print(f"vcred: {exc}", file=sys.stderr)
        return exc.code
    except Rejected as exc:
        print(f"vcred: rejected: {exc}", file=sys.stderr)
        return EXIT_REASON.get(exc.reason, EXIT_ERROR)
    except DecodeError as exc:
        print(f"vcred: cannot decode input: {exc}", file=sys.stderr)
        return EXIT_DECODE
    except ConfigError as exc:
        print(f"vcred: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CannotSatisfyError, CapacityError) as exc:
        print(f"vcred: cannot satisfy the criterion: {exc}", file=sys.stderr)
        return EXIT_CANNOT_SATISFY
    except PolicyError as exc:
        print(f"vcred: policy: {exc}", file=sys.stderr)
        return EXIT_REASON[Reason.POLICY]
    except SchemaError as exc:
        print(f"vcred: schema: {exc}", file=sys.stderr)
        return EXIT_REASON[Reason.SCHEMA_MISMATCH]
    except UsageError as exc:
        print(f"vcred: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VcredError as exc:
        print(f"vcred: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK
