import json
import shutil
import subprocess
import sys
from dataclasses import replace

import pytest

from vcred import wire
from vcred.cli import EXIT_CANNOT_SATISFY, EXIT_CONFIG, EXIT_DECODE, EXIT_OK, EXIT_USAGE, main
from vcred.schemas import builtin_schemas, encode_field_value

TODAY = "2024-06-01"
PASSPORT = {"schema_id": "passport", "wid": "alice",
            "fields": {"name": "Alice Example", "nationality": "PT", "birthdate": "1990-01-01",
                       "expiry": "2030-01-01", "passport_number": "P12345678"}}
CRITERION = {"verifier_id": "bar", "schema_id": "passport", "disclose": ["nationality"],
             "age_at_least": 18, "reference_date": TODAY}


class Shell:
    def __init__(self, root):
        self.root = root

    def __call__(self, *args, seed=None):
        argv = [str(a) for a in args]
        argv = [str(self.root / a[1:]) if a.startswith("@") else a for a in argv]
        if seed is not None:
            argv += ["--seed", seed]
        return main(argv)

    def path(self, name):
        return self.root / name

    def load(self, name, pp):
        return wire.unwrap(self.path(name).read_text(), pp)


def _issue(sh):
    assert sh("setup", "--backend", "mock", "--out", "@pp.json") == EXIT_OK
    pp = wire.unwrap(sh.path("pp.json").read_text())
    common = ["--pp", "@pp.json"]
    steps = [
        ["keygen", "--role", "authority", "--state", "@authority.state", "--out", "@authority.pub"],
        ["keygen", "--role", "issuer", "--l", "10", "--in", "@authority.pub", "--state", "@issuer.state",
         "--out", "@issuer.pk"],
        ["publish-epoch", "--state", "@issuer.state", "--out", "@epoch.json"],
        ["keygen", "--role", "wallet", "--id", "alice", "--in", "@issuer.pk", "--state", "@wallet.state"],
        ["keygen", "--role", "verifier", "--id", "bar", "--in", "@issuer.pk", "--in", "@epoch.json",
         "--state", "@verifier.state"],
        ["request", "--state", "@wallet.state", "--in", "@passport.json", "--out", "@auth-request.json",
         "--query-out", "@issue-query.json"],
        ["auth", "--state", "@authority.state", "--in", "@issuer.pk", "--in", "@auth-request.json",
         "--out", "@auth-response.json", "--today", TODAY],
        ["issue", "--state", "@issuer.state", "--in", "@auth-response.json", "--in", "@issue-query.json",
         "--out", "@issue-response.json"],
        ["request", "--state", "@wallet.state", "--in", "@issue-response.json"],
    ]
    sh.path("passport.json").write_text(json.dumps(PASSPORT))
    sh.path("criterion.json").write_text(json.dumps(CRITERION))
    for i, step in enumerate(steps):
        assert sh(*step, *common, seed=f"{i + 1:x}") == EXIT_OK, step
    return pp


def _show(sh, seed="a0"):
    c = ["--pp", "@pp.json"]
    assert sh("verify", *c, "--state", "@verifier.state", "--challenge", "--out", "@challenge.json", seed=seed) == 0
    return sh("show", *c, "--state", "@wallet.state", "--in", "@criterion.json", "--in", "@challenge.json",
              "--in", "@epoch.json", "--out", "@presentation.json", seed=seed + "1")


def _verify(sh, presentation="@presentation.json"):
    return sh("verify", "--pp", "@pp.json", "--state", "@verifier.state", "--in", presentation,
              "--in", "@criterion.json")


@pytest.fixture
def issued(tmp_path):
    sh = Shell(tmp_path)
    return sh, _issue(sh)


def test_walkthrough_with_replay_and_update(issued):
    sh, pp = issued
    c = ["--pp", "@pp.json"]
    assert _show(sh) == EXIT_OK
    assert _verify(sh) == EXIT_OK
    assert _verify(sh) == 15  # replay
    assert sh("update", *c, "--state", "@wallet.state", "--field", "expiry", "--value", "2035-01-01",
              "--out", "@update-request.json", seed="b1") == EXIT_OK
    assert sh("update", *c, "--state", "@issuer.state", "--in", "@update-request.json",
              "--out", "@update-response.json", "--today", TODAY, seed="b2") == EXIT_OK
    assert sh("update", *c, "--state", "@wallet.state", "--in", "@update-response.json") == EXIT_OK
    assert sh("publish-epoch", *c, "--state", "@issuer.state", "--out", "@epoch.json") == EXIT_OK
    assert sh("verify", *c, "--state", "@verifier.state", "--in", "@epoch.json", "--challenge",
              "--out", "@challenge.json", seed="c1") == EXIT_OK
    assert sh("show", *c, "--state", "@wallet.state", "--in", "@criterion.json", "--in", "@challenge.json",
              "--in", "@epoch.json", "--out", "@presentation.json", seed="c2") == EXIT_OK
    assert _verify(sh) == EXIT_OK
    assert len(wire.unwrap(sh.path("wallet.state").read_text(), pp).credentials) == 1


def test_revocation_through_cli(issued):
    sh, _ = issued
    c = ["--pp", "@pp.json"]
    assert sh("revoke", *c, "--state", "@issuer.state", "--in", "@issue-response.json") == EXIT_OK
    assert sh("publish-epoch", *c, "--state", "@issuer.state", "--out", "@epoch.json") == EXIT_OK
    assert sh("verify", *c, "--state", "@verifier.state", "--in", "@epoch.json", "--challenge",
              "--out", "@challenge.json") == EXIT_OK
    assert sh("show", *c, "--state", "@wallet.state", "--in", "@criterion.json", "--in", "@challenge.json",
              "--in", "@epoch.json", "--out", "@presentation.json") == EXIT_OK
    assert _verify(sh) == 17


def test_tampered_presentation(issued):
    sh, pp = issued
    assert _show(sh) == EXIT_OK
    pres = sh.load("presentation.json", pp)
    proof = pres.proof
    forged = replace(pres, proof=replace(proof, responses=(proof.responses[0] ^ 1,) + proof.responses[1:]))
    sh.path("forged.json").write_text(wire.wrap(forged, "wallet", b"", pp))
    assert _verify(sh, "@forged.json") == 13
    # raw corruption of the envelope payload is caught before any protocol check
    env = json.loads(sh.path("presentation.json").read_text())
    env["payload"] = env["payload"][:40] + ("A" if env["payload"][40] != "A" else "B") + env["payload"][41:]
    sh.path("garbled.json").write_text(json.dumps(env))
    assert _verify(sh, "@garbled.json") == EXIT_DECODE


def test_verify_is_idempotent_against_a_state_snapshot(issued):
    sh, _ = issued
    assert _show(sh) == EXIT_OK
    shutil.copy(sh.path("verifier.state"), sh.path("snapshot.state"))
    first = _verify(sh)
    shutil.copy(sh.path("snapshot.state"), sh.path("verifier.state"))
    second = _verify(sh)
    assert first == second == EXIT_OK


def test_same_seed_same_bytes(tmp_path):
    a, b = Shell(tmp_path / "a"), Shell(tmp_path / "b")
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    _issue(a)
    _issue(b)
    for name in ("issuer.pk", "issue-query.json", "issue-response.json", "wallet.state"):
        assert a.path(name).read_bytes() == b.path(name).read_bytes()


def test_secrets_stay_in_the_wallet(issued):
    sh, pp = issued
    assert _show(sh) == EXIT_OK
    assert _verify(sh) == EXIT_OK
    wallet = wire.unwrap(sh.path("wallet.state").read_text(), pp)
    (cred,) = wallet.credentials.values()
    schema = builtin_schemas()["passport"]
    hidden = [encode_field_value(pp, schema, n, PASSPORT["fields"][n])
              for n in ("name", "passport_number")]
    scalar = pp.scalar_bytes
    secrets = {"m0": scalar(cred.m0), "serial": scalar(cred.serial)}
    secrets.update({f"hidden{i}": scalar(v) for i, v in enumerate(hidden)})
    secrets.update({f"sig{i}": e.to_bytes() for i, e in enumerate(cred.signature.elements())})

    def payload(name):
        return wire.unwrap_envelope(sh.path(name).read_text())[1]

    verifier_view = ["presentation.json", "challenge.json", "epoch.json", "verifier.state"]
    for name in verifier_view:
        data = payload(name)
        leaked = [k for k, v in secrets.items() if v in data]
        assert leaked == [], (name, leaked)
    # the issuer learns the serial and its own signature, but never the hiding scalar
    for name in ["issue-query.json", "auth-response.json", "issue-response.json", "issuer.state"]:
        assert secrets["m0"] not in payload(name), name


def test_usage_and_decode_errors(issued, tmp_path):
    sh, _ = issued
    assert sh("show", "--pp", "@pp.json", "--state", "@wallet.state", "--in", "@missing.json",
              "--out", "@x.json") == EXIT_USAGE
    sh.path("junk.json").write_text("{not json")
    assert sh("show", "--pp", "@pp.json", "--state", "@wallet.state", "--in", "@junk.json",
              "--out", "@x.json") == EXIT_DECODE
    assert sh("setup", "--backend", "curve", "--level", "toy", "--out", "@bad.json") == EXIT_CONFIG
    assert sh("frobnicate") == EXIT_USAGE
    assert sh("experiment", "upriv", "--strategy", "nonsense", "--trials", "1") == EXIT_USAGE


def test_unsatisfiable_criterion(issued):
    sh, _ = issued
    crit = dict(CRITERION, age_at_least=50)
    sh.path("criterion.json").write_text(json.dumps(crit))
    assert _show(sh) == EXIT_CANNOT_SATISFY


def test_experiment_command(tmp_path, capsys):
    report = tmp_path / "report.txt"
    assert main(["experiment", "upriv", "--strategy", "forged-doc", "--trials", "100",
                 "--out", str(report)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "forged-doc" in out and "PASS" in out
    assert report.read_text().strip()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "vcred", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "experiment" in proc.stdout
