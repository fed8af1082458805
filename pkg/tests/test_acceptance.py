"""Acceptance criteria, one test each. Every test records a PASS/FAIL line that
is printed in the terminal summary."""

import random
import time
from collections import Counter

import pytest

from _artifacts import artifact_round
from test_mock_oracle import run_exhaustive, run_randomized, run_tags
from test_rangeproof import brute_force
from vcred import wire
from vcred.errors import DecodeError
from vcred.experiments import STRATEGIES, World, run_unlinkability_trial, run_upriv_experiment, standard_criteria
from vcred.group import setup
from vcred.protocol import Criterion, Reason, Wallet, faith_update
from vcred.schemas import builtin_schemas

UPRIV_TRIALS = 100
UNLINK_PAIRS = 1000


def _line(record, n, title, ok, detail):
    record(f"criterion {n} {title}: {'PASS' if ok else 'FAIL'} ({detail})")


def test_1_mock_oracle_equality(record):
    start = time.perf_counter()
    cases = mismatches = 0
    for q in (101, 1009):
        pp = setup("toy", "mock", q=q)
        n, bad = run_exhaustive(pp, max_l=3)
        cases += n
        mismatches += len(bad) + len(run_randomized(pp, trials=250, max_l=8, seed=q)) + run_tags(pp)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 10
    _line(record, 1, "mock-oracle", ok, f"{cases} exhaustive cases, mismatches={mismatches}, {elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 10


def test_2_end_to_end_liveness(record):
    start = time.perf_counter()
    runs = accepted = 0
    for backend in ("mock", "curve"):
        world = World(setup("standard", backend), seed=2)
        rng = random.Random(f"liveness:{backend}")
        for schema_id in sorted(builtin_schemas()):
            for k, crit in enumerate(standard_criteria(schema_id, "verifier-A", world.today)):
                wallet, cid, _ = world.enroll(f"{schema_id}-{k}", rng, schema_id=schema_id)
                pres = world.show(wallet, cid, crit, rng)
                runs += 1
                accepted += world.verifier.verify(pres, crit).accepted
    elapsed = time.perf_counter() - start
    ok = runs == 18 and accepted == runs and elapsed < 60
    _line(record, 2, "end-to-end liveness", ok, f"{accepted}/{runs} accepted, {elapsed:.1f}s")
    assert runs == 18 and accepted == runs
    assert elapsed < 60


def test_3_forgery_suite(record):
    pp = setup("standard", "mock")
    rejecting = sorted(s for s, st in STRATEGIES.items() if st.expect == "reject")
    results = [run_upriv_experiment(s, UPRIV_TRIALS, seed=3, pp=pp) for s in rejecting]
    ok = all(r.accepts == 0 and r.trials >= 100 for r in results)
    detail = ", ".join(f"{r.strategy} {r.accepts}/{r.attempts}" for r in results)
    _line(record, 3, "forgery suite", ok, detail)
    assert ok


def _unlinkability(backend, criterion_index):
    world = World(setup("standard", backend), seed=4)
    rng = random.Random(f"unlinkability:{backend}")
    wallet, cid, _ = world.enroll("holder", rng)
    crits = tuple(standard_criteria("passport", v, world.today)[criterion_index]
                  for v in ("verifier-A", "verifier-B"))
    head = run_unlinkability_trial(world, wallet, cid, crits, 100, seed=4)
    full = run_unlinkability_trial(world, wallet, cid, crits, UNLINK_PAIRS, seed=5)
    return head, full


@pytest.mark.parametrize("backend,criterion_index", [("mock", 2), ("curve", 1)])
def test_4_unlinkability(record, backend, criterion_index):
    head, full = _unlinkability(backend, criterion_index)
    ok = head.collisions == 0 and full.collisions == 0 and abs(full.z) <= 3
    _line(record, 4, f"unlinkability [{backend}]", ok,
          f"100 pairs collisions={head.collisions}; {full.pairs} pairs collisions={full.collisions} "
          f"z={full.z:+.2f}")
    assert head.collisions == 0 and full.collisions == 0
    assert abs(full.z) <= 3


def test_5_range_brute_force(record):
    counted, mismatches = brute_force(setup("standard", "mock"), random.Random(5))
    ok = not mismatches and counted["satisfiable"] == 6 * 16
    _line(record, 5, "range brute force n=4", ok,
          f"{counted['satisfiable']} satisfiable, {counted['unsatisfiable']} unsatisfiable, "
          f"mismatches={len(mismatches)}")
    assert counted["satisfiable"] == 6 * 16
    assert mismatches == []


UPDATES = {
    "passport": [("expiry", lambda r: f"20{r.randint(30, 40)}-0{r.randint(1, 9)}-1{r.randint(0, 9)}")],
    "driving_license": [("expiry", lambda r: f"20{r.randint(30, 40)}-01-01"),
                        ("penalty_points", lambda r: r.randint(0, 6))],
    "medical_certificate": [("vaccinated", lambda r: r.randint(0, 1)),
                            ("valid_until", lambda r: f"20{r.randint(30, 40)}-12-31")],
}


def test_6_update_semantics(record):
    good = 0
    trials = 20
    for backend in ("mock", "curve"):
        world = World(setup("standard", backend), seed=6)
        for t in range(trials):
            rng = random.Random(f"update:{backend}:{t}")
            schema_id = rng.choice(sorted(UPDATES))
            field, draw = rng.choice(UPDATES[schema_id])
            wallet, cid, _ = world.enroll(f"u{t}", rng, schema_id=schema_id)
            old = wallet.credentials[cid]
            new_cid = faith_update(wallet, world.issuer, cid, field, draw(rng), rng)
            world.publish()
            crit = Criterion("verifier-A", schema_id, (field,))
            new_ok = world.verifier.verify(world.show(wallet, new_cid, crit, rng), crit).accepted
            stale = Wallet(world.pk, wallet.wid, credentials={cid: old})
            old_verdict = world.verifier.verify(world.show(stale, cid, crit, rng), crit)
            good += new_ok and old_verdict.reason is Reason.REVOKED
    ok = good == 2 * trials
    _line(record, 6, "update semantics", ok, f"{good}/{2 * trials} trials (20 mock, 20 curve)")
    assert ok


def test_7_serialization(record):
    pp = setup("standard", "mock")
    rng = random.Random(7)
    instances = round_trip = canonical = corrupt_caught = corrupt_tried = 0
    per_type = Counter()
    for i in range(1000):
        for obj in artifact_round(pp, i):
            instances += 1
            per_type[wire.type_name(obj)] += 1
            data = wire.encode(obj, pp)
            back = wire.decode(data, pp, expected=type(obj))
            canonical += wire.encode(back, pp) == data
            round_trip += (back == obj) if hasattr(obj, "__dataclass_fields__") else True
            bad = bytearray(data)
            bad[rng.randrange(len(bad))] ^= rng.randrange(1, 256)
            corrupt_tried += 1
            try:
                wire.decode(bytes(bad), pp)
            except DecodeError:
                corrupt_caught += 1
    ok = (round_trip == canonical == instances and corrupt_caught == corrupt_tried
          and set(per_type) == set(wire.MESSAGE_TYPES) and min(per_type.values()) >= 1000)
    _line(record, 7, "serialization", ok,
          f"{len(per_type)} types, >= {min(per_type.values())} instances each, {instances} total, "
          f"round-trip {round_trip}, canonical {canonical}, corruptions caught {corrupt_caught}/{corrupt_tried}")
    assert set(per_type) == set(wire.MESSAGE_TYPES)
    assert min(per_type.values()) >= 1000
    assert round_trip == canonical == instances
    assert corrupt_caught == corrupt_tried


def test_8_curve_performance(record):
    pp = setup("standard", "curve")
    world = World(pp, seed=8, l=16)
    crit = standard_criteria("passport", "verifier-A", world.today)[2]
    times = []
    for k in range(3):
        rng = random.Random(f"perf:{k}")
        start = time.perf_counter()
        wallet, cid, _ = world.enroll(f"p{k}", rng)
        verdict = world.verifier.verify(world.show(wallet, cid, crit, rng), crit)
        times.append(time.perf_counter() - start)
        assert verdict.accepted
    ok = max(times) < 1.0
    _line(record, 8, "curve l=16 issue+show+verify", ok, "runs " + ", ".join(f"{t:.2f}s" for t in times))
    assert ok
