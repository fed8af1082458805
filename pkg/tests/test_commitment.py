import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcred.commitment import vc_commit, vc_open, vc_setup, vc_update, vc_verify
from vcred.errors import InvalidLengthError, PositionError


@pytest.fixture(params=["mock", "curve"])
def pp(request):
    return request.getfixturevalue(request.param)


def test_open_each_position(pp, rng):
    params = vc_setup(pp, 4)
    M = (10, 20, 30, 40)
    com, op = vc_commit(params, M, rng)
    for i, m in enumerate(M, start=1):
        proof = vc_open(params, com, M, op, i, rng)
        assert vc_verify(params, com, m, i, proof)
        assert not vc_verify(params, com, m + 1, i, proof)
        other = i % 4 + 1
        assert not vc_verify(params, com, m, other, proof)


def test_commitments_hide_behind_fresh_randomness(pp, rng):
    params = vc_setup(pp, 2)
    a, _ = vc_commit(params, (1, 2), rng)
    b, _ = vc_commit(params, (1, 2), rng)
    assert a.c != b.c


def test_update_matches_fresh_commitment(pp, rng):
    params = vc_setup(pp, 3)
    com, op = vc_commit(params, (5, 6, 7), rng)
    new, op2 = vc_update(params, com, 6, 60, 2, op, rng)
    fresh, _ = vc_commit(params, (5, 60, 7), rng, m0=op2.m0)
    assert new.c == fresh.c
    proof = vc_open(params, new, (5, 60, 7), op2, 2, rng)
    assert vc_verify(params, new, 60, 2, proof)


def test_length_and_position_errors(mock, rng):
    params = vc_setup(mock, 3)
    with pytest.raises(InvalidLengthError):
        vc_commit(params, (1, 2), rng)
    with pytest.raises(InvalidLengthError):
        vc_setup(mock, 0)
    com, op = vc_commit(params, (1, 2, 3), rng)
    for j in (0, 4):
        with pytest.raises(PositionError):
            vc_open(params, com, (1, 2, 3), op, j, rng)
        with pytest.raises(PositionError):
            vc_update(params, com, 1, 2, j, op, rng)


@settings(max_examples=40, deadline=None)
@given(M=st.lists(st.integers(0, 2**64), min_size=1, max_size=6), seed=st.integers(0, 2**32))
def test_binding_property_on_mock(mock, M, seed):
    rng = random.Random(seed)
    params = vc_setup(mock, len(M))
    com, op = vc_commit(params, M, rng)
    i = seed % len(M) + 1
    proof = vc_open(params, com, M, op, i, rng)
    assert vc_verify(params, com, M[i - 1], i, proof)
    assert not vc_verify(params, com, M[i - 1] + 1, i, proof)


def test_setup_bases(mock, curve):
    params = vc_setup(mock, 2)
    exps = [z.exponent for z in params.bases]
    assert len(set(exps)) == 2 and 0 not in exps
    assert vc_setup(mock, 2) == params
    bases = vc_setup(curve, 16).bases
    assert len(bases) == 16 and len({b.to_bytes() for b in bases}) == 16


def test_zero_vector_and_identity_updates(pp, rng):
    params = vc_setup(pp, 3)
    zero, _ = vc_commit(params, (0, 0, 0), rng, m0=0)
    assert zero.c.is_identity()
    com, op = vc_commit(params, (1, 2, 3), rng)
    same, _ = vc_update(params, com, 2, 2, 2, op, rng, m0=op.m0)
    assert same == com
    there, op2 = vc_update(params, com, 2, 8, 2, op, rng)
    back, _ = vc_update(params, there, 8, 2, 2, op2, rng, m0=op.m0)
    assert back == com


def test_single_position_vector(pp, rng):
    params = vc_setup(pp, 1)
    com, op = vc_commit(params, (42,), rng)
    assert vc_verify(params, com, 42, 1, vc_open(params, com, (42,), op, 1, rng))


def test_position_proof_mutation_sweep(mock, rng):
    from dataclasses import replace
    params = vc_setup(mock, 3)
    com, op = vc_commit(params, (1, 2, 3), rng)
    proof = vc_open(params, com, (1, 2, 3), op, 2, rng)
    variants = [replace(proof, challenge=(proof.challenge + 1) % mock.q)]
    for k in range(len(proof.responses)):
        r = list(proof.responses)
        r[k] = (r[k] + 1) % mock.q
        variants.append(replace(proof, responses=r))
    variants.append(replace(proof, position=3))
    assert all(not vc_verify(params, com, 2, 2, v) for v in variants)
    other, _ = vc_commit(params, (1, 2, 3), rng)
    assert not vc_verify(params, other, 2, 2, proof)


def test_verifier_recomputation_matches_exponents(mock1009, rng):
    """The verifier's first-message recomputation, redone in plain integers."""
    from vcred import sigma
    from vcred.commitment import opening_equation
    pp = mock1009
    q = pp.q
    params = vc_setup(pp, 3)
    M = (5, 6, 7)
    com, op = vc_commit(params, M, rng)
    eq = opening_equation(params, com, {2: 6})
    proof = sigma.prove(pp, b"t", [eq], {"m0": op.m0, "m1": 5, "m3": 7}, b"", rng)
    bases = dict((name, base.exponent) for base, name in eq.terms)
    names = sigma.witness_names([eq])
    for p in (proof, sigma.SigmaProof(proof.challenge, [(s + 1) % q for s in proof.responses])):
        want = (p.challenge * eq.lhs.exponent
                + sum(s * bases[n] for s, n in zip(p.responses, names))) % q
        (got,) = sigma.commitments_from([eq], p)
        assert got.exponent == want
    assert sigma.verify(pp, b"t", [eq], proof, b"")
