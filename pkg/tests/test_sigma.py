import pytest

from vcred import sigma


@pytest.fixture(params=["mock", "curve"])
def pp(request):
    return request.getfixturevalue(request.param)


def _dlog_statement(pp, x, y):
    H = pp.hash_to_g1(b"test-H")
    return [sigma.Equation(pp.g * x + H * y, [(pp.g, "x"), (H, "y")]),
            sigma.Equation(pp.g * x, [(pp.g, "x")])]


def test_prove_verify_and_context_binding(pp, rng):
    eqs = _dlog_statement(pp, 12, 34)
    assert sigma.check_equations(eqs, {"x": 12, "y": 34})
    p = sigma.prove(pp, b"t", eqs, {"x": 12, "y": 34}, b"ctx", rng)
    assert sigma.verify(pp, b"t", eqs, p, b"ctx")
    assert not sigma.verify(pp, b"t", eqs, p, b"other")
    assert not sigma.verify(pp, b"u", eqs, p, b"ctx")
    assert not sigma.verify(pp, b"t", _dlog_statement(pp, 13, 34), p, b"ctx")


def test_shared_witness_is_enforced(pp, rng):
    eqs = _dlog_statement(pp, 12, 34)
    eqs[1] = sigma.Equation(pp.g * 99, [(pp.g, "x")])
    assert not sigma.check_equations(eqs, {"x": 12, "y": 34})


def test_simulated_transcripts_verify_interactively(mock, rng):
    eqs = _dlog_statement(mock, 5, 6)
    commitments, proof = sigma.simulate(mock, eqs, 77, rng)
    assert len(commitments) == len(eqs)
    assert proof.challenge == 77
    assert len(proof.responses) == len(sigma.witness_names(eqs))
    # the simulated first messages are exactly what the verifier recomputes
    assert sigma.commitments_from(eqs, proof) == commitments
