import pytest

from vcred.errors import DegenerateSerialError, StaleEpochError
from vcred.rangeproof import pedersen_commit
from vcred.revocation import (
    RevocationRegistry,
    epoch_tag,
    prove_non_membership,
    publish_epoch,
    revoke,
    token_revoked,
    verify_non_membership,
)


@pytest.fixture(params=["mock", "curve"])
def pp(request):
    return request.getfixturevalue(request.param)


def _token(pp, serial, epoch, rng, ctx=b"c"):
    blind = pp.random_scalar(rng)
    C = pedersen_commit(pp, serial, blind)
    return C, prove_non_membership(pp, serial, epoch, C, blind, ctx, rng)


def test_registry_lifecycle(pp, rng):
    reg = RevocationRegistry(pp)
    d0 = reg.digest
    assert revoke(reg, 5) is reg
    assert not reg.revoke(5)
    pub = publish_epoch(reg)
    assert pub.epoch == 1 and pub.tags == (epoch_tag(pp, 5, 1),)
    assert reg.digest != d0 and reg.recompute_digest() == reg.digest
    pub2 = reg.publish()
    assert pub2.tags == (epoch_tag(pp, 5, 2),) and pub2.digest != pub.digest
    assert pub.tags[0] != pub2.tags[0]


def test_non_membership(pp, rng):
    reg = RevocationRegistry(pp)
    reg.revoke(1234)
    pub = reg.publish()
    C, proof = _token(pp, 99, pub.epoch, rng)
    assert verify_non_membership(pp, proof, pub, C, b"c")
    assert not verify_non_membership(pp, proof, pub, C, b"d")
    assert not verify_non_membership(pp, proof, pub, pedersen_commit(pp, 99, 1), b"c")
    C, proof = _token(pp, 1234, pub.epoch, rng)
    assert token_revoked(pp, proof, pub)
    assert not verify_non_membership(pp, proof, pub, C, b"c")


def test_revoked_serial_cannot_claim_another_serial(pp, rng):
    """A revoked holder proving with an unrevoked serial fails the commitment link."""
    reg = RevocationRegistry(pp)
    reg.revoke(7)
    pub = reg.publish()
    blind = pp.random_scalar(rng)
    C = pedersen_commit(pp, 7, blind)
    proof = prove_non_membership(pp, 8, pub.epoch, C, blind, b"c", rng)
    assert not verify_non_membership(pp, proof, pub, C, b"c")


def test_stale_and_degenerate(pp, rng):
    reg = RevocationRegistry(pp)
    pub = reg.publish()
    C, proof = _token(pp, 3, pub.epoch, rng)
    newer = reg.publish()
    with pytest.raises(StaleEpochError):
        verify_non_membership(pp, proof, newer, C, b"c")
    with pytest.raises(DegenerateSerialError):
        epoch_tag(pp, pp.q - 2, 2)
    with pytest.raises(DegenerateSerialError):
        _token(pp, pp.q - 2, 2, rng)


def test_tokens_are_unlinkable_across_shows(pp, rng):
    _, a = _token(pp, 3, 1, rng)
    _, b = _token(pp, 3, 1, rng)
    assert a.U != b.U and a.V != b.V


def test_empty_registry(pp, rng):
    reg = RevocationRegistry(pp)
    pub = reg.publish()
    assert pub.tags == ()
    C, proof = _token(pp, 12345, pub.epoch, rng)
    assert verify_non_membership(pp, proof, pub, C, b"c")


def test_tags_sorted_by_encoding(pp):
    reg = RevocationRegistry(pp)
    for s in (11, 22, 33):
        reg.revoke(s)
    pub = reg.publish()
    assert [t.to_bytes() for t in pub.tags] == sorted(t.to_bytes() for t in pub.tags)
    assert len(pub.tags) == 3


def test_hand_case_tag_equation(toy, rng):
    reg = RevocationRegistry(toy)
    reg.revoke(9)
    reg.publish()
    pub = reg.publish()
    assert pub.epoch == 2 and [t.exponent for t in pub.tags] == [46]
    blind = 17
    C = pedersen_commit(toy, 9, blind)
    proof = prove_non_membership(toy, 9, 2, C, blind, b"c", rng)
    u, v = proof.U.exponent, proof.V.exponent
    assert v == 11 * u % 101
    assert 46 * v % 101 == u           # pair(tag, V) == pair(g, U)
    assert token_revoked(toy, proof, pub)


def test_token_copied_from_another_credential(pp, rng):
    pub = RevocationRegistry(pp).publish()
    _, theirs = _token(pp, 5, pub.epoch, rng)
    mine, _ = _token(pp, 6, pub.epoch, rng)
    assert not verify_non_membership(pp, theirs, pub, mine, b"c")
