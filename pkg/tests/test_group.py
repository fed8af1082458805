import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcred.errors import ConfigError, DecodeError, UsageError
from vcred.group import CURVE_ORDER, G1, G2, GT, hash_to_scalar, params_from_group_id, setup


def test_mock_pairing_is_product_of_exponents(toy):
    bk = toy.backend
    # 3*5 = 15 in the exponent of the target group
    assert toy.pair(toy.g * 3, toy.h * 5) == bk.element(GT, 15)
    assert toy.pair(toy.g * 20, toy.h * 7).exponent == 140 % 101


@settings(max_examples=60, deadline=None)
@given(a=st.integers(0, 1008), b=st.integers(0, 1008))
def test_mock_bilinearity(mock1009, a, b):
    pp = mock1009
    assert pp.pair(pp.g * a, pp.h * b) == pp.gt * (a * b)


def test_curve_bilinearity(curve):
    pp = curve
    assert pp.pair(pp.g * 6, pp.h * 7) == pp.pair(pp.g * 21, pp.h * 2)
    assert pp.pair(pp.g, pp.h) == pp.gt
    assert pp.pair(pp.g * 0, pp.h).is_identity() or pp.pair(pp.g * 0, pp.h) == pp.gt * 0


@pytest.mark.parametrize("group", [G1, G2, GT])
def test_curve_encoding_round_trip(curve, group):
    gen = {G1: curve.g, G2: curve.h, GT: curve.gt}[group]
    for k in (0, 1, 2, CURVE_ORDER - 1, 123456789):
        e = gen * k
        assert curve.decode(group, e.to_bytes()) == e


def test_curve_rejects_bad_encodings(curve):
    data = bytearray(curve.g.to_bytes())
    data[5] ^= 0xFF
    with pytest.raises(DecodeError):
        curve.decode(G1, bytes(data))
    with pytest.raises(DecodeError):
        curve.decode(G1, curve.g.to_bytes()[:-1])


def test_mock_rejects_out_of_range(toy):
    with pytest.raises(DecodeError):
        toy.decode(G1, bytes([101]))


def test_mixing_groups_or_backends_is_refused(toy, mock1009):
    with pytest.raises(UsageError):
        toy.g + toy.h
    with pytest.raises(UsageError):
        toy.g + mock1009.g
    with pytest.raises(UsageError):
        toy.pair(toy.h, toy.g)


def test_setup_configuration_errors():
    with pytest.raises(ConfigError):
        setup("toy", "curve")
    with pytest.raises(ConfigError):
        setup("standard", "mock", q=100)
    with pytest.raises(ConfigError):
        setup("standard", "sparkly")
    assert params_from_group_id("mock-1009", "toy").q == 1009


def test_hash_to_scalar_domain_separation(toy):
    a = hash_to_scalar(CURVE_ORDER, b"t1", [b"x"])
    assert a == hash_to_scalar(CURVE_ORDER, b"t1", [b"x"])
    assert a != hash_to_scalar(CURVE_ORDER, b"t2", [b"x"])
    assert a != hash_to_scalar(CURVE_ORDER, b"t1", [b"x", b""])
    with pytest.raises(ValueError):
        hash_to_scalar(101, b"", [])


def test_hash_to_g1_is_deterministic(curve, toy):
    for pp in (curve, toy):
        assert pp.hash_to_g1(b"t", b"a") == pp.hash_to_g1(b"t", b"a")
        assert pp.hash_to_g1(b"t", b"a") != pp.hash_to_g1(b"t", b"b")


# BLS12-381 prime subgroup order as published with the curve
BLS12_381_R = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001


def test_setup_values(toy, curve):
    assert toy.q == 101
    assert (toy.g.exponent, toy.h.exponent, toy.gt.exponent) == (1, 1, 1)
    assert curve.q == BLS12_381_R
    from petrelic.additive.pairing import G1 as PG1
    assert int(PG1.order()) == BLS12_381_R
    for level, backend in (("toy", "mock"), ("standard", "curve")):
        assert setup(level, backend).to_bytes() == setup(level, backend).to_bytes()


@pytest.mark.parametrize("name", ["toy", "curve"])
def test_pairing_examples(request, name):
    pp = request.getfixturevalue(name)
    assert pp.pair(pp.g * 0, pp.h * 9) == pp.gt * 0
    assert pp.pair(pp.g * 2, pp.h * 3) == pp.pair(pp.g * 3, pp.h * 2) == pp.pair(pp.g * 6, pp.h)


@pytest.mark.parametrize("name", ["mock", "curve"])
def test_bilinearity_random(request, name, rng):
    pp = request.getfixturevalue(name)
    for _ in range(100):
        a, b = pp.random_scalar(rng), pp.random_scalar(rng)
        assert pp.pair(pp.g * a, pp.h * b) == pp.gt * (a * b % pp.q)


def test_psi_on_mock_only(mock, curve, rng):
    for _ in range(20):
        a = mock.random_scalar(rng)
        assert mock.backend.psi(mock.h * a) == mock.g * a
    with pytest.raises(UsageError):
        mock.backend.psi(mock.g)
    with pytest.raises(UsageError):
        curve.backend.psi(curve.h)
    # on the curve the shared exponent is visible only through the pairing
    a = curve.random_scalar(rng)
    assert curve.pair(curve.g * a, curve.h) == curve.pair(curve.g, curve.h * a)


@pytest.mark.parametrize("name", ["mock", "curve"])
def test_thousand_elements_round_trip(request, name, rng):
    pp = request.getfixturevalue(name)
    gens = {G1: pp.g, G2: pp.h, GT: pp.gt}
    for group, gen in gens.items():
        for _ in range(1000):
            e = gen * pp.random_scalar(rng)
            assert pp.decode(group, e.to_bytes()) == e


def test_hash_to_scalar_sweep():
    for q in (101, CURVE_ORDER):
        out = [hash_to_scalar(q, b"sweep", [i.to_bytes(4, "big")]) for i in range(10_000)]
        assert all(0 <= v < q for v in out)
    assert len(set(out)) == 10_000
