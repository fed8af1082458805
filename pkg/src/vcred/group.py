"""Bilinear group triple (G1, G2, GT) with two interchangeable backends.

``curve`` is BLS12-381 through petrelic (RELIC). ``mock`` represents every
element by its discrete logarithm to the group generator, so a pairing is a
product of exponents and every protocol equation becomes an exact integer
identity mod q. The mock is insecure by construction and exists to give the
higher layers an exact oracle.

All groups are written additively: ``k * g`` is scalar multiplication and
the GT "product" of two pairings is ``+``.
"""

from __future__ import annotations

import hashlib
import secrets
import struct
from dataclasses import dataclass, field
from functools import lru_cache

import sympy

from .errors import ConfigError, DecodeError, UsageError

CURVE_ORDER = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
TOY_ORDER = 101

G1, G2, GT = "G1", "G2", "GT"
GROUPS = (G1, G2, GT)

_BACKEND_ALIASES = {
    "curve": "curve",
    "production-curve": "curve",
    "bls12-381": "curve",
    "mock": "mock",
}


def length_prefixed(parts) -> bytes:
    """Concatenate byte strings, each preceded by a 4-byte big-endian length."""
    out = bytearray()
    for p in parts:
        out += struct.pack(">I", len(p))
        out += p
    return bytes(out)


def scalar_width(q: int) -> int:
    return (q.bit_length() + 7) // 8


def scalar_to_bytes(value: int, q: int) -> bytes:
    return (value % q).to_bytes(scalar_width(q), "big")


def scalar_from_bytes(data: bytes, q: int) -> int:
    if len(data) != scalar_width(q):
        raise DecodeError(f"scalar must be {scalar_width(q)} bytes, got {len(data)}")
    value = int.from_bytes(data, "big")
    if value >= q:
        raise DecodeError("non-canonical scalar")
    return value


def hash_to_scalar(q: int, domain_tag: bytes, inputs) -> int:
    """Deterministic map of (tag, ordered inputs) into [0, q).

    SHA-512 over a length-prefixed encoding, so ``[m]`` and ``[m, b""]`` hash
    differently. 512 bits keep the reduction bias negligible for q < 2^256.
    """
    if not domain_tag:
        raise ValueError("domain tag must be non-empty")
    inputs = list(inputs)
    data = length_prefixed([b"vcred/h2s/v1", domain_tag, q.to_bytes(64, "big")] + inputs)
    return int.from_bytes(hashlib.sha512(data).digest(), "big") % q


def default_rng(rng=None):
    return secrets.SystemRandom() if rng is None else rng


def random_scalar(rng, q: int, nonzero: bool = True) -> int:
    rng = default_rng(rng)
    return rng.randrange(1, q) if nonzero else rng.randrange(q)


class Elem:
    """An element of G1, G2 or GT, bound to the backend that created it."""

    __slots__ = ("backend", "group", "raw")

    def __init__(self, backend, group, raw):
        self.backend = backend
        self.group = group
        self.raw = raw

    def _check(self, other):
        if not isinstance(other, Elem):
            raise UsageError(f"expected a group element, got {type(other).__name__}")
        if other.backend is not self.backend:
            raise UsageError(
                f"mixed backends: {self.backend.group_id} and {other.backend.group_id}"
            )
        if other.group != self.group:
            raise UsageError(f"mixed groups: {self.group} and {other.group}")

    def __add__(self, other):
        self._check(other)
        return self.backend._add(self, other)

    def __sub__(self, other):
        self._check(other)
        return self.backend._add(self, self.backend._neg(other))

    def __neg__(self):
        return self.backend._neg(self)

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return self.backend._mul(self, k % self.backend.q)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Elem):
            return NotImplemented
        return (
            other.backend is self.backend
            and other.group == self.group
            and self.backend._eq(self, other)
        )

    def __hash__(self):
        return hash((self.group, self.to_bytes()))

    def is_identity(self) -> bool:
        return self.backend._is_identity(self)

    def to_bytes(self) -> bytes:
        return self.backend._encode(self)

    def __repr__(self):
        return f"{self.group}<{self.backend.group_id}:{self.to_bytes().hex()[:16]}>"


class MockElem(Elem):
    """Element stored as its exponent with respect to the group generator."""

    __slots__ = ()

    @property
    def exponent(self) -> int:
        return self.raw


class _Backend:
    group_id: str
    q: int

    def generator(self, group):
        raise NotImplementedError

    def identity(self, group):
        raise NotImplementedError

    def pair(self, u: Elem, v: Elem) -> Elem:
        raise NotImplementedError

    def decode(self, group, data: bytes) -> Elem:
        raise NotImplementedError

    def hash_to_g1(self, tag: bytes, *parts: bytes) -> Elem:
        raise NotImplementedError

    def width(self, group) -> int:
        raise NotImplementedError

    def _check_pair_args(self, u, v):
        for x, grp in ((u, G1), (v, G2)):
            if not isinstance(x, Elem) or x.backend is not self:
                raise UsageError("pairing inputs must come from the same backend")
            if x.group != grp:
                raise UsageError(f"pair expects ({G1}, {G2}), got {x.group} in slot {grp}")


class MockBackend(_Backend):
    def __init__(self, q: int):
        self.q = q
        self.group_id = f"mock-{q}"

    def _new(self, group, value):
        return MockElem(self, group, value % self.q)

    def generator(self, group):
        return self._new(group, 1)

    def identity(self, group):
        return self._new(group, 0)

    def element(self, group, exponent: int) -> MockElem:
        return self._new(group, exponent)

    def _add(self, a, b):
        return self._new(a.group, a.raw + b.raw)

    def _neg(self, a):
        return self._new(a.group, -a.raw)

    def _mul(self, a, k):
        return self._new(a.group, a.raw * k)

    def _eq(self, a, b):
        return a.raw == b.raw

    def _is_identity(self, a):
        return a.raw == 0

    def width(self, group):
        return scalar_width(self.q)

    def _encode(self, a):
        return scalar_to_bytes(a.raw, self.q)

    def decode(self, group, data):
        return self._new(group, scalar_from_bytes(bytes(data), self.q))

    def pair(self, u, v):
        self._check_pair_args(u, v)
        return self._new(GT, u.raw * v.raw)

    def psi(self, v: Elem) -> Elem:
        """G2 -> G1 homomorphism; exists only on the mock."""
        if v.backend is not self or v.group != G2:
            raise UsageError("psi maps mock G2 elements")
        return self._new(G1, v.raw)

    def hash_to_g1(self, tag, *parts):
        counter = 0
        while True:
            e = hash_to_scalar(self.q, b"vcred/h2g1/" + tag, list(parts) + [bytes([counter])])
            if e:
                return self._new(G1, e)
            counter += 1


class CurveBackend(_Backend):
    """BLS12-381 via petrelic's additive pairing interface."""

    def __init__(self):
        from petrelic.additive import pairing

        self._mod = pairing
        self.q = CURVE_ORDER
        self.group_id = "bls12-381"
        if int(pairing.G1.order()) != CURVE_ORDER:
            raise ConfigError("petrelic reports an unexpected group order")
        self._groups = {G1: pairing.G1, G2: pairing.G2, GT: pairing.GT}
        self._elem_types = {
            G1: pairing.G1Element,
            G2: pairing.G2Element,
            GT: pairing.GTElement,
        }
        self._gens = {
            G1: pairing.G1.generator(),
            G2: pairing.G2.generator(),
        }
        self._gens[GT] = self._gens[G1].pair(self._gens[G2])
        self._width = {g: len(self._gens[g].to_binary()) for g in GROUPS}

    def _wrap(self, group, raw):
        return Elem(self, group, raw)

    def generator(self, group):
        return self._wrap(group, self._gens[group])

    def identity(self, group):
        return self._wrap(group, self._groups[group].neutral_element())

    def _add(self, a, b):
        return self._wrap(a.group, a.raw + b.raw)

    def _neg(self, a):
        return self._wrap(a.group, -a.raw)

    def _mul(self, a, k):
        return self._wrap(a.group, a.raw * k)

    def _eq(self, a, b):
        return a.raw == b.raw

    def _is_identity(self, a):
        return a.raw.is_neutral_element()

    def width(self, group):
        return self._width[group]

    def _encode(self, a):
        if a.group != GT and a.raw.is_neutral_element():
            return bytes(self._width[a.group])
        return a.raw.to_binary()

    def decode(self, group, data):
        data = bytes(data)
        width = self._width[group]
        if len(data) != width:
            raise DecodeError(f"{group} element must be {width} bytes, got {len(data)}")
        if group != GT and not any(data):
            return self.identity(group)
        try:
            raw = self._elem_types[group].from_binary(data)
        except Exception as exc:  # RELIC raises assorted types on bad input
            raise DecodeError(f"invalid {group} encoding: {exc}") from None
        if not raw.is_valid():
            raise DecodeError(f"{group} encoding is not a valid subgroup element")
        elem = self._wrap(group, raw)
        if elem.to_bytes() != data:
            raise DecodeError(f"non-canonical {group} encoding")
        return elem

    def pair(self, u, v):
        self._check_pair_args(u, v)
        return self._wrap(GT, u.raw.pair(v.raw))

    def psi(self, v):
        raise UsageError("no efficiently computable G2 -> G1 map on BLS12-381")

    def hash_to_g1(self, tag, *parts):
        msg = length_prefixed([b"vcred/h2g1/v1", tag] + list(parts))
        return self._wrap(G1, self._groups[G1].hash_to_point(msg))


@lru_cache(maxsize=None)
def _mock_backend(q: int) -> MockBackend:
    return MockBackend(q)


@lru_cache(maxsize=None)
def _curve_backend() -> CurveBackend:
    return CurveBackend()


@dataclass(frozen=True)
class PublicParams:
    """System parameters shared by every party.

    ``g``, ``h`` and ``gt`` generate G1, G2 and GT; ``gt == pair(g, h)``.
    """

    group_id: str
    q: int
    g: Elem = field(repr=False)
    h: Elem = field(repr=False)
    gt: Elem = field(repr=False)
    security_level: str

    @property
    def backend(self):
        return self.g.backend

    @property
    def is_mock(self) -> bool:
        return isinstance(self.backend, MockBackend)

    def pair(self, u: Elem, v: Elem) -> Elem:
        return self.backend.pair(u, v)

    def hash_to_scalar(self, domain_tag: bytes, inputs) -> int:
        return hash_to_scalar(self.q, domain_tag, inputs)

    def hash_to_g1(self, tag: bytes, *parts: bytes) -> Elem:
        return self.backend.hash_to_g1(tag, *parts)

    def random_scalar(self, rng, nonzero=True) -> int:
        return random_scalar(rng, self.q, nonzero)

    def scalar_bytes(self, value: int) -> bytes:
        return scalar_to_bytes(value, self.q)

    def decode(self, group, data: bytes) -> Elem:
        return self.backend.decode(group, data)

    def identity(self, group=G1) -> Elem:
        return self.backend.identity(group)

    def to_bytes(self) -> bytes:
        return length_prefixed(
            [
                b"vcred/pp/v1",
                self.group_id.encode(),
                self.security_level.encode(),
                self.q.to_bytes(64, "big"),
                self.g.to_bytes(),
                self.h.to_bytes(),
                self.gt.to_bytes(),
            ]
        )

    def digest(self) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()


def _normalize_backend(backend: str) -> str:
    try:
        return _BACKEND_ALIASES[backend]
    except KeyError:
        raise ConfigError(
            f"unknown backend {backend!r}; choose one of {sorted(_BACKEND_ALIASES)}"
        ) from None


@lru_cache(maxsize=None)
def _setup(security_level: str, backend: str, q: int | None) -> PublicParams:
    kind = _normalize_backend(backend)
    if security_level not in ("toy", "standard"):
        raise ConfigError(f"unknown security level {security_level!r}")
    if kind == "curve":
        if security_level != "standard" or q not in (None, CURVE_ORDER):
            raise ConfigError("the production curve only offers the standard level")
        bk = _curve_backend()
    else:
        if q is None:
            q = TOY_ORDER if security_level == "toy" else CURVE_ORDER
        if q < 5 or not sympy.isprime(q):
            raise ConfigError(f"mock group order must be a prime >= 5, got {q}")
        bk = _mock_backend(q)
    return PublicParams(
        group_id=bk.group_id,
        q=bk.q,
        g=bk.generator(G1),
        h=bk.generator(G2),
        gt=bk.generator(GT),
        security_level=security_level,
    )


def setup(security_level: str = "standard", backend: str = "curve", q: int | None = None):
    """Deterministic public parameters for the chosen backend.

    ``q`` overrides the order of the mock group (e.g. 1009); the toy level
    defaults to 101 and the standard mock reuses the BLS12-381 order.
    """
    return _setup(security_level, backend, q)


def params_from_group_id(group_id: str, security_level: str) -> PublicParams:
    if group_id == "bls12-381":
        return setup(security_level, "curve")
    if group_id.startswith("mock-"):
        try:
            q = int(group_id[5:])
        except ValueError:
            raise ConfigError(f"bad mock group id {group_id!r}") from None
        return setup(security_level, "mock", q)
    raise ConfigError(f"unknown group id {group_id!r}")
