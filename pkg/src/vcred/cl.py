"""CL signatures on a committed attribute vector.

Type-3 placement: the signature lives in G1, ``X``, ``Y`` and ``W_i`` in G2,
the commitment bases ``Z_i`` in G1. The issuer signs a commitment

    com = m0*g + sum_i m_i*Z_i

without seeing the attributes:

    a = alpha*g,  A_i = z_i*a,  b = y*a,  B_i = y*A_i,
    c = x*a + (x*y*alpha)*com.

Verification needs ``(M, m0)`` and is run by the holder.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .commitment import Commitment
from .errors import InvalidLengthError, KeyMismatchError
from .group import G1, G2, Elem, length_prefixed, random_scalar


@dataclass(frozen=True)
class IssuerSecretKey:
    x: int
    y: int
    z: tuple

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(self.z))

    @property
    def l(self) -> int:
        return len(self.z)

    def public_key(self, pp) -> "IssuerPublicKey":
        Y = pp.h * self.y
        return IssuerPublicKey(
            pp=pp,
            X=pp.h * self.x,
            Y=Y,
            Z=tuple(pp.g * zi for zi in self.z),
            W=tuple(Y * zi for zi in self.z),
        )


@dataclass(frozen=True)
class IssuerPublicKey:
    pp: object = field(repr=False)
    X: Elem = field(repr=False)
    Y: Elem = field(repr=False)
    Z: tuple = field(repr=False)
    W: tuple = field(repr=False)

    @property
    def l(self) -> int:
        return len(self.Z)

    def to_bytes(self) -> bytes:
        return length_prefixed(
            [b"vcred/issuer-pk/v1", self.pp.digest(), self.X.to_bytes(), self.Y.to_bytes()]
            + [z.to_bytes() for z in self.Z]
            + [w.to_bytes() for w in self.W]
        )

    def fingerprint(self) -> int:
        return self.pp.hash_to_scalar(b"issuer-pk-fingerprint", [self.to_bytes()])

    def fingerprint_bytes(self) -> bytes:
        return self.pp.scalar_bytes(self.fingerprint())

    def is_consistent(self) -> bool:
        """pair(Z_i, Y) == pair(g, W_i) for all i, and X, Y non-trivial."""
        pp = self.pp
        if len(self.W) != len(self.Z) or self.X.is_identity() or self.Y.is_identity():
            return False
        if any(z.group != G1 for z in self.Z) or any(w.group != G2 for w in self.W):
            return False
        return all(pp.pair(z, self.Y) == pp.pair(pp.g, w) for z, w in zip(self.Z, self.W))


@dataclass(frozen=True)
class Signature:
    a: Elem
    A: tuple
    b: Elem
    B: tuple
    c: Elem

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(self.A))
        object.__setattr__(self, "B", tuple(self.B))

    def elements(self) -> list:
        return [self.a, *self.A, self.b, *self.B, self.c]


@dataclass(frozen=True)
class RandomizedSignature(Signature):
    """Blinded signature; ``r`` scales every element, ``c`` is further scaled by ``r_prime``.

    ``r`` and ``r_prime`` are prover-side secrets and never serialized.
    """

    r: int = field(default=0, repr=False)
    r_prime: int = field(default=0, repr=False)

    def public(self) -> Signature:
        return Signature(self.a, self.A, self.b, self.B, self.c)


def cl_keygen(pp, l: int, rng):
    if l < 1:
        raise InvalidLengthError("need at least one attribute")
    sk = IssuerSecretKey(
        x=pp.random_scalar(rng),
        y=pp.random_scalar(rng),
        z=[pp.random_scalar(rng) for _ in range(l)],
    )
    return sk, sk.public_key(pp)


def cl_issue_on_commitment(sk: IssuerSecretKey, pk: IssuerPublicKey, com: Commitment, rng, alpha=None):
    """Blindly sign ``com``. ``alpha`` may be pinned for oracle tests."""
    if com.l != sk.l or pk.l != sk.l:
        raise KeyMismatchError(f"commitment has {com.l} positions, key has {sk.l}")
    pp = pk.pp
    q = pp.q
    if alpha is None:
        alpha = pp.random_scalar(rng)
    a = pp.g * alpha
    A = [a * zi for zi in sk.z]
    return Signature(
        a=a,
        A=A,
        b=a * sk.y,
        B=[Ai * sk.y for Ai in A],
        c=a * sk.x + com.c * (sk.x * sk.y * alpha % q),
    )


def _batch_weights(pk, sig, n):
    """128-bit weights derived from the inputs, for small-exponent batching."""
    seed = hashlib.sha256(length_prefixed([b"vcred/batch/v1", pk.to_bytes()]
                                          + [e.to_bytes() for e in sig.elements()])).digest()
    return [int.from_bytes(hashlib.sha256(seed + i.to_bytes(4, "big")).digest()[:16], "big") | 1
            for i in range(n)]


def structure_ok(pk: IssuerPublicKey, sig: Signature, batch: bool = True) -> bool:
    """Checks that the A_i, b and B_i were formed from ``a`` with the right exponents.

    pair(a, W_i) == pair(A_i, Y), pair(a, Y) == pair(b, h), pair(A_i, Y) == pair(B_i, h).
    With ``batch`` the 3l+1 equations are folded into two by random weights
    (a false signature passes with probability about 2^-127).
    """
    pp = pk.pp
    try:
        if len(sig.A) != pk.l or len(sig.B) != pk.l:
            return False
        if any(e.group != G1 or e.backend is not pp.backend for e in sig.elements()):
            return False
        if sig.a.is_identity():
            return False
        if batch:
            w = _batch_weights(pk, sig, 2 * pk.l)
            u, v = w[:pk.l], w[pk.l:]
            W = pp.identity(G2)
            A = pp.identity(G1)
            left = sig.a
            right = sig.b
            for k in range(pk.l):
                W = W + pk.W[k] * u[k]
                A = A + sig.A[k] * u[k]
                left = left + sig.A[k] * v[k]
                right = right + sig.B[k] * v[k]
            return pp.pair(sig.a, W) == pp.pair(A, pk.Y) and pp.pair(left, pk.Y) == pp.pair(right, pp.h)
        if pp.pair(sig.a, pk.Y) != pp.pair(sig.b, pp.h):
            return False
        for Ai, Bi, Wi in zip(sig.A, sig.B, pk.W):
            AY = pp.pair(Ai, pk.Y)
            if pp.pair(sig.a, Wi) != AY or pp.pair(Bi, pp.h) != AY:
                return False
    except (AttributeError, TypeError):
        return False
    return True


def cl_verify(pk: IssuerPublicKey, M, m0: int, sig: Signature) -> bool:
    """pair(a,X) + m0*pair(b,X) + sum m_i*pair(B_i,X) == pair(c,h), plus structure.

    The left side is evaluated as a single pairing of a G1 combination.
    """
    M = tuple(M)
    if len(M) != pk.l:
        raise InvalidLengthError(f"expected {pk.l} attributes, got {len(M)}")
    if not isinstance(sig, Signature) or not structure_ok(pk, sig):
        return False
    pp = pk.pp
    acc = sig.a + sig.b * m0
    for m, Bi in zip(M, sig.B):
        acc = acc + Bi * m
    return pp.pair(acc, pk.X) == pp.pair(sig.c, pp.h)


def cl_randomize(sig: Signature, rng, r=None, r_prime=None) -> RandomizedSignature:
    """Fresh blinding: every element times ``r``, and ``c`` additionally times ``r_prime``."""
    q = sig.a.backend.q
    r = random_scalar(rng, q) if r is None else r % q
    r_prime = random_scalar(rng, q) if r_prime is None else r_prime % q
    return RandomizedSignature(
        a=sig.a * r,
        A=[Ai * r for Ai in sig.A],
        b=sig.b * r,
        B=[Bi * r for Bi in sig.B],
        c=sig.c * (r * r_prime % q),
        r=r,
        r_prime=r_prime,
    )


def signature_digest(sig: Signature) -> bytes:
    """Identifier for a stored credential (the holder's ``Com(sigma)`` handle)."""
    return hashlib.sha256(length_prefixed([e.to_bytes() for e in sig.elements()])).digest()
