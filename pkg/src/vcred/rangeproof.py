"""Bit-decomposition range proof on a Pedersen commitment ``C = v*g + r*H``.

Proves ``0 <= v - threshold < 2^n`` (op ``">="``) or
``0 <= threshold - v < 2^n`` (op ``"<="``). Each bit gets a commitment
``C_k = b_k*g + r_k*H`` and a two-branch OR proof; a Schnorr proof in base
``H`` ties ``sum 2^k C_k`` back to the shifted commitment. All parts share
one Fiat-Shamir challenge.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CannotSatisfyError, CapacityError
from .group import length_prefixed

TAG = b"vcred/range/v1"
OPS = (">=", "<=")


@dataclass(frozen=True)
class RangeProof:
    bit_commitments: tuple
    challenge: int
    c0: tuple
    s0: tuple
    s1: tuple
    s_rec: int

    def __post_init__(self):
        for name in ("bit_commitments", "c0", "s0", "s1"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def n_bits(self) -> int:
        return len(self.bit_commitments)


def pedersen_base(pp):
    """Second Pedersen generator with no known discrete log to ``g``."""
    return pp.hash_to_g1(b"pedersen-H")


def pedersen_commit(pp, value: int, blind: int):
    return pp.g * (value % pp.q) + pedersen_base(pp) * (blind % pp.q)


def _shifted(pp, com_attr, threshold, op):
    t = pp.g * (threshold % pp.q)
    if op == ">=":
        return com_attr - t
    if op == "<=":
        return t - com_attr
    raise ValueError(f"unknown predicate operator {op!r}")


def _hash(pp, context, D, threshold, op, n, bits, T0, T1, T_rec):
    parts = [context, D.to_bytes(), pp.scalar_bytes(threshold), op.encode(), n.to_bytes(2, "big")]
    parts += [c.to_bytes() for c in bits]
    parts += [t.to_bytes() for t in T0] + [t.to_bytes() for t in T1] + [T_rec.to_bytes()]
    return pp.hash_to_scalar(TAG, [length_prefixed(parts)])


def check_capacity(value: int, threshold: int, n_bits: int, op: str = ">="):
    diff = value - threshold if op == ">=" else threshold - value
    if diff < 0:
        raise CannotSatisfyError(f"value does not satisfy {op} {threshold}")
    if diff >= 1 << n_bits:
        raise CapacityError(f"difference {diff} does not fit in {n_bits} bits")
    return diff


def prove_range(pp, com_attr, value: int, blind: int, threshold: int, n_bits: int, rng,
                op: str = ">=", context: bytes = b"", _unchecked_diff=None) -> RangeProof:
    """Range proof for ``com_attr = value*g + blind*H``.

    ``_unchecked_diff`` lets the forgery harness run the prover on a
    difference that is out of range; honest callers never set it.
    """
    if op not in OPS:
        raise ValueError(f"unknown predicate operator {op!r}")
    if _unchecked_diff is None:
        diff = check_capacity(value, threshold, n_bits, op)
    else:
        diff = _unchecked_diff
    q = pp.q
    H = pedersen_base(pp)
    g = pp.g
    D = _shifted(pp, com_attr, threshold, op)
    shifted_blind = blind % q if op == ">=" else -blind % q

    bits = [(diff >> k) & 1 for k in range(n_bits)]
    r = [pp.random_scalar(rng, nonzero=False) for _ in range(n_bits)]
    C = [g * b + H * rk for b, rk in zip(bits, r)]

    T0, T1, fake, nonce = [], [], [], []
    for k in range(n_bits):
        t = pp.random_scalar(rng, nonzero=False)
        fc = pp.random_scalar(rng, nonzero=False)
        fs = pp.random_scalar(rng, nonzero=False)
        nonce.append(t)
        fake.append((fc, fs))
        if bits[k] == 0:
            T0.append(H * t)
            T1.append(H * fs + (C[k] - g) * fc)
        else:
            T0.append(H * fs + C[k] * fc)
            T1.append(H * t)

    delta = (shifted_blind - sum((1 << k) * r[k] for k in range(n_bits))) % q
    t_rec = pp.random_scalar(rng, nonzero=False)
    T_rec = H * t_rec
    c = _hash(pp, context, D, threshold, op, n_bits, C, T0, T1, T_rec)

    c0, s0, s1 = [], [], []
    for k in range(n_bits):
        fc, fs = fake[k]
        if bits[k] == 0:
            ck0 = (c - fc) % q
            c0.append(ck0)
            s0.append((nonce[k] - ck0 * r[k]) % q)
            s1.append(fs)
        else:
            ck1 = (c - fc) % q
            c0.append(fc)
            s0.append(fs)
            s1.append((nonce[k] - ck1 * r[k]) % q)
    s_rec = (t_rec - c * delta) % q
    return RangeProof(C, c, c0, s0, s1, s_rec)


def verify_range(pp, com_attr, threshold: int, n_bits: int, proof: RangeProof,
                 op: str = ">=", context: bytes = b"") -> bool:
    if op not in OPS or not isinstance(proof, RangeProof) or proof.n_bits != n_bits:
        return False
    q = pp.q
    scalars = [proof.challenge, proof.s_rec, *proof.c0, *proof.s0, *proof.s1]
    if not all(isinstance(s, int) and 0 <= s < q for s in scalars):
        return False
    if len(proof.c0) != n_bits or len(proof.s0) != n_bits or len(proof.s1) != n_bits:
        return False
    H = pedersen_base(pp)
    g = pp.g
    c = proof.challenge
    D = _shifted(pp, com_attr, threshold, op)
    T0, T1 = [], []
    acc = pp.identity()
    for k, Ck in enumerate(proof.bit_commitments):
        ck0 = proof.c0[k]
        ck1 = (c - ck0) % q
        T0.append(H * proof.s0[k] + Ck * ck0)
        T1.append(H * proof.s1[k] + (Ck - g) * ck1)
        acc = acc + Ck * (1 << k)
    T_rec = H * proof.s_rec + (D - acc) * c
    return _hash(pp, context, D, threshold, op, n_bits, proof.bit_commitments, T0, T1, T_rec) == c
