"""Boolean functions b: {0,1}^n -> {0,1}.

Inputs are indexed by their integer encoding with x_1 as the most significant
bit, so the two cofactors on x_1 are the contiguous halves of the bit vector.
"""
from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .numerics import as_fraction

MAX_DENSE_ARITY = 26
MAX_SYMMETRIC_ARITY = 4096


def _popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class TruthTable:
    """Explicit Boolean function as a vector of 2**n output bits."""

    n: int
    bits: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DENSE_ARITY:
            raise ValueError(f"arity must be in [1, {MAX_DENSE_ARITY}], got {self.n}")
        bits = np.asarray(self.bits)
        if bits.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} bits, got shape {bits.shape}")
        if bits.size and (bits.min() < 0 or bits.max() > 1):
            raise ValueError("bits must be 0/1")
        bits = bits.astype(np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def weight(self) -> int:
        return int(self.bits.sum(dtype=np.int64))

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    def __invert__(self) -> "TruthTable":
        return TruthTable(self.n, 1 - self.bits)

    def __repr__(self):
        return f"TruthTable(n={self.n}, hex={to_hex(self)!r})"

    def encoding(self) -> int:
        """Integer with bit i equal to b(x) for input index i."""
        return int.from_bytes(np.packbits(self.bits, bitorder="little").tobytes(), "little")

    def permute(self, perm: Sequence[int]) -> "TruthTable":
        """Function x -> b(y) where y_{perm[j]} = x_j (0-based coordinates)."""
        n = self.n
        if sorted(perm) != list(range(n)):
            raise ValueError(f"not a permutation of range({n}): {perm!r}")
        cube = self.bits.reshape((2,) * n)
        return TruthTable(n, np.transpose(cube, axes=list(perm)).ravel())


@dataclass(frozen=True)
class SymmetricProfile:
    """Permutation-invariant function: out[w] is the value on Hamming weight w."""

    n: int
    out: tuple

    def __post_init__(self):
        if not 1 <= self.n <= MAX_SYMMETRIC_ARITY:
            raise ValueError(f"arity must be in [1, {MAX_SYMMETRIC_ARITY}], got {self.n}")
        out = tuple(int(v) for v in self.out)
        if len(out) != self.n + 1 or any(v not in (0, 1) for v in out):
            raise ValueError(f"profile must be n+1 = {self.n + 1} bits")
        object.__setattr__(self, "out", out)

    @property
    def weight(self) -> int:
        return sum(math.comb(self.n, w) for w, v in enumerate(self.out) if v)

    def expand(self) -> TruthTable:
        return TruthTable(self.n, np.asarray(self.out, dtype=np.uint8)[_popcounts(self.n)])

    def __invert__(self) -> "SymmetricProfile":
        return SymmetricProfile(self.n, tuple(1 - v for v in self.out))


def dictator(n: int, i: int = 1) -> TruthTable:
    """b(x) = x_i with 1-based coordinate i."""
    if not 1 <= i <= n:
        raise ValueError(f"coordinate must be in [1, {n}], got {i}")
    idx = np.arange(1 << n, dtype=np.int64)
    return TruthTable(n, (idx >> (n - i)) & 1)


def constant(n: int, value: int) -> TruthTable:
    return TruthTable(n, np.full(1 << n, value, dtype=np.uint8))


def majority(n: int, tie_rule: str = "ones") -> SymmetricProfile:
    """1 iff weight > n/2; for even n the weight-n/2 class follows ``tie_rule``."""
    if tie_rule not in ("ones", "zeros"):
        raise ValueError(f"tie_rule must be 'ones' or 'zeros', got {tie_rule!r}")
    out = [1 if 2 * w > n else 0 for w in range(n + 1)]
    if n % 2 == 0 and tie_rule == "ones":
        out[n // 2] = 1
    return SymmetricProfile(n, tuple(out))


def parity(n: int) -> SymmetricProfile:
    return SymmetricProfile(n, tuple(w % 2 for w in range(n + 1)))


def threshold(n: int, t: int) -> SymmetricProfile:
    """1 iff weight >= t."""
    return SymmetricProfile(n, tuple(int(w >= t) for w in range(n + 1)))


def maj_q(n: int, q) -> SymmetricProfile:
    """Unbalanced majority mapping roughly q*2**n of the heaviest inputs to 1.

    Weight classes are assigned whole, so the realised weight is the
    threshold union closest to q*2**n (ties go to the larger set).  At least
    one and at most 2**n - 1 inputs map to 1.
    """
    q = as_fraction(q)
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    target = q * (1 << n)
    best_t, best_gap = None, None
    tail = 0
    for t in range(n, 0, -1):
        tail += math.comb(n, t)
        gap = abs(tail - target)
        if best_gap is None or gap <= best_gap:
            best_t, best_gap = t, gap
    return threshold(n, best_t)


def cofactor(b: TruthTable, value: int) -> TruthTable:
    """Restriction x_1 = value, as a function of x_2..x_n."""
    if b.n < 2:
        raise ValueError("cofactor needs arity >= 2")
    if value not in (0, 1):
        raise ValueError(f"value must be 0 or 1, got {value!r}")
    half = 1 << (b.n - 1)
    return TruthTable(b.n - 1, b.bits[value * half:(value + 1) * half])


def detect_symmetric(b: TruthTable) -> Optional[SymmetricProfile]:
    """Profile of b if b is constant on every Hamming-weight class, else None."""
    pc = _popcounts(b.n)
    out = np.full(b.n + 1, -1, dtype=np.int64)
    out[pc] = b.bits  # any representative per class
    if not np.array_equal(out[pc], b.bits):
        return None
    return SymmetricProfile(b.n, tuple(int(v) for v in out))


def as_truth_table(f) -> TruthTable:
    if isinstance(f, TruthTable):
        return f
    if isinstance(f, SymmetricProfile):
        if f.n > MAX_DENSE_ARITY:
            raise ValueError(f"cannot expand arity {f.n} > {MAX_DENSE_ARITY} densely")
        return f.expand()
    raise TypeError(f"expected TruthTable or SymmetricProfile, got {type(f).__name__}")


# --- serialisation ---------------------------------------------------------

def _hex_digits(n: int) -> int:
    return max(1, (1 << n) // 4)


def to_hex(b: TruthTable) -> str:
    return format(b.encoding(), "x").zfill(_hex_digits(b.n)).upper()


def from_encoding(n: int, code: int) -> TruthTable:
    size = 1 << n
    if not 0 <= code < (1 << size):
        raise ValueError(f"encoding {code} out of range for n={n}")
    raw = np.frombuffer(code.to_bytes(max(1, (size + 7) // 8), "little"), dtype=np.uint8)
    return TruthTable(n, np.unpackbits(raw, bitorder="little")[:size])


def from_hex(n: int, text: str) -> TruthTable:
    text = text.strip()
    if text.lower().startswith("0x"):
        text = text[2:]
    if len(text) != _hex_digits(n):
        raise ValueError(f"n={n} needs {_hex_digits(n)} hex digits, got {len(text)}")
    if not text or any(c not in string.hexdigits for c in text):
        raise ValueError(f"invalid hex string {text!r}")
    return from_encoding(n, int(text, 16))


def from_minterms(n: int, minterms: Sequence[int]) -> TruthTable:
    bits = np.zeros(1 << n, dtype=np.uint8)
    for m in minterms:
        if not isinstance(m, (int, np.integer)) or not 0 <= m < (1 << n):
            raise ValueError(f"minterm {m!r} out of range for n={n}")
        bits[m] = 1
    return TruthTable(n, bits)


def serialize(f) -> str:
    """Canonical JSON text for a TruthTable or SymmetricProfile."""
    if isinstance(f, SymmetricProfile):
        return json.dumps({"n": f.n, "profile": list(f.out)})
    return json.dumps({"n": f.n, "hex": to_hex(f)})


def parse_function(text: str):
    """Inverse of :func:`serialize`; also accepts the minterm form."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict) or not isinstance(obj.get("n"), int):
        raise ValueError("expected an object with integer field 'n'")
    n = obj["n"]
    keys = {"hex", "minterms", "profile"} & obj.keys()
    if len(keys) != 1:
        raise ValueError("expected exactly one of 'hex', 'minterms', 'profile'")
    if "profile" in obj:
        return SymmetricProfile(n, tuple(obj["profile"]))
    if "hex" in obj:
        if not isinstance(obj["hex"], str):
            raise ValueError("'hex' must be a string")
        return from_hex(n, obj["hex"])
    if not isinstance(obj["minterms"], list):
        raise ValueError("'minterms' must be a list")
    return from_minterms(n, obj["minterms"])


def parse_truth_table(text: str) -> TruthTable:
    return as_truth_table(parse_function(text))
