"""Binary patterns over the positions of a length-2^n polar code.

A :class:`Pattern` stores its bits in a single Python integer, bit ``i`` of
the integer being position ``i`` of the vector. Set operations are therefore
word-parallel big-integer operations.

The generator matrix is the natural-order ``G_N = G_2^{(x)n}`` with
``G_2 = [[1, 0], [1, 1]]``; row ``i`` has support ``{j : j & i == j}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Pattern",
    "CodeParams",
    "GeneratorSet",
    "bit_reversal",
    "bit_reversal_table",
    "apply_bit_reversal",
    "generator_row",
    "encode",
    "lex_compare",
    "includes",
    "union",
    "weight",
    "minimal_generators",
    "patterns_to_matrix",
    "read_patterns",
    "format_patterns",
    "parse_pattern",
]


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


@dataclass(frozen=True, order=False)
class Pattern:
    """Immutable binary vector of length ``2**n``."""

    n: int
    bits: int = 0

    def __post_init__(self):
        _check_n(self.n)
        if self.bits < 0 or self.bits >> (1 << self.n):
            raise ValueError(f"bits do not fit in a pattern of length {1 << self.n}")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.N

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.N:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __iter__(self) -> Iterator[int]:
        b = self.bits
        for i in range(self.N):
            yield (b >> i) & 1

    def __str__(self) -> str:
        return "".join("1" if c else "0" for c in self)

    def __repr__(self) -> str:
        return f"Pattern({self})"

    def __or__(self, other: "Pattern") -> "Pattern":
        _same_length(self, other)
        return Pattern(self.n, self.bits | other.bits)

    def __and__(self, other: "Pattern") -> "Pattern":
        _same_length(self, other)
        return Pattern(self.n, self.bits & other.bits)

    def __invert__(self) -> "Pattern":
        return Pattern(self.n, self.bits ^ ((1 << self.N) - 1))

    def support(self) -> list[int]:
        b = self.bits
        out = []
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return out

    def to_array(self, dtype=np.uint8) -> np.ndarray:
        nbytes = max(1, (self.N + 7) // 8)
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.N].astype(dtype)

    @classmethod
    def zeros(cls, n: int) -> "Pattern":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "Pattern":
        return cls(n, (1 << (1 << n)) - 1)

    @classmethod
    def from_support(cls, n: int, positions: Iterable[int]) -> "Pattern":
        N = 1 << n
        bits = 0
        for i in positions:
            if not 0 <= i < N:
                raise ValueError(f"position {i} out of range for N={N}")
            bits |= 1 << i
        return cls(n, bits)

    @classmethod
    def from_bits(cls, values: Sequence[int] | np.ndarray | str) -> "Pattern":
        """Build from a 0/1 sequence (or string) with index 0 first."""
        if isinstance(values, str):
            values = [int(c) for c in values.strip()]
        arr = np.asarray(values, dtype=np.uint8).ravel()
        N = arr.size
        n = _log2_exact(N)
        if np.any(arr > 1):
            raise ValueError("pattern entries must be 0 or 1")
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(n, int.from_bytes(packed, "little"))


def _log2_exact(N: int) -> int:
    if N < 1 or N & (N - 1):
        raise ValueError(f"pattern length must be a power of two, got {N}")
    return N.bit_length() - 1


def _same_length(a: Pattern, b: Pattern) -> None:
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.N} vs {b.N}")


@dataclass(frozen=True)
class CodeParams:
    n: int
    K: int
    Np: int = 0

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.Np < self.N:
            raise ValueError(f"need 0 <= Np < N, got Np={self.Np}, N={self.N}")
        if not 0 < self.K <= self.N - self.Np:
            raise ValueError(f"need 0 < K <= N - Np, got K={self.K}")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def rate(self) -> float:
        return self.K / (self.N - self.Np)


@dataclass(frozen=True)
class GeneratorSet:
    """Rows of ``G_N`` whose union is ``pattern``, listed in decreasing order."""

    rows: tuple[int, ...]
    pattern: Pattern

    @property
    def order(self) -> int:
        return len(self.rows)


# --- bit reversal ---------------------------------------------------------


def bit_reversal(n: int, i: int) -> int:
    if not 0 <= i < (1 << n):
        raise ValueError(f"index {i} out of range for n={n}")
    r = 0
    for _ in range(n):
        r = (r << 1) | (i & 1)
        i >>= 1
    return r


@lru_cache(maxsize=None)
def _bitrev_table(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    r = np.zeros_like(idx)
    for b in range(n):
        r |= ((idx >> b) & 1) << (n - 1 - b)
    r.setflags(write=False)
    return r


def bit_reversal_table(n: int) -> np.ndarray:
    """``table[i] = bit_reversal(n, i)`` for all ``i`` (read-only)."""
    return _bitrev_table(n)


def apply_bit_reversal(P: Pattern) -> Pattern:
    return Pattern.from_bits(P.to_array()[_bitrev_table(P.n)])


# --- generator matrix and encoding ---------------------------------------


@lru_cache(maxsize=None)
def _row_bits(n: int) -> tuple[int, ...]:
    """Integer bitmask of every row of G_N."""
    rows = [1]
    for _ in range(n):
        half = len(rows)
        # G_{2M} = [[G_M, 0], [G_M, G_M]]
        rows = rows + [r | (r << half) for r in rows]
    return tuple(rows)


def generator_row(n: int, i: int) -> Pattern:
    if not 0 <= i < (1 << n):
        raise ValueError(f"row index {i} out of range for n={n}")
    return Pattern(n, _row_bits(n)[i])


def encode(u, n: int | None = None) -> np.ndarray:
    """Compute ``x = u G_N`` over GF(2) with the butterfly factorization.

    ``u`` may be one word or a 2-D batch of words (one per row).
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    if n is None:
        n = _log2_exact(N)
    elif N != 1 << n:
        raise ValueError(f"expected length {1 << n}, got {N}")
    lead = x.shape[:-1]
    h = N // 2
    while h >= 1:
        v = x.reshape(*lead, N // (2 * h), 2, h)
        v[..., 0, :] ^= v[..., 1, :]
        h //= 2
    return x


# --- set algebra -----------------------------------------------------------


def lex_compare(A: Pattern, B: Pattern) -> int:
    """-1, 0 or 1. At the first differing index the smaller vector holds 0."""
    _same_length(A, B)
    d = A.bits ^ B.bits
    if not d:
        return 0
    low = d & -d
    return 1 if A.bits & low else -1


def includes(A: Pattern, B: Pattern) -> bool:
    """True if A is included in B."""
    _same_length(A, B)
    return A.bits & ~B.bits == 0


def union(patterns: Iterable[Pattern], n: int | None = None) -> Pattern:
    bits = 0
    for p in patterns:
        if n is None:
            n = p.n
        elif p.n != n:
            raise ValueError("length mismatch in union")
        bits |= p.bits
    if n is None:
        raise ValueError("union of an empty list needs n")
    return Pattern(n, bits)


def weight(A: Pattern) -> int:
    return A.weight


@lru_cache(maxsize=None)
def _bit_set_masks(n: int) -> tuple[int, ...]:
    """masks[b] has ones at the positions whose index has bit b set."""
    N = 1 << n
    masks = []
    for b in range(n):
        m = 0
        for i in range(N):
            if i >> b & 1:
                m |= 1 << i
        masks.append(m)
    return tuple(masks)


def is_downward_closed(P: Pattern) -> bool:
    """Support closed under taking bitwise subsets of indices."""
    bits = P.bits
    for b, m in enumerate(_bit_set_masks(P.n)):
        # j in support with bit b set => j - 2^b in support
        if (bits & m) >> (1 << b) & ~bits:
            return False
    return True


def _maximal_elements(bits: int, n: int) -> int:
    """Positions of ``bits`` not strictly below another position of ``bits``."""
    covered = 0
    for b, m in enumerate(_bit_set_masks(n)):
        covered |= (bits & m) >> (1 << b)
    return bits & ~covered


def minimal_generators(P: Pattern) -> GeneratorSet | None:
    """Unique minimal set of rows whose union is ``P``, or None if P is not symmetric.

    For a downward-closed support the minimal generating rows are exactly the
    maximal elements of the support; coverage by immediate successors is enough
    to detect them since the support is closed.
    """
    if not is_downward_closed(P):
        return None
    top = Pattern(P.n, _maximal_elements(P.bits, P.n)).support()
    return GeneratorSet(tuple(sorted(top, reverse=True)), P)


# --- batch helpers ---------------------------------------------------------


def patterns_to_matrix(patterns: Sequence[Pattern]) -> np.ndarray:
    """Stack patterns into a ``(len, N)`` uint8 matrix."""
    if not patterns:
        raise ValueError("no patterns")
    n = patterns[0].n
    N = 1 << n
    nbytes = max(1, (N + 7) // 8)
    buf = bytearray()
    for p in patterns:
        if p.n != n:
            raise ValueError("length mismatch")
        buf += p.bits.to_bytes(nbytes, "little")
    raw = np.frombuffer(bytes(buf), dtype=np.uint8).reshape(len(patterns), nbytes)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :N]


# --- text format -----------------------------------------------------------


def parse_pattern(text: str, N: int) -> Pattern:
    """Parse one pattern line: an N-character 0/1 string or ``0x`` hex."""
    s = text.strip()
    n = _log2_exact(N)
    if s.lower().startswith("0x"):
        digits = s[2:]
        val = int(digits, 16)
        nbits = 4 * len(digits)
        if nbits < N or val >> nbits:
            raise ValueError(f"hex pattern too short for N={N}: {s}")
        # index 0 is the most significant bit of the first nibble
        bits = 0
        for i in range(N):
            if val >> (nbits - 1 - i) & 1:
                bits |= 1 << i
        if val & ((1 << (nbits - N)) - 1):
            raise ValueError(f"hex pattern has bits beyond N={N}: {s}")
        return Pattern(n, bits)
    if len(s) != N or set(s) - {"0", "1"}:
        raise ValueError(f"expected {N} characters over {{0,1}}, got {s!r}")
    return Pattern.from_bits(s)


def read_patterns(lines: Iterable[str]) -> list[Pattern]:
    it = (ln.strip() for ln in lines)
    it = (ln for ln in it if ln and not ln.startswith("#"))
    try:
        header = next(it)
    except StopIteration:
        raise ValueError("empty pattern file") from None
    if not header.startswith("N="):
        raise ValueError(f"pattern file must start with 'N=<int>', got {header!r}")
    N = int(header[2:])
    return [parse_pattern(ln, N) for ln in it]


def format_patterns(patterns: Iterable[Pattern], N: int) -> Iterator[str]:
    yield f"N={N}"
    for p in patterns:
        if p.N != N:
            raise ValueError("length mismatch")
        yield str(p)
