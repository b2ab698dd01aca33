"""Equivalence of puncturing patterns under elementary block swaps.

Two patterns are equivalent when their bit-reversed forms are connected by a
sequence of elementary permutations. ``canonical`` maps every pattern to the
unique primitive member of its class.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .patterns import Pattern, apply_bit_reversal, lex_compare

__all__ = [
    "ElementaryPerm",
    "OrbitOverflow",
    "apply_elementary",
    "elementary_perms",
    "phi",
    "canonical",
    "is_primitive",
    "primitive_recursive_test",
    "orbit",
    "orbit_classes",
]


class OrbitOverflow(RuntimeError):
    """Raised when an equivalence class exceeds the exploration cap."""


@dataclass(frozen=True)
class ElementaryPerm:
    """Swap of the blocks ``[k, k+2^j)`` and ``[k+2^j, k+2^(j+1))``."""

    j: int
    k: int

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("level j must be non-negative")
        if self.k < 0 or self.k % (1 << (self.j + 1)):
            raise ValueError(f"block start k={self.k} is not a multiple of 2^{self.j + 1}")

    def check(self, N: int) -> None:
        if self.k + (1 << (self.j + 1)) > N:
            raise ValueError(f"{self} does not fit in length {N}")

    def index_map(self, N: int) -> np.ndarray:
        self.check(N)
        idx = np.arange(N)
        h = 1 << self.j
        k = self.k
        idx[k : k + h] += h
        idx[k + h : k + 2 * h] -= h
        return idx


def elementary_perms(n: int) -> list[ElementaryPerm]:
    N = 1 << n
    return [ElementaryPerm(j, k) for j in range(n) for k in range(0, N, 2 << j)]


def _swap_bits(bits: int, k: int, h: int) -> int:
    mask = (1 << h) - 1
    left = (bits >> k) & mask
    right = (bits >> (k + h)) & mask
    bits &= ~(((1 << (2 * h)) - 1) << k)
    return bits | (right << k) | (left << (k + h))


def apply_elementary(perm: ElementaryPerm, A):
    """Apply an elementary permutation to a Pattern or to a 1-D array."""
    if isinstance(A, Pattern):
        perm.check(A.N)
        return Pattern(A.n, _swap_bits(A.bits, perm.k, 1 << perm.j))
    arr = np.asarray(A)
    return arr[..., perm.index_map(arr.shape[-1])]


def _lex_less_blocks(a: int, b: int) -> bool:
    d = a ^ b
    return bool(d) and not (a & d & -d)


def _phi_bits(bits: int, n: int) -> int:
    N = 1 << n
    for j in range(n):
        h = 1 << j
        mask = (1 << h) - 1
        for k in range(0, N, 2 * h):
            left = (bits >> k) & mask
            right = (bits >> (k + h)) & mask
            # strict comparison: equal blocks are left in place
            if _lex_less_blocks(left, right):
                bits = _swap_bits(bits, k, h)
    return bits


def phi(P: Pattern) -> Pattern:
    return Pattern(P.n, _phi_bits(P.bits, P.n))


def canonical(P: Pattern) -> Pattern:
    return apply_bit_reversal(phi(apply_bit_reversal(P)))


def is_primitive(P: Pattern) -> bool:
    return canonical(P) == P


def primitive_recursive_test(P: Pattern) -> bool:
    if P.n == 1:
        return P.bits != 0b10  # [0,1] is the only non-primitive length-2 pattern
    bar = apply_bit_reversal(P)
    half = P.N // 2
    p0 = Pattern(P.n - 1, bar.bits & ((1 << half) - 1))
    p1 = Pattern(P.n - 1, bar.bits >> half)
    return (
        lex_compare(p1, p0) <= 0
        and primitive_recursive_test(apply_bit_reversal(p0))
        and primitive_recursive_test(apply_bit_reversal(p1))
    )


def _orbit_bar_bits(start: int, n: int, max_size: int | None) -> set[int]:
    N = 1 << n
    moves = [(k, 1 << j) for j in range(n) for k in range(0, N, 2 << j)]
    seen = {start}
    frontier = deque([start])
    while frontier:
        b = frontier.popleft()
        for k, h in moves:
            c = _swap_bits(b, k, h)
            if c not in seen:
                seen.add(c)
                if max_size is not None and len(seen) > max_size:
                    raise OrbitOverflow(f"equivalence class larger than {max_size}")
                frontier.append(c)
    return seen


def orbit(P: Pattern, max_size: int | None = 1 << 16) -> set[Pattern]:
    """The full equivalence class of ``P``."""
    bar = apply_bit_reversal(P)
    members = _orbit_bar_bits(bar.bits, P.n, max_size)
    return {apply_bit_reversal(Pattern(P.n, b)) for b in members}


def orbit_classes(n: int, max_size: int | None = None) -> list[set[Pattern]]:
    """Partition of all ``2^N`` patterns into equivalence classes (small N only)."""
    N = 1 << n
    seen: set[int] = set()
    classes = []
    for bits in range(1 << N):
        if bits in seen:
            continue
        cls = orbit(Pattern(n, bits), max_size)
        seen.update(q.bits for q in cls)
        classes.append(cls)
    return classes
