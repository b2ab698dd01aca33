"""Erasure patterns of punctured polar codes and symmetry tests."""

from __future__ import annotations

from functools import lru_cache

from .patterns import Pattern, apply_bit_reversal, includes, is_downward_closed

__all__ = [
    "KERNEL_ERASURE_RULE",
    "kernel_erasure",
    "erasure_pattern",
    "is_symmetric",
    "symmetric_recursive_test",
    "is_downward_closed",
]

# (p0, p1) -> (e0, e1) on a single G_2 kernel
KERNEL_ERASURE_RULE = {
    (0, 0): (0, 0),
    (1, 0): (1, 0),
    (0, 1): (1, 0),
    (1, 1): (1, 1),
}


def kernel_erasure(p0: int, p1: int) -> tuple[int, int]:
    return (p0 | p1, p0 & p1)


@lru_cache(maxsize=None)
def _low_half_masks(n: int) -> tuple[tuple[int, int], ...]:
    """For h = N/2, ..., 1: (h, mask of the first half of every 2h-block)."""
    N = 1 << n
    out = []
    h = N // 2
    while h >= 1:
        block = (1 << h) - 1
        m = 0
        for k in range(0, N, 2 * h):
            m |= block << k
        out.append((h, m))
        h //= 2
    return tuple(out)


def _erasure_bits(bits: int, n: int) -> int:
    # stage loop from the channel side; in every 2h-block the coded pair
    # (j, j+h) becomes (OR, AND) on the data side
    for h, lo_mask in _low_half_masks(n):
        lo = bits & lo_mask
        hi = (bits >> h) & lo_mask
        bits = (lo | hi) | ((lo & hi) << h)
    return bits


def erasure_pattern(P: Pattern) -> Pattern:
    return Pattern(P.n, _erasure_bits(P.bits, P.n))


def is_symmetric(P: Pattern) -> bool:
    return _erasure_bits(P.bits, P.n) == P.bits


def symmetric_recursive_test(P: Pattern) -> bool:
    """Symmetry decided through the bit-reversed half recursion."""
    if P.n == 1:
        return P.bits in (0b00, 0b01, 0b11)  # [0,0], [1,0], [1,1]
    bar = apply_bit_reversal(P)
    half = P.N // 2
    p0 = Pattern(P.n - 1, bar.bits & ((1 << half) - 1))
    p1 = Pattern(P.n - 1, bar.bits >> half)
    return (
        includes(p1, p0)
        and symmetric_recursive_test(apply_bit_reversal(p0))
        and symmetric_recursive_test(apply_bit_reversal(p1))
    )
