"""Enumeration of primitive and symmetric puncturing patterns.

Primitive and symmetric patterns are both built bottom-up from their
bit-reversed halves. Internally a bit-reversed pattern of length ``M`` is held
as an ``M``-bit integer with index 0 in the most significant bit, so that
integer order coincides with lexicographic order and concatenation is a shift.

The search tree generates symmetric patterns as unions of rows of ``G_N``,
visiting row indices in strictly decreasing order.
"""

from __future__ import annotations

import time
from bisect import bisect_right
from typing import Iterable, Iterator

import numpy as np

from .erasure import is_symmetric
from .patterns import GeneratorSet, Pattern, _log2_exact, _row_bits, bit_reversal_table

__all__ = [
    "ResourceCapExceeded",
    "enumerate_primitive",
    "enumerate_symmetric_all",
    "count_symmetric_among",
    "complementary_weights",
    "search_tree_symmetric",
    "search_tree_generators",
    "count_search_tree",
]


class ResourceCapExceeded(RuntimeError):
    """An enumeration hit its emission or wall-time cap before finishing."""


# --- recursive tables ------------------------------------------------------


def _combine_primitive(Ta: list[int], Tb: list[int], half: int) -> Iterator[int]:
    # Tb sorted ascending; keep pairs with X1 <=_lex X0
    for x0 in Ta:
        stop = bisect_right(Tb, x0)
        hi = x0 << half
        for x1 in Tb[:stop]:
            yield hi | x1


def _combine_symmetric(Ta: list[int], Tb: list[int], half: int) -> Iterator[int]:
    # keep pairs with X1 included in X0
    for x0 in Ta:
        hi = x0 << half
        for x1 in Tb:
            if not x1 & ~x0:
                yield hi | x1


def _build_tables(n: int, Np: int, kind: str, cap: int | None) -> list[int]:
    """Bit-reversed (MSB-first) forms of all length-2^n patterns of weight Np."""
    combine = _combine_primitive if kind == "primitive" else _combine_symmetric
    tables = {0: [0], 1: [1]}  # length 1
    for level in range(1, n + 1):
        half = 1 << (level - 1)
        length = 2 * half
        weights = [Np] if level == n else range(min(Np, length) + 1)
        new = {}
        for w in weights:
            out: list[int] = []
            for a in range(max(0, w - half), min(w, half) + 1):
                b = w - a
                if a not in tables or b not in tables:
                    continue
                if kind == "symmetric" and b > a:
                    continue
                out.extend(combine(tables[a], tables[b], half))
                if cap is not None and len(out) > cap:
                    raise ResourceCapExceeded(f"more than {cap} patterns at length {length}")
            out.sort()
            new[w] = out
        tables = new
    return tables.get(Np, [])


def _msb_bar_to_patterns(values: list[int], n: int) -> list[Pattern]:
    if not values:
        return []
    N = 1 << n
    nbytes = max(1, (N + 7) // 8)
    pad = 8 * nbytes - N
    raw = b"".join((v << pad).to_bytes(nbytes, "big") for v in values)
    bar = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(len(values), nbytes), axis=1)[:, :N]
    mat = bar[:, bit_reversal_table(n)]
    packed = np.packbits(mat, axis=1, bitorder="little")
    return [Pattern(n, int.from_bytes(row.tobytes(), "little")) for row in packed]


def _check_range(N: int, Np: int) -> int:
    n = _log2_exact(N)
    if n < 1:
        raise ValueError("N must be at least 2")
    if not 0 < Np < N:
        raise ValueError(f"need 0 < Np < N, got Np={Np}, N={N}")
    return n


def enumerate_primitive(N: int, Np: int, max_patterns: int | None = 10_000_000) -> Iterator[Pattern]:
    """Every primitive pattern of length N and weight Np, each exactly once."""
    n = _check_range(N, Np)
    bars = _build_tables(n, Np, "primitive", max_patterns)
    for start in range(0, len(bars), 4096):
        yield from _msb_bar_to_patterns(bars[start : start + 4096], n)


def enumerate_symmetric_all(N: int, Np: int, max_patterns: int | None = 10_000_000) -> Iterator[Pattern]:
    """Every symmetric pattern of length N and weight Np, by the half recursion."""
    n = _check_range(N, Np)
    bars = _build_tables(n, Np, "symmetric", max_patterns)
    for start in range(0, len(bars), 4096):
        yield from _msb_bar_to_patterns(bars[start : start + 4096], n)


def count_symmetric_among(patterns: Iterable[Pattern]) -> tuple[int, int]:
    sym = non = 0
    for p in patterns:
        if is_symmetric(p):
            sym += 1
        else:
            non += 1
    return sym, non


# --- search tree -------------------------------------------------------------


def complementary_weights(n: int, partial: Pattern | None = None) -> np.ndarray:
    """``W_cp(i) = |row_i| - |row_i & partial|`` for every row index i."""
    N = 1 << n
    idx = np.arange(N)
    pc = np.zeros(N, dtype=np.int64)
    for b in range(n):
        pc += (idx >> b) & 1
    full = np.left_shift(1, pc).astype(np.int64)
    if partial is None or partial.bits == 0:
        return full
    overlap = np.array([(r & partial.bits).bit_count() for r in _row_bits(n)], dtype=np.int64)
    return full - overlap


class _Search:
    """Depth-first search over strictly decreasing row-index sequences.

    The complementary weights of a child node follow from the parent's: with
    U the parent's union and l the new row, ``row_t & row_l = row_(t & l)`` and
    so ``W_child(t) = W(t) - W(t & l)``.
    """

    def __init__(self, N, Np, lmax, max_emissions, max_seconds):
        self.n = _check_range(N, Np)
        if lmax < 1:
            raise ValueError("lmax must be at least 1")
        self.N, self.Np, self.lmax = N, Np, lmax
        self.max_emissions = max_emissions
        self.deadline = None if max_seconds is None else time.monotonic() + max_seconds
        self.idx = np.arange(N)
        self.emitted = 0

    def _tick(self, k=1):
        self.emitted += k
        if self.max_emissions is not None and self.emitted > self.max_emissions:
            raise ResourceCapExceeded(f"more than {self.max_emissions} emissions")

    def _check_time(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceCapExceeded("wall-time cap reached")

    def walk(self) -> Iterator[tuple[int, ...]]:
        W0 = complementary_weights(self.n)
        yield from self._walk(W0, self.N, 1, self.Np, ())

    def _walk(self, W, prev, depth, rem, rows):
        self._check_time()
        cand = W[:prev]
        if depth == self.lmax:
            for i in np.flatnonzero(cand == rem)[::-1]:
                self._tick()
                yield rows + (int(i),)
            return
        for i in np.flatnonzero((cand > 0) & (cand <= rem))[::-1]:
            i = int(i)
            w = int(cand[i])
            if w == rem:
                self._tick()
                yield rows + (i,)
            else:
                child = W[:i] - W[self.idx[:i] & i]
                yield from self._walk(child, i, depth + 1, rem - w, rows + (i,))

    def count(self) -> int:
        W0 = complementary_weights(self.n)
        return self._count(W0, self.N, 1, self.Np)

    def _count(self, W, prev, depth, rem):
        self._check_time()
        cand = W[:prev]
        if depth == self.lmax:
            c = int(np.count_nonzero(cand == rem))
            self._tick(c)
            return c
        total = 0
        sel = np.flatnonzero((cand > 0) & (cand <= rem))
        for i in sel[::-1]:
            i = int(i)
            w = int(cand[i])
            if w == rem:
                self._tick()
                total += 1
            elif depth + 1 == self.lmax:
                child = W[:i] - W[self.idx[:i] & i]
                c = int(np.count_nonzero(child == rem - w))
                self._tick(c)
                total += c
            else:
                child = W[:i] - W[self.idx[:i] & i]
                total += self._count(child, i, depth + 1, rem - w)
        return total


def search_tree_generators(
    N: int,
    Np: int,
    lmax: int,
    max_emissions: int | None = None,
    max_seconds: float | None = None,
) -> Iterator[GeneratorSet]:
    """Symmetric patterns of weight Np and order <= lmax, with their generating rows.

    Rows are listed in decreasing order; emission follows the deterministic
    depth-first order (largest index first at every level).
    """
    search = _Search(N, Np, lmax, max_emissions, max_seconds)
    rows_bits = _row_bits(search.n)
    for rows in search.walk():
        bits = 0
        for r in rows:
            bits |= rows_bits[r]
        yield GeneratorSet(rows, Pattern(search.n, bits))


def search_tree_symmetric(
    N: int,
    Np: int,
    lmax: int,
    max_emissions: int | None = None,
    max_seconds: float | None = None,
) -> Iterator[tuple[Pattern, int]]:
    for g in search_tree_generators(N, Np, lmax, max_emissions, max_seconds):
        yield g.pattern, g.order


def count_search_tree(
    N: int,
    Np: int,
    lmax: int,
    max_emissions: int | None = None,
    max_seconds: float | None = None,
) -> int:
    """Number of patterns ``search_tree_symmetric`` would emit, without building them."""
    return _Search(N, Np, lmax, max_emissions, max_seconds).count()
