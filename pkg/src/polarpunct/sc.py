"""Successive-cancellation decoding and Monte-Carlo word error rates.

All routines work on batches: LLR arrays have shape ``(B, N)``, one received
word per row. The decoder follows the natural-order ``G_N`` recursion

    x = [(u_a ^ u_b) G', u_b G']

so the first half of the data bits is decoded from ``f(top, bottom)`` and the
second half from ``g = (1 - 2 s_a) top + bottom`` with ``s_a`` the re-encoded
first half.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import norm

from .density import BEC, BiAwgn
from .patterns import CodeParams, Pattern, encode

__all__ = [
    "SAT",
    "WerEstimate",
    "boxplus",
    "channel_llrs",
    "sc_decode",
    "genie_decode",
    "monte_carlo_wer",
    "wilson_interval",
    "block_rng",
]

SAT = 40.0
BLOCK_WORDS = 1024


def boxplus(a, b, min_sum: bool = False):
    """``2 atanh(tanh(a/2) tanh(b/2))`` in Jacobian-logarithm form."""
    s = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    if min_sum:
        return s
    return s + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


def _mask(p: Pattern | np.ndarray | None, N: int) -> np.ndarray:
    if p is None:
        return np.zeros(N, dtype=bool)
    if isinstance(p, Pattern):
        if p.N != N:
            raise ValueError("pattern length mismatch")
        return p.to_array(dtype=bool)
    m = np.asarray(p, dtype=bool)
    if m.shape != (N,):
        raise ValueError("mask length mismatch")
    return m


def channel_llrs(x, model: BEC | BiAwgn, P=None, S=None, rng=None) -> np.ndarray:
    """Channel LLRs for BPSK-mapped codewords ``x`` (bit b sent as 1 - 2b).

    Punctured positions get LLR 0, shortened positions ``+SAT``; all values
    are clipped to ``[-SAT, SAT]``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.uint8))
    B, N = x.shape
    punct, short = _mask(P, N), _mask(S, N)
    if np.any(punct & short):
        raise ValueError("punctured and shortened positions overlap")
    if rng is None:
        rng = np.random.default_rng()
    s = 1.0 - 2.0 * x
    if isinstance(model, BiAwgn):
        y = s + np.sqrt(model.sigma2) * rng.standard_normal((B, N))
        llr = np.clip(2.0 * y / model.sigma2, -SAT, SAT)
    elif isinstance(model, BEC):
        llr = SAT * s
        llr[rng.random((B, N)) < float(model.eps)] = 0.0
    else:
        raise TypeError(f"unknown channel model {model!r}")
    llr[:, punct] = 0.0
    llr[:, short] = SAT
    return llr


class _Decoder:
    def __init__(self, info, coins, genie_u, min_sum):
        self.info = info
        self.coins = coins
        self.genie_u = genie_u
        self.min_sum = min_sum

    def run(self, llr):
        B, N = llr.shape
        self.u = np.zeros((B, N), dtype=np.uint8)
        self.gamma = np.empty((B, N))
        self._rec(llr, 0)
        return self.u, self.gamma

    def _rec(self, L, off):
        n = L.shape[1]
        if n == 1:
            g = L[:, 0]
            self.gamma[:, off] = g
            if self.genie_u is not None:
                u = self.genie_u[:, off]
            elif self.info[off]:
                # sign(0) is resolved by a fair coin
                u = ((g < 0) | ((g == 0) & self.coins[:, off])).astype(np.uint8)
            else:
                u = np.zeros(L.shape[0], dtype=np.uint8)
            self.u[:, off] = u
            return u[:, None]
        h = n // 2
        top, bot = L[:, :h], L[:, h:]
        xa = self._rec(boxplus(top, bot, self.min_sum), off)
        xb = self._rec((1.0 - 2.0 * xa) * top + bot, off + h)
        return np.concatenate([xa ^ xb, xb], axis=1)


def sc_decode(llrs, I, rng=None, min_sum: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """SC decoding with frozen bits set to zero; returns ``(u_hat, gamma_hat)``."""
    llrs = np.atleast_2d(np.asarray(llrs, dtype=float))
    B, N = llrs.shape
    info = _mask(I, N)
    if rng is None:
        rng = np.random.default_rng()
    coins = rng.integers(0, 2, size=(B, N), dtype=np.uint8).astype(bool)
    return _Decoder(info, coins, None, min_sum).run(llrs)


def genie_decode(llrs, u_true, min_sum: bool = False) -> np.ndarray:
    """LLRs of the genie-aided decoder, fed the true previous data bits."""
    llrs = np.atleast_2d(np.asarray(llrs, dtype=float))
    u_true = np.broadcast_to(np.atleast_2d(np.asarray(u_true, dtype=np.uint8)), llrs.shape)
    _, gamma = _Decoder(None, None, u_true, min_sum).run(llrs)
    return gamma


# --- Monte Carlo ---------------------------------------------------------------------


def wilson_interval(errors: int, words: int, confidence: float = 0.95) -> tuple[float, float]:
    if words == 0:
        return 0.0, 1.0
    z = norm.ppf(0.5 + confidence / 2)
    p = errors / words
    denom = 1 + z * z / words
    centre = (p + z * z / (2 * words)) / denom
    half = z * np.sqrt(p * (1 - p) / words + z * z / (4 * words * words)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == words else min(1.0, centre + half)
    return float(lo), float(hi)


@dataclass(frozen=True)
class WerEstimate:
    words: int
    errors: int
    wer: float
    ci_lo: float
    ci_hi: float
    seed: int

    def to_json(self) -> dict:
        return asdict(self)


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for word block ``block`` (words ``block * 1024 ...``)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


@dataclass(frozen=True)
class _Job:
    N: int
    info: np.ndarray
    punct: np.ndarray
    short: np.ndarray
    model: BEC | BiAwgn
    seed: int
    all_zero: bool
    min_sum: bool


def _run_block(args) -> int:
    job, block, words = args
    rng = block_rng(job.seed, block)
    u = np.zeros((words, job.N), dtype=np.uint8)
    if not job.all_zero:
        u[:, job.info] = rng.integers(0, 2, size=(words, int(job.info.sum())), dtype=np.uint8)
    x = encode(u)
    llr = channel_llrs(x, job.model, job.punct, job.short, rng)
    u_hat, _ = sc_decode(llr, job.info, rng, job.min_sum)
    return int(np.count_nonzero(np.any(u_hat[:, job.info] != u[:, job.info], axis=1)))


def monte_carlo_wer(
    params: CodeParams,
    P: Pattern | None,
    S: Pattern | None,
    I: Pattern,
    model: BEC | BiAwgn,
    max_words: int,
    max_errors: int,
    seed: int,
    workers: int = 1,
    all_zero: bool = False,
    min_sum: bool = False,
) -> WerEstimate:
    """Word error rate of SC decoding with random information bits.

    Words are simulated in blocks of 1024 with one counter-based stream per
    block; blocks are tallied in index order and the run stops after the first
    block that reaches ``max_errors`` or ``max_words``. The result is therefore
    identical for any number of workers.
    """
    if max_errors < 1:
        raise ValueError("max_errors must be at least 1")
    if max_words < 1:
        raise ValueError("max_words must be at least 1")
    N = params.N
    info = _mask(I, N)
    if int(info.sum()) != params.K:
        raise ValueError(f"information pattern has weight {int(info.sum())}, expected K={params.K}")
    punct, short = _mask(P, N), _mask(S, N)
    if np.any(punct & short):
        raise ValueError("punctured and shortened positions overlap")
    job = _Job(N, info, punct, short, model, seed, all_zero, min_sum)

    n_blocks = -(-max_words // BLOCK_WORDS)
    sizes = [min(BLOCK_WORDS, max_words - b * BLOCK_WORDS) for b in range(n_blocks)]
    words = errors = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        b = 0
        while b < n_blocks:
            wave = range(b, min(n_blocks, b + max(1, workers)))
            args = [(job, k, sizes[k]) for k in wave]
            results = pool.map(_run_block, args) if pool else map(_run_block, args)
            stop = False
            for k, e in zip(wave, results):
                words += sizes[k]
                errors += e
                if errors >= max_errors:
                    stop = True
                    break
            if stop:
                break
            b = wave.stop
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    lo, hi = wilson_interval(errors, words)
    return WerEstimate(words, errors, errors / words, lo, hi, seed)
