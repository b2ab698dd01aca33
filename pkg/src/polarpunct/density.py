"""Density evolution for punctured (and shortened) polar codes.

Exact erasure-probability recursion on the BEC and the Gaussian approximation
on the BI-AWGN channel, information-set selection, ``WER^GA``, noise
thresholds and pattern optimization over candidate sets.

Both recursions use the natural-order pairing: in every block of size ``2h``
coded positions ``j`` and ``j + h`` feed a kernel whose first output takes the
check-node combination and whose second takes the variable-node combination.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.special import erfc

from .erasure import erasure_pattern
from .patterns import Pattern, apply_bit_reversal, bit_reversal_table, patterns_to_matrix

__all__ = [
    "BEC",
    "BiAwgn",
    "DeResult",
    "InfoSelection",
    "NoBracket",
    "ThresholdResult",
    "Objective",
    "OptimizeResult",
    "ga_phi",
    "ga_phi_inv",
    "check_mean",
    "bec_de",
    "ga_de",
    "ga_de_batch",
    "select_information",
    "wer_ga",
    "wer_ga_batch",
    "noise_threshold",
    "optimize_pattern",
    "snr_db",
    "sigma2_from_db",
]

# two-piece approximation of the GA phi function, spliced at m = 10; the
# right piece is scaled by a constant so the two pieces meet at the splice
_A, _B, _C = 0.4527, 0.86, 0.0218
_SPLICE = 10.0


def _log_phi_right_raw(x):
    return 0.5 * np.log(np.pi / x) - x / 4.0 + np.log1p(-10.0 / (7.0 * x))


_LOG_PHI_SPLICE_LEFT = float(-_A * _SPLICE**_B + _C)
_RIGHT_SHIFT = _LOG_PHI_SPLICE_LEFT - float(_log_phi_right_raw(_SPLICE))


@dataclass(frozen=True)
class BEC:
    eps: float | Fraction

    def __post_init__(self):
        if not 0 <= self.eps <= 1:
            raise ValueError(f"erasure probability must lie in [0, 1], got {self.eps}")


@dataclass(frozen=True)
class BiAwgn:
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"noise variance must be positive, got {self.sigma2}")


def snr_db(sigma2, convention: str = "snr", rate: float = 1.0):
    """dB value of a noise variance for unit-energy BPSK.

    ``snr``: 1/sigma2 (used in every CSV of this package); ``esn0``: 1/(2 sigma2);
    ``ebn0``: 1/(2 R sigma2).
    """
    s = np.asarray(sigma2, dtype=float)
    if convention == "snr":
        lin = 1.0 / s
    elif convention == "esn0":
        lin = 1.0 / (2.0 * s)
    elif convention == "ebn0":
        lin = 1.0 / (2.0 * rate * s)
    else:
        raise ValueError(f"unknown dB convention {convention!r}")
    out = 10.0 * np.log10(lin)
    return float(out) if out.ndim == 0 else out


def sigma2_from_db(db, convention: str = "snr", rate: float = 1.0):
    lin = 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    if convention == "snr":
        s = 1.0 / lin
    elif convention == "esn0":
        s = 1.0 / (2.0 * lin)
    elif convention == "ebn0":
        s = 1.0 / (2.0 * rate * lin)
    else:
        raise ValueError(f"unknown dB convention {convention!r}")
    return float(s) if s.ndim == 0 else s


# --- GA phi function --------------------------------------------------------


def _log_phi(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    out = np.zeros_like(m)
    lo = (m > 0) & (m < _SPLICE)
    out[lo] = -_A * m[lo] ** _B + _C
    hi = (m >= _SPLICE) & np.isfinite(m)
    out[hi] = _log_phi_hi(m[hi])
    out[np.isposinf(m)] = -np.inf
    return out


def _log_phi_hi(x):
    return _log_phi_right_raw(x) + _RIGHT_SHIFT


def _log_phi_inv(ly: np.ndarray) -> np.ndarray:
    """Inverse of ``_log_phi`` for strictly positive means.

    The left piece is inverted in closed form. The right piece is convex and
    decreasing in ``m``; Newton iterations started from the upper bound
    ``-4 ly`` land at or left of the root and then increase monotonically.
    """
    ly = np.asarray(ly, dtype=float)
    out = np.empty_like(ly)
    left = ly >= _LOG_PHI_SPLICE_LEFT
    out[left] = (np.maximum(_C - ly[left], 0.0) / _A) ** (1.0 / _B)
    right = ~left & np.isfinite(ly)
    if np.any(right):
        t = ly[right]
        # the right piece lies below -m/4 + shift, so the root is at most this
        x = np.maximum(-4.0 * (t - _RIGHT_SHIFT), _SPLICE)
        for _ in range(60):
            g = _log_phi_hi(x) - t
            dg = -0.5 / x - 0.25 + (10.0 / (7.0 * x * x)) / (1.0 - 10.0 / (7.0 * x))
            step = g / dg
            x_new = np.maximum(x - step, _SPLICE)
            done = np.abs(x_new - x) <= 1e-12 * x
            x = x_new
            if np.all(done):
                break
        out[right] = x
    out[np.isneginf(ly)] = np.inf
    return out


def ga_phi(m):
    """GA phi function with ``phi(0) = 1``."""
    return np.exp(_log_phi(m))


def ga_phi_inv(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        ly = np.log(y)
    out = _log_phi_inv(ly)
    out[y == 1.0] = 0.0
    return out


def check_mean(ma, mb) -> np.ndarray:
    """Mean of the check-node output LLR under the Gaussian approximation."""
    ma = np.asarray(ma, dtype=float)
    mb = np.asarray(mb, dtype=float)
    la, lb = _log_phi(ma), _log_phi(mb)
    both_inf = np.isneginf(la) & np.isneginf(lb)
    with np.errstate(invalid="ignore", divide="ignore"):
        lae = np.logaddexp(la, lb)
        # log(phi_a + phi_b - phi_a phi_b), stable when both are tiny
        ly = lae + np.log1p(-np.exp(la + lb - lae))
    ly = np.where(both_inf, -np.inf, ly)
    out = _log_phi_inv(ly)
    out[(ma == 0) | (mb == 0)] = 0.0
    return out


# --- results ----------------------------------------------------------------


@dataclass(frozen=True)
class DeResult:
    """Per-position reliabilities of the synthesized channels.

    ``reliability`` holds erasure probabilities (BEC) or LLR means (GA).
    """

    channel: BEC | BiAwgn
    reliability: np.ndarray

    @property
    def kind(self) -> str:
        return "bec" if isinstance(self.channel, BEC) else "ga"

    @property
    def N(self) -> int:
        return len(self.reliability)

    @property
    def p_ga(self) -> np.ndarray:
        if self.kind == "bec":
            return self.reliability / 2
        m = self.reliability.astype(float)
        return 0.5 * erfc(np.sqrt(m) / 2.0)

    @property
    def capacity(self) -> np.ndarray:
        if self.kind == "bec":
            return 1 - self.reliability
        return _gaussian_llr_capacity(self.reliability.astype(float))


def _gaussian_llr_capacity(m: np.ndarray) -> np.ndarray:
    # I = 1 - E[log2(1 + exp(-L))], L ~ N(m, 2m), by Gauss-Hermite quadrature
    x, w = np.polynomial.hermite.hermgauss(80)
    out = np.ones_like(m)
    mid = (m > 0) & np.isfinite(m)
    mm = m[mid][:, None]
    L = mm + np.sqrt(4.0 * mm) * x[None, :]
    vals = np.logaddexp(0.0, -L) / np.log(2.0)
    out[mid] = 1.0 - (vals * w[None, :]).sum(axis=1) / np.sqrt(np.pi)
    out[m == 0] = 0.0
    return np.clip(out, 0.0, 1.0)


@dataclass(frozen=True)
class InfoSelection:
    pattern: Pattern
    positions: tuple[int, ...]
    p_ga: np.ndarray = field(repr=False, compare=False)


class NoBracket(RuntimeError):
    """The threshold search range does not bracket the target error rate."""


# --- BEC density evolution ----------------------------------------------------


def _stage_loop(values: np.ndarray, check, var) -> np.ndarray:
    """Channel-to-data propagation over the last axis, pairing (j, j+h) per block."""
    x = values.copy()
    N = x.shape[-1]
    lead = x.shape[:-1]
    h = N // 2
    while h >= 1:
        v = x.reshape(*lead, N // (2 * h), 2, h)
        a = v[..., 0, :].copy()
        b = v[..., 1, :].copy()
        v[..., 0, :] = check(a, b)
        v[..., 1, :] = var(a, b)
        h //= 2
    return x


def _channel_state(P: Pattern, S: Pattern | None) -> tuple[np.ndarray, np.ndarray]:
    punct = P.to_array(dtype=bool)
    short = np.zeros_like(punct) if S is None else S.to_array(dtype=bool)
    if S is not None and S.n != P.n:
        raise ValueError("shortening pattern length mismatch")
    if np.any(punct & short):
        raise ValueError("punctured and shortened positions overlap")
    return punct, short


def bec_de(P: Pattern, eps, shortened: Pattern | None = None) -> DeResult:
    """Exact erasure probabilities of the bit channels on BEC(eps).

    Pass ``eps`` as a :class:`fractions.Fraction` for exact rational results.
    """
    ch = BEC(eps)
    punct, short = _channel_state(P, shortened)
    if isinstance(eps, Fraction):
        e = np.array([Fraction(eps)] * P.N, dtype=object)
        e[punct] = Fraction(1)
        e[short] = Fraction(0)
    else:
        e = np.full(P.N, float(eps))
        e[punct] = 1.0
        e[short] = 0.0
    out = _stage_loop(e, lambda a, b: a + b - a * b, lambda a, b: a * b)
    return DeResult(ch, out)


# --- GA density evolution -----------------------------------------------------


def ga_de(P: Pattern, sigma2: float, shortened: Pattern | None = None) -> DeResult:
    """Gaussian-approximation LLR means of the bit channels on BI-AWGN."""
    ch = BiAwgn(sigma2)
    punct, short = _channel_state(P, shortened)
    m = np.full(P.N, 2.0 / sigma2)
    m[punct] = 0.0
    m[short] = np.inf
    out = _stage_loop(m, check_mean, np.add)
    return DeResult(ch, out)


def _unique_rows(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    C = np.ascontiguousarray(C)
    view = C.view(np.dtype((np.void, C.dtype.itemsize * C.shape[1]))).ravel()
    _, first, inv = np.unique(view, return_index=True, return_inverse=True)
    return C[first], inv.ravel()


def _ga_memo(C: np.ndarray, leaf: np.ndarray) -> np.ndarray:
    """GA means for a batch of channel-state rows, sharing identical sub-codes.

    Output position ``2t + b`` combines position ``t`` of the sub-codes on the
    even and odd coded positions: check node for b = 0, variable node for b = 1.
    """
    B, L = C.shape
    if L == 1:
        return leaf[C[:, 0]][:, None]
    halves = np.concatenate([C[:, 0::2], C[:, 1::2]], axis=0)
    uniq, inv = _unique_rows(halves)
    sub = _ga_memo(uniq, leaf)
    me = sub[inv[:B]]
    mo = sub[inv[B:]]
    out = np.empty((B, L))
    out[:, 0::2] = check_mean(me, mo)
    out[:, 1::2] = me + mo
    return out


def _state_matrix(punct: np.ndarray, short: np.ndarray | None) -> np.ndarray:
    C = np.asarray(punct, dtype=np.int8).copy()
    if short is not None:
        short = np.broadcast_to(np.asarray(short, dtype=bool), C.shape)
        if np.any(C.astype(bool) & short):
            raise ValueError("punctured and shortened positions overlap")
        C[short] = 2
    return C


def ga_de_batch(punct: np.ndarray, sigma2: float, shortened: np.ndarray | None = None) -> np.ndarray:
    """GA means for a ``(B, N)`` 0/1 matrix of puncturing patterns.

    ``shortened`` may be a single length-N row shared by all patterns.
    """
    BiAwgn(sigma2)
    C = _state_matrix(np.atleast_2d(punct), shortened)
    leaf = np.array([2.0 / sigma2, 0.0, np.inf])
    return _ga_memo(C, leaf)


# --- information set and WER ----------------------------------------------------


def select_information(de: DeResult, K: int, E: Pattern | None = None) -> InfoSelection:
    """The K positions with the lowest genie-aided error probability, avoiding E.

    Ties go to the larger index.
    """
    N = de.N
    n = N.bit_length() - 1
    excluded = set() if E is None else set(E.support())
    if K < 0 or K > N - len(excluded):
        raise ValueError(f"cannot select K={K} positions out of {N - len(excluded)} available")
    p = de.p_ga
    ranked = sorted((i for i in range(N) if i not in excluded), key=lambda i: (p[i], -i))
    chosen = tuple(sorted(ranked[:K]))
    return InfoSelection(Pattern.from_support(n, chosen), chosen, p[list(chosen)])


def wer_ga(de: DeResult, I: Pattern | InfoSelection | Iterable[int]):
    """``1 - prod(1 - p_i)`` over the information positions."""
    if isinstance(I, InfoSelection):
        positions = I.positions
    elif isinstance(I, Pattern):
        positions = I.support()
    else:
        positions = list(I)
    p = de.p_ga
    if de.reliability.dtype == object:
        prod = Fraction(1)
        for i in positions:
            prod *= 1 - p[i]
        return 1 - prod
    if not positions:
        return 0.0
    return float(-np.expm1(np.sum(np.log1p(-p[list(positions)]))))


def wer_ga_batch(means: np.ndarray, K: int, excluded: np.ndarray | None = None) -> np.ndarray:
    """WER^GA of every row of a GA means matrix with its best K positions."""
    m = np.array(means, dtype=float, copy=True)
    if excluded is not None:
        m[..., np.broadcast_to(np.asarray(excluded, dtype=bool), m.shape[-1:])] = -np.inf
    N = m.shape[-1]
    if K == 0:
        return np.zeros(m.shape[0])
    if K > N:
        raise ValueError("K larger than N")
    top = -np.partition(-m, K - 1, axis=-1)[..., :K]
    if np.any(top <= 0):
        raise ValueError("K exceeds the number of non-erased selectable positions")
    p = 0.5 * erfc(np.sqrt(top) / 2.0)
    with np.errstate(divide="ignore"):
        return -np.expm1(np.sum(np.log1p(-p), axis=-1))


# --- noise threshold ---------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdResult:
    sigma2: float
    snr_db: float
    info: InfoSelection | None


def _wer_at(P, K, sigma2, shortened, excluded):
    de = ga_de(P, sigma2, shortened)
    E = erasure_pattern(P)
    if excluded is not None:
        E = E | excluded
    sel = select_information(de, K, E)
    return wer_ga(de, sel), sel


def noise_threshold(
    P: Pattern,
    K: int,
    eta: float,
    tol: float = 1e-4,
    lo: float = 1e-3,
    hi: float = 1e2,
    shortened: Pattern | None = None,
    excluded: Pattern | None = None,
) -> ThresholdResult:
    """Largest sigma2 in ``[lo, hi]`` with ``WER^GA <= eta``, to within ``tol``.

    The information set is re-selected at every probe.
    """
    if not 0 < eta <= 1:
        raise ValueError("eta must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def f(s):
        return _wer_at(P, K, s, shortened, excluded)

    w_hi, sel_hi = f(hi)
    if w_hi <= eta:
        return ThresholdResult(hi, snr_db(hi), sel_hi)
    w_lo, sel_lo = f(lo)
    if w_lo > eta:
        raise NoBracket(f"WER^GA={w_lo:.3g} > eta at the low end sigma2={lo}")

    def bisect(a, b, sel_a):
        while b - a > tol:
            mid = 0.5 * (a + b)
            w, sel = f(mid)
            if w <= eta:
                a, sel_a = mid, sel
            else:
                b = mid
        return a, b, sel_a

    a, b, sel = bisect(lo, hi, sel_lo)
    # monotonicity guard: a feasible grid point above the result means the
    # bisection was misled, so restart from the highest feasible grid point
    grid = np.geomspace(lo, hi, 33)
    feasible = [s for s in grid if s > b and f(s)[0] <= eta]
    if feasible:
        top = max(feasible)
        nxt = grid[np.searchsorted(grid, top) + 1]
        a, b, sel = bisect(top, nxt, f(top)[1])
    return ThresholdResult(a, snr_db(a), sel)


# --- optimization -------------------------------------------------------------------


@dataclass(frozen=True)
class Objective:
    """``min-wer`` at a fixed ``sigma2`` or ``max-threshold`` for a target ``eta``.

    ``min-wer`` with ``eps`` instead of ``sigma2`` scores candidates by exact
    BEC density evolution.
    """

    kind: str
    sigma2: float | None = None
    eta: float | None = None
    tol: float = 1e-4
    lo: float = 1e-3
    hi: float = 1e2
    eps: float | Fraction | None = None

    def __post_init__(self):
        if self.kind == "min-wer":
            if (self.sigma2 is None) == (self.eps is None):
                raise ValueError("min-wer objective needs exactly one of sigma2 and eps")
        elif self.kind == "max-threshold":
            if self.eta is None:
                raise ValueError("max-threshold objective needs eta")
        else:
            raise ValueError(f"unknown objective {self.kind!r}")


@dataclass(frozen=True)
class OptimizeResult:
    pattern: Pattern
    info: InfoSelection
    score: float
    candidates_evaluated: int

    def to_json(self) -> dict:
        return {
            "pattern": str(self.pattern),
            "info_set": list(self.info.positions),
            "score": self.score,
            "candidates_evaluated": self.candidates_evaluated,
        }


def _bar_keys(M: np.ndarray, n: int) -> list[bytes]:
    bar = M[:, bit_reversal_table(n)]
    return [row.tobytes() for row in np.packbits(bar, axis=1)]


def _chunk_wer(args):
    M, sigma2, K, shortened, excluded = args
    return wer_ga_batch(ga_de_batch(M, sigma2, shortened), K, excluded)


def _batch_wers(chunks, sigma2, K, shortened, excluded, pool):
    # rows in E[P] already carry zero mean, so only the extra exclusions are masked
    jobs = [(M, sigma2, K, shortened, excluded) for M in chunks]
    if pool is None:
        return [_chunk_wer(j) for j in jobs]
    return list(pool.map(_chunk_wer, jobs))


def _argbest(values: list[np.ndarray], keys: list[list[bytes]], minimize: bool = True):
    """Global (chunk, row) of the best value; ties by largest key, then first seen."""
    best = None
    for c, (v, kk) in enumerate(zip(values, keys)):
        target = v.min() if minimize else v.max()
        for r in np.flatnonzero(v == target):
            cand = (float(v[r]), kk[r], c, int(r))
            if best is None:
                best = cand
                continue
            better = cand[0] < best[0] if minimize else cand[0] > best[0]
            if better or (cand[0] == best[0] and cand[1] > best[1]):
                best = cand
    return best


def _optimize_bec(cands, K, eps, shortened, excluded) -> OptimizeResult:
    best = None
    for p in cands:
        de = bec_de(p, eps, shortened)
        E = erasure_pattern(p) if excluded is None else erasure_pattern(p) | excluded
        sel = select_information(de, K, E)
        w = wer_ga(de, sel)
        key = tuple(apply_bit_reversal(p))
        if best is None or w < best[0] or (w == best[0] and key > best[1]):
            best = (w, key, p, sel)
    w, _, p, sel = best
    return OptimizeResult(p, sel, float(w), len(cands))


def optimize_pattern(
    candidates: Iterable[Pattern],
    K: int,
    objective: Objective,
    shortened: Pattern | None = None,
    excluded: Pattern | None = None,
    workers: int = 1,
    chunk_size: int = 32768,
) -> OptimizeResult:
    """Best candidate under a GA density-evolution objective.

    For ``max-threshold`` the search bisects sigma2 on the smallest WER^GA
    over all candidates, which brackets the largest threshold; the winner is
    the candidate with the lowest WER^GA at the final feasible probe. Ties are
    broken by the lexicographically largest bit-reversed pattern, then by
    order of appearance.
    """
    cands = list(candidates)
    if not cands:
        raise ValueError("no candidate patterns")
    if objective.eps is not None:
        return _optimize_bec(cands, K, objective.eps, shortened, excluded)
    n = cands[0].n
    chunks = [patterns_to_matrix(cands[i : i + chunk_size]) for i in range(0, len(cands), chunk_size)]
    keys = [_bar_keys(M, n) for M in chunks]
    short_row = None if shortened is None else shortened.to_array(dtype=bool)
    excl_row = None if excluded is None else excluded.to_array(dtype=bool)

    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        if objective.kind == "min-wer":
            wers = _batch_wers(chunks, objective.sigma2, K, short_row, excl_row, pool)
            score, _, c, r = _argbest(wers, keys)
            sigma2 = objective.sigma2
        else:
            eta, lo, hi = objective.eta, objective.lo, objective.hi
            w_hi = _batch_wers(chunks, hi, K, short_row, excl_row, pool)
            if min(w.min() for w in w_hi) <= eta:
                lo = hi
                wers = w_hi
            else:
                w_lo = _batch_wers(chunks, lo, K, short_row, excl_row, pool)
                if min(w.min() for w in w_lo) > eta:
                    raise NoBracket(f"no candidate reaches WER^GA <= {eta} at sigma2={lo}")
                wers = w_lo
                while hi - lo > objective.tol:
                    mid = 0.5 * (lo + hi)
                    w_mid = _batch_wers(chunks, mid, K, short_row, excl_row, pool)
                    if min(w.min() for w in w_mid) <= eta:
                        lo, wers = mid, w_mid
                    else:
                        hi = mid
            _, _, c, r = _argbest(wers, keys)
            score = lo
            sigma2 = lo
    finally:
        if pool is not None:
            pool.shutdown()

    best = cands[c * chunk_size + r]
    de = ga_de(best, sigma2, shortened)
    E = erasure_pattern(best)
    if excluded is not None:
        E = E | excluded
    info = select_information(de, K, E)
    return OptimizeResult(best, info, float(score), len(cands))
