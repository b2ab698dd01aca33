"""Reference rate-matching patterns: quasi-uniform puncturing and shortening."""

from __future__ import annotations

from .patterns import Pattern, _log2_exact


def qup_pattern(N: int, Np: int) -> Pattern:
    """Quasi-uniform puncturing in natural order: the first Np coded bits.

    ``{0, ..., Np-1}`` is closed under bitwise subsets, so the result is
    always symmetric.
    """
    n = _log2_exact(N)
    if not 0 < Np < N:
        raise ValueError(f"need 0 < Np < N, got Np={Np}, N={N}")
    return Pattern(n, (1 << Np) - 1)


def shortening_pattern(N: int, Ns: int) -> tuple[Pattern, Pattern]:
    """Shorten the last Ns coded bits and freeze the last Ns data bits.

    Returns ``(S, forced_frozen)``. With those data bits at zero the shortened
    coded bits are zero for every payload, since columns ``j >= N - Ns`` of
    ``G_N`` only have ones in rows ``i >= j``.
    """
    n = _log2_exact(N)
    if not 0 < Ns < N:
        raise ValueError(f"need 0 < Ns < N, got Ns={Ns}, N={N}")
    tail = ((1 << Ns) - 1) << (N - Ns)
    return Pattern(n, tail), Pattern(n, tail)
