from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from conftest import all_patterns, patterns
from polarpunct.density import BEC, BiAwgn, bec_de
from polarpunct.enumeration import enumerate_symmetric_all
from polarpunct.equivalence import (
    ElementaryPerm,
    OrbitOverflow,
    apply_elementary,
    canonical,
    elementary_perms,
    is_primitive,
    orbit,
    orbit_classes,
    phi,
    primitive_recursive_test,
)
from polarpunct.erasure import is_symmetric
from polarpunct.patterns import Pattern, apply_bit_reversal, bit_reversal_table, lex_compare
from polarpunct.sc import channel_llrs, genie_decode


def P(s):
    return Pattern.from_bits(s)


def lex_key(p):
    return tuple(p)


def test_elementary_examples():
    a = P("1011")
    assert apply_elementary(ElementaryPerm(0, 0), a) == P("0111")
    assert apply_elementary(ElementaryPerm(1, 0), a) == P("1110")
    for perm in elementary_perms(3):
        for p in all_patterns(3):
            assert apply_elementary(perm, apply_elementary(perm, p)) == p


def test_elementary_on_arrays():
    x = np.arange(8.0)
    y = apply_elementary(ElementaryPerm(1, 4), x)
    assert list(y) == [0, 1, 2, 3, 6, 7, 4, 5]


def test_elementary_misaligned():
    with pytest.raises(ValueError):
        ElementaryPerm(1, 2)
    with pytest.raises(ValueError):
        apply_elementary(ElementaryPerm(1, 8), P("10110000"))


def test_phi_examples():
    assert phi(P("11001010")) == P("11001010")
    assert phi(P("01101010")) == P("10101010")
    assert phi(Pattern.zeros(3)) == Pattern.zeros(3)


def test_canonical_examples():
    assert canonical(P("11011000")) == P("11011000")
    assert canonical(P("01111000")) == P("11110000")
    assert canonical(Pattern.ones(3)) == Pattern.ones(3)


def test_primitive_examples():
    assert is_primitive(P("11101000"))
    assert not is_primitive(P("01111000"))
    assert is_primitive(Pattern.zeros(3))
    assert primitive_recursive_test(P("10"))
    assert not primitive_recursive_test(P("01"))
    assert primitive_recursive_test(P("11011000"))
    assert primitive_recursive_test(P("11101000"))


def test_orbit_examples():
    assert orbit(Pattern.zeros(3)) == {Pattern.zeros(3)}
    assert orbit(P("10")) == {P("10"), P("01")}
    with pytest.raises(OrbitOverflow):
        orbit(P("1000000000000000"), max_size=4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_orbit_structure_exhaustive(n):
    classes = orbit_classes(n)
    seen = set()
    for cls in classes:
        assert not cls & seen
        seen |= cls
        prims = [q for q in cls if is_primitive(q)]
        assert len(prims) == 1
        c = prims[0]
        best = max(cls, key=lambda q: lex_key(apply_bit_reversal(q)))
        assert best == c
        for q in cls:
            assert canonical(q) == c
            assert primitive_recursive_test(q) == (q == c)
    assert len(seen) == 1 << (1 << n)


def test_orbit_structure_n4_sampled():
    rng = np.random.default_rng(7)
    for b in rng.integers(0, 1 << 16, size=40):
        p = Pattern(4, int(b))
        cls = orbit(p)
        c = canonical(p)
        assert c in cls
        assert sum(is_primitive(q) for q in cls) == 1
        assert all(canonical(q) == c for q in cls)
        best = max(cls, key=lambda q: lex_key(apply_bit_reversal(q)))
        assert best == c


@given(patterns(1, 10))
def test_canonical_idempotent(p):
    c = canonical(p)
    assert canonical(c) == c
    assert c.weight == p.weight
    assert is_primitive(c)
    assert primitive_recursive_test(p) == is_primitive(p)


@given(patterns(2, 6), st.data())
def test_canonical_invariant_under_elementary(p, data):
    perms = elementary_perms(p.n)
    q = p
    for _ in range(data.draw(st.integers(1, 5))):
        perm = data.draw(st.sampled_from(perms))
        q = apply_bit_reversal(apply_elementary(perm, apply_bit_reversal(q)))
    assert canonical(q) == canonical(p)
    # the canonical form maximizes the bit-reversed pattern over the class
    assert lex_compare(apply_bit_reversal(canonical(p)), apply_bit_reversal(q)) >= 0


@pytest.mark.parametrize("N, Np", [(8, 3), (16, 5), (32, 7), (64, 8)])
def test_symmetric_patterns_are_primitive(N, Np):
    for p in enumerate_symmetric_all(N, Np):
        assert is_symmetric(p)
        assert canonical(p) == p


def test_de_invariant_over_orbits():
    for cls in orbit_classes(3):
        ref = None
        for q in cls:
            e = tuple(bec_de(q, Fraction(1, 2)).reliability)
            ref = e if ref is None else ref
            assert e == ref


def _received_perm(n, perm):
    B = bit_reversal_table(n)
    return B[perm.index_map(1 << n)[B]]


@settings(max_examples=25)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.sampled_from(["awgn", "bec"]))
def test_genie_llrs_invariant_under_equivalence(n, seed, chan):
    N = 1 << n
    rng = np.random.default_rng(seed)
    model = BiAwgn(0.7) if chan == "awgn" else BEC(0.4)
    llr = channel_llrs(np.zeros((4, N), np.uint8), model, rng=rng)
    u = np.zeros((4, N), np.uint8)
    g = genie_decode(llr, u)
    perms = elementary_perms(n)
    idx = np.arange(N)
    for k in rng.integers(0, len(perms), size=3):
        idx = idx[_received_perm(n, perms[k])]
    assert np.array_equal(genie_decode(llr[:, idx], u), g)
