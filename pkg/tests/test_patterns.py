import itertools

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from conftest import all_patterns, patterns
from polarpunct.patterns import (
    CodeParams,
    Pattern,
    apply_bit_reversal,
    bit_reversal,
    encode,
    format_patterns,
    generator_row,
    includes,
    is_downward_closed,
    lex_compare,
    minimal_generators,
    parse_pattern,
    read_patterns,
    union,
    weight,
)


def P(s):
    return Pattern.from_bits(s)


def kron_power(n):
    G = np.array([[1]], dtype=np.uint8)
    for _ in range(n):
        G = np.kron(G, np.array([[1, 0], [1, 1]], dtype=np.uint8))
    return G


# --- construction -----------------------------------------------------------


def test_pattern_basics():
    p = P("11101000")
    assert p.N == 8 and p.n == 3
    assert p.weight == 4
    assert list(p) == [1, 1, 1, 0, 1, 0, 0, 0]
    assert p.support() == [0, 1, 2, 4]
    assert str(p) == "11101000"
    assert Pattern.from_support(3, [0, 1, 2, 4]) == p
    assert np.array_equal(p.to_array(), [1, 1, 1, 0, 1, 0, 0, 0])


def test_pattern_rejects_bad_values():
    with pytest.raises(ValueError):
        Pattern(0, 0)
    with pytest.raises(ValueError):
        Pattern(1, 0b100)
    with pytest.raises(ValueError):
        Pattern.from_bits("101")


def test_code_params():
    c = CodeParams(8, 64, 85)
    assert c.N == 256
    assert c.rate == pytest.approx(64 / 171)
    with pytest.raises(ValueError):
        CodeParams(3, 5, 4)
    with pytest.raises(ValueError):
        CodeParams(3, 1, 8)


# --- bit reversal ------------------------------------------------------------


@pytest.mark.parametrize("i, expected", [(0, 0), (3, 6), (4, 1)])
def test_bit_reversal_examples(i, expected):
    assert bit_reversal(3, i) == expected


def test_bit_reversal_out_of_range():
    with pytest.raises(ValueError):
        bit_reversal(3, 8)


def test_apply_bit_reversal_examples():
    assert apply_bit_reversal(P("11011000")) == P("11001010")
    assert apply_bit_reversal(P("11101000")) == P("11101000")
    assert apply_bit_reversal(Pattern.zeros(3)) == Pattern.zeros(3)


@pytest.mark.parametrize("n", [1, 2])
def test_bit_reversal_involution_exhaustive(n):
    for p in all_patterns(n):
        assert apply_bit_reversal(apply_bit_reversal(p)) == p


def test_bit_reversal_involution_n4_exhaustive():
    for b in range(1 << 16):
        p = Pattern(4, b)
        q = apply_bit_reversal(p)
        assert q.weight == p.weight
        assert apply_bit_reversal(q) == p


@given(patterns(1, 10))
def test_bit_reversal_involution_random(p):
    assert apply_bit_reversal(apply_bit_reversal(p)) == p


# --- generator rows and encoding ----------------------------------------------


def test_generator_row_examples():
    assert generator_row(1, 0) == P("10")
    assert generator_row(1, 1) == P("11")
    assert generator_row(3, 5).support() == [0, 1, 4, 5]
    assert generator_row(3, 7) == Pattern.ones(3)
    with pytest.raises(ValueError):
        generator_row(3, 8)


@pytest.mark.parametrize("n", range(1, 11))
def test_generator_row_is_bitwise_subset_set(n):
    N = 1 << n
    j = np.arange(N)
    for i in range(N):
        row = generator_row(n, i).to_array(bool)
        assert np.array_equal(row, (j & i) == j)
        assert generator_row(n, i).weight == 1 << bin(i).count("1")


@pytest.mark.parametrize("n", range(1, 7))
def test_generator_matches_kronecker_power(n):
    G = kron_power(n)
    for i in range(1 << n):
        assert np.array_equal(generator_row(n, i).to_array(), G[i])


@pytest.mark.parametrize("n", range(1, 8))
def test_bit_reversed_row_is_a_row(n):
    rows = {generator_row(n, i) for i in range(1 << n)}
    for r in rows:
        assert apply_bit_reversal(r) in rows


def test_encode_examples():
    assert not encode(np.zeros(8, np.uint8)).any()
    assert np.array_equal(encode([1, 1]).ravel(), [0, 1])
    for i in range(8):
        e = np.zeros(8, np.uint8)
        e[i] = 1
        assert np.array_equal(encode(e).ravel(), generator_row(3, i).to_array())
    with pytest.raises(ValueError):
        encode(np.zeros(6, np.uint8))


@pytest.mark.parametrize("n", range(1, 5))
def test_encode_self_inverse_exhaustive(n):
    N = 1 << n
    u = np.array(list(itertools.product([0, 1], repeat=N)), dtype=np.uint8)
    x = encode(u)
    assert np.array_equal(x, (u.astype(int) @ kron_power(n)) % 2)
    assert np.array_equal(encode(x), u)


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_encode_matches_matrix_product(n, seed):
    N = 1 << n
    u = np.random.default_rng(seed).integers(0, 2, size=(3, N), dtype=np.uint8)
    if n <= 8:
        assert np.array_equal(encode(u), (u.astype(int) @ kron_power(n)) % 2)
    assert np.array_equal(encode(encode(u)), u)


# --- order and set algebra ----------------------------------------------------------


def test_lex_compare_direction():
    # the vector with a 0 at the first difference is the smaller one
    assert lex_compare(P("10"), P("11")) == -1
    assert lex_compare(P("11"), P("10")) == 1
    assert lex_compare(P("1100"), P("1010")) == 1
    assert lex_compare(P("1100"), P("1100")) == 0
    with pytest.raises(ValueError):
        lex_compare(P("10"), P("1000"))


@given(patterns(2, 2), patterns(2, 2))
def test_lex_compare_matches_tuple_order(a, b):
    if a.n != b.n:
        return
    expected = (list(a) > list(b)) - (list(a) < list(b))
    assert lex_compare(a, b) == expected


def test_set_algebra_examples():
    assert includes(generator_row(3, 1), generator_row(3, 5))
    assert not includes(generator_row(3, 5), generator_row(3, 1))
    u = union([generator_row(3, 1), generator_row(3, 2), generator_row(3, 4)])
    assert u.support() == [0, 1, 2, 4]
    assert weight(Pattern.zeros(3)) == 0
    assert union([], n=3) == Pattern.zeros(3)


# --- minimal generators ----------------------------------------------------------------


def test_minimal_generators_examples():
    g = minimal_generators(P("11101000"))
    assert set(g.rows) == {1, 2, 4} and g.order == 3
    g = minimal_generators(P("11110000"))
    assert g.rows == (3,) and g.order == 1
    g = minimal_generators(Pattern.zeros(3))
    assert g.rows == () and g.order == 0
    assert minimal_generators(P("01000000")) is None


def _closed_under_subsets(support, n):
    s = set(support)
    return all(j in s for i in s for j in range(1 << n) if j & i == j)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_minimal_generators_exhaustive(n):
    pats = all_patterns(n) if n <= 3 else [Pattern(4, b) for b in range(0, 1 << 16, 7)]
    for p in pats:
        g = minimal_generators(p)
        closed = _closed_under_subsets(p.support(), n)
        assert (g is not None) == closed == is_downward_closed(p)
        if g is None:
            continue
        assert union([generator_row(n, r) for r in g.rows], n=n) == p
        assert list(g.rows) == sorted(g.rows, reverse=True)
        for drop in g.rows:
            rest = [generator_row(n, r) for r in g.rows if r != drop]
            assert union(rest, n=n) != p


@given(st.integers(3, 6), st.lists(st.integers(0, 63), min_size=1, max_size=4))
def test_minimal_generators_of_row_unions(n, rows):
    rows = [r % (1 << n) for r in rows]
    p = union([generator_row(n, r) for r in rows])
    g = minimal_generators(p)
    assert g is not None
    assert union([generator_row(n, r) for r in g.rows]) == p
    assert set(g.rows) <= set(rows)
    # no proper subset of the generators reproduces the pattern
    for k in range(len(g.rows)):
        for sub in itertools.combinations(g.rows, k):
            assert union([generator_row(n, r) for r in sub], n=n) != p


# --- text format ----------------------------------------------------------------------


def test_parse_pattern_binary_and_hex():
    assert parse_pattern("11101000", 8) == P("11101000")
    assert parse_pattern("0xE8", 8) == P("11101000")
    assert parse_pattern("0x8", 2) == P("10")
    with pytest.raises(ValueError):
        parse_pattern("1110100", 8)
    with pytest.raises(ValueError):
        parse_pattern("0x1", 2)


def test_read_format_roundtrip():
    pats = [P("1100"), P("1000"), P("0000")]
    lines = list(format_patterns(pats, 4))
    assert lines[0] == "N=4"
    assert read_patterns(["# comment", *lines, ""]) == pats
    with pytest.raises(ValueError):
        read_patterns(["1100"])


@given(patterns(1, 8))
def test_hex_and_binary_agree(p):
    digits = -(-p.N // 4)
    val = int(str(p).ljust(4 * digits, "0"), 2)
    assert parse_pattern(f"0x{val:0{digits}x}", p.N) == p
