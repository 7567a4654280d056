import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfshift.errors import BudgetExceeded, ValidationError
from mfshift.model import PotentialTable
from mfshift.symbolic import (
    BirkhoffRange,
    Word,
    composition_arrays,
    cylinder_birkhoff_range,
    enumerate_compositions,
    enumerate_words,
    multinomial,
    periodic_birkhoff_sum,
    periodic_tail_index,
    tail_sum_matrix,
    word_blocks,
)


def test_enumerate_words_base_case():
    words = list(enumerate_words(1, 2))
    assert [w.symbols for w in words] == [(1,), (2,)]


def test_enumerate_words_n2():
    words = [w.symbols for w in enumerate_words(2, 2)]
    assert words == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_enumerate_words_count_n10():
    assert sum(1 for _ in enumerate_words(10, 2)) == 2**10


def test_enumerate_words_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_words(30, 2, budget=2**24))


def test_word_validation():
    with pytest.raises(ValidationError):
        Word((0, 1), 2)
    with pytest.raises(ValidationError):
        Word((), 2)


def test_compositions_binomial_row():
    classes = {c.counts: c.log_multiplicity for c in enumerate_compositions(2, 2)}
    assert set(classes) == {(2, 0), (1, 1), (0, 2)}
    assert classes[(1, 1)] == pytest.approx(math.log(2), abs=1e-15)


def test_compositions_pascal_row_10():
    classes = list(enumerate_compositions(10, 2))
    assert len(classes) == 11
    for c in classes:
        k = c.counts[1]
        assert c.log_multiplicity == pytest.approx(math.log(math.comb(10, k)))


def test_compositions_ternary_word_count():
    # brute-force word enumeration is the oracle for the class multiplicities
    classes = list(enumerate_compositions(3, 3))
    assert len(classes) == 10
    total = sum(round(math.exp(c.log_multiplicity)) for c in classes)
    assert total == 27
    from collections import Counter

    brute = Counter()
    for w in enumerate_words(3, 3):
        counts = tuple(sum(1 for s in w if s == i) for i in (1, 2, 3))
        brute[counts] += 1
    for c in classes:
        assert brute[c.counts] == multinomial(c.counts)


@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("n", [1, 5, 12, 20])
def test_multiplicity_partition_exact(n, N):
    total = sum(multinomial(c.counts) for c in enumerate_compositions(n, N))
    assert total == N**n


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=14),
    phi1=st.floats(-3, 3),
    phi2=st.floats(-3, 3),
)
def test_aggregation_consistency(n, phi1, phi2):
    # word-by-word sum of exp(S_n phi) equals the composition-class sum
    phi = np.array([phi1, phi2])
    by_words = 0.0
    for w in enumerate_words(n, 2):
        by_words += math.exp(sum(phi[s - 1] for s in w))
    counts, log_mult = composition_arrays(n, 2)
    by_classes = float(np.sum(np.exp(log_mult + counts @ phi)))
    assert by_classes == pytest.approx(by_words, rel=1e-12)


def test_cylinder_range_depth1_collapse():
    phi = PotentialTable(np.array([0.7, -0.3]))
    r = cylinder_birkhoff_range(phi, Word((1, 2, 1), 2))
    assert r.lo == r.hi == pytest.approx(2 * 0.7 - 0.3, abs=1e-14)


def test_cylinder_range_depth2_single_symbol():
    vals = np.array([[1.0, 4.0], [2.0, 3.0]])
    phi = PotentialTable(vals)
    r = cylinder_birkhoff_range(phi, Word((1,), 2))
    assert (r.lo, r.hi) == (1.0, 4.0)


def test_cylinder_range_depth2_diagonal_indicator():
    phi = PotentialTable(np.eye(2))
    r = cylinder_birkhoff_range(phi, Word((1, 1, 2), 2))
    # S_3 over the two tails: tail 1 -> 1+0+0, tail 2 -> 1+0+1
    assert (r.lo, r.hi) == (1.0, 2.0)


def test_periodic_depth1_matches_range():
    phi = PotentialTable(np.array([0.25, -1.5]))
    w = Word((2, 1, 2, 2), 2)
    r = cylinder_birkhoff_range(phi, w)
    assert periodic_birkhoff_sum(phi, w) == r.lo == r.hi


def test_periodic_depth2_examples():
    phi = PotentialTable(np.eye(2))
    assert periodic_birkhoff_sum(phi, Word((1, 2), 2)) == 0.0
    assert periodic_birkhoff_sum(phi, Word((1, 1), 2)) == 2.0


@settings(max_examples=50, deadline=None)
@given(
    data=st.data(),
    n=st.integers(min_value=1, max_value=8),
)
def test_periodic_inside_cylinder_range(data, n):
    vals = np.array(
        [
            [data.draw(st.floats(-2, 2)) for _ in range(2)]
            for _ in range(2)
        ]
    )
    phi = PotentialTable(vals)
    symbols = tuple(data.draw(st.integers(1, 2)) for _ in range(n))
    w = Word(symbols, 2)
    r = cylinder_birkhoff_range(phi, w)
    s = periodic_birkhoff_sum(phi, w)
    assert r.lo <= s <= r.hi


def test_birkhoff_range_invariant():
    with pytest.raises(ValidationError):
        BirkhoffRange(2.0, 1.0)


def test_word_blocks_cover_lexicographically():
    blocks = list(word_blocks(3, 2, block_size=3))
    stacked = np.vstack(blocks)
    assert stacked.shape == (8, 3)
    listed = [tuple(row + 1) for row in stacked]
    assert listed == [w.symbols for w in enumerate_words(3, 2)]


def test_periodic_tail_index_wraps():
    words = np.array([[0, 1, 0]])
    # depth 3 tail = first two symbols (0, 1) -> index 0*2 + 1
    assert periodic_tail_index(words, 3, 2)[0] == 1
    short = np.array([[1]])
    # length-1 word wraps onto itself: tail (1, 1) -> index 3
    assert periodic_tail_index(short, 3, 2)[0] == 3


def test_tail_sum_matrix_depth2_columns():
    phi = PotentialTable(np.eye(2))
    words = np.array([[0, 0, 1]])
    mat = tail_sum_matrix(phi, words)
    # tail 0: windows (00,01,10) -> 1; tail 1: windows (00,01,11) -> 2
    assert mat.tolist() == [[1.0, 2.0]]
