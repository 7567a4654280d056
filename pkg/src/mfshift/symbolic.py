"""Finite-word combinatorics over the alphabet {1..N}.

Provides word and composition-class streams, exact Birkhoff-sum ranges over
cylinders, periodic-point Birkhoff sums, and the vectorized kernels the
pressure and constrained-pressure modules aggregate with.  Words are 1-based
in the public API; the array kernels use 0-based symbol blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, DepthExceedsBudget, ValidationError
from .model import PotentialTable

DEFAULT_BUDGET = 2**24
_BLOCK = 2**16


@dataclass(frozen=True)
class Word:
    """A finite word i_1..i_n with symbols in {1..alphabet_size}."""

    symbols: tuple
    alphabet_size: int

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if len(self.symbols) == 0:
            raise ValidationError("words must have length >= 1")
        if any(not (1 <= s <= self.alphabet_size) for s in self.symbols):
            raise ValidationError("word symbol out of range")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)


@dataclass(frozen=True)
class CompositionClass:
    """Symbol counts (k_1..k_N) of a word plus the log multinomial weight."""

    counts: tuple
    log_multiplicity: float

    @property
    def n(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class BirkhoffRange:
    """Closed range of a length-n Birkhoff sum over one cylinder."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValidationError("range needs lo <= hi")


def multinomial(counts: Sequence[int]) -> int:
    """Exact multinomial coefficient n! / (k_1! ... k_N!)."""
    out, total = 1, 0
    for k in counts:
        total += int(k)
        out *= math.comb(total, int(k))
    return out


def enumerate_words(
    n: int, N: int, budget: int = DEFAULT_BUDGET
) -> Iterator[Word]:
    """All N^n words of length n in lexicographic order."""
    if n < 1:
        raise ValidationError("word length must be >= 1")
    if N**n > budget:
        raise BudgetExceeded(f"{N}^{n} words exceed budget {budget}")
    symbols = [1] * n
    while True:
        yield Word(tuple(symbols), N)
        j = n - 1
        while j >= 0 and symbols[j] == N:
            symbols[j] = 1
            j -= 1
        if j < 0:
            return
        symbols[j] += 1


def enumerate_compositions(n: int, N: int) -> Iterator[CompositionClass]:
    """All C(n+N-1, N-1) symbol-count classes of length-n words.

    The sum over classes of the (exact) multiplicities is N^n; classes are
    the sufficient statistic for depth-1 Birkhoff sums.
    """
    if n < 1 or N < 2:
        raise ValidationError("need n >= 1 and N >= 2")

    def rec(prefix, remaining, slots):
        if slots == 1:
            yield prefix + (remaining,)
            return
        for k in range(remaining, -1, -1):
            yield from rec(prefix + (k,), remaining - k, slots - 1)

    for counts in rec((), n, N):
        yield CompositionClass(counts, math.log(multinomial(counts)))


@lru_cache(maxsize=512)
def composition_arrays(n: int, N: int):
    """(counts, log_mult) arrays over all composition classes of (n, N)."""
    counts = []
    log_mult = []
    for c in enumerate_compositions(n, N):
        counts.append(c.counts)
        log_mult.append(c.log_multiplicity)
    counts = np.array(counts, dtype=np.int64)
    log_mult = np.array(log_mult, dtype=float)
    counts.flags.writeable = False
    log_mult.flags.writeable = False
    return counts, log_mult


def word_blocks(
    n: int, N: int, budget: int = DEFAULT_BUDGET, block_size: int = _BLOCK
) -> Iterator[np.ndarray]:
    """0-based symbol arrays of shape (B, n) covering all words in lex order."""
    total = N**n
    if total > budget:
        raise BudgetExceeded(f"{N}^{n} words exceed budget {budget}")
    shape = (N,) * n
    for start in range(0, total, block_size):
        stop = min(start + block_size, total)
        idx = np.unravel_index(np.arange(start, stop), shape)
        yield np.stack(idx, axis=1).astype(np.int64)


def tail_count(depth: int, N: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of tail extensions a depth-k potential can see: N^(k-1)."""
    T = N ** (depth - 1)
    if T > budget:
        raise DepthExceedsBudget(
            f"depth {depth} needs {T} tail extensions, budget {budget}"
        )
    return T


def tail_sum_matrix(
    phi: PotentialTable, words: np.ndarray, budget: int = DEFAULT_BUDGET
) -> np.ndarray:
    """Birkhoff sums S_n(phi) over every tail extension of every word.

    ``words`` is a (B, n) array of 0-based symbols.  Returns a (B, T)
    matrix with T = N^(depth-1) tail columns in lexicographic tail order;
    column t holds S_n(phi) for the cylinder extended by tail t.  Summation
    runs in increasing position order, so identical extensions produce
    bit-identical floats.
    """
    B, n = words.shape
    N = phi.N
    k = phi.depth
    T = tail_count(k, N, budget)
    if k == 1:
        vals = phi.values[words].sum(axis=1)
        return vals[:, None]
    out = np.empty((B, T), dtype=float)
    tails_idx = np.unravel_index(np.arange(T), (N,) * (k - 1))
    tails = np.stack(tails_idx, axis=1)  # (T, k-1)
    for t in range(T):
        ext = np.concatenate(
            [words, np.broadcast_to(tails[t], (B, k - 1))], axis=1
        )
        s = np.zeros(B, dtype=float)
        for j in range(n):
            s += phi.values[tuple(ext[:, j + d] for d in range(k))]
        out[:, t] = s
    return out


def periodic_tail_index(words: np.ndarray, depth: int, N: int) -> np.ndarray:
    """Column index of the wrap-around tail (first depth-1 symbols) per word."""
    B, n = words.shape
    if depth == 1:
        return np.zeros(B, dtype=np.int64)
    idx = np.zeros(B, dtype=np.int64)
    for d in range(depth - 1):
        idx = idx * N + words[:, d % n]
    return idx


def cylinder_birkhoff_range(
    phi: PotentialTable, w: Word, budget: int = DEFAULT_BUDGET
) -> BirkhoffRange:
    """Exact min and max of S_n(phi) over the cylinder of w.

    The first n-k+1 summands are fixed by the word; the last k-1 summands
    range over the N^(k-1) possible tail extensions, which are enumerated
    exactly.  Depth-1 potentials collapse to a single value.
    """
    arr = np.array([s - 1 for s in w.symbols], dtype=np.int64)[None, :]
    mat = tail_sum_matrix(phi, arr, budget)
    return BirkhoffRange(float(mat.min()), float(mat.max()))


def periodic_birkhoff_sum(phi: PotentialTable, w: Word) -> float:
    """S_n(phi) at the periodic point www...; tails wrap around cyclically.

    Evaluates through the same kernel as cylinder_birkhoff_range (the
    wrap-around tail is one of the enumerated extensions), so the result
    always lies inside that range, bit for bit.
    """
    arr = np.array([s - 1 for s in w.symbols], dtype=np.int64)[None, :]
    mat = tail_sum_matrix(phi, arr)
    t = periodic_tail_index(arr, phi.depth, phi.N)
    return float(mat[0, t[0]])
