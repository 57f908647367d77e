"""Core SFT layer: admissibility, irreducibility, gap bounds, gap words,
primitive-cycle enumeration, and the canonical bi-infinite word form."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermoflow import (
    BiWord,
    Sft,
    WeakSpecificationError,
    enumerate_primitive_cycles,
    glue_words,
    is_admissible_word,
    is_irreducible,
    min_gap_bound,
)


def random_irreducible_sft(rng, max_symbols=6):
    """Rejection-sample an irreducible SFT with no stranded symbols."""
    while True:
        n = int(rng.integers(2, max_symbols + 1))
        m = (rng.random((n, n)) < 0.6).astype(int)
        try:
            sft = Sft(m.tolist())
        except ValueError:
            continue
        if is_irreducible(sft):
            return sft


# --- construction -----------------------------------------------------------

def test_stranded_symbols_rejected():
    with pytest.raises(ValueError):
        Sft([[1, 1], [0, 0]])  # symbol 1 has no successor
    with pytest.raises(ValueError):
        Sft([[1, 0], [1, 0]])  # symbol 1 has no predecessor


def test_transitions_boolean():
    sft = Sft([[1, 1], [1, 0]])
    assert all(v in (0, 1) or isinstance(v, bool)
               for row in sft.transitions for v in row)


# --- irreducibility ---------------------------------------------------------

def test_is_irreducible_examples():
    assert is_irreducible(Sft([[1, 1], [1, 1]]))
    assert not is_irreducible(Sft([[1, 0], [0, 1]]))
    assert is_irreducible(Sft([[1, 1], [1, 0]]))


# --- min_gap_bound ----------------------------------------------------------

def brute_force_gap_bound(sft, max_gap=3):
    """Oracle: smallest tau such that every symbol pair has a gap word of
    length <= tau, by exhaustive search over gap words up to max_gap."""
    n = sft.n_symbols
    best = 0
    for a in range(n):
        for b in range(n):
            found = None
            for k in range(max_gap + 1):
                for gap in itertools.product(range(n), repeat=k):
                    if is_admissible_word(sft, (a,) + gap + (b,)):
                        found = k
                        break
                if found is not None:
                    break
            assert found is not None, "oracle window too small"
            best = max(best, found)
    return best


def test_min_gap_bound_golden_values(rose2):
    from thermoflow import build_edge_sft
    full2 = Sft([[1, 1], [1, 1]])
    golden = Sft([[1, 1], [1, 0]])
    rose_sft, _ = build_edge_sft(rose2)
    for sft, expect in ((full2, 0), (golden, 1), (rose_sft, 1)):
        assert min_gap_bound(sft) == expect
        assert brute_force_gap_bound(sft) == expect


def test_min_gap_bound_rejects_reducible():
    with pytest.raises(WeakSpecificationError, match="weak specification"):
        min_gap_bound(Sft([[1, 0], [0, 1]]))


def test_min_gap_bound_symbol_permutation_invariant():
    rng = np.random.default_rng(5)
    for _ in range(20):
        sft = random_irreducible_sft(rng)
        n = sft.n_symbols
        perm = rng.permutation(n)
        m = np.array(sft.transitions, dtype=int)
        pm = m[np.ix_(perm, perm)]
        assert min_gap_bound(Sft(pm.tolist())) == min_gap_bound(sft)


# --- glue_words -------------------------------------------------------------

def test_glue_words_examples():
    golden = Sft([[1, 1], [1, 0]])
    assert glue_words(golden, (1,), (1,)) == (0,)
    full2 = Sft([[1, 1], [1, 1]])
    assert glue_words(full2, (0, 1), (1, 0)) == ()


def test_glue_words_rose_reversal(rose2):
    from thermoflow import build_edge_sft
    sft, _ = build_edge_sft(rose2)
    # v ends at edge 0, w starts at its reversal 1: the gap must be a
    # single edge e with e != 1 (no backtrack from 0) and e != 0 (w's first
    # edge is the reversal of 0); lexicographic pick is edge 2.
    gap = glue_words(sft, (0,), (1,))
    assert gap == (2,)


def test_glue_words_contract_random():
    rng = np.random.default_rng(11)
    for _ in range(50):
        sft = random_irreducible_sft(rng)
        tau = min_gap_bound(sft)
        for _ in range(10):
            v = _random_word(sft, rng)
            w = _random_word(sft, rng)
            u = glue_words(sft, v, w)
            assert len(u) <= tau
            assert is_admissible_word(sft, v + u + w)


def _random_word(sft, rng, max_len=4):
    word = [int(rng.integers(sft.n_symbols))]
    for _ in range(int(rng.integers(0, max_len))):
        succ = sft.successors(word[-1])
        word.append(int(succ[rng.integers(len(succ))]))
    return tuple(word)


# --- primitive cycles -------------------------------------------------------

def test_enumerate_primitive_cycles_examples(rose2):
    from thermoflow import build_edge_sft
    full2 = Sft([[1, 1], [1, 1]])
    assert sorted(enumerate_primitive_cycles(full2, 1)) == [(0,), (1,)]
    golden = Sft([[1, 1], [1, 0]])
    assert sorted(enumerate_primitive_cycles(golden, 2)) == [(0,), (0, 1)]
    rose_sft, _ = build_edge_sft(rose2)
    assert len(enumerate_primitive_cycles(rose_sft, 1)) == 4


def test_periodic_count_equals_trace():
    rng = np.random.default_rng(23)
    for _ in range(10):
        sft = random_irreducible_sft(rng, max_symbols=4)
        cycles = enumerate_primitive_cycles(sft, 12)
        A = np.array(sft.transitions, dtype=object)
        for n in range(1, 13):
            trace = int(np.trace(np.linalg.matrix_power(
                np.array(sft.transitions, dtype=np.int64), n)))
            # each primitive cycle of length d | n contributes d fixed
            # points of sigma^n
            count = sum(len(c) for c in cycles if n % len(c) == 0)
            assert count == trace
        del A


# --- BiWord canonical form --------------------------------------------------

def test_biword_canonicalization():
    # periodic word written redundantly collapses to primitive tails
    a = BiWord((0, 1, 0, 1), (), (0, 1, 0, 1), 0)
    b = BiWord((0, 1), (), (0, 1), 0)
    assert a == b
    assert hash(a) == hash(b)


def test_biword_symbol_at_phases():
    w = BiWord.periodic((0, 1, 1), phase=0)
    got = [w.symbol_at(k) for k in range(-3, 6)]
    assert got == [0, 1, 1, 0, 1, 1, 0, 1, 1]


def test_biword_core_absorption():
    # core symbols matching the tails get absorbed
    x = BiWord((0,), (0, 1), (1,), 0)
    assert x.core == ()
    assert [x.symbol_at(k) for k in range(-2, 4)] == [0, 0, 0, 1, 1, 1]


def test_biword_json_roundtrip():
    x = BiWord((0,), (1, 0, 1), (1,), -1)
    d = x.to_json()
    assert set(d) == {"left_tail", "core", "right_tail", "origin"}
    assert BiWord.from_json(d) == x


# --- hypothesis property tests ---------------------------------------------

@st.composite
def sft_and_words(draw):
    n = draw(st.integers(2, 5))
    rows = draw(st.lists(
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
        min_size=n, max_size=n))
    m = np.array(rows)
    if not (m.sum(axis=0).all() and m.sum(axis=1).all()):
        # patch stranded symbols rather than reject, to keep shrinking sane
        for i in range(n):
            if not m[i].any():
                m[i, draw(st.integers(0, n - 1))] = 1
        for j in range(n):
            if not m[:, j].any():
                m[draw(st.integers(0, n - 1)), j] = 1
    sft = Sft(m.tolist())
    if not is_irreducible(sft):
        # make irreducible by adding a cycle through all symbols
        for i in range(n):
            m[i, (i + 1) % n] = 1
        sft = Sft(m.tolist())
    seeds = draw(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                           st.integers(1, 4), st.integers(1, 4)))
    return sft, seeds


@given(sft_and_words())
@settings(max_examples=60, deadline=None)
def test_gap_word_property(data):
    sft, (a, b, la, lb) = data
    rngless_v = _extend(sft, a, la)
    rngless_w = _extend(sft, b, lb)
    tau = min_gap_bound(sft)
    u = glue_words(sft, rngless_v, rngless_w)
    assert len(u) <= tau
    assert is_admissible_word(sft, rngless_v + u + rngless_w)


def _extend(sft, start, length):
    word = [start]
    for _ in range(length - 1):
        word.append(sft.successors(word[-1])[0])
    return tuple(word)
