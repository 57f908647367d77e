"""Entropy density of ergodic measures: exactly-counted separated generic
sets, glued generic families with counting certificates, the block-chain
ergodic approximation, and stable countable gluing."""

import math

import numpy as np
import pytest

from thermoflow import (
    ApproxTarget,
    BiWord,
    EPS_SEP,
    MarkovMeasure,
    OrbitSegment,
    Roof,
    Sft,
    Suspension,
    WeakStarConfig,
    chain_statistics,
    ergodic_approximation,
    glue_countable,
    glue_generic_family,
    glue_words,
    mixture_entropy,
    mixture_statistics,
    separated_generic_set,
    weak_star_distance,
)

CFG = WeakStarConfig()

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2


def bernoulli(p):
    return MarkovMeasure([[p, 1 - p], [p, 1 - p]])


def standard_mixture(eta):
    """lambda = (1/2) B(0.9) + (1/2) B(0.1): entropy H(0.9) ~ 0.32508."""
    return ApproxTarget(((bernoulli(0.9), 0.5), (bernoulli(0.1), 0.5)), eta)


def _random_segment(system, rng):
    word = [int(rng.integers(system.sft.n_symbols))]
    for _ in range(4):
        succ = system.sft.successors(word[-1])
        word.append(int(succ[rng.integers(len(succ))]))
    gap = glue_words(system.sft, (word[-1],), (word[0],))
    base = BiWord.periodic(tuple(word) + tuple(gap), phase=0)
    h = float(rng.random()) * system.roof[base.symbol_at(0)]
    return OrbitSegment(system.point(base, h), float(rng.uniform(1, 5)))


# --- separated generic sets ---------------------------------------------------

def test_separated_set_bernoulli_certificate(full2_unit):
    g = separated_generic_set(full2_unit, bernoulli(0.5), h=0.6, t=40.0,
                              eta=0.1, seed=0)
    assert g.count == 32583198648  # exact DP count, frozen
    assert g.certificate_ok
    assert g.log_count >= g.t * g.h_target  # >= e^{24} members
    # sampled members are generic: empirical statistics near the target
    assert max(g.sampled_D) < 2 * 0.1


def test_separated_set_golden_parry():
    system = Suspension(Sft([[1, 1], [1, 0]]), Roof([1.0, 1.0]))
    g = GOLDEN_RATIO
    parry = MarkovMeasure([[1 / g, 1 / g ** 2], [1.0, 0.0]])
    s = separated_generic_set(system, parry, h=0.4, t=60.0, eta=0.1, seed=0)
    assert s.certificate_ok
    assert s.log_count >= 24.0  # t * h
    assert max(s.sampled_D) < 2 * 0.1


def test_separated_set_count_monotone_in_t(full2_unit):
    a = separated_generic_set(full2_unit, bernoulli(0.5), 0.6, 40.0, 0.1, 0)
    b = separated_generic_set(full2_unit, bernoulli(0.5), 0.6, 60.0, 0.1, 0)
    assert b.count > a.count
    # exponential growth rate stays below topological entropy
    assert b.log_count / b.t <= math.log(2) + 1e-9


def test_separated_set_requires_h_below_entropy(full2_unit):
    with pytest.raises(ValueError, match="strictly below"):
        separated_generic_set(full2_unit, bernoulli(0.5), h=1.0, t=40.0,
                              eta=0.1, seed=0)


def test_separated_set_increase_t_error():
    system = Suspension(Sft([[1, 1], [1, 0]]), Roof([1.0, 2.0]))
    with pytest.raises(ValueError, match="increase t"):
        separated_generic_set(system, MarkovMeasure([[0.6, 0.4], [1, 0]]),
                              h=0.2, t=5.0, eta=0.1, seed=0)


# --- mixtures -------------------------------------------------------------------

def test_mixture_statistics_affine(full2_unit):
    target = standard_mixture(0.1)
    ms = mixture_statistics(target, full2_unit.roof, CFG)
    # symbol-1 frequency of (1/2) B(0.9) + (1/2) B(0.1) is 1/2
    assert abs(ms.frequency((1,)) - 0.5) < 1e-12
    # depth-2: (1/2)(0.1 * 0.1) + (1/2)(0.9 * 0.9) for the word 11
    assert abs(ms.frequency((1, 1)) - 0.5 * (0.01 + 0.81)) < 1e-12


def test_mixture_entropy_affine(full2_unit):
    target = standard_mixture(0.1)
    h9 = -(0.9 * math.log(0.9) + 0.1 * math.log(0.1))
    assert abs(mixture_entropy(target, full2_unit.roof) - h9) < 1e-12


def test_approx_target_validates_weights():
    with pytest.raises(ValueError, match="sum to 1"):
        ApproxTarget(((bernoulli(0.5), 0.4), (bernoulli(0.2), 0.4)), 0.1)
    with pytest.raises(ValueError, match="eta"):
        ApproxTarget(((bernoulli(0.5), 1.0),), 0.0)


# --- glued generic families ------------------------------------------------------

def test_glue_generic_family_certificates(full2_unit):
    eta = 0.1
    target = standard_mixture(eta)
    fam = glue_generic_family(full2_unit, target, t=200.0, m=3, seed=0)
    # sampled glued blocks track the mixture within 5 eta
    assert all(d <= 5 * eta for d in fam.sample_block_D)
    # sampled pairs separate by at least eps/2 at the divergence time
    assert fam.eps_half == EPS_SEP / 2.0
    assert all(s >= fam.eps_half for s in fam.sample_separations)
    # counting certificate: log #E_m = m (sum log #Gamma_i - log C)
    expected = fam.m * (sum(g.log_count for g in fam.gammas)
                        - math.log(fam.C))
    assert abs(fam.log_Em - expected) < 1e-9
    assert fam.C == float(fam.k_partition) ** len(target.components)
    # per-(t, m) rate approaches the mixture entropy from below
    rate = fam.log_Em / (fam.t * fam.m)
    h_mu = mixture_entropy(target, full2_unit.roof)
    assert rate > h_mu - eta - 0.05
    assert rate <= h_mu + eta


def test_glue_generic_family_regime_violation(full2_unit):
    with pytest.raises(ValueError, match="regime violation"):
        glue_generic_family(full2_unit, standard_mixture(0.1), t=20.0,
                            m=2, seed=0)


def test_glue_generic_family_needs_two_components(full2_unit):
    single = ApproxTarget(((bernoulli(0.5), 1.0),), 0.1)
    with pytest.raises(ValueError, match="at least 2"):
        glue_generic_family(full2_unit, single, t=200.0, m=2, seed=0)


# --- ergodic approximation --------------------------------------------------------

def test_ergodic_approximation_standard_mixture(full2_unit):
    eta = 0.05
    target = standard_mixture(eta)
    rep = ergodic_approximation(full2_unit, target, CFG, seed=0)
    h9 = -(0.9 * math.log(0.9) + 0.1 * math.log(0.1))  # ~ 0.32508
    assert rep.D < eta
    assert abs(rep.h_nu - rep.h_mu) < eta
    assert abs(rep.h_mu - h9) < 1e-12
    assert abs(rep.h_nu - h9) < 0.05
    # the approximant is itself ergodic with the reported statistics
    stats = chain_statistics(rep.nu, rep.roofs, CFG)
    lam = mixture_statistics(target, full2_unit.roof, CFG)
    assert abs(weak_star_distance(stats, lam, CFG) - rep.D) < 1e-12
    # counting certificate: the glued-family rate clears the lower bound
    cert = rep.count_certificate
    assert cert["log_Em_rate"] > cert["bound"]
    assert cert["bound"] > rep.h_mu - eta - 0.06
    # sampled glued blocks stay within 6 eta of the mixture
    assert rep.block_checks and all(d <= 6 * eta for d in rep.block_checks)
    j = rep.to_json()
    assert set(j) >= {"eta", "D", "h_mu", "h_nu", "count_certificate",
                      "block_checks"}


def test_ergodic_approximation_single_component(full2_unit):
    mu = bernoulli(0.5)
    target = ApproxTarget(((mu, 1.0),), 0.05)
    rep = ergodic_approximation(full2_unit, target, CFG, seed=0)
    assert rep.nu is mu
    assert rep.D == 0.0
    assert abs(rep.h_nu - math.log(2)) < 1e-12
    assert "single ergodic component" in rep.count_certificate["note"]


def test_ergodic_approximation_infeasible_eta(full2_unit):
    target = standard_mixture(0.0005)
    with pytest.raises(ValueError, match="infeasible eta"):
        ergodic_approximation(full2_unit, target, CFG, seed=0)


# --- countable gluing --------------------------------------------------------------

def test_glue_countable_prefix_stable(golden12):
    rng = np.random.default_rng(5)
    segs = [_random_segment(golden12, rng) for _ in range(8)]
    prev = None
    for depth in (3, 4, 5, 6):
        point, end = glue_countable(golden12, iter(segs), 0.3, depth)
        if prev is not None:
            ppoint, pend = prev
            assert end >= pend
            # already-emitted coordinates never change when deepening
            assert all(point.base.symbol_at(k) == ppoint.base.symbol_at(k)
                       for k in range(pend))
            assert abs(point.height - ppoint.height) < 1e-12
        prev = (point, end)


def test_glue_countable_matches_finite_glue(golden12):
    rng = np.random.default_rng(5)
    segs = [_random_segment(golden12, rng) for _ in range(6)]
    res = golden12.glue_segments(segs[:4], 0.3)
    point, end = glue_countable(golden12, iter(segs), 0.3, 4)
    assert point == res.point
    assert end > 0


def test_glue_countable_exhausted_stream(golden12):
    rng = np.random.default_rng(5)
    segs = [_random_segment(golden12, rng) for _ in range(2)]
    with pytest.raises(ValueError, match="exhausted"):
        glue_countable(golden12, iter(segs), 0.3, 5)
