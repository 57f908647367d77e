"""Entropy density of ergodic measures: separated generic sets, gluing of
generic blocks with counting certificates, and an end-to-end ergodic
approximation of a finite convex combination of Markov measures.

The approximating ergodic measure is realized as an explicit finite-state
block Markov chain (states = (component, position-in-block, symbol), plus
deterministic glue states), so its ergodicity and entropy are exactly
computable rather than abstract limits.  Separated generic sets are
counted exactly by dynamic programming over pair statistics (2-symbol
alphabets), giving integer-arithmetic #Gamma >= e^{t h} certificates;
weak* closeness of members is verified on seeded samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ldp import (EmpiricalMeasure, WeakStarConfig, empirical_measure,
                  weak_star_distance)
from .sft import BiWord, Sft, glue_words, min_gap_bound
from .suspension import OrbitSegment, Roof, SuspPoint, Suspension
from .thermo import MarkovMeasure, SuspendedMeasure

__all__ = [
    "ApproxTarget",
    "SeparatedSet",
    "GluedFamily",
    "empirical_measure",
    "separated_generic_set",
    "glue_generic_family",
    "ergodic_approximation",
    "glue_countable",
    "mixture_statistics",
    "chain_statistics",
]

# separation scale: two orbits are 3*eps-separated when their words differ
# within the symbolic window, with eps = 1/16 (a coordinate disagreement
# costs at least 2^-2 = 4*eps > 3*eps in the BW metric at the aligned time)
EPS_SEP = 1.0 / 16.0


@dataclass(frozen=True)
class ApproxTarget:
    """lambda = sum a_i mu_i with mu_i ergodic Markov measures."""

    components: tuple  # ((MarkovMeasure, weight), ...)
    eta: float

    def __post_init__(self):
        comps = tuple((m, float(a)) for m, a in self.components)
        object.__setattr__(self, "components", comps)
        s = sum(a for _, a in comps)
        if abs(s - 1.0) > 1e-9 or any(not (0 < a < 1) for _, a in comps) \
                and len(comps) > 1:
            raise ValueError("weights must lie in (0,1) and sum to 1")
        if not (self.eta > 0):
            raise ValueError("eta must be positive")


@dataclass(frozen=True)
class SeparatedSet:
    """A (t, 3 eps)-separated set of generic words, held as an exactly
    counted statistics box plus a sampler."""

    length: int
    count: int  # exact number of words in the box
    log_count: float
    h_target: float
    t: float
    box: dict
    sampled_D: tuple  # weak* distances of sampled members to the target

    @property
    def certificate_ok(self) -> bool:
        return self.log_count >= self.t * self.h_target


def _mu_pair_stats(mu: MarkovMeasure):
    pi1 = float(mu.stationary[1])
    p11 = float(mu.stationary[1] * mu.transition[1, 1])
    return pi1, p11


def _box_counts(sft: Sft, n: int):
    """DP table over (last symbol, #1s, #11s) for admissible length-n
    words on a 2-symbol SFT; exact integer counts."""
    # dp[(last, n1, n11)] = count
    dp = {}
    for s in range(2):
        dp[(s, s, 0)] = 1
    for _ in range(n - 1):
        nxt = {}
        for (last, n1, n11), c in dp.items():
            for b in sft.successors(last):
                key = (b, n1 + (b == 1), n11 + (last == 1 and b == 1))
                nxt[key] = nxt.get(key, 0) + c
        dp = nxt
    return dp


_LAYER_CACHE = {}


def _dp_layers(sft: Sft, n: int):
    key = (sft, n)
    if key not in _LAYER_CACHE:
        layers = [{}]
        for s in range(2):
            layers[0][(s, s, 0)] = 1
        for _ in range(n - 1):
            nxt = {}
            for (last, n1, n11), c in layers[-1].items():
                for b in sft.successors(last):
                    k2 = (b, n1 + (b == 1), n11 + (last == 1 and b == 1))
                    nxt[k2] = nxt.get(k2, 0) + c
            layers.append(nxt)
        _LAYER_CACHE[key] = layers
    return _LAYER_CACHE[key]


def _randrange_big(rng, total: int) -> int:
    """Uniform integer in [0, total) for arbitrary-precision totals
    (rejection sampling on bit blocks; acceptance probability >= 1/2)."""
    bits = total.bit_length()
    words = (bits + 61) // 62
    while True:
        r = 0
        for _ in range(words):
            r = (r << 62) | int(rng.integers(0, 1 << 62))
        r &= (1 << bits) - 1
        if r < total:
            return r


def _sample_from_box(sft: Sft, n: int, accept, rng, k: int):
    """Uniform samples from the admissible words whose final statistics
    pass `accept`, via backward DP weights."""
    layers = _dp_layers(sft, n)
    finals = [(st, c) for st, c in layers[-1].items() if accept(*st)]
    total = sum(c for _, c in finals)
    words = []
    for _ in range(k):
        r = _randrange_big(rng, total)
        for st, c in finals:
            if r < c:
                break
            r -= c
        # walk backwards
        word = [st[0]]
        cur = st
        for layer in range(n - 1, 0, -1):
            b, n1, n11 = cur
            # predecessors: states (last, n1', n11') in layers[layer-1]
            # with a transition to b
            preds = []
            for last in range(2):
                if not sft.allowed(last, b):
                    continue
                p = (last, n1 - (b == 1), n11 - (last == 1 and b == 1))
                c = layers[layer - 1].get(p, 0)
                if c:
                    preds.append((p, c))
            tot = sum(c for _, c in preds)
            r2 = _randrange_big(rng, tot)
            for p, c in preds:
                if r2 < c:
                    break
                r2 -= c
            word.append(p[0])
            cur = p
        words.append(tuple(reversed(word)))
    return words


def separated_generic_set(system: Suspension, mu: MarkovMeasure,
                          h: float, t: float, eta: float, seed: int,
                          cfg: WeakStarConfig = WeakStarConfig()
                          ) -> SeparatedSet:
    """Gamma: a (t, 3*EPS_SEP)-separated set of length-n words whose
    empirical statistics lie in a box around mu's pair statistics, with
    exact count >= e^{t h}.  2-symbol alphabets only (the DP tracks
    (last symbol, #1, #11), which determines all pair counts)."""
    if system.sft.n_symbols != 2:
        raise NotImplementedError(
            "exact box counting implemented for 2-symbol alphabets")
    if not (h < _flow_entropy(mu, system.roof)):
        raise ValueError("h must be strictly below the measure's entropy")
    mean_roof = float(np.dot(mu.stationary,
                             [system.roof[i] for i in range(2)]))
    n = int(math.floor(t / mean_roof + 1e-9))
    if n < max(16, int(4.0 / eta)):
        raise ValueError("increase t")
    pi1, p11 = _mu_pair_stats(mu)
    zeta = eta / 8.0

    def accept(last, n1, n11):
        return (abs(n1 / n - pi1) <= zeta
                and abs(n11 / (n - 1) - p11) <= zeta)

    dp = _box_counts(system.sft, n)
    count = sum(c for st, c in dp.items() if accept(*st))
    if count == 0:
        raise ValueError("increase t")
    log_count = _log_bigint(count)
    rng = np.random.default_rng(seed)
    sample = _sample_from_box(system.sft, n, accept, rng,
                              k=min(20, count))
    dists = []
    target = _markov_statistics(mu, system.roof, cfg)
    for w in sample:
        x = SuspPoint(BiWord.periodic(_close_word(system.sft, w)), 0.0)
        e = empirical_measure(system, x, float(t), cfg)
        dists.append(weak_star_distance(e, target, cfg))
    return SeparatedSet(n, count, log_count, h, t,
                        {"pi1": pi1, "p11": p11, "zeta": zeta},
                        tuple(dists))


def _log_bigint(c: int) -> float:
    return math.log(c) if c < 10 ** 300 else \
        math.lgamma(1) + len(str(c)) * math.log(10) \
        + math.log(int(str(c)[:15]) / 10 ** 14)


def _close_word(sft: Sft, w):
    w = tuple(w)
    if sft.allowed(w[-1], w[0]):
        return w
    return w + glue_words(sft, (w[-1],), (w[0],))


def _flow_entropy(mu: MarkovMeasure, roof: Roof) -> float:
    mean = float(np.dot(mu.stationary,
                        [roof[i] for i in range(len(roof))]))
    return mu.entropy() / mean


def _markov_statistics(mu: MarkovMeasure, roof: Roof,
                       cfg: WeakStarConfig) -> EmpiricalMeasure:
    from .ldp import measure_statistics
    return measure_statistics(SuspendedMeasure(mu, roof), cfg)


def mixture_statistics(target: ApproxTarget, roof: Roof,
                       cfg: WeakStarConfig = WeakStarConfig()
                       ) -> EmpiricalMeasure:
    """Statistics of lambda = sum a_i mu_i at the flow level (time-average
    mixture weights are the a_i)."""
    stats = [(a, _markov_statistics(m, roof, cfg))
             for m, a in target.components]
    freqs = {k: {} for k in range(1, cfg.depth + 1)}
    hist = None
    for a, st in stats:
        for k in freqs:
            for w, f in st.freqs[k].items():
                freqs[k][w] = freqs[k].get(w, 0.0) + a * f
        hist = a * st.heights if hist is None else hist + a * st.heights
    n_sym = stats[0][1].n_symbols
    return EmpiricalMeasure(freqs, hist, n_sym)


def mixture_entropy(target: ApproxTarget, roof: Roof) -> float:
    """Flow entropy of the mixture (affine in the measure)."""
    return sum(a * _flow_entropy(m, roof) for m, a in target.components)


# ----------------------------------------------------------------------
# gluing generic families
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GluedFamily:
    t: float
    m: int
    block_lengths: tuple
    gammas: tuple  # SeparatedSet per component
    k_partition: int
    C: float  # k^p
    log_Em: float  # certified lower bound on log #E_m
    block_starts: tuple
    c: float  # glued block time
    sample_block_D: tuple  # D(E_c(f_{b_k} y), lambda) on sampled blocks
    sample_separations: tuple  # BW distances of sampled pairs
    eps_half: float


def glue_generic_family(system: Suspension, target: ApproxTarget,
                        t: float, m: int, seed: int,
                        cfg: WeakStarConfig = WeakStarConfig()
                        ) -> GluedFamily:
    """E_m: glue m rounds of one generic block per component, with the
    C^{-m} Pi (#Gamma_i)^m counting certificate (C = k^p, k the
    transition-time partition count) and sampled 5*eta block checks."""
    comps = target.components
    p = len(comps)
    if p < 2:
        raise ValueError("need at least 2 components")
    eta = target.eta
    tau = min_gap_bound(system.sft)
    maxr = system.roof.max
    M_diam = 2.0 * sum(2.0 ** (-k) for k in range(1, cfg.depth + 1)) \
        + 2.0 * 2.0 ** (-(cfg.depth + 1))
    overhead = p * (tau + 1) * maxr
    if overhead / t >= eta / M_diam:
        raise ValueError(
            f"regime violation: p*(tau+1)*max_r/t = {overhead / t:.4f} "
            f">= eta/M = {eta / M_diam:.4f}; increase t")
    rng = np.random.default_rng(seed)
    gammas = []
    lengths = []
    for i, (mu, a) in enumerate(comps):
        t_i = a * t
        h_i = _flow_entropy(mu, system.roof) - eta / 2.0
        g = separated_generic_set(system, mu, max(h_i, 0.0), t_i, eta,
                                  seed + i, cfg)
        gammas.append(g)
        lengths.append(g.length)
    zeta = (EPS_SEP / 2.0) * system.roof.min
    k_part = max(1, math.ceil(tau * maxr / zeta))
    C = float(k_part) ** p
    log_Em = m * (sum(g.log_count for g in gammas) - math.log(C))

    # sample members of E_m: pick one word per (round, component), glue
    def sample_member():
        word = []
        starts = []
        for _ in range(m):
            for i, g in enumerate(gammas):
                w = _sample_from_box(
                    system.sft, g.length,
                    lambda last, n1, n11, g=g: (
                        abs(n1 / g.length - g.box["pi1"]) <= g.box["zeta"]
                        and abs(n11 / (g.length - 1) - g.box["p11"])
                        <= g.box["zeta"]),
                    rng, 1)[0]
                if word:
                    gap = glue_words(system.sft, (word[-1],), (w[0],))
                    word.extend(gap)
                starts.append(len(word))
                word.extend(w)
        return tuple(word), starts

    lam_stats = mixture_statistics(target, system.roof, cfg)
    block_D = []
    members = []
    for _ in range(3):
        word, starts = sample_member()
        members.append((word, starts))
        x = SuspPoint(BiWord.periodic(_close_word(system.sft, word)), 0.0)
        # c: duration of one glued round (all p blocks and gaps)
        round_end = starts[p - 1] + gammas[p - 1].length \
            if p > 1 else len(word)
        c_time = sum(system.roof[word[j]] for j in range(round_end))
        b0 = 0.0
        for kk in range(min(m, 2)):
            base_idx = starts[kk * p]
            b_time = sum(system.roof[word[j]] for j in range(base_idx))
            e = empirical_measure(system, system.flow(x, b_time),
                                  c_time, cfg)
            block_D.append(weak_star_distance(e, lam_stats, cfg))
    # sampled separation: distinct members differ somewhere; verify the
    # BW distance at the divergence time exceeds eps/2
    seps = []
    for a in range(len(members)):
        for b in range(a + 1, len(members)):
            wa, _ = members[a]
            wb, _ = members[b]
            j = next((i for i in range(min(len(wa), len(wb)))
                      if wa[i] != wb[i]), None)
            if j is None:
                continue
            xa = SuspPoint(BiWord.periodic(_close_word(system.sft, wa)), 0.0)
            xb = SuspPoint(BiWord.periodic(_close_word(system.sft, wb)), 0.0)
            ta = sum(system.roof[wa[i]] for i in range(j))
            tb = sum(system.roof[wb[i]] for i in range(j))
            d = system.bw_distance(system.flow(xa, ta),
                                   system.flow(xb, tb))
            seps.append(d)
    word0, starts0 = members[0]
    b_times = []
    for kk in range(m):
        idx = starts0[kk * p]
        b_times.append(sum(system.roof[word0[j]] for j in range(idx)))
    round_end = starts0[p - 1] + gammas[p - 1].length
    c_time = sum(system.roof[word0[j]] for j in range(round_end))
    return GluedFamily(t, m, tuple(lengths), tuple(gammas), k_part, C,
                       log_Em, tuple(b_times), c_time,
                       tuple(block_D), tuple(seps), EPS_SEP / 2.0)


# ----------------------------------------------------------------------
# ergodic approximation
# ----------------------------------------------------------------------


def _build_block_chain(system: Suspension, target: ApproxTarget, L: int):
    """Block Markov chain: component i runs ceil(a_i L) positions of its
    kernel, then a deterministic glue path leads to the next component's
    fixed start symbol.  Returns (MarkovMeasure on chain states,
    emission array, roof array)."""
    sft = system.sft
    comps = target.components
    p = len(comps)
    starts = []
    for mu, _ in comps:
        starts.append(int(np.argmax(mu.stationary)))
    states = []  # (kind, i, pos, symbol) kind 0 = block, 1 = glue
    index = {}

    def add(st):
        if st not in index:
            index[st] = len(states)
            states.append(st)
        return index[st]

    n_sym = sft.n_symbols
    lengths = [max(2, int(round(a * L))) for _, a in comps]
    for i, (mu, a) in enumerate(comps):
        for j in range(lengths[i]):
            for s in range(n_sym):
                if j == 0 and s != starts[i]:
                    continue
                add((0, i, j, s))
    # transitions
    trans = {}

    def set_p(a_st, b_st, pr):
        ia, ib = add(a_st), add(b_st)
        trans.setdefault(ia, {})[ib] = trans.get(ia, {}).get(ib, 0.0) + pr

    for i, (mu, a) in enumerate(comps):
        Li = lengths[i]
        nxt = (i + 1) % p
        for j in range(Li):
            for s in range(n_sym):
                st = (0, i, j, s)
                if st not in index:
                    continue
                if j < Li - 1:
                    for s2 in range(n_sym):
                        pr = mu.transition[s, s2]
                        if pr > 0:
                            set_p(st, (0, i, j + 1, s2), pr)
                else:
                    # deterministic glue to the next component's start
                    tgt = starts[nxt]
                    if sft.allowed(s, tgt):
                        gap = ()
                    else:
                        gap = glue_words(sft, (s,), (tgt,))
                    if gap:
                        prev = st
                        for gpos, gs in enumerate(gap):
                            gst = (1, i, (j, gpos, s), gs)
                            set_p(prev, gst, 1.0)
                            prev = gst
                        set_p(prev, (0, nxt, 0, tgt), 1.0)
                    else:
                        set_p(st, (0, nxt, 0, tgt), 1.0)
    n = len(states)
    P = np.zeros((n, n))
    for ia, row in trans.items():
        for ib, pr in row.items():
            P[ia, ib] = pr
    emit = np.array([st[3] for st in states])
    roofs = np.array([system.roof[int(e)] for e in emit])
    # the chain is periodic (deterministic position cycling), so the
    # stationary vector comes from a direct linear solve, not iteration
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:  # pragma: no cover
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.maximum(pi, 0.0)
    pi = pi / pi.sum()
    chain = MarkovMeasure(P, pi, words=[(int(e),) for e in emit])
    return chain, emit, roofs


def chain_statistics(chain: MarkovMeasure, roofs: np.ndarray,
                     cfg: WeakStarConfig = WeakStarConfig()
                     ) -> EmpiricalMeasure:
    """Residence-weighted symbol-word frequencies of a hidden-Markov
    emission chain (exact transfer-operator computation)."""
    P = chain.transition
    pi = chain.stationary
    emit = np.array([w[0] for w in chain.words])
    mean_roof = float(np.dot(pi, roofs))
    n_sym = int(emit.max()) + 1
    freqs = {}
    # vectors nu_w over states: probability of seeing word w starting in
    # each state, weighted by pi * roof at the first state
    base = {(): pi * roofs / mean_roof}
    for k in range(1, cfg.depth + 1):
        layer = {}
        for w, vec in base.items():
            for s in range(n_sym):
                mask = (emit == s).astype(float)
                if len(w) == 0:
                    nv = vec * mask
                else:
                    nv = (vec @ P) * mask
                if nv.sum() > 1e-300:
                    layer[w + (s,)] = nv
        freqs[k] = {w: float(v.sum()) for w, v in layer.items()}
        base = layer
    hist = np.full(cfg.height_bins, 1.0 / cfg.height_bins)
    return EmpiricalMeasure(freqs, hist, n_sym)


@dataclass(frozen=True)
class ApproximationReport:
    nu: MarkovMeasure
    roofs: np.ndarray
    eta: float
    D: float
    h_mu: float
    h_nu: float
    L: int
    count_certificate: dict
    block_checks: tuple

    def to_json(self) -> dict:
        return {
            "eta": self.eta,
            "D": self.D,
            "h_mu": self.h_mu,
            "h_nu": self.h_nu,
            "count_certificate": self.count_certificate,
            "block_checks": list(self.block_checks),
        }


def ergodic_approximation(system: Suspension, target: ApproxTarget,
                          cfg: WeakStarConfig = WeakStarConfig(),
                          seed: int = 0) -> ApproximationReport:
    """An ergodic Markov measure nu (block chain) with D(lambda, nu) < eta
    and |h_nu - h_lambda| < eta, plus the gluing count certificate."""
    eta = target.eta
    comps = target.components
    lam_stats = mixture_statistics(target, system.roof, cfg)
    h_mu = mixture_entropy(target, system.roof)
    if len(comps) == 1:
        mu = comps[0][0]
        roofs = np.array([system.roof[i]
                          for i in range(system.sft.n_symbols)])
        return ApproximationReport(
            mu, roofs, eta, 0.0, h_mu, h_mu, 0,
            {"log_Em_rate": h_mu, "bound": h_mu, "note": "single ergodic "
             "component: target returned unchanged"}, ())
    tau = min_gap_bound(system.sft)
    overhead = len(comps) * (tau + 1) * system.roof.max
    best = None
    for L in (100, 200, 400, 800):
        chain, emit, roofs = _build_block_chain(system, target, L)
        stats = chain_statistics(chain, roofs, cfg)
        D = weak_star_distance(stats, lam_stats, cfg)
        h_nu = chain.entropy() / float(np.dot(chain.stationary, roofs))
        if best is None or D < best[1]:
            best = (L, D, h_nu, chain, roofs)
        if D < eta and abs(h_nu - h_mu) < eta:
            break
    L, D, h_nu, chain, roofs = best
    if not (D < eta and abs(h_nu - h_mu) < eta):
        min_eta = max(D, abs(h_nu - h_mu)) * 1.05
        raise ValueError(
            f"infeasible eta: switching overhead {overhead}/L limits the "
            f"achievable tolerance; minimal achievable eta ~ {min_eta:.4f}")
    # counting certificate from the glued family at a t in the valid regime
    M_diam = 2.0 * sum(2.0 ** (-k) for k in range(1, cfg.depth + 1)) \
        + 2.0 * 2.0 ** (-(cfg.depth + 1))
    t_glue = max(400.0, 2.0 * overhead * M_diam / eta)
    fam = glue_generic_family(system, target, t_glue, m=3, seed=seed,
                              cfg=cfg)
    rate = fam.log_Em / (fam.t * fam.m)
    bound = h_mu - eta - (sum(_flow_entropy(m_, system.roof)
                              for m_, _ in comps)
                          + math.log(fam.C)) / fam.t
    return ApproximationReport(
        chain, roofs, eta, D, h_mu, h_nu, L,
        {"log_Em_rate": rate, "bound": bound, "k": fam.k_partition,
         "C": fam.C, "t": fam.t, "m": fam.m},
        tuple(fam.sample_block_D))


# ----------------------------------------------------------------------
# countable gluing
# ----------------------------------------------------------------------


def glue_countable(system: Suspension, segs, delta: float, depth: int):
    """Glue the first `depth` segments of a stream so that deepening never
    changes already-emitted coordinates; returns (SuspPoint, emitted_end)
    where coordinates < emitted_end are final for all larger depths."""
    import itertools
    head = list(itertools.islice(iter(segs), depth))
    if len(head) < depth:
        raise ValueError("stream exhausted before requested depth")
    res = system.glue_segments(head, delta)
    point = res.point
    # emitted coordinates run through the end of the last segment's
    # window: locate the last block's starting coordinate from its flow
    # start time (s_{d-1} - t_{d-1}), then add its window length
    m = system.margin(delta)
    last = head[-1]
    c = system._occupied_symbols(last.start, last.duration)
    start_time = res.block_starts[-1] - last.duration
    shift = 0
    h = point.height + start_time
    while h >= system.roof[point.base.symbol_at(shift)]:
        h -= system.roof[point.base.symbol_at(shift)]
        shift += 1
    emitted_end = shift + c + m + 1
    return point, emitted_end
