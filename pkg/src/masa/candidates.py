"""Candidate motif mining over the collapsed symbol sequence.

Maximal repeats are found with a suffix array + LCP scan; candidates are
filtered through a dynamic null model: each state occurs independently with
its empirical frequency, and already-accepted candidates act as single
dummy symbols so that supersets of known motifs are properly discounted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import norm

from .core import CollapsedSequence, Hyperparameters, Motif

#: above this many trials the binomial tail switches to a normal approximation
_EXACT_TRIAL_LIMIT = 10**6


@dataclass(frozen=True)
class RepeatedPattern:
    states: tuple[int, ...]
    occurrences: tuple[int, ...]
    nonoverlap_count: int


@dataclass(frozen=True)
class NullModel:
    """Independence model over states, augmented with accepted patterns."""

    state_probs: dict[int, float]
    known: tuple[tuple[tuple[int, ...], float], ...]
    s_prime_len: int

    def symbol_prob(self, symbol) -> float:
        if isinstance(symbol, tuple):
            for pattern, prob in self.known:
                if pattern == symbol:
                    return prob
            raise KeyError(f"unknown dummy symbol {symbol}")
        return self.state_probs[symbol]

    def with_pattern(self, pattern: tuple[int, ...], count: int) -> "NullModel":
        prob = count / self.s_prime_len
        return NullModel(
            self.state_probs, self.known + ((pattern, prob),), self.s_prime_len
        )


def build_suffix_array(seq: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling, O(n log^2 n)."""
    n = len(seq)
    rank = np.asarray(seq, dtype=np.int64)
    sa = np.arange(n)
    k = 1
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[: n - k] = rank[k:]
        order = np.lexsort((key2, rank))
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[order[0]] = 0
        pairs_prev = np.stack([rank[order], key2[order]], axis=1)
        diff = np.any(pairs_prev[1:] != pairs_prev[:-1], axis=1)
        new_rank[order[1:]] = np.cumsum(diff)
        rank = new_rank
        sa = order
        if rank[sa[-1]] == n - 1:
            break
        k *= 2
        if k >= n:
            break
    return sa


def build_lcp(seq: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai LCP array: lcp[i] = lcp(suffix sa[i-1], suffix sa[i]), lcp[0]=0."""
    n = len(seq)
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(n, dtype=np.int64)
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa[r - 1]
            while i + h < n and j + h < n and seq[i + h] == seq[j + h]:
                h += 1
            lcp[r] = h
            if h > 0:
                h -= 1
        else:
            h = 0
    return lcp


def nonoverlap_count(s_prime: CollapsedSequence | np.ndarray, pattern) -> int:
    """Greedy left-to-right count of disjoint exact matches of pattern."""
    seq = s_prime.symbols if isinstance(s_prime, CollapsedSequence) else np.asarray(s_prime)
    pat = np.asarray(list(pattern), dtype=seq.dtype)
    m = len(pat)
    if m == 0:
        raise ValueError("pattern must be non-empty")
    count = 0
    i = 0
    n = len(seq)
    while i + m <= n:
        if np.array_equal(seq[i : i + m], pat):
            count += 1
            i += m
        else:
            i += 1
    return count


def _occurrence_starts(seq: np.ndarray, pattern: np.ndarray) -> np.ndarray:
    n, m = len(seq), len(pattern)
    if m > n:
        return np.array([], dtype=np.int64)
    hits = np.ones(n - m + 1, dtype=bool)
    for j in range(m):
        hits &= seq[j : n - m + 1 + j] == pattern[j]
    return np.flatnonzero(hits)


def _greedy_disjoint(starts: np.ndarray, length: int) -> int:
    count = 0
    next_free = -1
    for s in starts:
        if s >= next_free:
            count += 1
            next_free = s + length
    return count


def find_maximal_repeats(
    s_prime: CollapsedSequence, min_count: int, min_length: int = 3
) -> list[RepeatedPattern]:
    """All maximal repeats of length >= min_length with >= min_count
    non-overlapping occurrences.

    A repeat is maximal when no single-symbol extension (left or right)
    preserves its occurrence set: an extension preserves the set only if
    every occurrence has that neighbouring symbol.
    """
    seq = s_prime.symbols
    n = len(seq)
    if n < min_length:
        return []
    sa = build_suffix_array(seq)
    lcp = build_lcp(seq, sa)

    found: dict[tuple[int, ...], np.ndarray] = {}

    def report(depth: int, lb: int, rb: int):
        # lcp-interval [lb, rb] of depth `depth`: right-maximal by definition
        if depth < min_length:
            return
        occ = np.sort(sa[lb : rb + 1])
        # left-maximality: fails only if every occurrence has the same
        # preceding symbol (and none is at position 0)
        if occ[0] > 0:
            prev = seq[occ - 1]
            if np.all(prev == prev[0]):
                return
        pattern = tuple(int(x) for x in seq[occ[0] : occ[0] + depth])
        found.setdefault(pattern, occ)

    # bottom-up lcp-interval enumeration
    stack: list[list[int]] = [[0, 0]]  # [lcp-value, left boundary]
    for i in range(1, n + 1):
        cur = lcp[i] if i < n else 0
        lb = i - 1
        while stack and cur < stack[-1][0]:
            depth, left = stack.pop()
            report(depth, left, i - 1)
            lb = left
        if not stack or cur > stack[-1][0]:
            stack.append([cur, lb])

    out = []
    for pattern in sorted(found):
        occ = found[pattern]
        cnt = _greedy_disjoint(occ, len(pattern))
        if cnt >= min_count:
            out.append(
                RepeatedPattern(pattern, tuple(int(o) for o in occ), cnt)
            )
    return out


def replace_known_cands(pattern, null: NullModel) -> list:
    """Replace known sub-patterns with their dummy symbols (longest first,
    ties by higher empirical probability), left to right, non-overlapping."""
    symbols: list = [int(s) for s in pattern]
    order = sorted(
        null.known, key=lambda kp: (-len(kp[0]), -kp[1], kp[0])
    )
    for known_pattern, _prob in order:
        m = len(known_pattern)
        result: list = []
        i = 0
        while i < len(symbols):
            window = symbols[i : i + m]
            if len(window) == m and all(
                isinstance(w, int) and w == p for w, p in zip(window, known_pattern)
            ):
                result.append(known_pattern)
                i += m
            else:
                result.append(symbols[i])
                i += 1
        symbols = result
    return symbols


def _log_binom_pmf(n: int, k: np.ndarray, log_p: float, log_q: float) -> np.ndarray:
    return (
        gammaln(n + 1)
        - gammaln(k + 1)
        - gammaln(n - k + 1)
        + k * log_p
        + (n - k) * log_q
    )


def binomial_survival(n: int, p: float, k: int) -> float:
    """P(B(n, p) >= k), exact in log space up to 1e6 trials."""
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    if n > _EXACT_TRIAL_LIMIT:
        mu = n * p
        sigma = np.sqrt(n * p * (1.0 - p))
        return float(norm.sf((k - 0.5 - mu) / sigma))
    log_p, log_q = np.log(p), np.log1p(-p)
    if k <= n * p:
        # survival near 1: sum the (small) lower tail and complement, which
        # avoids accumulating rounding error over the dominant tail
        logs = _log_binom_pmf(n, np.arange(0, k), log_p, log_q)
        return float(max(0.0, 1.0 - np.exp(logsumexp(logs))))
    logs = _log_binom_pmf(n, np.arange(k, n + 1), log_p, log_q)
    return float(min(1.0, np.exp(logsumexp(logs))))


def pattern_p_value(pattern, n_m: int, null: NullModel) -> float:
    """Tail probability of observing >= n_m occurrences under the null."""
    if n_m < 0:
        raise ValueError("n_m must be >= 0")
    if n_m == 0:
        return 1.0
    hybrid = replace_known_cands(pattern, null)
    p = 1.0
    for sym in hybrid:
        p *= null.symbol_prob(sym)
    return binomial_survival(null.s_prime_len, p, n_m)


def empirical_state_probs(s_prime: CollapsedSequence) -> dict[int, float]:
    symbols, counts = np.unique(s_prime.symbols, return_counts=True)
    n = len(s_prime)
    return {int(s): c / n for s, c in zip(symbols, counts)}


def _length_two_repeats(seq: np.ndarray) -> list[tuple[tuple[int, int], int]]:
    # adjacent symbols always differ, so a length-2 pattern cannot overlap
    # itself and its raw count equals its non-overlapping count
    pairs: dict[tuple[int, int], int] = {}
    for a, b in zip(seq[:-1], seq[1:]):
        key = (int(a), int(b))
        pairs[key] = pairs.get(key, 0) + 1
    return sorted((k, c) for k, c in pairs.items() if c >= 2)


def build_null_model(s_prime: CollapsedSequence) -> NullModel:
    """Null model seeded with all repeated length-2 patterns."""
    n = len(s_prime)
    known = tuple(
        (pattern, count / n) for pattern, count in _length_two_repeats(s_prime.symbols)
    )
    return NullModel(empirical_state_probs(s_prime), known, n)


def generate_candidates(
    s_prime: CollapsedSequence,
    hp: Hyperparameters,
    candidate_cap: int | None = 25,
    length_sort: str = "increasing",
) -> list[Motif]:
    """Mine maximal repeats and accept the significant, non-redundant ones.

    Candidates are tested in length order (increasing by default) against a
    Bonferroni-corrected threshold alpha / |C|; each accepted candidate is
    added to the null model before the next is evaluated.
    """
    if length_sort not in ("increasing", "decreasing"):
        raise ValueError("length_sort must be 'increasing' or 'decreasing'")
    repeats = find_maximal_repeats(s_prime, hp.min_instances)
    if not repeats:
        return []
    reverse = length_sort == "decreasing"
    repeats.sort(key=lambda r: ((-len(r.states) if reverse else len(r.states)), r.states))
    null = build_null_model(s_prime)
    threshold = hp.alpha / len(repeats)
    accepted: list[tuple[Motif, float]] = []
    for rep in repeats:
        p = pattern_p_value(rep.states, rep.nonoverlap_count, null)
        if p <= threshold:
            accepted.append((Motif(rep.states), p))
            null = null.with_pattern(rep.states, rep.nonoverlap_count)
    if candidate_cap is not None and len(accepted) > candidate_cap:
        ranked = sorted(
            range(len(accepted)), key=lambda i: (accepted[i][1], i)
        )[:candidate_cap]
        accepted = [accepted[i] for i in sorted(ranked)]
    return [motif for motif, _p in accepted]
