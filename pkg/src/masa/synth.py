"""Synthetic benchmark generator and evaluation metrics.

Each macro-segment is 6 randomly-labeled segments followed by 4 motif
segments with states 0 -> 1 -> 2 -> 3. Data for state k is zero-mean
Gaussian with a random SPD covariance; with probability epsilon a segment
is perturbed by blending in a random non-motif state's covariance while
keeping its ground-truth label.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import f1_score

from .core import StateAssignment, TimeSeries

MOTIF_STATES = (0, 1, 2, 3)


@dataclass(frozen=True)
class SynthConfig:
    n_macro: int = 1000
    seg_len: int = 15
    segs_per_macro: int = 10
    n_motif_segs: int = 4
    k_states: int = 10
    n_dims: int = 5
    epsilon: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.epsilon <= 1.0):
            raise ValueError("epsilon must lie in [0, 1]")
        if self.n_macro < 1 or self.seg_len < 1:
            raise ValueError("n_macro and seg_len must be positive")
        if not (0 < self.n_motif_segs < self.segs_per_macro):
            raise ValueError("n_motif_segs must leave room for non-motif segments")
        if self.k_states <= self.n_motif_segs:
            raise ValueError("need non-motif states: k_states > n_motif_segs")

    @property
    def t_len(self) -> int:
        return self.n_macro * self.segs_per_macro * self.seg_len

    @property
    def n_segments(self) -> int:
        return self.n_macro * self.segs_per_macro


@dataclass(frozen=True)
class GroundTruth:
    labels: np.ndarray
    motif_mask: np.ndarray
    perturbed_segments: np.ndarray
    seg_len: int

    @property
    def perturbed_mask(self) -> np.ndarray:
        """Per-measurement view of the per-segment perturbation flags."""
        return np.repeat(self.perturbed_segments, self.seg_len)


def gen_covariances(k: int, n: int, seed_or_rng, delta: float = 0.1) -> list[np.ndarray]:
    """K random SPD covariances: sparse factor products A A' + delta I."""
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    covs = []
    for _ in range(k):
        a = rng.normal(size=(n, n)) * (rng.random((n, n)) < 0.5)
        covs.append(a @ a.T + delta * np.eye(n))
    return covs


def gen_synthetic(cfg: SynthConfig) -> tuple[TimeSeries, GroundTruth]:
    rng = np.random.default_rng(cfg.seed)
    covs = gen_covariances(cfg.k_states, cfg.n_dims, rng)
    chols = [np.linalg.cholesky(c) for c in covs]
    non_motif_states = np.arange(cfg.n_motif_segs, cfg.k_states)
    n_plain = cfg.segs_per_macro - cfg.n_motif_segs

    data = np.empty((cfg.t_len, cfg.n_dims))
    labels = np.empty(cfg.t_len, dtype=np.int64)
    motif_mask = np.zeros(cfg.t_len, dtype=bool)
    perturbed = np.zeros(cfg.n_segments, dtype=bool)

    seg = 0
    t = 0
    for _ in range(cfg.n_macro):
        seg_states = list(rng.integers(0, cfg.k_states, size=n_plain))
        seg_states += list(MOTIF_STATES[: cfg.n_motif_segs])
        for pos, state in enumerate(seg_states):
            is_motif = pos >= n_plain
            hit = rng.random() < cfg.epsilon
            if hit:
                j = int(rng.choice(non_motif_states))
                cov = 0.7 * covs[j] + 0.3 * covs[state]
                chol = np.linalg.cholesky(cov)
            else:
                chol = chols[state]
            block = rng.normal(size=(cfg.seg_len, cfg.n_dims)) @ chol.T
            data[t : t + cfg.seg_len] = block
            labels[t : t + cfg.seg_len] = state
            motif_mask[t : t + cfg.seg_len] = is_motif
            perturbed[seg] = hit
            seg += 1
            t += cfg.seg_len
    return TimeSeries(data), GroundTruth(labels, motif_mask, perturbed, cfg.seg_len)


def match_labels(pred: StateAssignment, truth: GroundTruth) -> np.ndarray:
    """Permutation of predicted ids maximizing agreement with the truth,
    via optimal assignment on the confusion matrix."""
    true_labels = truth.labels
    if pred.t_len != len(true_labels):
        raise ValueError("prediction and truth lengths differ")
    k = max(pred.k_states, int(true_labels.max()) + 1)
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (pred.labels, true_labels), 1)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    perm = np.arange(k)
    perm[rows] = cols
    return perm


def _matched(pred: StateAssignment, truth: GroundTruth, perm: np.ndarray | None):
    if perm is None:
        perm = match_labels(pred, truth)
    return perm[pred.labels]


def full_accuracy(
    pred: StateAssignment, truth: GroundTruth, perm: np.ndarray | None = None
) -> float:
    mapped = _matched(pred, truth, perm)
    return float(np.mean(mapped == truth.labels))


def motif_accuracy(
    pred: StateAssignment, truth: GroundTruth, perm: np.ndarray | None = None
) -> float:
    """Accuracy restricted to measurements inside motif sections."""
    mapped = _matched(pred, truth, perm)
    mask = truth.motif_mask
    return float(np.mean(mapped[mask] == truth.labels[mask]))


def weighted_f1(
    pred: StateAssignment,
    truth: GroundTruth,
    states: tuple[int, ...] = MOTIF_STATES,
    perm: np.ndarray | None = None,
) -> float:
    """Support-weighted F1 over the motif states, on the full dataset."""
    mapped = _matched(pred, truth, perm)
    supports = [int(np.count_nonzero(truth.labels == s)) for s in states]
    if sum(supports) == 0:
        return 0.0
    return float(
        f1_score(
            truth.labels, mapped, labels=list(states), average="weighted",
            zero_division=0,
        )
    )
