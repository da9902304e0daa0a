"""Instance scoring and greedy lock/bid allocation of measurements.

Each decoded instance gets a total score combining the motif's G-score
(observed vs expected occurrence count under the null model) and a
likelihood-ratio statistic for the relabeled interval. Instances are then
allocated greedily in descending score: motifs with >= L instances lock
measurements exclusively, everything else holds revocable bids.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import Motif, MotifInstance, MotifSet, StateAssignment, TimeSeries
from .state_model import StateModel, log_likelihood_matrix


@dataclass(frozen=True)
class ScoredInstance:
    motif_id: int
    instance: MotifInstance
    motif_score: float
    instance_score: float

    @property
    def total(self) -> float:
        return self.motif_score + self.instance_score


def motif_score(n_m: int, expected_n: float) -> float:
    """G-score: 2 N_m (log N_m - log E[N_m])."""
    if n_m < 1:
        raise ValueError("n_m must be >= 1")
    if expected_n <= 0:
        raise ValueError("expected_n must be positive")
    return 2.0 * n_m * (np.log(n_m) - np.log(expected_n))


def expected_instances(motif: Motif, state_probs: dict[int, float], s_prime_len: int) -> float:
    """E[N_m] under the independence null with empirical state frequencies."""
    p = 1.0
    for s in motif.states:
        p *= state_probs.get(s, 0.0)
    return s_prime_len * p


def instance_score(
    model: StateModel,
    ts: TimeSeries,
    old: StateAssignment,
    start: int,
    end: int,
    new_labels: np.ndarray,
    ll: np.ndarray | None = None,
) -> float:
    """Likelihood-ratio statistic 2 (ll_new - ll_old) over [start, end)."""
    if not (0 <= start < end <= ts.t_len):
        raise ValueError("interval out of bounds")
    if ll is None:
        ll = log_likelihood_matrix(model, ts)
    idx = np.arange(start, end)
    new_ll = ll[idx, new_labels].sum()
    old_ll = ll[idx, old.labels[idx]].sum()
    return 2.0 * float(new_ll - old_ll)


def score_instances(
    decoded: list[list[MotifInstance]],
    motifs: list[Motif],
    model: StateModel,
    ts: TimeSeries,
    base: StateAssignment,
    state_probs: dict[int, float],
    s_prime_len: int,
    ll: np.ndarray | None = None,
) -> list[ScoredInstance]:
    """Attach G-scores and instance scores to every decoded instance."""
    if ll is None:
        ll = log_likelihood_matrix(model, ts)
    scored = []
    for motif_id, (motif, instances) in enumerate(zip(motifs, decoded)):
        if not instances:
            continue
        expected = expected_instances(motif, state_probs, s_prime_len)
        upsilon = motif_score(len(instances), expected)
        for inst in instances:
            delta = instance_score(
                model, ts, base, inst.start, inst.end, inst.labels(), ll=ll
            )
            scored.append(ScoredInstance(motif_id, inst, upsilon, delta))
    return scored


def greedy_assign(
    scored: list[ScoredInstance],
    base: StateAssignment,
    min_instances: int,
) -> tuple[StateAssignment, MotifSet]:
    """Allocate measurements to at most one motif via locks and bids.

    Instances are processed in descending total score (ties by motif id,
    then start index). An instance touching a locked measurement is
    rejected. Complete motifs (>= min_instances accepted) lock immediately;
    others bid, and on reaching min_instances bids the motif completes,
    locks its bids, and evicts competing bids on those measurements.
    """
    t_len = base.t_len
    order = sorted(
        range(len(scored)),
        key=lambda i: (-scored[i].total, scored[i].motif_id, scored[i].instance.start),
    )
    locked = np.zeros(t_len, dtype=bool)
    n_motifs = max((s.motif_id for s in scored), default=-1) + 1
    complete = [False] * n_motifs
    pending: list[list[int]] = [[] for _ in range(n_motifs)]
    bid_mask = {}
    evicted = [False] * len(scored)
    locked_ids: list[int] = []
    bidders: list[list[int]] = [[] for _ in range(t_len)]

    def lock(i: int):
        inst = scored[i].instance
        locked[inst.start : inst.end] = True
        locked_ids.append(i)
        for t in range(inst.start, inst.end):
            for other in bidders[t]:
                if other != i and not evicted[other]:
                    evict(other)
            bidders[t] = []

    def evict(i: int):
        evicted[i] = True
        si = scored[i]
        pending[si.motif_id].remove(i)
        bid_mask[si.motif_id][si.instance.start : si.instance.end] = False

    for i in order:
        si = scored[i]
        inst = si.instance
        if locked[inst.start : inst.end].any():
            continue
        m = si.motif_id
        if complete[m]:
            lock(i)
            continue
        if m not in bid_mask:
            bid_mask[m] = np.zeros(t_len, dtype=bool)
        if bid_mask[m][inst.start : inst.end].any():
            # overlaps an earlier (higher-scored) bid of the same motif
            continue
        pending[m].append(i)
        bid_mask[m][inst.start : inst.end] = True
        for t in range(inst.start, inst.end):
            bidders[t].append(i)
        if len(pending[m]) >= min_instances:
            complete[m] = True
            for j in list(pending[m]):
                lock(j)
            pending[m] = []

    labels = base.labels.copy()
    by_motif: dict[int, list[MotifInstance]] = {}
    for i in locked_ids:
        si = scored[i]
        inst = si.instance
        labels[inst.start : inst.end] = inst.labels()
        final = replace(inst, score=si.total)
        by_motif.setdefault(si.motif_id, []).append(final)

    # per-motif contribution: the G-score once, plus locked instances' deltas
    contribution: dict[int, float] = {}
    for i in sorted(locked_ids):
        si = scored[i]
        if si.motif_id not in contribution:
            contribution[si.motif_id] = si.motif_score
        contribution[si.motif_id] += si.instance_score
    total = float(sum(contribution.values()))

    entries = []
    upsilons = []
    for m in sorted(by_motif, key=lambda m: (-contribution[m], m)):
        instances = sorted(by_motif[m], key=lambda q: q.start)
        entries.append((instances[0].motif, tuple(instances)))
        upsilons.append(
            next(s.motif_score for s in scored if s.motif_id == m)
        )

    assignment = StateAssignment(labels, base.k_states)
    return assignment, MotifSet(tuple(entries), total, tuple(upsilons))


def total_motif_score(parts: list[tuple[float, list[float]]]) -> float:
    """Sum of per-motif G-scores plus all their instance scores."""
    return float(sum(upsilon + sum(deltas) for upsilon, deltas in parts))
