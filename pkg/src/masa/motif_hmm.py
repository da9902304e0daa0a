"""Per-motif time-varying HMM over the full measurement sequence.

Hidden states are z_0 (non-motif) and z_1..z_r, one per motif state. The
chain only moves forward: z_j -> {z_j, z_{j+1}}, the last state may close
the instance (-> z_0) or start a new one (-> z_1), and z_0 may loop (cost
beta only where the base assignment itself switched) or open an instance.
Viterbi ties favor z_0, then the lower-indexed hidden state, so gamma = 1
decodes everything to z_0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Motif, MotifInstance, StateAssignment, TimeSeries
from .state_model import StateModel, log_likelihood_matrix


@dataclass(frozen=True)
class MotifHmm:
    motif: Motif
    model: StateModel
    base_assignment: StateAssignment
    gamma: float

    @property
    def n_hidden(self) -> int:
        return len(self.motif) + 1


def build_motif_hmm(
    motif: Motif, model: StateModel, base: StateAssignment, gamma: float
) -> MotifHmm:
    if not (0.0 < gamma <= 1.0):
        raise ValueError("gamma must lie in (0, 1]")
    for s in motif.states:
        if not (0 <= s < model.k_states):
            raise ValueError(f"motif state {s} outside model range")
    return MotifHmm(motif, model, base, gamma)


def _emissions(hmm: MotifHmm, ll: np.ndarray) -> np.ndarray:
    t_len = ll.shape[0]
    r = len(hmm.motif)
    em = np.empty((t_len, r + 1))
    em[:, 0] = ll[np.arange(t_len), hmm.base_assignment.labels] + np.log(hmm.gamma)
    for j, state in enumerate(hmm.motif.states, start=1):
        em[:, j] = ll[:, state]
    return em


def viterbi_path(
    hmm: MotifHmm, ts: TimeSeries, ll: np.ndarray | None = None
) -> np.ndarray:
    """Most likely hidden-state path; start states {z_0, z_1}, end states
    {z_0, z_last}."""
    if ts.t_len != hmm.base_assignment.t_len:
        raise ValueError("series length does not match base assignment")
    if ll is None:
        ll = log_likelihood_matrix(hmm.model, ts)
    em = _emissions(hmm, ll)
    t_len = em.shape[0]
    r = len(hmm.motif)
    beta = hmm.model.beta
    labels = hmm.base_assignment.labels
    # cost of the z_0 self-loop into time t (0 unless the base assignment
    # itself switched at t)
    beta_null = beta * (labels[1:] != labels[:-1]).astype(np.float64)

    dp = np.full(r + 1, -np.inf)
    dp[0] = em[0, 0]
    dp[1] = em[0, 1]
    ptr = np.zeros((t_len, r + 1), dtype=np.int64)
    for t in range(1, t_len):
        new = np.empty(r + 1)
        ptr_t = ptr[t]
        # z_0: from z_0 (time-varying loop cost) or from z_last
        from_self = dp[0] - beta_null[t - 1]
        from_last = dp[r] - beta
        if from_self >= from_last:  # tie prefers z_0
            new[0] = from_self
            ptr_t[0] = 0
        else:
            new[0] = from_last
            ptr_t[0] = r
        # z_1: from z_0, itself, or z_last; tie order z_0, z_1, z_last
        cands = (dp[0] - beta, dp[1], dp[r] - beta)
        order = (0, 1, r)
        best = max(cands)
        idx = cands.index(best)
        new[1] = best
        ptr_t[1] = order[idx]
        # z_2..z_r: advance from the previous chain state or stay; ties
        # prefer the lower-indexed predecessor
        if r >= 2:
            advance = dp[1:r] - beta
            stay = dp[2 : r + 1]
            take_advance = advance >= stay
            new[2:] = np.where(take_advance, advance, stay)
            ptr_t[2:] = np.where(take_advance, np.arange(1, r), np.arange(2, r + 1))
        dp = new + em[t]
    # valid end states: z_0 and z_last; tie prefers z_0
    last = 0 if dp[0] >= dp[r] else r
    path = np.empty(t_len, dtype=np.int64)
    path[-1] = last
    for t in range(t_len - 1, 0, -1):
        path[t - 1] = ptr[t, path[t]]
    return path


def path_score(hmm: MotifHmm, ts: TimeSeries, path: np.ndarray) -> float:
    """Total emission minus transition cost of a hidden-state path."""
    ll = log_likelihood_matrix(hmm.model, ts)
    em = _emissions(hmm, ll)
    labels = hmm.base_assignment.labels
    beta = hmm.model.beta
    r = len(hmm.motif)
    total = float(em[np.arange(len(path)), path].sum())
    for t in range(1, len(path)):
        a, b = path[t - 1], path[t]
        if a == 0 and b == 0:
            if labels[t] != labels[t - 1]:
                total -= beta
        elif a == b:
            pass
        else:
            total -= beta
    return total


def instances_from_path(motif: Motif, path: np.ndarray) -> list[MotifInstance]:
    """Cut maximal motif-state runs into instances; a z_last -> z_1 step
    starts a new back-to-back instance."""
    r = len(motif)
    instances = []
    t = 0
    t_len = len(path)
    while t < t_len:
        if path[t] == 0:
            t += 1
            continue
        start = t
        durations = [0] * r
        prev = 0
        while t < t_len and path[t] != 0:
            if path[t] == 1 and prev == r:
                # back-to-back instance: close the current one
                instances.append(
                    MotifInstance(motif, start, t, tuple(durations))
                )
                start = t
                durations = [0] * r
            durations[path[t] - 1] += 1
            prev = path[t]
            t += 1
        instances.append(MotifInstance(motif, start, t, tuple(durations)))
    return instances


def decode_instances(
    hmm: MotifHmm, ts: TimeSeries, ll: np.ndarray | None = None
) -> list[MotifInstance]:
    """Viterbi decode and return every full traversal of the motif chain."""
    path = viterbi_path(hmm, ts, ll)
    return instances_from_path(hmm.motif, path)
