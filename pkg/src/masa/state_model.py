"""Gaussian state likelihood model: per-state log-likelihood, refitting, and
Viterbi-based assignment under a switching penalty.

The per-state likelihood is the unnormalized Gaussian form

    ll(x | k) = -(x - mu_k)' Theta_k (x - mu_k) + log det Theta_k

with Theta_k the inverse covariance. Refitting uses maximum-likelihood
covariances (1/n) with ridge shrinkage (Sigma + lambda I)^-1, which keeps
every state invertible for lambda > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Hyperparameters, StateAssignment, TimeSeries


class DegenerateCovarianceError(ValueError):
    """Raised when a state's regularized covariance is not invertible."""


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    inv_cov: np.ndarray
    log_det: float

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        inv_cov = np.asarray(self.inv_cov, dtype=np.float64)
        n = mean.shape[0]
        if inv_cov.shape != (n, n):
            raise ValueError("inv_cov must be N x N")
        if not np.allclose(inv_cov, inv_cov.T, atol=1e-8):
            raise ValueError("inv_cov must be symmetric")
        eigvals = np.linalg.eigvalsh(inv_cov)
        if eigvals.min() <= 0:
            raise DegenerateCovarianceError("inv_cov must be positive definite")
        sign, logdet = np.linalg.slogdet(inv_cov)
        if sign <= 0 or abs(logdet - self.log_det) > 1e-6:
            raise ValueError("cached log_det disagrees with inv_cov")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "inv_cov", inv_cov)


@dataclass(frozen=True)
class StateModel:
    states: tuple[GaussianState, ...]
    beta: float
    reg_lambda: float

    def __post_init__(self):
        if len(self.states) < 1:
            raise ValueError("at least one state required")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def k_states(self) -> int:
        return len(self.states)

    @property
    def n_dims(self) -> int:
        return self.states[0].mean.shape[0]


def log_likelihood(model: StateModel, x: np.ndarray, state: int) -> float:
    """Unnormalized Gaussian log-likelihood of one measurement in one state."""
    if not (0 <= state < model.k_states):
        raise ValueError(f"invalid state id {state}")
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("measurement must be finite")
    st = model.states[state]
    d = x - st.mean
    return float(-d @ st.inv_cov @ d + st.log_det)


def log_likelihood_matrix(model: StateModel, ts: TimeSeries) -> np.ndarray:
    """T x K matrix of log-likelihoods for every measurement/state pair."""
    out = np.empty((ts.t_len, model.k_states))
    for k, st in enumerate(model.states):
        d = ts.data - st.mean
        out[:, k] = -np.einsum("ij,jk,ik->i", d, st.inv_cov, d) + st.log_det
    return out


def _fit_state(points: np.ndarray, reg_lambda: float) -> GaussianState:
    mean = points.mean(axis=0)
    d = points - mean
    cov = (d.T @ d) / points.shape[0]
    cov = cov + reg_lambda * np.eye(cov.shape[0])
    try:
        inv_cov = np.linalg.inv(cov)
    except np.linalg.LinAlgError as exc:
        raise DegenerateCovarianceError(
            "regularized covariance is singular; increase reg_lambda"
        ) from exc
    inv_cov = (inv_cov + inv_cov.T) / 2.0
    sign, log_det = np.linalg.slogdet(inv_cov)
    if sign <= 0 or not np.isfinite(log_det):
        raise DegenerateCovarianceError(
            "regularized covariance is not positive definite"
        )
    return GaussianState(mean, inv_cov, float(log_det))


def update_states_model(
    ts: TimeSeries,
    assignment: StateAssignment,
    reg_lambda: float,
    beta: float = 0.0,
    prev_model: StateModel | None = None,
) -> StateModel:
    """Refit the per-state Gaussians from the current assignment.

    A state with no assigned measurements is reseeded from a contiguous
    window centered on the measurement that is worst explained by the
    current model, keeping K fixed. The window spans the current average
    segment length so the reseeded state can win segments against the
    switching penalty (a single-point reseed never survives Viterbi).
    """
    k_states = assignment.k_states
    labels = assignment.labels
    t_len = ts.t_len
    best_ll: np.ndarray | None = None
    taken = np.zeros(t_len, dtype=bool)
    n_runs = int(np.count_nonzero(labels[1:] != labels[:-1])) + 1
    window = max(3, t_len // max(1, n_runs))
    states = []
    for k in range(k_states):
        idx = np.flatnonzero(labels == k)
        if idx.size == 0:
            if best_ll is None:
                if prev_model is not None:
                    best_ll = log_likelihood_matrix(prev_model, ts).max(axis=1)
                else:
                    # No model yet: treat distance from the global mean as
                    # (negated) likelihood so the most extreme point reseeds.
                    best_ll = -np.square(ts.data - ts.data.mean(axis=0)).sum(axis=1)
            order = np.argsort(best_ll, kind="stable")
            center = next(
                (int(i) for i in order if not taken[i]), int(order[0])
            )
            lo = max(0, min(center - window // 2, t_len - window))
            idx = np.arange(lo, min(t_len, lo + window))
            taken[idx] = True
        states.append(_fit_state(ts.data[idx], reg_lambda))
    return StateModel(tuple(states), beta, reg_lambda)


def propose_assignment(model: StateModel, ts: TimeSeries) -> StateAssignment:
    """Viterbi-optimal labels for sum_i ll(x_i|S_i) - beta 1{S_{i-1} != S_i}.

    Ties prefer staying in the current state, then the lower state id; the
    final argmax prefers the lower state id.
    """
    ll = log_likelihood_matrix(model, ts)
    return _viterbi_from_ll(ll, model.beta, model.k_states)


def _viterbi_from_ll(ll: np.ndarray, beta: float, k_states: int) -> StateAssignment:
    t_len, k = ll.shape
    ptr = np.empty((t_len, k), dtype=np.int64)
    dp = ll[0].copy()
    arange_k = np.arange(k)
    for t in range(1, t_len):
        best = int(np.argmax(dp))  # argmax returns the lowest index on ties
        # Second best for switching out of the current best state.
        if k > 1:
            masked = dp.copy()
            masked[best] = -np.inf
            second = int(np.argmax(masked))
        else:
            second = best
        switch_val = np.full(k, dp[best] - beta)
        switch_idx = np.full(k, best)
        switch_val[best] = dp[second] - beta
        switch_idx[best] = second
        stay = dp
        take_stay = stay >= switch_val  # ties prefer staying put
        dp = ll[t] + np.where(take_stay, stay, switch_val)
        ptr[t] = np.where(take_stay, arange_k, switch_idx)
    labels = np.empty(t_len, dtype=np.int64)
    labels[-1] = int(np.argmax(dp))
    for t in range(t_len - 1, 0, -1):
        labels[t - 1] = ptr[t, labels[t]]
    return StateAssignment(labels, k_states)


def assignment_objective(
    model: StateModel, ts: TimeSeries, assignment: StateAssignment
) -> float:
    """Value of the non-motif objective for a given labeling."""
    ll = log_likelihood_matrix(model, ts)
    labels = assignment.labels
    total = float(ll[np.arange(ts.t_len), labels].sum())
    total -= model.beta * float(np.count_nonzero(labels[1:] != labels[:-1]))
    return total


def initialize(
    ts: TimeSeries, hp: Hyperparameters, max_rounds: int = 50, n_restarts: int = 5
) -> tuple[StateModel, StateAssignment]:
    """Seeded contiguous-block starts, alternating refit/propose to a fixed
    point (or the round cap); the best of n_restarts by objective wins.

    A single start regularly lands in local optima that merge two true
    states (or leave near-empty ones), which caps everything downstream,
    so we keep the best of a few seeded restarts instead.
    """
    t_len, k = ts.t_len, hp.k_states
    if t_len < k:
        raise ValueError("need at least K measurements to initialize K states")
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    block = -(-t_len // k)  # ceil(T / K)
    rng = np.random.default_rng(hp.seed)
    n_swap = int(0.1 * t_len)
    best: tuple[StateModel, StateAssignment] | None = None
    best_obj = -np.inf
    for _ in range(n_restarts):
        labels = np.repeat(np.arange(k), block)[:t_len]
        if n_swap > 0:
            pos = rng.choice(t_len, size=n_swap, replace=False)
            labels[pos] = rng.integers(0, k, size=n_swap)
        assignment = StateAssignment(labels, k)
        model = update_states_model(ts, assignment, hp.reg_lambda, hp.beta)
        for _ in range(max_rounds):
            proposed = propose_assignment(model, ts)
            if proposed == assignment:
                break
            assignment = proposed
            model = update_states_model(
                ts, assignment, hp.reg_lambda, hp.beta, prev_model=model
            )
        obj = assignment_objective(model, ts, assignment)
        if obj > best_obj:
            best_obj = obj
            best = (model, assignment)
    return best
