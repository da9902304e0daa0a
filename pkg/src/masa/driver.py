"""EM-style driver: initialize, then alternate motif-aware E-steps with
state-model refits until the assignment stabilizes."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .candidates import empirical_state_probs, generate_candidates
from .core import (
    Hyperparameters,
    MotifSet,
    StateAssignment,
    TimeSeries,
    collapse,
)
from .motif_hmm import build_motif_hmm, decode_instances
from .scoring import greedy_assign, score_instances
from .state_model import (
    StateModel,
    initialize,
    log_likelihood_matrix,
    propose_assignment,
    update_states_model,
)


@dataclass(frozen=True)
class MasaResult:
    assignment: StateAssignment
    motifs: MotifSet
    model: StateModel
    iterations: int
    converged: bool
    history: tuple[dict, ...] = field(default_factory=tuple)


def check_convergence(
    model: StateModel, ts: TimeSeries, e_step_assignment: StateAssignment
) -> bool:
    """Converged when re-proposing from the refit model reproduces the
    E-step assignment exactly."""
    return propose_assignment(model, ts) == e_step_assignment


def _objective_components(
    model: StateModel, ts: TimeSeries, assignment: StateAssignment
) -> dict:
    ll = log_likelihood_matrix(model, ts)
    labels = assignment.labels
    return {
        "log_likelihood": float(ll[np.arange(ts.t_len), labels].sum()),
        "switches": int(np.count_nonzero(labels[1:] != labels[:-1])),
    }


def run_iteration(
    model: StateModel,
    ts: TimeSeries,
    hp: Hyperparameters,
    candidate_cap: int | None = 25,
    length_sort: str = "increasing",
) -> tuple[StateAssignment, MotifSet, StateModel, dict]:
    """One full E-step (candidates, decode, score, assign) plus M-step."""
    base = propose_assignment(model, ts)
    s_prime = collapse(base)
    cands = generate_candidates(s_prime, hp, candidate_cap, length_sort)
    ll = log_likelihood_matrix(model, ts)
    if cands:
        hmms = [build_motif_hmm(m, model, base, hp.gamma) for m in cands]
        with ThreadPoolExecutor(max_workers=min(8, len(hmms))) as pool:
            decoded = list(pool.map(lambda h: decode_instances(h, ts, ll), hmms))
        scored = score_instances(
            decoded, cands, model, ts, base,
            empirical_state_probs(s_prime), len(s_prime), ll=ll,
        )
    else:
        decoded = []
        scored = []
    assignment, mset = greedy_assign(scored, base, hp.min_instances)
    new_model = update_states_model(
        ts, assignment, hp.reg_lambda, hp.beta, prev_model=model
    )
    diag = {
        "n_candidates": len(cands),
        "n_decoded_instances": sum(len(d) for d in decoded),
        "n_motifs": mset.n_motifs,
        "n_locked_instances": mset.n_instances,
        "motif_score_total": mset.total_score,
    }
    diag.update(_objective_components(new_model, ts, assignment))
    return assignment, mset, new_model, diag


def run_masa(
    ts: TimeSeries,
    hp: Hyperparameters,
    candidate_cap: int | None = 25,
    length_sort: str = "increasing",
) -> MasaResult:
    """Full MASA loop; terminates on convergence, an assignment cycle, or
    the iteration cap."""
    if ts.t_len < hp.k_states:
        raise ValueError("need T >= K")
    model, _ = initialize(ts, hp)
    history = []
    seen: set[bytes] = set()
    assignment = None
    mset = MotifSet(())
    converged = False
    iterations = 0
    for _ in range(hp.max_iters):
        start = time.perf_counter()
        assignment, mset, model, diag = run_iteration(
            model, ts, hp, candidate_cap, length_sort
        )
        iterations += 1
        diag["seconds"] = time.perf_counter() - start
        history.append(diag)
        if check_convergence(model, ts, assignment):
            converged = True
            break
        key = assignment.labels.tobytes()
        if key in seen:
            # oscillation guard: this assignment already occurred
            break
        seen.add(key)
    return MasaResult(assignment, mset, model, iterations, converged, tuple(history))
