"""Core value types shared by all stages, plus run-length collapse/expand.

State ids are integers 0..K-1. Measurement indices are 0-based and all
intervals are half-open [start, end).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TimeSeries:
    """A T x N matrix of finite real measurements."""

    data: np.ndarray
    column_names: tuple[str, ...] | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError("time series data must be a 2-D array")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("time series must have T >= 1 and N >= 1")
        if not np.all(np.isfinite(data)):
            raise ValueError("time series contains non-finite values")
        object.__setattr__(self, "data", data)
        if self.column_names is not None:
            names = tuple(str(c) for c in self.column_names)
            if len(names) != data.shape[1]:
                raise ValueError("column_names length does not match N")
            object.__setattr__(self, "column_names", names)

    @property
    def t_len(self) -> int:
        return self.data.shape[0]

    @property
    def n_dims(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class StateAssignment:
    """A state id in [0, K) for each of T measurements."""

    labels: np.ndarray
    k_states: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size < 1:
            raise ValueError("labels must be a non-empty 1-D array")
        if self.k_states < 1:
            raise ValueError("k_states must be positive")
        if labels.min() < 0 or labels.max() >= self.k_states:
            raise ValueError("labels must lie in [0, k_states)")
        object.__setattr__(self, "labels", labels)

    @property
    def t_len(self) -> int:
        return self.labels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, StateAssignment):
            return NotImplemented
        return self.k_states == other.k_states and np.array_equal(
            self.labels, other.labels
        )


@dataclass(frozen=True)
class CollapsedSequence:
    """Run-length view of an assignment: adjacent duplicates merged."""

    symbols: np.ndarray
    run_starts: np.ndarray
    run_lengths: np.ndarray

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=np.int64)
        starts = np.asarray(self.run_starts, dtype=np.int64)
        lengths = np.asarray(self.run_lengths, dtype=np.int64)
        if not (symbols.shape == starts.shape == lengths.shape) or symbols.ndim != 1:
            raise ValueError("symbols, run_starts, run_lengths must be equal-length 1-D")
        if symbols.size < 1:
            raise ValueError("collapsed sequence must be non-empty")
        if np.any(symbols[1:] == symbols[:-1]):
            raise ValueError("adjacent collapsed symbols must differ")
        if np.any(lengths < 1):
            raise ValueError("run lengths must be positive")
        if np.any(np.diff(starts) <= 0):
            raise ValueError("run starts must be strictly increasing")
        expected = np.concatenate([[0], np.cumsum(lengths)[:-1]])
        if starts[0] != 0 or not np.array_equal(starts, expected):
            raise ValueError("run starts inconsistent with run lengths")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "run_starts", starts)
        object.__setattr__(self, "run_lengths", lengths)

    def __len__(self) -> int:
        return self.symbols.shape[0]

    @property
    def t_len(self) -> int:
        return int(self.run_lengths.sum())


@dataclass(frozen=True)
class Motif:
    """An ordered sequence of >= 3 state ids with no adjacent repeats."""

    states: tuple[int, ...]

    def __post_init__(self):
        states = tuple(int(s) for s in self.states)
        if len(states) < 3:
            raise ValueError("a motif must contain at least 3 states")
        if any(a == b for a, b in zip(states, states[1:])):
            raise ValueError("adjacent motif states must differ")
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class MotifInstance:
    """One realization of a motif over the half-open interval [start, end)."""

    motif: Motif
    start: int
    end: int
    per_state_durations: tuple[int, ...]
    score: float = 0.0

    def __post_init__(self):
        durations = tuple(int(d) for d in self.per_state_durations)
        if self.start < 0 or self.start >= self.end:
            raise ValueError("instance interval must satisfy 0 <= start < end")
        if len(durations) != len(self.motif):
            raise ValueError("one duration per motif state required")
        if any(d < 1 for d in durations):
            raise ValueError("all per-state durations must be >= 1")
        if sum(durations) != self.end - self.start:
            raise ValueError("durations must sum to the interval length")
        object.__setattr__(self, "per_state_durations", durations)

    def labels(self) -> np.ndarray:
        """Measurement-level labels over [start, end)."""
        return np.repeat(np.asarray(self.motif.states, dtype=np.int64),
                         self.per_state_durations)


@dataclass(frozen=True)
class MotifSet:
    """Accepted motifs with their locked instances; instances never overlap."""

    entries: tuple[tuple[Motif, tuple[MotifInstance, ...]], ...]
    total_score: float = 0.0
    motif_scores: tuple[float, ...] = ()

    def __post_init__(self):
        entries = tuple(
            (motif, tuple(instances)) for motif, instances in self.entries
        )
        if self.motif_scores and len(self.motif_scores) != len(entries):
            raise ValueError("one motif score per entry required")
        covered = []
        for motif, instances in entries:
            for inst in instances:
                if inst.motif != motif:
                    raise ValueError("instance attached to the wrong motif")
                covered.append((inst.start, inst.end))
        covered.sort()
        for (s0, e0), (s1, e1) in zip(covered, covered[1:]):
            if s1 < e0:
                raise ValueError("motif instances overlap")
        object.__setattr__(self, "entries", entries)

    @property
    def n_motifs(self) -> int:
        return len(self.entries)

    @property
    def n_instances(self) -> int:
        return sum(len(instances) for _, instances in self.entries)


@dataclass(frozen=True)
class Hyperparameters:
    """Algorithm hyperparameters; defaults follow the synthetic benchmark."""

    k_states: int = 10
    beta: float = 25.0
    gamma: float = 0.8
    min_instances: int = 10
    alpha: float = 0.001
    max_iters: int = 20
    seed: int = 0
    reg_lambda: float = 0.1

    def __post_init__(self):
        if self.k_states < 1:
            raise ValueError("k_states must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError("gamma must lie in (0, 1]")
        if self.min_instances < 2:
            raise ValueError("min_instances must be >= 2")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.reg_lambda < 0:
            raise ValueError("reg_lambda must be >= 0")


def collapse(assignment: StateAssignment) -> CollapsedSequence:
    """Run-length encode an assignment by merging adjacent duplicates."""
    labels = assignment.labels
    change = np.flatnonzero(labels[1:] != labels[:-1]) + 1
    starts = np.concatenate([[0], change])
    lengths = np.diff(np.concatenate([starts, [labels.shape[0]]]))
    return CollapsedSequence(labels[starts], starts, lengths)


def expand(collapsed: CollapsedSequence, k_states: int | None = None) -> StateAssignment:
    """Inverse of collapse: repeat each symbol by its run length."""
    labels = np.repeat(collapsed.symbols, collapsed.run_lengths)
    if k_states is None:
        k_states = int(collapsed.symbols.max()) + 1
    return StateAssignment(labels, k_states)
