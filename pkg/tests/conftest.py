"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from masa.core import CollapsedSequence
from masa.state_model import GaussianState, StateModel


def random_model(k: int, n: int, beta: float, rng: np.random.Generator) -> StateModel:
    """A random well-conditioned StateModel for oracle tests."""
    states = []
    for _ in range(k):
        a = rng.normal(size=(n, n))
        cov = a @ a.T + 0.3 * np.eye(n)
        inv = np.linalg.inv(cov)
        inv = (inv + inv.T) / 2
        states.append(
            GaussianState(rng.normal(size=n), inv, float(np.linalg.slogdet(inv)[1]))
        )
    return StateModel(tuple(states), beta, 0.1)


def collapsed_from(symbols) -> CollapsedSequence:
    """CollapsedSequence with unit run lengths from a raw symbol list."""
    symbols = np.asarray(symbols)
    starts = np.arange(len(symbols))
    lengths = np.ones(len(symbols), dtype=int)
    return CollapsedSequence(symbols, starts, lengths)


def random_no_adjacent_dupes(rng: np.random.Generator, n: int, n_symbols: int = 4):
    """Random symbol sequence over n_symbols with no adjacent duplicates."""
    seq = [int(rng.integers(0, n_symbols))]
    for _ in range(n - 1):
        step = int(rng.integers(1, n_symbols))
        seq.append((seq[-1] + step) % n_symbols)
    return seq


@pytest.fixture
def rng():
    return np.random.default_rng(0)
