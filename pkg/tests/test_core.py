"""Core types and run-length collapse/expand."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masa.core import (
    CollapsedSequence,
    Hyperparameters,
    Motif,
    MotifInstance,
    MotifSet,
    StateAssignment,
    TimeSeries,
    collapse,
    expand,
)


class TestTimeSeries:
    def test_basic(self):
        ts = TimeSeries(np.zeros((3, 2)), ("a", "b"))
        assert ts.t_len == 3 and ts.n_dims == 2
        assert ts.column_names == ("a", "b")

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            TimeSeries(np.array([[0.0, np.nan]]))

    def test_rejects_wrong_names(self):
        with pytest.raises(ValueError):
            TimeSeries(np.zeros((2, 2)), ("only-one",))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            TimeSeries(np.zeros((0, 2)))


class TestStateAssignment:
    def test_label_range_enforced(self):
        with pytest.raises(ValueError):
            StateAssignment(np.array([0, 3]), 3)  # ok
            StateAssignment(np.array([0, 3]), 2)

    def test_equality_is_elementwise(self):
        a = StateAssignment(np.array([0, 1, 1]), 2)
        b = StateAssignment(np.array([0, 1, 1]), 2)
        c = StateAssignment(np.array([0, 1, 0]), 2)
        assert a == b and a != c


class TestCollapse:
    def test_paper_example(self):
        # [A,A,B,B,B,B,C,C,C,C] -> symbols [A,B,C], run lengths [2,4,4]
        a = StateAssignment(np.array([0, 0, 1, 1, 1, 1, 2, 2, 2, 2]), 3)
        c = collapse(a)
        assert list(c.symbols) == [0, 1, 2]
        assert list(c.run_lengths) == [2, 4, 4]
        assert list(c.run_starts) == [0, 2, 6]

    def test_singleton(self):
        c = collapse(StateAssignment(np.array([0]), 1))
        assert list(c.symbols) == [0] and list(c.run_lengths) == [1]

    def test_identity_when_no_adjacent_duplicates(self):
        a = StateAssignment(np.array([0, 1, 0, 1]), 2)
        c = collapse(a)
        assert list(c.symbols) == [0, 1, 0, 1]
        assert list(c.run_lengths) == [1, 1, 1, 1]

    def test_expand_paper_example(self):
        c = CollapsedSequence(np.array([0, 1, 2]), np.array([0, 2, 6]),
                              np.array([2, 4, 4]))
        assert list(expand(c).labels) == [0, 0, 1, 1, 1, 1, 2, 2, 2, 2]

    def test_expand_single_symbol(self):
        c = CollapsedSequence(np.array([0]), np.array([0]), np.array([3]))
        assert list(expand(c).labels) == [0, 0, 0]

    def test_rejects_zero_run_length(self):
        with pytest.raises(ValueError):
            CollapsedSequence(np.array([0, 1]), np.array([0, 0]), np.array([0, 2]))

    def test_rejects_adjacent_duplicate_symbols(self):
        with pytest.raises(ValueError):
            CollapsedSequence(np.array([0, 0]), np.array([0, 1]), np.array([1, 1]))

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 4), min_size=1, max_size=100))
    def test_roundtrip_property(self, labels):
        a = StateAssignment(np.array(labels), 5)
        c = collapse(a)
        assert np.all(c.symbols[1:] != c.symbols[:-1])
        assert int(c.run_lengths.sum()) == a.t_len
        assert expand(c, 5) == a

    def test_roundtrip_many_random(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            labels = rng.integers(0, 4, size=rng.integers(1, 50))
            a = StateAssignment(labels, 4)
            assert expand(collapse(a), 4) == a


class TestMotifTypes:
    def test_motif_min_length(self):
        with pytest.raises(ValueError):
            Motif((0, 1))

    def test_motif_adjacent_differ(self):
        with pytest.raises(ValueError):
            Motif((0, 0, 1))

    def test_instance_labels(self):
        inst = MotifInstance(Motif((0, 1, 2)), 5, 10, (2, 2, 1))
        assert list(inst.labels()) == [0, 0, 1, 1, 2]

    def test_instance_duration_sum_checked(self):
        with pytest.raises(ValueError):
            MotifInstance(Motif((0, 1, 2)), 0, 4, (1, 1, 1))

    def test_instance_positive_durations(self):
        with pytest.raises(ValueError):
            MotifInstance(Motif((0, 1, 2)), 0, 3, (1, 2, 0))

    def test_motifset_rejects_overlap(self):
        m = Motif((0, 1, 2))
        i1 = MotifInstance(m, 0, 3, (1, 1, 1))
        i2 = MotifInstance(m, 2, 5, (1, 1, 1))
        with pytest.raises(ValueError):
            MotifSet(((m, (i1, i2)),))

    def test_motifset_nonoverlap_ok(self):
        m = Motif((0, 1, 2))
        i1 = MotifInstance(m, 0, 3, (1, 1, 1))
        i2 = MotifInstance(m, 3, 6, (1, 1, 1))
        ms = MotifSet(((m, (i1, i2)),))
        assert ms.n_motifs == 1 and ms.n_instances == 2


class TestHyperparameters:
    def test_defaults_valid(self):
        hp = Hyperparameters()
        assert hp.k_states == 10 and hp.beta == 25.0 and hp.gamma == 0.8
        assert hp.min_instances == 10 and hp.alpha == 0.001

    @pytest.mark.parametrize("kw", [
        dict(k_states=0),
        dict(beta=-1.0),
        dict(gamma=0.0),
        dict(gamma=1.5),
        dict(min_instances=1),
        dict(alpha=0.0),
        dict(alpha=1.0),
        dict(max_iters=0),
        dict(reg_lambda=-0.1),
    ])
    def test_range_validation(self, kw):
        with pytest.raises(ValueError):
            Hyperparameters(**kw)
