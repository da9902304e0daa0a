"""Per-motif time-varying HMM construction and Viterbi decoding."""

import numpy as np
import pytest

from conftest import random_model
from masa.core import Motif, MotifInstance, StateAssignment, TimeSeries
from masa.motif_hmm import (
    _emissions,
    build_motif_hmm,
    decode_instances,
    instances_from_path,
    path_score,
    viterbi_path,
)
from masa.state_model import log_likelihood_matrix, propose_assignment


def allowed_transition(a: int, b: int, r: int) -> bool:
    if a == 0:
        return b in (0, 1)
    if a == r:
        return b in (r, 0, 1)
    return b in (a, a + 1)


def enumerate_paths(r: int, t_len: int):
    """All valid hidden-state paths: start in {z_0, z_1}, end in {z_0, z_r}."""
    paths = [[0], [1]]
    for _ in range(t_len - 1):
        paths = [
            p + [b]
            for p in paths
            for b in range(r + 1)
            if allowed_transition(p[-1], b, r)
        ]
    return [p for p in paths if p[-1] in (0, r)]


class TestBuildMotifHmm:
    def test_hidden_state_count(self, rng):
        model = random_model(3, 2, 1.0, rng)
        base = StateAssignment(np.zeros(5, dtype=int), 3)
        hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, 0.8)
        assert hmm.n_hidden == 4

    def test_transition_edge_set(self):
        # motif [A,B,C]: self-loops on z_0..z_3, forward z_0->z_1->z_2->z_3,
        # and the closing edges z_3->{z_0, z_1}
        r = 3
        edges = {(a, b) for a in range(r + 1) for b in range(r + 1)
                 if allowed_transition(a, b, r)}
        expected = {(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3),
                    (3, 3), (3, 0), (3, 1)}
        assert edges == expected

    def test_rejects_bad_gamma(self, rng):
        model = random_model(3, 2, 1.0, rng)
        base = StateAssignment(np.zeros(5, dtype=int), 3)
        with pytest.raises(ValueError):
            build_motif_hmm(Motif((0, 1, 2)), model, base, 0.0)

    def test_rejects_out_of_range_motif_state(self, rng):
        model = random_model(2, 2, 1.0, rng)
        base = StateAssignment(np.zeros(5, dtype=int), 2)
        with pytest.raises(ValueError):
            build_motif_hmm(Motif((0, 1, 2)), model, base, 0.8)

    def test_gamma_one_z0_emission_equals_base_ll(self, rng):
        model = random_model(3, 2, 1.0, rng)
        ts = TimeSeries(rng.normal(size=(6, 2)))
        base = propose_assignment(model, ts)
        hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, 1.0)
        ll = log_likelihood_matrix(model, ts)
        em = _emissions(hmm, ll)
        np.testing.assert_allclose(
            em[:, 0], ll[np.arange(6), base.labels], atol=1e-12
        )

    def test_no_switches_means_free_z0_loop(self, rng):
        # with a constant base assignment, the all-z_0 path pays no
        # transition cost at all
        model = random_model(3, 2, 5.0, rng)
        ts = TimeSeries(rng.normal(size=(8, 2)))
        base = StateAssignment(np.zeros(8, dtype=int), 3)
        hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, 0.5)
        ll = log_likelihood_matrix(model, ts)
        em = _emissions(hmm, ll)
        path = np.zeros(8, dtype=int)
        assert path_score(hmm, ts, path) == pytest.approx(em[:, 0].sum())


class TestViterbiDecode:
    def test_gamma_one_decodes_all_z0(self, rng):
        for seed in range(20):
            local = np.random.default_rng(seed)
            model = random_model(3, 2, float(local.uniform(0, 5)), local)
            ts = TimeSeries(local.normal(size=(30, 2)))
            base = propose_assignment(model, ts)
            hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, 1.0)
            assert decode_instances(hmm, ts) == []

    def test_planted_clean_instance(self, rng):
        # strongly separated means; data follows the motif on [10, 22)
        means = [(0.0, 0.0), (30.0, 0.0), (0.0, 30.0), (30.0, 30.0)]
        from test_state_model import identity_model
        model = identity_model(4, 2, beta=2.0, means=means)
        data = np.tile(means[3], (30, 1)).astype(float)
        data[10:14] = means[0]
        data[14:18] = means[1]
        data[18:22] = means[2]
        data += rng.normal(scale=0.1, size=(30, 2))
        ts = TimeSeries(data)
        base = propose_assignment(model, ts)
        hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, 0.8)
        instances = decode_instances(hmm, ts)
        assert len(instances) == 1
        assert (instances[0].start, instances[0].end) == (10, 22)

    def test_matches_path_enumeration(self):
        # brute-force oracle with the implementation's tie-break key
        rng = np.random.default_rng(1)
        for _ in range(100):
            t_len = int(rng.integers(3, 9))
            model = random_model(3, 2, float(rng.uniform(0, 2)), rng)
            ts = TimeSeries(rng.normal(size=(t_len, 2)))
            base = propose_assignment(model, ts)
            gamma = float(rng.uniform(0.3, 1.0))
            hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, gamma)
            got = viterbi_path(hmm, ts)
            best = None
            for p in enumerate_paths(3, t_len):
                s = path_score(hmm, ts, np.array(p))
                key = (s, tuple(-x for x in reversed(p)))
                if best is None or key > best[0]:
                    best = (key, p)
            assert path_score(hmm, ts, got) == pytest.approx(best[0][0])
            assert list(got) == best[1]

    def test_chain_constraint_on_decoded_paths(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            t_len = int(rng.integers(5, 40))
            model = random_model(4, 2, float(rng.uniform(0, 3)), rng)
            ts = TimeSeries(rng.normal(size=(t_len, 2)))
            base = propose_assignment(model, ts)
            hmm = build_motif_hmm(Motif((0, 1, 2)), model, base,
                                  float(rng.uniform(0.2, 1.0)))
            path = viterbi_path(hmm, ts)
            assert path[0] in (0, 1)
            assert path[-1] in (0, 3)
            for a, b in zip(path[:-1], path[1:]):
                assert allowed_transition(int(a), int(b), 3)

    def test_instance_durations_all_positive(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            t_len = int(rng.integers(5, 40))
            model = random_model(4, 2, float(rng.uniform(0, 3)), rng)
            ts = TimeSeries(rng.normal(size=(t_len, 2)))
            base = propose_assignment(model, ts)
            hmm = build_motif_hmm(Motif((0, 1, 2)), model, base,
                                  float(rng.uniform(0.2, 1.0)))
            for inst in decode_instances(hmm, ts):
                assert all(d >= 1 for d in inst.per_state_durations)

    def test_gamma_monotonicity(self, rng):
        # coverage by motif states never increases as gamma rises
        model = random_model(3, 2, 1.0, rng)
        ts = TimeSeries(rng.normal(size=(100, 2)))
        base = propose_assignment(model, ts)
        coverage = []
        for gamma in (0.2, 0.4, 0.6, 0.8, 1.0):
            hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, gamma)
            path = viterbi_path(hmm, ts)
            coverage.append(int(np.count_nonzero(path > 0)))
        assert all(a >= b for a, b in zip(coverage, coverage[1:]))

    def test_decoded_beats_all_z0(self, rng):
        model = random_model(3, 2, 1.0, rng)
        ts = TimeSeries(rng.normal(size=(40, 2)))
        base = propose_assignment(model, ts)
        hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, 0.5)
        decoded = viterbi_path(hmm, ts)
        all_z0 = np.zeros(40, dtype=int)
        assert path_score(hmm, ts, decoded) >= path_score(hmm, ts, all_z0) - 1e-9

    def test_length_mismatch_rejected(self, rng):
        model = random_model(3, 2, 1.0, rng)
        base = StateAssignment(np.zeros(5, dtype=int), 3)
        hmm = build_motif_hmm(Motif((0, 1, 2)), model, base, 0.8)
        with pytest.raises(ValueError):
            viterbi_path(hmm, TimeSeries(rng.normal(size=(6, 2))))


class TestInstancesFromPath:
    def test_back_to_back_split(self):
        motif = Motif((0, 1, 2))
        # z_3 -> z_1 starts a second instance
        path = np.array([0, 1, 2, 3, 1, 2, 3, 0])
        instances = instances_from_path(motif, path)
        assert len(instances) == 2
        assert (instances[0].start, instances[0].end) == (1, 4)
        assert (instances[1].start, instances[1].end) == (4, 7)

    def test_durations_read_off_runs(self):
        motif = Motif((0, 1, 2))
        path = np.array([1, 1, 2, 3, 3, 3])
        (inst,) = instances_from_path(motif, path)
        assert inst.per_state_durations == (2, 1, 3)
        assert isinstance(inst, MotifInstance)

    def test_all_z0_no_instances(self):
        assert instances_from_path(Motif((0, 1, 2)), np.zeros(10, dtype=int)) == []
