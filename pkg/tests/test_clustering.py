import itertools

import numpy as np
import pytest

from journeymap.clustering import (
    KMedoids,
    kmedoids,
    kmedoids_pp_init,
    silhouette,
    sweep,
)
from journeymap.distance import DistanceConfig, DistanceMatrix, StageWeights
from journeymap.errors import InvalidAssignment, InvalidK
from journeymap.ingestion import RawRecord, cleanse


def euclidean_matrix(points):
    pts = np.asarray(points, dtype=float)
    return np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))


def as_matrix(values):
    values = np.asarray(values, dtype=float)
    return DistanceMatrix(
        ids=tuple(str(i) for i in range(values.shape[0])),
        values=values,
        config=DistanceConfig(StageWeights(1, 1, 1)),
    )


def reference_silhouette(values, assignment):
    n = len(assignment)
    clusters = sorted(set(assignment))
    total = 0.0
    for i in range(n):
        own = [j for j in range(n) if assignment[j] == assignment[i]]
        if len(own) == 1:
            continue
        a = sum(values[i][j] for j in own if j != i) / (len(own) - 1)
        b = min(
            sum(values[i][j] for j in range(n) if assignment[j] == c)
            / sum(1 for j in range(n) if assignment[j] == c)
            for c in clusters
            if c != assignment[i]
        )
        if max(a, b) > 0:
            total += (b - a) / max(a, b)
    return total / n


class TestInit:
    def test_k_equals_n(self):
        m = euclidean_matrix([[0, 0], [1, 0], [2, 0], [5, 5]])
        chosen = kmedoids_pp_init(m, 4, seed=3)
        assert sorted(chosen) == [0, 1, 2, 3]

    def test_k_one_deterministic(self):
        m = euclidean_matrix([[0, 0], [1, 0], [2, 0]])
        a = kmedoids_pp_init(m, 1, seed=11)
        b = kmedoids_pp_init(m, 1, seed=11)
        assert a == b and len(a) == 1

    def test_far_point_forced_second(self):
        # two identical points plus one far point: squared-distance weights
        # give the duplicates probability zero once one of them is chosen
        m = euclidean_matrix([[0, 0], [0, 0], [100, 0]])
        for seed in range(20):
            chosen = kmedoids_pp_init(m, 2, seed=seed)
            assert 2 in chosen

    def test_invalid_k(self):
        m = euclidean_matrix([[0, 0], [1, 0]])
        with pytest.raises(InvalidK):
            kmedoids_pp_init(m, 0, seed=0)
        with pytest.raises(InvalidK):
            kmedoids_pp_init(m, 3, seed=0)


class TestKMedoids:
    def test_two_identical_groups(self):
        values = np.zeros((6, 6))
        for i in range(3):
            for j in range(3, 6):
                values[i, j] = values[j, i] = 5.0
        result = kmedoids(as_matrix(values), 2, seed=0)
        assert result.objective == 0.0
        groups = {tuple(sorted(i for i in range(6) if result.assignment[i] == c)) for c in range(2)}
        assert groups == {(0, 1, 2), (3, 4, 5)}

    def test_k1_matches_brute_force(self):
        rng = np.random.default_rng(5)
        values = euclidean_matrix(rng.normal(size=(12, 2)))
        result = kmedoids(as_matrix(values), 1, seed=0)
        best = min(range(12), key=lambda i: values[:, i].sum())
        assert values[:, result.medoid_indices[0]].sum() == pytest.approx(values[:, best].sum())

    def test_k_equals_n(self):
        values = euclidean_matrix([[0, 0], [1, 0], [2, 0], [3, 3]])
        result = kmedoids(as_matrix(values), 4, seed=0)
        assert result.objective == 0.0
        assert sorted(result.medoid_indices) == [0, 1, 2, 3]

    def test_swap_optimality(self):
        rng = np.random.default_rng(17)
        values = euclidean_matrix(rng.normal(size=(25, 2)))
        result = kmedoids(as_matrix(values), 4, seed=1)
        medoids = list(result.medoid_indices)
        base = result.objective
        for pos in range(4):
            for x in range(25):
                if x in medoids:
                    continue
                trial = medoids.copy()
                trial[pos] = x
                obj = sum(min(values[i, m] for m in trial) for i in range(25))
                assert obj >= base - 1e-9

    def test_objective_not_worse_than_init(self):
        rng = np.random.default_rng(2)
        values = euclidean_matrix(rng.normal(size=(30, 2)))
        init = kmedoids_pp_init(values, 3, seed=9)
        init_obj = sum(min(values[i, m] for m in init) for i in range(30))
        result = kmedoids(as_matrix(values), 3, seed=9)
        assert result.objective <= init_obj + 1e-12

    def test_determinism(self):
        rng = np.random.default_rng(3)
        values = euclidean_matrix(rng.normal(size=(20, 2)))
        r1 = kmedoids(as_matrix(values), 3, seed=42)
        r2 = kmedoids(as_matrix(values), 3, seed=42)
        assert r1 == r2

    def test_assignment_nearest_with_tie_rule(self):
        rng = np.random.default_rng(4)
        values = euclidean_matrix(rng.normal(size=(15, 2)))
        result = kmedoids(as_matrix(values), 3, seed=0)
        for i, c in enumerate(result.assignment):
            dists = [values[i, m] for m in result.medoid_indices]
            assert dists[c] == min(dists)

    def test_estimator_params(self):
        est = KMedoids(n_clusters=3, seed=7)
        assert est.get_params() == {"n_clusters": 3, "seed": 7}


class TestSilhouette:
    def test_two_identical_groups(self):
        values = np.zeros((4, 4))
        for i in range(2):
            for j in range(2, 4):
                values[i, j] = values[j, i] = 3.0
        assert silhouette(values, [0, 0, 1, 1]) == 1.0

    def test_hand_case(self):
        values = np.array([[0, 1, 4], [1, 0, 4], [4, 4, 0]], dtype=float)
        assert silhouette(values, [0, 0, 1]) == pytest.approx(0.5)

    def test_all_singletons(self):
        values = euclidean_matrix([[0, 0], [1, 0], [2, 0]])
        assert silhouette(values, [0, 1, 2]) == 0.0

    def test_single_cluster_invalid(self):
        values = euclidean_matrix([[0, 0], [1, 0]])
        with pytest.raises(InvalidAssignment):
            silhouette(values, [0, 0])

    def test_matches_reference_on_random_assignments(self):
        rng = np.random.default_rng(0)
        for trial in range(20):
            n = int(rng.integers(5, 25))
            values = euclidean_matrix(rng.normal(size=(n, 2)))
            assignment = rng.integers(0, 3, size=n)
            if len(set(assignment.tolist())) < 2:
                continue
            assert silhouette(values, assignment) == pytest.approx(
                reference_silhouette(values, assignment.tolist()), abs=1e-12
            )


class TestSweep:
    def test_single_cell(self, fixture_dataset):
        config = DistanceConfig(StageWeights(2, 1, 10))
        report = sweep(fixture_dataset, [config], [2], seed=0)
        assert report.silhouettes == ((report.result_for(config.label(), 2).silhouette,),)

    def test_prototypes_end_in_outcome(self, fixture_dataset):
        config = DistanceConfig(StageWeights(2, 1, 10))
        report = sweep(fixture_dataset, [config], [6], seed=0)
        result = report.result_for(config.label(), 6)
        for m in result.medoid_indices:
            assert fixture_dataset.journeys[m].canonical_items[-1] in {"1", "0"}

    def test_higher_outcome_weight_helps(self, fixture_dataset):
        heavy = DistanceConfig(StageWeights(2, 1, 10))
        flat = DistanceConfig(StageWeights(1, 1, 1))
        report = sweep(fixture_dataset, [heavy, flat], [2, 3, 4, 5, 6], seed=0)
        wins = sum(
            1
            for hi, fl in zip(report.silhouettes[0], report.silhouettes[1])
            if hi >= fl
        )
        assert wins >= 4

    def test_empty_grid(self, fixture_dataset):
        with pytest.raises(ValueError):
            sweep(fixture_dataset, [], [2])

    def test_text_table_shape(self, fixture_dataset):
        config = DistanceConfig(StageWeights(2, 1, 10))
        report = sweep(fixture_dataset, [config], list(range(2, 9)), seed=0)
        text = report.render_text()
        assert len(text.splitlines()) == 2
        assert "k=8" in text
