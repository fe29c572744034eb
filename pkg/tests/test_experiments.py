import json

import numpy as np
import pytest

from rdepth.core import PointCloud
from rdepth.depth import max_depth
from rdepth.experiments import (
    ExperimentReport,
    NotSPD,
    breakdown_demo,
    consistency_experiment,
    halving_scatter,
    ordering_experiment,
    proportion,
    sample_elliptical,
    subset_count_experiment,
)


def test_halving_scatter():
    assert np.array_equal(halving_scatter(3), [[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1]])


def test_normal_mean():
    n = 20000
    c = sample_elliptical("normal", n, 3, seed=1)
    assert np.all(np.abs(c.points.mean(axis=0)) <= 4 / np.sqrt(n))


def test_cauchy_median():
    n = 20000
    c = sample_elliptical("cauchy", n, 2, halving_scatter(2), seed=2)
    assert np.all(np.abs(np.median(c.points, axis=0)) <= 5 / np.sqrt(n))


def test_normal_covariance():
    c = sample_elliptical("normal", 100_000, 2, halving_scatter(2), seed=3)
    assert np.allclose(np.cov(c.points.T), [[1, 0.5], [0.5, 1]], rtol=0.1, atol=0.02)


def test_not_spd():
    with pytest.raises(NotSPD):
        sample_elliptical("normal", 10, 2, [[1, 2], [2, 1]])
    with pytest.raises(NotSPD):
        sample_elliptical("normal", 10, 2, [[1, 0.1], [0.2, 1]])


def test_sampler_reproducible():
    a = sample_elliptical("cauchy", 50, 2, seed=9).points
    assert np.array_equal(a, sample_elliptical("cauchy", 50, 2, seed=9).points)


def test_proportion_interval():
    e = proportion(30, 100)
    assert e["value"] == 0.3
    assert e["ci_high"] - e["value"] == pytest.approx(1.96 * np.sqrt(0.3 * 0.7 / 100))


def test_ordering_report_valid_and_reproducible():
    a = ordering_experiment(d=2, n=30, delta=0.1, replicates=40, seed=5)
    b = ordering_experiment(d=2, n=30, delta=0.1, replicates=40, seed=5)
    assert a.to_json() == b.to_json()
    for e in a.estimates.values():
        assert 0 <= e["ci_low"] <= e["value"] <= e["ci_high"] <= 1


def test_ordering_thread_count_does_not_matter():
    a = ordering_experiment(n=20, replicates=12, seed=3, threads=1)
    b = ordering_experiment(n=20, replicates=12, seed=3, threads=4)
    assert a.to_json() == b.to_json()


def test_ordering_ties_more_likely_in_high_dimension():
    lo = ordering_experiment(d=2, n=10, replicates=150, seed=1, n_directions=200)
    hi = ordering_experiment(d=10, n=10, replicates=150, seed=1, n_directions=200)
    assert hi.estimates["tie_probability"]["value"] > lo.estimates["tie_probability"]["value"]


def test_ordering_needs_positive_delta():
    with pytest.raises(ValueError):
        ordering_experiment(delta=0.0, replicates=1)


def test_breakdown_bounds():
    rng = np.random.default_rng(4)
    cloud = PointCloud(rng.standard_normal((40, 2)))
    m = 4
    for t in (1.0, 10.0, 1e3):
        r = breakdown_demo(cloud, 0.1, m, t, u=[1, 0], seed=1, n_directions=360)
        atom = r.estimates["depth_at_atom"]
        assert atom["value"] >= atom["lower_bound"] - 1e-12
        center = r.estimates["depth_at_center"]
        assert center["value"] >= center["lower_bound"] - 1e-12


def test_breakdown_limit():
    rng = np.random.default_rng(5)
    cloud = PointCloud(rng.standard_normal((40, 2)))
    diam = np.ptp(cloud.points, axis=0).max() * 2
    r = breakdown_demo(cloud, 0.1, 4, 1e4 * diam, u=[0, 1], n_directions=360)
    assert abs(r.estimates["depth_at_atom"]["value"] - 4 / 44) <= 0.01


def test_consistency_small():
    r = consistency_experiment(n_values=[200, 5000], delta=0.1, seed=2)
    assert r.estimates["n=5000"]["abs_error"] <= 0.03
    assert r.estimates["closed_form"]["value"] == pytest.approx(0.776281, abs=1e-6)


def test_consistency_zero_delta():
    r = consistency_experiment(n_values=[5000], delta=0.0, seed=3)
    assert abs(r.estimates["n=5000"]["value"] - 0.5) <= 0.03


@pytest.mark.slow
def test_consistency_errors_shrink_on_average():
    errs = np.array([[consistency_experiment(n_values=[n], seed=s, n_directions=360)
                      .estimates[f"n={n}"]["abs_error"] for n in (50, 500, 5000)] for s in range(20)])
    means = errs.mean(axis=0)
    assert means[0] >= means[1] >= means[2]


def test_subset_counts_bounded():
    r = subset_count_experiment(correlation=0.0, replicates=30, seed=1)
    assert r.estimates["max_count"]["value"] <= 200
    assert r.parameters["z"] == [0.0, 0.0]


def test_report_text_and_json():
    r = ExperimentReport("x", {"n": 3}, {"p": proportion(1, 4)}, wall_seconds=1.5)
    d = json.loads(r.to_json())
    assert d["estimates"]["p"]["value"] == 0.25 and "wall_seconds" not in d
    assert json.loads(r.to_json(timing=True))["wall_seconds"] == 1.5
    text = r.to_text()
    assert text.splitlines()[0] == "experiment  x" and "0.25" in text
