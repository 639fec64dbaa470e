import math
import os

import numpy as np
import pytest

import bernmar


def test_pipeline_on_generated_data():
    data = bernmar.generate(300, seed=1)
    assert len(data) == 300
    assert 0.6 < data.observed_fraction < 0.9
    curve, degree = bernmar.estimate_cdf(data)
    assert 1 <= degree <= 300
    ys = np.linspace(0.0, 1.0, 101)
    values = curve(ys)
    assert values.shape == ys.shape
    assert np.all(np.diff(values) >= 0.0)
    assert values[0] == 0.0
    assert values[-1] == pytest.approx(1.0, abs=1e-12)


def test_dataset_from_arrays_and_known_propensity():
    y = np.array([0.1, np.nan, 0.5, 0.9])
    x = np.array([0, 0, 1, 1])
    data = bernmar.Dataset(y, x)
    assert data.observed_count == 3
    est = bernmar.estimate_propensity(data)
    assert est.probability(0) == 0.5
    ecdf = bernmar.ipw_ecdf(data, est)
    assert ecdf(1.0) == pytest.approx(1.0, abs=1e-15)
    known = bernmar.known_propensity({0: 0.5, 1: 1.0})
    assert known.known
    assert bernmar.ipw_ecdf(data, known)(0.2) == pytest.approx(0.5)


def test_unobserved_cell_raises():
    data = bernmar.Dataset(np.array([0.3, np.nan]), np.array([0, 1]))
    with pytest.raises(bernmar.EstimationError):
        bernmar.estimate_propensity(data)


def test_bernstein_reproduces_linear_functions():
    curve = bernmar.BernsteinCdf([k / 10 for k in range(11)])
    assert curve(0.37) == pytest.approx(0.37, abs=1e-14)
    assert bernmar.bernstein_basis(1, 1, 0.25) == 0.25


def test_kde_and_bandwidth_selection():
    data = bernmar.generate(200, seed=2)
    ecdf = bernmar.ipw_ecdf(data, bernmar.estimate_propensity(data))
    trace = bernmar.select_bandwidth(ecdf)
    assert 1e-3 <= trace.selected <= 1.0
    kde = bernmar.IntegratedKde(ecdf, trace.selected, bernmar.KdeNormalization.total_weight)
    assert kde(10.0) == pytest.approx(1.0, abs=1e-12)


def test_theory_values():
    model = bernmar.theory_model("beta25-mar")
    assert bernmar.bias_leading(model, 0.5) == pytest.approx(-0.703125)
    assert bernmar.m_opt_pointwise(model, 0.5, 1000) == pytest.approx(307.18, rel=1e-4)
    with pytest.raises(Exception):
        bernmar.m_opt_pointwise(bernmar.theory_model("uniform"), 0.5, 1000)


def test_simulate_is_reproducible():
    a = bernmar.simulate([30], reps=2, seed=4, roster="feasible-all")
    b = bernmar.simulate([30], reps=2, seed=4, roster="feasible-all")
    assert a == b
    assert [row["estimator"] for row in a] == ["feasible-unsmoothed", "feasible-bernstein", "feasible-kde"]
    assert all(math.isfinite(row["mean_ise"]) or row["successes"] == 0 for row in a)


def test_read_csv_fixture():
    path = os.path.join(os.environ.get("BERNMAR_TEST_DATA_DIR", "tests/data"), "nhanes_fixture.csv")
    data = bernmar.read_csv(path, y_col="LBXGLU", x_cols=["RIDEXMON", "RIAGENDR"], rescale=(40.0, 460.0))
    assert len(data) == 3036
    assert len(data.cells) == 4
