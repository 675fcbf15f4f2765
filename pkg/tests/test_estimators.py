import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from trilemma.decentralization import indices_of
from trilemma.estimators import DecentralizationIndices, RollingIndex
from trilemma.exceptions import NegativeValue, WindowTooLarge


def test_rows_match_functional_api(rng):
    X = rng.integers(0, 100, size=(20, 30)).astype(float)
    X[:, 0] += 1
    out = DecentralizationIndices().fit_transform(X)
    for row, got in zip(X, out):
        ref = indices_of(row)
        assert got.tolist() == [ref["shannon_entropy"], ref["gini"], ref["nakamoto"], ref["hhi"]]


def test_params_and_clone():
    est = DecentralizationIndices(threshold=0.66, indices=("hhi", "nakamoto"))
    assert est.get_params() == {"threshold": 0.66, "indices": ("hhi", "nakamoto")}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    out = est.fit_transform([[1, 1, 1]])
    assert out.tolist() == [[pytest.approx(1 / 3), 2.0]]
    assert est.get_feature_names_out().tolist() == ["hhi", "nakamoto"]


def test_validation():
    with pytest.raises(NegativeValue):
        DecentralizationIndices().fit([[1, -1]])
    with pytest.raises(ValueError):
        DecentralizationIndices(threshold=1.5).fit([[1, 1]])
    with pytest.raises(ValueError):
        DecentralizationIndices(indices=("theil",)).fit([[1, 1]])
    with pytest.raises(NotFittedError):
        DecentralizationIndices().transform([[1, 1]])
    est = DecentralizationIndices().fit([[1, 2, 3]])
    with pytest.raises(ValueError, match="features"):
        est.transform([[1, 2]])
    with pytest.raises(ValueError):
        est.transform([[1, np.nan, 2]])


def test_in_pipeline():
    pipe = make_pipeline(FunctionTransformer(np.abs), DecentralizationIndices(indices=("shannon",)))
    out = pipe.fit_transform(np.array([[-1.0, 1.0, -1.0, 1.0]]))
    assert out[0, 0] == pytest.approx(4.0)


def test_rolling_pads_with_nan():
    out = RollingIndex(window=3, index="gini").fit_transform(np.array([[5.0], [3.0], [2.0], [0.0]]))
    assert out.shape == (4, 1)
    assert np.isnan(out[:2, 0]).all()
    assert out[2, 0] == pytest.approx(0.62)
    assert out[3, 0] == pytest.approx(1 - (9 + 4) / 25)


def test_rolling_zero_window_is_nan():
    out = RollingIndex(window=2).fit_transform([0.0, 0.0, 1.0])
    assert np.isnan(out[1, 0]) and out[2, 0] == 1.0


def test_rolling_validation():
    with pytest.raises(WindowTooLarge):
        RollingIndex(window=5).fit([[1.0], [2.0]])
    with pytest.raises(ValueError):
        RollingIndex().fit(np.ones((10, 2)))
    assert RollingIndex(window=4, index="hhi").fit(np.ones(5)).get_feature_names_out().tolist() == ["hhi_w4"]
