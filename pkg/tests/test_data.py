import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boltzmann_classifier import data
from boltzmann_classifier.core import LabeledDataset
from boltzmann_classifier.exceptions import (DataError, InvalidInputError,
                                             ParameterError)


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_small_csv(tmp_path):
    p = write(tmp_path, "x,y,label\n1,2,a\n3,4,b\n5,6,a\n")
    ds = data.load_csv(data.DatasetSpec(p, "label"))
    assert ds.features.tolist() == [[1, 2], [3, 4], [5, 6]]
    assert ds.class_names == ("a", "b")
    assert ds.labels.tolist() == [0, 1, 0]
    assert ds.feature_names == ("x", "y")


def test_first_appearance_encoding_and_ignored(tmp_path):
    p = write(tmp_path, "id;label;f\n7;zeta;1.5\n8;alpha;2\n", )
    ds = data.load_csv(data.DatasetSpec(p, "label", ("id",), delimiter=";"))
    assert ds.class_names == ("zeta", "alpha")
    assert ds.feature_names == ("f",)


def test_headerless_by_index(tmp_path):
    p = write(tmp_path, "9,B,0.5,1\n10,M,0.25,2\n")
    ds = data.load_csv(data.DatasetSpec(p, 1, (0,), has_header=False))
    assert ds.features.tolist() == [[0.5, 1], [0.25, 2]]
    assert ds.feature_names == ("f2", "f3")


@pytest.mark.parametrize("cell, what", [("NaN", "invalid value"), ("", "missing value"),
                                        ("abc", "invalid value"), ("inf", "invalid value")])
def test_bad_cells_report_position(tmp_path, cell, what):
    p = write(tmp_path, f"x,y,label\n1,2,a\n3,{cell},b\n")
    with pytest.raises(DataError, match=rf"row 3, column 'y': {what}"):
        data.load_csv(data.DatasetSpec(p, "label"))


def test_ragged_row_and_missing_columns(tmp_path):
    p = write(tmp_path, "x,label\n1,a\n2\n")
    with pytest.raises(DataError, match=":3:"):
        data.load_csv(data.DatasetSpec(p, "label"))
    with pytest.raises(DataError, match="not found"):
        data.load_csv(data.DatasetSpec(write(tmp_path, "x,y\n1,2\n", "e.csv"), "label"))
    with pytest.raises(DataError, match="cannot read"):
        data.load_csv(data.DatasetSpec(tmp_path / "absent.csv", "label"))


def test_spec_label_not_ignored():
    with pytest.raises(InvalidInputError):
        data.DatasetSpec("x.csv", "label", ("label",))


def test_bcw_layout(bcw):
    assert bcw.features.shape == (569, 30)
    assert bcw.class_names == ("M", "B")
    assert bcw.class_counts().tolist() == [212, 357]
    assert bcw.feature_names[0] == "radius_mean"
    assert bcw.feature_names[-1] == "fractal_dimension_worst"


def test_load_feature_matrix(tmp_path):
    p = write(tmp_path, "id,b,a,label\n1,2.0,3.0,x\n2,4.0,5.0,y\n")
    X = data.load_feature_matrix(p, ("a", "b"))
    assert X.tolist() == [[3.0, 2.0], [5.0, 4.0]]
    with pytest.raises(DataError, match="missing feature"):
        data.load_feature_matrix(p, ("c",))


# -- folds -------------------------------------------------------------------

def test_balanced_folds_one_per_class():
    labels = np.array([0, 1] * 5)
    plan = data.stratified_folds(labels, 5, 42)
    for f in range(5):
        assert sorted(labels[plan.assignments == f].tolist()) == [0, 1]


def test_folds_deterministic():
    labels = np.random.default_rng(3).integers(0, 3, 200)
    a = data.stratified_folds(labels, 5, 7).assignments
    b = data.stratified_folds(labels, 5, 7).assignments
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, data.stratified_folds(labels, 5, 8).assignments)


def test_bcw_fold_sizes(bcw):
    # counting argument: M 212 = 5*42 + 2 -> folds 0,1 get 43; B 357 = 5*71 + 2
    # dealt from fold 2 -> folds 2,3 get 72; totals 114,114,114,114,113
    plan = data.stratified_folds(bcw.labels, 5, 42)
    sizes = np.bincount(plan.assignments, minlength=5)
    assert sizes.tolist() == [114, 114, 114, 114, 113]
    for f in range(5):
        in_fold = bcw.labels[plan.assignments == f]
        m = int((in_fold == 0).sum())
        assert abs(m - sizes[f] * 212 / 569) <= 1


def test_folds_errors():
    with pytest.raises(InvalidInputError, match="'rare'"):
        data.stratified_folds([0, 0, 0, 1], 3, 1, class_names=("common", "rare"))
    with pytest.raises(ParameterError):
        data.stratified_folds([0, 1], 1, 1)


@settings(max_examples=50)
@given(st.lists(st.integers(0, 3), min_size=8, max_size=120), st.integers(2, 6),
       st.integers(0, 2**63 - 1))
def test_fold_stratification_property(labels, k, seed):
    labels = np.array(labels)
    if np.bincount(labels)[np.unique(labels)].min() < k:
        return
    plan = data.stratified_folds(labels, k, seed)
    assert set(plan.assignments.tolist()) <= set(range(k))
    for c in np.unique(labels):
        counts = np.bincount(plan.assignments[labels == c], minlength=k)
        assert counts.max() - counts.min() <= 1
    seen = np.concatenate([test for _, test in plan.folds()])
    assert sorted(seen.tolist()) == list(range(len(labels)))


# -- hold-out ------------------------------------------------------------------

def _balanced(n):
    X = np.arange(n, dtype=float)[:, None]
    return LabeledDataset(X, np.arange(n) % 2, ("a", "b"), ("i",))


def test_split_80_20():
    train, test = data.split_train_test(_balanced(100), 0.2, 42)
    assert (train.n_samples, test.n_samples) == (80, 20)
    assert test.class_counts().tolist() == [10, 10]


def test_split_partition_and_determinism():
    ds = _balanced(57)
    train, test = data.split_train_test(ds, 0.3, 5)
    ids = sorted(train.features[:, 0].tolist() + test.features[:, 0].tolist())
    assert ids == list(range(57))
    again = data.split_train_test(ds, 0.3, 5)
    assert again[1].features.tobytes() == test.features.tobytes()


@pytest.mark.parametrize("frac", [0, 1, -0.1, 1.5])
def test_split_fraction_range(frac):
    with pytest.raises(ParameterError):
        data.split_train_test(_balanced(10), frac, 0)
