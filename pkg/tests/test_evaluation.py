import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.metrics import accuracy_score, precision_recall_fscore_support

from conftest import WINE_CSV
from lmphnn import Dataset, k_sensitivity, load_csv, run_sweep, stratified_split
from lmphnn.evaluation import (
    RUN_COLUMNS,
    ConfusionMatrix,
    confusion_matrix,
    macro_metrics,
    read_runs_csv,
    runs_to_csv,
    runs_to_jsonl,
)

labels = st.lists(st.sampled_from("ABC"), min_size=1, max_size=60)


def test_confusion_matrix_examples():
    assert confusion_matrix("AB", "AB", "AB").counts.tolist() == [[1, 0], [0, 1]]
    assert confusion_matrix("AA", "BB", "AB").counts.tolist() == [[0, 2], [0, 0]]


def test_confusion_matrix_matches_tally():
    rng = np.random.default_rng(4)
    true = rng.choice(list("xyz"), 50).tolist()
    pred = rng.choice(list("xyz"), 50).tolist()
    cm = confusion_matrix(true, pred, "xyz")
    tally = Counter(zip(true, pred))
    for i, a in enumerate("xyz"):
        for j, b in enumerate("xyz"):
            assert cm.counts[i, j] == tally[a, b]
    assert cm.total == 50


def test_confusion_matrix_errors():
    with pytest.raises(ValueError, match="length"):
        confusion_matrix("AB", "A", "AB")
    with pytest.raises(ValueError, match="unknown label"):
        confusion_matrix("AC", "AB", "AB")


def test_macro_metrics_perfect():
    rep = macro_metrics(confusion_matrix("AABB", "AABB", "AB"))
    assert (rep.accuracy, rep.precision, rep.recall, rep.f1) == (1.0, 1.0, 1.0, 1.0)


def test_macro_metrics_hand_computed():
    rep = macro_metrics(ConfusionMatrix(np.array([[1, 1], [0, 2]]), ("A", "B")))
    assert rep.accuracy == pytest.approx(0.75, abs=1e-12)
    assert rep.precision == pytest.approx(5 / 6, abs=1e-12)
    assert rep.recall == pytest.approx(0.75, abs=1e-12)
    # per-class F1: A = 2/3, B = 4/5
    assert rep.f1 == pytest.approx((2 / 3 + 4 / 5) / 2, abs=1e-12)
    assert rep.per_class["B"]["precision"] == pytest.approx(2 / 3, abs=1e-12)


def test_macro_metrics_single_predicted_class():
    rep = macro_metrics(confusion_matrix("AABB", "AAAA", "AB"))
    assert rep.accuracy == 0.5
    assert rep.recall == 0.5
    assert rep.per_class["B"] == {"precision": 0.0, "recall": 0.0, "f1": 0.0}


def test_macro_metrics_empty():
    with pytest.raises(ValueError):
        macro_metrics(ConfusionMatrix(np.zeros((2, 2), dtype=int), ("A", "B")))


@given(st.data())
def test_metrics_agree_with_sklearn(data):
    true = data.draw(labels)
    pred = data.draw(st.lists(st.sampled_from("ABC"), min_size=len(true), max_size=len(true)))
    rep = macro_metrics(confusion_matrix(true, pred, "ABC"))
    p, r, f, _ = precision_recall_fscore_support(
        true, pred, labels=list("ABC"), average="macro", zero_division=0
    )
    assert rep.accuracy == pytest.approx(accuracy_score(true, pred), abs=1e-12)
    assert rep.accuracy == pytest.approx(sum(a == b for a, b in zip(true, pred)) / len(true), abs=1e-12)
    assert (rep.precision, rep.recall, rep.f1) == pytest.approx((p, r, f), abs=1e-12)
    for v in (rep.accuracy, rep.precision, rep.recall, rep.f1):
        assert 0.0 <= v <= 1.0
    for cls in rep.per_class.values():
        assert cls["f1"] <= max(cls["precision"], cls["recall"]) + 1e-15
        assert (cls["f1"] == 0) == (cls["precision"] == 0 and cls["recall"] == 0)


def test_k_sensitivity_examples():
    assert k_sensitivity([0.7] * 9) == 0.0
    assert k_sensitivity([0.8, 0.9]) == pytest.approx(0.05, abs=1e-12)
    with pytest.raises(ValueError):
        k_sensitivity([0.5])


@given(
    st.lists(st.floats(0, 1), min_size=2, max_size=12),
    st.floats(-5, 5),
    st.floats(0.01, 100),
)
def test_k_sensitivity_translation_and_scale(series, shift, scale):
    base = k_sensitivity(series)
    assert k_sensitivity([v + shift for v in series]) == pytest.approx(base, abs=1e-9)
    assert k_sensitivity([v * scale for v in series]) == pytest.approx(base * scale, rel=1e-9, abs=1e-12)
    assert base == pytest.approx(float(np.std(series)), abs=1e-12)


# --------------------------------------------------------------------------
# sweeps


@pytest.fixture(scope="module")
def wine_split():
    ds = load_csv(WINE_CSV)
    return stratified_split(ds, 0.5, seed=1)


def test_sweep_covers_grid(wine_split):
    res = run_sweep(wine_split.train, wine_split.test, ["LMPHNN", "KNN"], range(2, 5), seed=1)
    assert set(res.reports) == {(kind, k) for kind in res.kinds for k in (2, 3, 4)}
    assert all(r.n_test == wine_split.test.n_samples for r in res.reports.values())
    assert len(res.series("LMPHNN")) == 3


def test_sweep_k1_matches_one_nn(wine_split):
    res = run_sweep(wine_split.train, wine_split.test, ["KNN", "LMKNN", "LMPHNN"], [1], seed=1)
    ref = res.reports["KNN", 1]
    assert res.reports["LMKNN", 1] == ref
    assert res.reports["LMPHNN", 1] == ref


def test_sweep_is_deterministic(wine_split):
    a = run_sweep(wine_split.train, wine_split.test, ["LMPHNN", "KNCN"], range(2, 4))
    b = run_sweep(wine_split.train, wine_split.test, ["LMPHNN", "KNCN"], range(2, 4))
    assert runs_to_csv(a.rows()) == runs_to_csv(b.rows())


def test_sweep_errors(wine_split):
    empty = wine_split.test.subset(np.array([], dtype=int))
    with pytest.raises(ValueError, match="empty"):
        run_sweep(wine_split.train, empty, ["LMPHNN"], [2])
    other = Dataset(np.zeros((2, 3)), ["1", "2"], ("1", "2"))
    with pytest.raises(ValueError, match="schema"):
        run_sweep(wine_split.train, other, ["LMPHNN"], [2])


def test_run_serialization_round_trip(tmp_path, wine_split):
    res = run_sweep(wine_split.train, wine_split.test, ["LMPNN"], [2, 3], seed=1)
    rows = res.rows()
    path = tmp_path / "runs.csv"
    path.write_text(runs_to_csv(rows))
    back = read_runs_csv(path)
    for a, b in zip(rows, back):
        for m in ("accuracy", "precision", "recall", "f1"):
            assert a[m] == b[m]
        assert (a["kind"], a["k"], a["seed"], a["n_test"]) == (b["kind"], b["k"], b["seed"], b["n_test"])
    lines = runs_to_jsonl(rows).splitlines()
    assert len(lines) == 2
    assert list(json.loads(lines[0])) == list(RUN_COLUMNS)


def test_timing_is_opt_in(wine_split):
    res = run_sweep(wine_split.train, wine_split.test, ["LMPNN"], [2])
    assert res.rows()[0]["runtime_ms"] is None
    assert res.rows(timing=True)[0]["runtime_ms"] > 0
