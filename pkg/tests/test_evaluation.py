import itertools

import numpy as np
import pytest

from morphoton.evaluation import (
    EvalResult,
    aggregate,
    edit_distance,
    evaluate,
    plot_series,
    read_results_csv,
    write_results_csv,
)


def brute_force_levenshtein(a, b):
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = a[0] != b[0]
    return min(
        brute_force_levenshtein(a[1:], b[1:]) + cost,
        brute_force_levenshtein(a[1:], b) + 1,
        brute_force_levenshtein(a, b[1:]) + 1,
    )


# --- edit distance ------------------------------------------------------------


def test_edit_distance_known_cases():
    assert edit_distance("", "") == 0
    assert edit_distance("abc", "abc") == 0
    assert edit_distance("abc", "abd") == 1
    assert edit_distance("kitten", "sitting") == 3
    assert edit_distance("", "abc") == 3


def test_edit_distance_matches_brute_force_exhaustively():
    alphabet = "abc"
    strings = [
        "".join(s)
        for n in range(5)
        for s in itertools.product(alphabet, repeat=n)
    ]
    for a in strings:
        for b in strings:
            assert edit_distance(a, b) == brute_force_levenshtein(a, b), (a, b)


def test_edit_distance_metric_axioms():
    rng = np.random.default_rng(0)

    def rand_str():
        return "".join(chr(97 + c) for c in rng.integers(0, 4, rng.integers(0, 8)))

    for _ in range(1000):
        a, b, c = rand_str(), rand_str(), rand_str()
        dab, dba = edit_distance(a, b), edit_distance(b, a)
        assert dab == dba  # symmetry
        assert dab >= 0 and (dab == 0) == (a == b)  # identity
        assert edit_distance(a, c) <= dab + edit_distance(b, c)  # triangle


def test_edit_distance_unicode():
    assert edit_distance("olad͡ʒak", "olad͡ʒak") == 0
    assert edit_distance("daː", "da") == 1


# --- evaluate -----------------------------------------------------------------


def test_evaluate_exact_match_and_distance():
    em, med = evaluate(["oldu", "gelir"], ["oldu", "geldi"])
    assert em == 0.5
    assert med == pytest.approx(edit_distance("gelir", "geldi") / 2)


def test_evaluate_validates_inputs():
    with pytest.raises(ValueError):
        evaluate(["a"], ["a", "b"])
    with pytest.raises(ValueError):
        evaluate([], [])


# --- EvalResult and CSV ----------------------------------------------------------


def result(**kw):
    base = dict(
        language="tr", pos="V", model="seq2seq", method="baseline",
        seed=0, train_size=1000, exact_match=0.5, mean_edit_distance=1.0, n_samples=100,
    )
    base.update(kw)
    return EvalResult(**base)


def test_eval_result_range_validation():
    with pytest.raises(ValueError):
        result(exact_match=1.5)
    with pytest.raises(ValueError):
        result(mean_edit_distance=-0.1)


def test_results_csv_roundtrip_and_append(tmp_path):
    path = tmp_path / "r.csv"
    rows = [result(seed=s) for s in range(3)]
    write_results_csv(rows[:2], path)
    write_results_csv(rows[2:], path, append=True)
    assert read_results_csv(path) == rows
    # header is written exactly once
    text = path.read_text(encoding="utf-8")
    assert text.count("language,pos,model") == 1


# --- aggregation -----------------------------------------------------------------


def test_aggregate_per_dataset_then_unweighted():
    # dataset A: seeds at 0.2/0.4 (mean 0.3), dataset B: single 0.9
    rows = [
        result(language="tr", exact_match=0.2, seed=0),
        result(language="tr", exact_match=0.4, seed=1),
        result(language="fi", exact_match=0.9, seed=0),
    ]
    agg = aggregate(rows)
    assert len(agg) == 1
    assert agg[0].exact_match_mean == pytest.approx((0.3 + 0.9) / 2)
    assert agg[0].n_datasets == 2 and agg[0].n_results == 3


def test_aggregate_grouping():
    rows = [
        result(method="baseline", exact_match=0.5),
        result(method="feat_seq", exact_match=0.7),
    ]
    agg = aggregate(rows, group_by=("method",))
    assert [a.group["method"] for a in agg] == ["baseline", "feat_seq"]


def test_aggregate_std_is_sample_std():
    rows = [result(exact_match=x, seed=i) for i, x in enumerate((0.2, 0.4))]
    agg = aggregate(rows)
    assert agg[0].exact_match_std == pytest.approx(np.std([0.2, 0.4], ddof=1))


def test_aggregate_empty_raises():
    with pytest.raises(ValueError):
        aggregate([])


SEQ2SEQ_BASELINE_TABLE = {
    ("bul", "ADJ"): 96.6,
    ("bul", "V"): 89.0,
    ("fin", "ADJ"): 94.2,
    ("fin", "N"): 82.3,
    ("fin", "V"): 88.1,
    ("hun", "V"): 90.9,
    ("kat", "N"): 90.2,
    ("kat", "V"): 42.2,
    ("lav", "N"): 88.4,
    ("lav", "V"): 76.5,
    ("sqi", "V"): 84.3,
    ("swc", "ADJ"): 66.7,
    ("swc", "V"): 90.9,
    ("tur", "ADJ"): 91.6,
    ("tur", "V"): 82.5,
}


def test_unweighted_average_over_fifteen_datasets():
    # regression fixture: 15 per-dataset accuracies must average to 83.6
    rows = [
        result(language=lang, pos=pos, exact_match=v / 100)
        for (lang, pos), v in SEQ2SEQ_BASELINE_TABLE.items()
    ]
    agg = aggregate(rows)
    assert agg[0].exact_match_mean * 100 == pytest.approx(83.6, abs=0.05)
    assert agg[0].n_datasets == 15


# --- plot series -------------------------------------------------------------------


def test_plot_series_sorted_points_with_std():
    rows = [
        result(train_size=2000, exact_match=0.6, seed=0),
        result(train_size=1000, exact_match=0.4, seed=0),
        result(train_size=1000, exact_match=0.5, seed=1),
    ]
    series = plot_series(rows)
    points = series[("tr", "V", "seq2seq", "baseline")]
    assert [p[0] for p in points] == [1000, 2000]
    assert points[0][1] == pytest.approx(0.45)
    assert points[0][2] == pytest.approx(np.std([0.4, 0.5], ddof=1))
