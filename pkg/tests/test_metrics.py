import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import naive_asa, naive_boundary, naive_br, naive_co, naive_ue
from scalp.core import DimensionMismatch, EmptyGroundTruthBoundary, LabelMap
from scalp.metrics import (
    PrPoint,
    asa,
    average_boundary_map,
    boundary_recall,
    compactness,
    default_thresholds,
    evaluate,
    extract_boundaries,
    f_measure,
    max_f_measure,
    perimeters,
    pr_curve,
    scale_ladder,
    undersegmentation_error,
)


def halves(h, w, col):
    a = np.zeros((h, w), dtype=np.int32)
    a[:, col:] = 1
    return a


def test_left_right_split_marks_two_columns():
    b = extract_boundaries(halves(4, 4, 2))
    assert b.sum() == 8
    assert b[:, 1].all() and b[:, 2].all()


def test_single_odd_pixel_marks_itself_and_neighbors():
    a = np.zeros((5, 5), dtype=np.int32)
    a[2, 2] = 1
    b = extract_boundaries(a)
    assert b.sum() == 5
    assert b[2, 2] and b[1, 2] and b[3, 2] and b[2, 1] and b[2, 3]


def test_constant_map_has_no_boundary():
    assert not extract_boundaries(np.zeros((3, 4), dtype=np.int32)).any()


def test_br_strict_epsilon():
    s = np.zeros((6, 6), dtype=bool)
    g = np.zeros((6, 6), dtype=bool)
    s[:, 2] = True
    g[:, 4] = True
    assert boundary_recall(s, g, epsilon=2) == 0.0
    assert boundary_recall(s, g, epsilon=2.5) == 1.0


def test_br_empty_superpixel_boundary():
    g = np.zeros((4, 4), dtype=bool)
    g[:, 1] = True
    assert boundary_recall(np.zeros((4, 4), dtype=bool), g) == 0.0


def test_br_needs_ground_truth_boundary():
    with pytest.raises(EmptyGroundTruthBoundary):
        boundary_recall(np.ones((3, 3), dtype=bool), np.zeros((3, 3), dtype=bool))


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        asa(np.zeros((2, 2), dtype=int), np.zeros((2, 3), dtype=int))


def test_asa_and_ue_small_cases():
    g = np.array([[0, 0], [1, 1]])
    one = np.zeros((2, 2), dtype=int)
    assert asa(one, g) == 0.5
    assert undersegmentation_error(one, g) == 1.0
    s = np.array([[0, 0], [0, 1]])
    assert asa(s, g) == 0.75
    assert asa(g, g) == 1.0 and undersegmentation_error(g, g) == 0.0


def test_square_superpixels_have_co_pi_over_4():
    blocks = (np.arange(12)[:, None] // 4) * 3 + np.arange(12)[None, :] // 4
    assert compactness(blocks) == pytest.approx(math.pi / 4, abs=1e-12)
    assert compactness(np.zeros((1, 1), dtype=int)) == pytest.approx(math.pi / 4)
    assert perimeters(blocks).tolist() == [16] * 9


def test_evaluate_averages_over_ground_truths():
    s = halves(6, 6, 3)
    rep = evaluate(LabelMap(s, 2), [halves(6, 6, 3), halves(6, 6, 1)])
    assert len(rep.per_ground_truth) == 2
    assert rep.br == pytest.approx(np.mean([r["br"] for r in rep.per_ground_truth]))
    assert rep.per_ground_truth[0] == {"br": 1.0, "asa": 1.0, "ue": 0.0}
    assert set(rep.as_dict()) == {"br", "asa", "ue", "co"}


def test_average_boundary_map():
    m = average_boundary_map([halves(4, 4, 2), np.zeros((4, 4), dtype=int)])
    assert m.max() == 0.5 and m[:, 1].tolist() == [0.5] * 4 and m[:, 0].sum() == 0
    assert average_boundary_map([halves(4, 4, 2)] * 3).max() == 1.0


def test_thresholds_and_ladder():
    t = default_thresholds()
    assert len(t) == 99 and 0 < t[0] and t[-1] < 1
    ladder = scale_ladder()
    assert ladder == [6, 9, 14, 21, 32, 49, 74, 112, 171, 260, 395, 600]


def test_pr_perfect_and_empty_prediction():
    g = halves(8, 8, 4)
    conf = extract_boundaries(g).astype(float)
    pts = pr_curve(conf, [g], thresholds=[0.5])
    assert pts == [PrPoint(0.5, 1.0, 1.0)]
    pts = pr_curve(np.zeros((8, 8)), [g], thresholds=[0.5])
    assert pts == [PrPoint(0.5, 1.0, 0.0)]


def test_pr_precision_counts_far_pixels():
    g = halves(8, 8, 4)
    conf = extract_boundaries(g).astype(float)
    conf[:, 0] = 1.0  # 8 wrong pixels, 16 right ones
    (pt,) = pr_curve(conf, [g], thresholds=[0.5])
    assert pt.precision == pytest.approx(16 / 24) and pt.recall == 1.0


def test_f_measure():
    assert f_measure(0, 0) == 0.0
    assert f_measure(0.5, 0.5) == 0.5
    assert f_measure(1.0, 0.5) == pytest.approx(2 / 3)
    best, arg = max_f_measure([PrPoint(0.1, 0.2, 1.0), PrPoint(0.5, 0.8, 0.8), PrPoint(0.9, 1.0, 0.1)])
    assert best == pytest.approx(0.8) and arg.threshold == 0.5


label_maps = st.integers(1, 16).flatmap(
    lambda h: st.integers(1, 16).flatmap(
        lambda w: st.tuples(
            arrays(np.int32, (h, w), elements=st.integers(0, 4)),
            arrays(np.int32, (h, w), elements=st.integers(0, 3)),
        )
    )
)


@settings(max_examples=200, deadline=None)
@given(label_maps)
def test_metrics_match_naive_definitions(pair):
    s, g = pair
    assert np.array_equal(extract_boundaries(s), naive_boundary(s))
    assert abs(asa(s, g) - naive_asa(s, g)) <= 1e-12
    assert abs(undersegmentation_error(s, g) - naive_ue(s, g)) <= 1e-12
    assert abs(compactness(s) - naive_co(s)) <= 1e-12
    if naive_boundary(g).any():
        got = boundary_recall(extract_boundaries(s), extract_boundaries(g))
        assert abs(got - naive_br(s, g)) <= 1e-12
    assert (asa(s, g) == 1.0) == (undersegmentation_error(s, g) == 0.0)


@settings(max_examples=50, deadline=None)
@given(label_maps, st.floats(0.5, 4.0), st.floats(0.0, 3.0))
def test_br_monotone_in_epsilon(pair, eps, extra):
    s, g = pair
    sb, gb = extract_boundaries(s), extract_boundaries(g)
    if gb.any():
        assert boundary_recall(sb, gb, eps) <= boundary_recall(sb, gb, eps + extra)


@settings(max_examples=50, deadline=None)
@given(label_maps, st.randoms(use_true_random=False))
def test_relabel_invariance(pair, rnd):
    s, g = pair
    perm = np.arange(5)
    rnd.shuffle(perm)
    s2 = perm[s]
    assert asa(s2, g) == asa(s, g)
    assert undersegmentation_error(s2, g) == undersegmentation_error(s, g)
    assert compactness(s2) == pytest.approx(compactness(s), abs=1e-12)
    assert np.array_equal(extract_boundaries(s2), extract_boundaries(s))
