import numpy as np
import pytest

from ganprint.attribution import (
    ScoreSet,
    attribute,
    confusion,
    corr,
    correlation_matrix,
    mann_whitney_auc,
    render_confusion,
    roc,
    score_against,
)
from ganprint.errors import (
    EmptyClassError,
    EmptyFingerprintListError,
    EmptySetError,
    LengthMismatchError,
    ShapeMismatchError,
    UnknownLabelError,
)
from ganprint.fingerprint import Fingerprint

from conftest import DUMMY_HASH, make_residual


def fp_from(planes, label="f"):
    return Fingerprint(planes=np.asarray(planes, dtype=np.float64),
                       n_residuals=1, source_label=label,
                       denoiser_hash=DUMMY_HASH)


def test_corr_self_and_negation():
    v = np.array([1.0, -2.0, 3.0, 0.5])
    assert corr(v, v) == pytest.approx(1.0, abs=1e-12)
    assert corr(v, -v) == pytest.approx(-1.0, abs=1e-12)


def test_corr_hand_example():
    # centered [-1.5,-.5,.5,1.5] vs [-1.5,.5,-.5,1.5]: 4/5
    assert corr(np.array([1.0, 2, 3, 4]), np.array([1.0, 3, 2, 4])) == \
        pytest.approx(0.8, abs=1e-12)


def test_corr_affine_invariance():
    rng = np.random.default_rng(20)
    x = rng.normal(size=300)
    y = rng.normal(size=300)
    base = corr(x, y)
    for _ in range(10):
        a = rng.uniform(0.1, 50.0)
        b = rng.uniform(-20.0, 20.0)
        assert corr(a * x + b, y) == pytest.approx(base, abs=1e-7)


def test_corr_length_mismatch():
    with pytest.raises(LengthMismatchError):
        corr(np.zeros(3), np.zeros(4))


def test_score_against_identical_residual():
    rng = np.random.default_rng(21)
    planes = rng.normal(size=(8, 8, 1))
    fp = fp_from(planes, "same")
    scores = score_against([make_residual(planes, "r0")], fp)
    assert len(scores) == 1
    assert scores[0].value == pytest.approx(1.0, abs=1e-6)
    assert scores[0].residual_id == "r0"
    assert scores[0].fingerprint_label == "same"


def test_score_against_shape_mismatch():
    fp = fp_from(np.random.default_rng(0).normal(size=(4, 4, 1)))
    with pytest.raises(ShapeMismatchError):
        score_against([make_residual(np.ones((4, 5, 1)))], fp)


def test_correlation_matrix_block_structure():
    rng = np.random.default_rng(22)
    fa = rng.normal(size=(16, 16, 1))
    fb = rng.normal(size=(16, 16, 1))
    sets = {
        "a": [make_residual(fa + 0.1 * rng.normal(size=fa.shape)) for _ in range(4)],
        "b": [make_residual(fb + 0.1 * rng.normal(size=fb.shape)) for _ in range(4)],
    }
    fps = {"a": fp_from(fa, "a"), "b": fp_from(fb, "b")}
    m = correlation_matrix(sets, fps)
    assert m.row_labels == ["a", "b"] and m.col_labels == ["a", "b"]
    assert m.values[0, 0] > 0.9 and m.values[1, 1] > 0.9
    assert abs(m.values[0, 1]) < 0.3 and abs(m.values[1, 0]) < 0.3


def test_correlation_matrix_rejects_empty_set():
    with pytest.raises(EmptySetError):
        correlation_matrix({"a": []}, {"a": fp_from(np.zeros((2, 2, 1)))})


def test_attribute_picks_highest_correlation():
    rng = np.random.default_rng(23)
    fa, fb, fc = (rng.normal(size=(16, 16, 1)) for _ in range(3))
    res = make_residual(fb + 0.2 * rng.normal(size=fb.shape), "x")
    out = attribute(res, [fp_from(fa, "a"), fp_from(fb, "b"), fp_from(fc, "c")])
    assert out.label == "b"
    assert not out.tied
    assert [s.fingerprint_label for s in out.scores] == ["a", "b", "c"]


def test_attribute_max_corr_equals_min_distance():
    # after zero-mean unit-norm: ||x-y||^2 = 2 - 2 corr(x,y)
    rng = np.random.default_rng(24)
    for _ in range(50):
        res = make_residual(rng.normal(size=(6, 6, 1)), "x")
        fps = [fp_from(rng.normal(size=(6, 6, 1)), f"f{i}") for i in range(4)]
        out = attribute(res, fps)

        def zmun(a):
            v = a.astype(np.float64).ravel()
            v = v - v.mean()
            return v / np.linalg.norm(v)

        dists = [np.linalg.norm(zmun(res.planes) - zmun(fp.planes)) for fp in fps]
        assert fps[int(np.argmin(dists))].source_label == out.label


def test_attribute_scale_invariance():
    rng = np.random.default_rng(25)
    res = make_residual(rng.normal(size=(8, 8, 1)), "x")
    fps = [fp_from(rng.normal(size=(8, 8, 1)), f"f{i}") for i in range(3)]
    scaled = [fp_from(7.5 * fp.planes + 2.0, fp.source_label) for fp in fps]
    assert attribute(res, fps).label == attribute(res, scaled).label


def test_attribute_flags_ties():
    planes = np.zeros((2, 2, 1))
    planes[0, 0, 0] = 1.0
    res = make_residual(planes, "x")
    fps = [fp_from(planes, "a"), fp_from(planes, "b")]
    out = attribute(res, fps)
    assert out.tied and out.label == "a"  # first in input order wins
    with pytest.raises(EmptyFingerprintListError):
        attribute(res, [])


def test_roc_perfect_separation():
    curve = roc(ScoreSet(positives=[0.8, 0.9], negatives=[0.1, 0.2]))
    assert curve.auc == pytest.approx(1.0)
    assert curve.points[0] == (0.0, 0.0) and curve.points[-1] == (1.0, 1.0)


def test_roc_identical_classes():
    assert roc(ScoreSet([0.0, 1.0], [0.0, 1.0])).auc == pytest.approx(0.5)


def test_roc_hand_computed():
    # pairs: 2>1, 2<3, 4>1, 4>3 -> 3/4
    assert roc(ScoreSet([2.0, 4.0], [1.0, 3.0])).auc == pytest.approx(0.75)


def test_roc_swap_gives_complement():
    rng = np.random.default_rng(26)
    pos = list(rng.normal(0.5, 1.0, size=20))
    neg = list(rng.normal(0.0, 1.0, size=30))
    a = roc(ScoreSet(pos, neg)).auc
    b = roc(ScoreSet(neg, pos)).auc
    assert a + b == pytest.approx(1.0, abs=1e-12)


def test_roc_matches_mann_whitney_oracle():
    rng = np.random.default_rng(27)
    for _ in range(100):
        n_pos = int(rng.integers(1, 40))
        n_neg = int(rng.integers(1, 40))
        # quantize to force ties
        pos = list(np.round(rng.normal(0.3, 1.0, size=n_pos), 1))
        neg = list(np.round(rng.normal(0.0, 1.0, size=n_neg), 1))
        s = ScoreSet(pos, neg)
        assert roc(s).auc == pytest.approx(mann_whitney_auc(s), abs=1e-9)


def test_roc_rejects_empty_class():
    with pytest.raises(EmptyClassError):
        roc(ScoreSet([], [0.0]))
    with pytest.raises(EmptyClassError):
        mann_whitney_auc(ScoreSet([0.0], []))


def test_confusion_counts_and_accuracy():
    m = confusion(["a", "a", "b", "b"], ["a", "b", "b", "b"], ["a", "b"])
    assert m.counts.tolist() == [[1, 1], [0, 2]]
    assert m.accuracy() == pytest.approx(0.75)


def test_confusion_validation():
    with pytest.raises(LengthMismatchError):
        confusion(["a"], [], ["a"])
    with pytest.raises(UnknownLabelError):
        confusion(["a"], ["z"], ["a"])


def test_render_confusion_blanks_below_threshold():
    m = confusion(["a"] * 200 + ["b"] * 100,
                  ["a"] * 199 + ["b"] + ["b"] * 100, ["a", "b"])
    text = render_confusion(m)
    lines = text.splitlines()
    assert "0.995" in lines[1]
    assert "0.005" not in lines[1]  # below the 1% display threshold
    assert "1.000" in lines[2]
