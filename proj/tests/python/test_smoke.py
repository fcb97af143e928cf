import math
import random

import pytest

import vithsd


def test_labels_round_trip():
    terms = vithsd.parse_label_list("[Politics#hate, individuals#offensive]")
    assert terms == ["individuals#offensive", "politics#hate"]
    assert vithsd.label_codes(terms) == [2, 0, 0, 0, 3]
    assert vithsd.terms_from_codes([2, 0, 0, 0, 3]) == terms
    assert vithsd.parse_label_list(vithsd.format_label_list(terms)) == terms


def test_errors_carry_code_name():
    with pytest.raises(vithsd.VithsdError, match="InvalidLevel"):
        vithsd.terms_from_codes([5, 0, 0, 0, 0])
    with pytest.raises(vithsd.VithsdError, match="UnknownTarget"):
        vithsd.parse_label_list("[planets#hate]")


def count_kappa(a, b):
    n = len(a)
    cats = sorted(set(a) | set(b))
    po = sum(x == y for x, y in zip(a, b)) / n
    pe = sum((a.count(c) / n) * (b.count(c) / n) for c in cats)
    return None if pe == 1 else (po - pe) / (1 - pe)


def test_cohen_kappa_matches_counting_oracle():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(2, 40)
        a = [rng.randint(0, 3) for _ in range(n)]
        b = [x if rng.random() < 0.6 else rng.randint(0, 3) for x in a]
        got = vithsd.cohen_kappa(a, b)
        want = count_kappa(a, b)
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(want, abs=1e-12)
    assert vithsd.cohen_kappa([1, 1], [1, 1]) is None


def test_prf_fixture():
    preds = [["individuals#hate", "groups#clean"], ["politics#offensive"]]
    golds = [["individuals#hate", "groups#offensive"], ["politics#offensive", "groups#hate"]]
    level = vithsd.prf(preds, golds, task="target_level")
    assert (level["matched"], level["predicted"], level["gold"]) == (2, 3, 4)
    assert level["precision"] == pytest.approx(2 / 3)
    assert level["recall"] == pytest.approx(1 / 2)
    target = vithsd.prf(preds, golds, task="target_only")
    assert target["matched"] == 3
    with pytest.raises(vithsd.VithsdError):
        vithsd.prf(preds, golds, mode="weighted")


def test_preprocess_is_idempotent():
    once = vithsd.preprocess_text("  Hay   QUÁ!!  ")
    assert vithsd.preprocess_text(once) == once
    assert vithsd.tokenize(once)


def test_train_predict_save_load(tmp_path):
    texts = ["anh ấy thật tệ"] * 20 + ["nhóm đó ồn ào"] * 20 + ["hôm nay trời đẹp"] * 20
    labels = [[3, 0, 0, 0, 0]] * 20 + [[0, 2, 0, 0, 0]] * 20 + [[0, 0, 0, 0, 0]] * 20
    model = vithsd.Model.train(texts, labels, dim=1024, epochs=20, seed=3)
    out = model.predict("anh ấy thật tệ", id="x")
    assert out["id"] == "x"
    assert out["labels"] == [3, 0, 0, 0, 0]
    assert out["terms"] == ["individuals#hate"]
    for head in out["probabilities"]:
        assert math.isclose(sum(head), 1.0, abs_tol=1e-9)
    path = tmp_path / "m.bin"
    model.save(path)
    again = vithsd.Model.load(path)
    assert again == model
    assert again.dim == 1024
    assert again.predict("nhóm đó ồn ào")["labels"] == [0, 2, 0, 0, 0]


def test_window_and_latency():
    base = 1_700_000_040_000
    windows = vithsd.window_counts(
        [(base, ["individuals#hate"]), (base + 1000, ["individuals#hate", "groups#clean"]), (base + 60_000, [])],
        width_seconds=60,
    )
    assert len(windows) == 1
    assert windows[0]["window_start"] == base - base % 60_000
    assert windows[0]["counts"]["individuals"]["hate"] == 2
    assert windows[0]["counts"]["groups"]["clean"] == 1
    stats = vithsd.latency_stats([100.0, 200.0, 300.0, 400.0])
    assert (stats["q25"], stats["median"], stats["q75"], stats["mean"]) == (100.0, 200.0, 300.0, 250.0)
