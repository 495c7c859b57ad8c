import math

import numpy as np
import pytest

import vocabtrend as vt


def test_cleaning_and_sentences():
    cleaned = vt.clean_text("Choose (A), the BEST word. 대학 2022!")
    assert cleaned == "choose  the best word.  !"
    assert vt.tokenize(cleaned) == ["choose", "the", "best", "word"]
    assert vt.extract_sentences("the cat ran. the dog sat.") == [["the", "cat", "ran"], ["the", "dog", "sat"]]
    assert "(A)," in vt.default_removal_patterns()


def test_frequency_and_rank_split():
    docs = [vt.make_document(2003, "Cats and a cat."), vt.make_document(2004, "A dog.")]
    m = vt.build_frequency_matrix(docs, vt.LemmaMap({"cats": "cat"}))
    assert m.words == ["a", "and", "cat", "dog"]
    assert m.years == [2003, 2004]
    assert m.counts.tolist() == [[1, 1], [1, 0], [2, 0], [0, 1]]
    high, low = vt.rank_split(m, 1)
    assert high.words == ["a"]
    assert vt.apply_screening(m, {"cat", "dog"}).words == ["cat", "dog"]
    d = vt.diff_vocabularies(["a", "b"], ["b", "c"])
    assert d == {"only_a": {"a"}, "only_b": {"c"}, "both": {"b"}}


def test_correlation():
    c = vt.correlation_matrix([["a", "b"], ["a", "b"], ["c"]], ["a", "b", "c"])
    assert c.shape == (3, 3)
    assert c[0, 1] == pytest.approx(1.0)
    assert c[0, 2] == pytest.approx(-1.0)
    assert np.array_equal(c, c.T)


def test_loss_and_gradients():
    assert vt.logcosh_loss([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert vt.logcosh_loss([1.0], [0.0]) == pytest.approx(math.log(math.cosh(1.0)))
    assert vt.logcosh_loss([1000.0], [0.0]) == pytest.approx(1000.0 - math.log(2.0), abs=1e-9)
    with pytest.raises(vt.InputError):
        vt.logcosh_loss([1.0], [])

    h = vt.Hyperparams()
    h.hidden, h.dense1, h.dense2, h.seed = 2, 3, 2, 4
    p = vt.initialize_params(h)
    assert len(p) == 52
    batch = np.array([[0.5, 1.0, 2.0], [1.5, 0.0, 0.25]])
    assert vt.predict(p, batch).shape == (2,)
    assert vt.grad_check(p, batch, [0.3, -0.7]) < 1e-4


def test_forecast_and_scores():
    words = [f"w{i}" for i in range(4)]
    counts = np.array([[5] * 8, [3] * 8, [0] * 8, [1, 0] * 4], dtype=np.int64)
    m = vt.FrequencyMatrix(words, list(range(2010, 2018)), counts)
    ws = vt.build_windows(m, 3)
    assert len(ws) == 4 * 5
    assert ws.inputs.shape == (20, 3)

    h = vt.Hyperparams()
    h.hidden, h.dense1, h.dense2, h.epochs, h.batch_size = 4, 4, 4, 5, 8
    params, losses = vt.train_model(ws, h)
    assert len(losses) == 5
    preds = vt.predict_next(params, m, 3)
    assert len(preds) == 4 and min(preds) >= 0.0

    table = vt.ai_score(["a", "b"], [[15.0, 7.5]], vt.EnsembleSpec([(3, 1.0)]))
    assert table.score == [100.0, 50.0]
    assert vt.ai_score(["a"], [[10.0]] * 5, vt.EnsembleSpec.defaults()).raw[0] == pytest.approx(15.0)

    scores = vt.run_ensemble(m, vt.EnsembleSpec([(2, 0.5), (3, 0.4)]), h, 2)
    assert scores.windows == [2, 3]
    assert all(0.0 <= s <= 100.0 for s in scores.score)


def test_evaluation():
    met = vt.prediction_metrics({"a", "b", "c", "d"}, {"b", "c", "e"})
    assert (met.true_positives, met.accuracy) == (2, 0.5)
    assert met.intersection == pytest.approx(2 / 3)
    table = vt.ai_score(["a", "b", "c", "d"], [[95.0, 95.0, 55.0, 5.0]], vt.EnsembleSpec([(3, 1.0)]))
    segs = vt.segment_analysis(table, {"a", "c"}, 10)
    assert segs[-1].words == 2 and segs[-1].rate == 0.5
    assert segs[5].accumulated_rate == pytest.approx(2 / 3)
    bins = vt.score_histogram(table, 10.0)
    assert sum(b.count for b in bins) == 4


def test_pipeline_commands(tmp_path):
    info = vt.write_synthetic_corpus(tmp_path, years=8, seed=1)
    assert len(info["persistent"]) == 10
    conf = tmp_path / "run.conf"
    fast = [("epochs", "2"), ("hidden", "4"), ("dense1", "4"), ("dense2", "4")]
    assert "vocabulary" in vt.ingest(conf)
    vt.train(conf, fast)
    assert (tmp_path / "out" / "scores.csv").read_text().startswith("word,pred_w3")
    vt.evaluate(conf, tmp_path / "exam.txt")
    assert (tmp_path / "out" / "evaluation.json").exists()
    with pytest.raises(vt.InputError):
        vt.ingest(conf, [("corpus_dir", str(tmp_path / "missing"))])
