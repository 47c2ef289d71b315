import datetime as dt
import json
import math
import random

import pytest

import sentilag


def test_statistics():
    assert sentilag.pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-15)
    assert sentilag.mse([1, 2], [2, 4]) == 2.5
    assert sentilag.day_value([1, 1, 0]) == pytest.approx(2 / 3)
    with pytest.raises(sentilag.SentilagError):
        sentilag.pearson([1, 1, 1], [1, 2, 3])


def test_table_one_metrics():
    afa = sentilag.metrics(119, 20, 13, 103)
    ufa = sentilag.metrics(181, 115, 99, 172)
    assert afa["precision"] == pytest.approx(0.9015, abs=1e-4)
    assert ufa["accuracy"] == pytest.approx(0.6226, abs=1e-4)
    assert afa["precision"] / ufa["precision"] - 1 == pytest.approx(0.3946, abs=1e-4)
    m = sentilag.confusion([True, True, False, False], [True, False, False, True])
    assert (m["tp"], m["fn"], m["fp"], m["tn"]) == (1, 1, 1, 1)
    assert sentilag.metrics(0, 3, 0, 5)["precision_undefined"]


def test_grouping():
    kw = sentilag.default_keywords()
    assert sentilag.classify_user(True, "中信证券分析师", kw) == "AFA"
    assert sentilag.classify_user(False, "中信证券分析师", kw) == "UFA"
    assert sentilag.classify_user(True, "SECURITIES firm", ["securities"]) == "AFA"


def test_classifier_and_features():
    idx, val = sentilag.featurize("aa", ngram_orders={1})
    assert len(idx) == 1 and val[0] == pytest.approx(1.0)
    model, losses = sentilag.train_classifier(["good"] * 20 + ["bad"] * 20, [1] * 20 + [0] * 20, hash_dims=1024)
    assert losses[0] == pytest.approx(math.log(2))
    assert model.score("good")[0] == 1
    assert model.score("bad")[0] == 0
    assert sentilag.DECISION_THRESHOLD == 0.5


def test_label_file_contract(tmp_path):
    rng = random.Random(5)
    rows = []
    for i in range(100):
        p = rng.random()
        rows.append({"post_id": f"p{i}", "label": int(p >= 0.5), "probability": p})
    path = tmp_path / "labels.jsonl"
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    back = sentilag.ingest_labels(path)
    assert [(r["post_id"], r["label"], r["probability"]) for r in rows] == back
    path.write_text('{"post_id":"x","label":2,"probability":0.5}\n', encoding="utf-8")
    with pytest.raises(sentilag.SentilagError, match=r"labels.jsonl:1:"):
        sentilag.ingest_labels(path)


def _weekdays(n):
    d = dt.date(2018, 1, 1)
    out = []
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def _write_stock(path, dates, closes):
    lines = ["date,open,close,high,low,volume"]
    prev = closes[0]
    for d, c in zip(dates, closes):
        lines.append(f"{d.isoformat()},{prev},{c},{max(prev, c) * 1.01},{min(prev, c) * 0.99},1000")
        prev = c
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def test_search_lag_recovers_planted_lag(tmp_path):
    rng = random.Random(1)
    dates = _weekdays(300)
    closes = [100.0]
    for _ in dates[1:]:
        closes.append(closes[-1] * (1 + rng.gauss(0, 0.01)))
    _write_stock(tmp_path / "s.csv", dates, closes)
    series = {}
    for i in range(len(dates) - 9):
        up = closes[i + 9] >= closes[i + 8]
        series[dates[i].isoformat()] = (0.1 + 0.8 * up + rng.uniform(-0.05, 0.05), 5)
    res = sentilag.search_lag(series, tmp_path / "s.csv")
    assert res["best_T"] == 9
    assert sorted(res["correlations"]) == list(range(3, 31))


def test_train_lstm_on_sine():
    opens = [math.sin(2 * math.pi * t / 25) for t in range(150)]
    out = sentilag.train_lstm(opens, [0.5] * len(opens), lookback=10, epochs=40, hidden=8)
    assert len(out["train_loss"]) == 40
    assert out["test_loss"][-1] < out["test_loss"][0]
    assert len(out["predicted"]) == len(out["actual"]) > 0
    assert out["split_point"] == 90


def test_pipeline_end_to_end(tmp_path):
    rng = random.Random(3)
    dates = _weekdays(140)
    closes = [25000.0]
    for _ in dates[1:]:
        closes.append(closes[-1] * (1 + rng.gauss(0, 0.01)))
    _write_stock(tmp_path / "stock.csv", dates, closes)
    profiles = [{"user_id": "a", "certified": True, "verify_description": "证券分析师"},
                {"user_id": "b", "certified": False, "verify_description": None}]
    (tmp_path / "profiles.jsonl").write_text("".join(json.dumps(p) + "\n" for p in profiles), encoding="utf-8")
    posts, n = [], 0
    for i, d in enumerate(dates):
        for user in ("a", "b", "b"):
            up = rng.random() < 0.5
            posts.append({"post_id": f"p{n}", "user_id": user, "created_at": f"{d.isoformat()}T10:{n % 60:02d}:00+08:00",
                          "text": "恒生指数" + ("看涨" if up else "看跌") + str(n % 7), "comments": 0, "reposts": 0,
                          "likes": 0})
            n += 1
    (tmp_path / "posts.jsonl").write_text("".join(json.dumps(p, ensure_ascii=False) + "\n" for p in posts),
                                          encoding="utf-8")
    (tmp_path / "corpus.csv").write_text("label,text\n" + "1,看涨\n0,看跌\n" * 20, encoding="utf-8")
    (tmp_path / "run.conf").write_text(
        "posts = posts.jsonl\nprofiles = profiles.jsonl\nstock = stock.csv\ncorpus = corpus.csv\n"
        "keyword = 恒生指数\nout = out\nlookback = 5\nhidden = 4\nepochs = 2\nhash_dims = 4096\n",
        encoding="utf-8")
    report = sentilag.run_pipeline(tmp_path / "run.conf", seed=11)
    assert report["config"]["seed"] == 11
    assert set(report["groups"]) == {"AFA", "UFA"}
    assert "precision_gap" in report["comparison"]
    assert (tmp_path / "out" / "comparison.json").exists()
    with pytest.raises(sentilag.SentilagError) as err:
        sentilag.run_pipeline(tmp_path / "run.conf", keyword="")
    assert err.value.args[1] == 2
