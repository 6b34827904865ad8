"""Smoke tests for the python module and the CLI surface.

Usage: smoke_test.py [path-to-cli]; PYTHONPATH must hold the built module.
"""

import json
import math
import os
import subprocess
import sys
import tempfile

import dablog


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (+-{tol})"


def test_keyset():
    attrs = dablog.EventAttrs()
    attrs.size_bytes = 25 * 1024 * 1024
    attrs.src_ip = "10.250.11.32"
    key = dablog.derive_addon_key("Received block", attrs, dablog.Granularity.K1)
    assert key == "Received block of size 20-30 MB from 10.250.*", key

    records = []
    for i, name in enumerate(["open", "read", "read", "close"]):
        r = dablog.RawEventRecord()
        r.session_id = "s1"
        r.ts = i
        r.base_key = name
        records.append(r)
    ks = dablog.build_vocabulary(records, dablog.Granularity.K0)
    assert ks.vocab_size == 3
    assert ks.extended_size == 6
    assert ks.key_id("open") == 0
    assert ks.key_id("never seen") == ks.unk_id
    return ks, records


def test_model_roundtrip(tmp):
    grammar = dablog.default_grammar()
    corpus = dablog.generate_corpus(grammar, 120, 12)
    ks = dablog.build_vocabulary(corpus.records, dablog.Granularity.K1)
    sessions = dablog.assemble_sessions(corpus.records, ks)
    assert len(sessions) == 132

    labels = {i.session_id: i.label for i in corpus.items}
    normal = [s for s in sessions if labels[s.session_id] == "normal"]
    wins = []
    for s in normal:
        wins.extend(dablog.windows(s, ks, 10))

    cfg = dablog.DablogConfig()
    cfg.embedding_dim = 8
    cfg.encoder_hidden = [12, 6]
    cfg.decoder_hidden = [6, 12]
    model = dablog.DablogModel(cfg, ks.extended_size, ks.hash(), 1)
    tc = dablog.TrainConfig()
    tc.epochs = 3
    tc.batch_size = 16
    tc.seed = 1
    tc.learning_rate = 0.005
    trace = model.train(wins, tc)
    assert trace[-1] < trace[0], "loss should decrease"

    probs = model.reconstruct(wins[0])
    assert len(probs) == len(wins[0])
    for row in probs:
        approx(sum(row), 1.0)

    path = os.path.join(tmp, "model.json")
    dablog.save_dablog(model, path)
    loaded = dablog.load_dablog(path)
    assert loaded.reconstruct(wins[0]) == probs, "persistence must be bit-exact"

    scores = dablog.score_sessions_dablog(model, sessions, ks)
    sweep_out = dablog.sweep(scores, labels, [float(t) for t in range(1, 101)], ks.extended_size)
    assert sweep_out[-1][1].tp == 0 and sweep_out[-1][1].fp == 0
    auc = dablog.roc_auc(dablog.roc_points(sweep_out))
    assert 0.0 <= auc <= 1.0

    for s in sessions:
        s.label = labels[s.session_id]
    stats = dablog.corpus_stats(sessions, ks, 10)
    assert stats.patterns_total == (stats.patterns_always_normal +
                                    stats.patterns_always_abnormal +
                                    stats.patterns_nondeterministic)
    assert stats.patterns_always_normal > 0
    assert sum(stats.key_counts.values()) == sum(len(s.event_ids) for s in sessions)


def test_metrics():
    m = dablog.metrics(dablog.ConfusionCounts(16367, 2424, 197576, 471))
    approx(m.f1 * 100, 91.87, 0.01)
    approx(m.recall * 100, 97.20, 0.01)
    approx(m.precision * 100, 87.10, 0.01)
    approx(m.fp_rate * 100, 1.21, 0.01)

    approx(dablog.roc_auc([(0.0, 1.0)]), 1.0)
    approx(dablog.roc_auc([(0.2, 0.8)]), 0.8)

    assert dablog.merge_labels("abnormal", "normal", "intersection") == "normal"
    assert dablog.merge_labels("abnormal", "normal", "union") == "abnormal"

    assert dablog.rank_slots(9.0, 101) == 9
    row = [0.5, 0.3, 0.15, 0.05]
    assert dablog.rank_of_true(row, 0) == 1
    assert not dablog.event_normal_rank(row, 3, 25.0, 4)


def test_cli(cli, tmp):
    def run(*args, cwd=tmp):
        return subprocess.run([cli, *args], cwd=cwd, capture_output=True, text=True)

    r = run("gen", "--seed", "3", "--normal", "40", "--abnormal", "4", "-o", "corpus")
    assert r.returncode == 0, r.stderr

    cfg = {
        "version": 1, "seqlen": 10, "granularity": "k1", "embedding_dim": 8,
        "encoder_hidden": [12, 6], "decoder_hidden": [6, 12], "baseline_hidden": [12, 12],
        "epochs": 2, "batch_size": 16, "learning_rate": 0.003, "seed": 5,
    }
    with open(os.path.join(tmp, "cfg.json"), "w") as f:
        json.dump(cfg, f)
    r = run("train", "dablog", "--config", "cfg.json", "--in", "corpus", "-o", "model.json")
    assert r.returncode == 0, r.stderr

    model_bytes = open(os.path.join(tmp, "model.json"), "rb").read()
    r = run("detect", "--model", "model.json", "--in", "corpus", "--theta-n", "9",
            "-o", "verdicts.jsonl")
    assert r.returncode == 0, r.stderr
    assert open(os.path.join(tmp, "model.json"), "rb").read() == model_bytes, \
        "detect must not mutate the model file"

    r = run("eval", "--verdicts", "verdicts.jsonl", "--labels", "corpus/labels.jsonl",
            "-o", "report")
    assert r.returncode == 0, r.stderr
    report = json.load(open(os.path.join(tmp, "report.json")))
    assert report["counts"]["tp"] + report["counts"]["fn"] == 4

    # validation failures exit 1 with a one-line diagnostic
    bad_cfg = dict(cfg)
    bad_cfg["mystery_field"] = True
    with open(os.path.join(tmp, "bad.json"), "w") as f:
        json.dump(bad_cfg, f)
    r = run("train", "dablog", "--config", "bad.json", "--in", "corpus", "-o", "m2.json")
    assert r.returncode == 1 and "mystery_field" in r.stderr, (r.returncode, r.stderr)

    r = run("detect", "--model", "no_such_model.json", "--in", "corpus", "-o", "v2.jsonl")
    assert r.returncode == 1, (r.returncode, r.stderr)

    r = run("detect", "--unknown-flag")
    assert r.returncode == 1, (r.returncode, r.stderr)

    r = run("sweep", "--model", "model.json", "--in", "corpus", "--grid", "5:100:5",
            "-o", "sweep.csv")
    assert r.returncode == 0, r.stderr
    lines = open(os.path.join(tmp, "sweep.csv")).read().strip().splitlines()
    assert lines[0] == "theta_n,tp,fp,tn,fn,f1"
    assert len(lines) == 21

    # the other model kinds ride the same surface
    r = run("train", "baseline", "--config", "cfg.json", "--in", "corpus", "-o", "base.json")
    assert r.returncode == 0, r.stderr
    r = run("detect", "--model", "base.json", "--in", "corpus", "--theta-n", "9",
            "-o", "vb.jsonl")
    assert r.returncode == 0, r.stderr

    r = run("train", "freq", "--in", "corpus", "-o", "freq.json")
    assert r.returncode == 0, r.stderr
    r = run("sweep", "--model", "freq.json", "--in", "corpus", "--grid", "10:100:10",
            "-o", "sweep_freq.csv")
    assert r.returncode == 0, r.stderr

    # threshold-mode detection
    r = run("detect", "--model", "model.json", "--in", "corpus", "--theta-p", "0.2",
            "-o", "vp.jsonl")
    assert r.returncode == 0, r.stderr
    r = run("detect", "--model", "model.json", "--in", "corpus", "--theta-p", "1.5",
            "-o", "vbad.jsonl")
    assert r.returncode == 1, (r.returncode, r.stderr)


def main():
    cli = os.path.abspath(sys.argv[1]) if len(sys.argv) > 1 else None
    test_keyset()
    test_metrics()
    with tempfile.TemporaryDirectory() as tmp:
        test_model_roundtrip(tmp)
    if cli:
        with tempfile.TemporaryDirectory() as tmp:
            test_cli(cli, tmp)
    print("python smoke tests passed")


if __name__ == "__main__":
    main()
