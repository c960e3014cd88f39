# Project SynthRank - Copyright 2026 SynthRank contributors
# SPDX-License-Identifier: Apache-2.0
"""Smoke tests for the python bindings."""

import math

import pytest

import synthrank as sr


def test_canonical_smiles_is_writing_invariant():
    assert sr.canonical_smiles("CCO") == sr.canonical_smiles("OCC")
    assert sr.canonical_smiles("N") == "N"
    with pytest.raises(ValueError):
        sr.canonical_smiles("C(")


def test_stereo_helpers():
    assert sr.molecule_info("C[C@@H](N)O")["has_stereo"]
    stripped = sr.strip_stereo("C[C@@H](N)O")
    assert "@" not in stripped
    assert sr.heavy_atom_count("[H]O[H]") == 1
    assert sr.heavy_atom_count("CCO") == 3


def test_fingerprints_and_tanimoto():
    fp = sr.morgan_fingerprint("C")
    assert len(fp) == 1
    assert sr.tanimoto("CCO", "CCO") == pytest.approx(1.0)
    assert sr.tanimoto("CCO", "OCC") == pytest.approx(1.0)
    assert 0.0 <= sr.tanimoto("CCO", "c1ccccc1") < 1.0


def test_feature_shapes():
    levels = sr.feature_shapes("CCO", max_level=2)
    assert [lv["nodes"] for lv in levels] == [3, 2, 1]
    assert levels[0]["node_width"] == 51
    assert levels[0]["edge_width"] == 7


def test_metrics():
    assert sr.auc([0.9, 0.8, 0.3, 0.2], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert sr.pcc([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)
    m = sr.binary_metrics(3, 2, 1, 2)
    assert m["accuracy"] == pytest.approx(0.625)
    assert m["sensitivity"] == pytest.approx(0.6)
    assert m["specificity"] == pytest.approx(2 / 3)


def test_loss_and_rewards():
    assert sr.pairwise_loss(1.0, 1.0, 1, lambda_=0.0) == pytest.approx(
        math.log(2.0)
    )
    assert sr.sigmoid_reward(-7.0, a=-1.0, b=-13.0, k=0.25) == 0.5
    assert sr.double_sigmoid_reward(250.0) == pytest.approx(1.0)
    assert sr.double_sigmoid_reward(600.0) == pytest.approx(0.0, abs=1e-9)


def test_model_scoring_and_checkpoints(tmp_path):
    model = sr.Model.create(hidden=16, heads=4, head_hidden=32, seed=5)
    s1 = model.score("CCO")
    assert math.isfinite(s1)
    assert model.score("OCC") == pytest.approx(s1, rel=1e-5)

    ckpt = tmp_path / "ckpt"
    model.save(str(ckpt))
    loaded = sr.Model.load(str(ckpt))
    assert loaded.score("CCO") == s1
    assert loaded.config()["architecture"] == "gglggl"

    scores = loaded.score_many(["C", "CC", "CCC"])
    assert len(scores) == 3


def test_training_loop_learns():
    model = sr.Model.create(hidden=16, heads=4, head_hidden=32,
                            dropout=0.0, seed=11)
    pairs = []
    for n in range(2, 10):
        small = "C" * n
        big = "C" * (n + 4)
        pairs.append((small, big, 1))
        pairs.append((big, small, 0))
    history = model.pretrain(pairs, chunks=1, epochs_per_chunk=15, batch=4,
                             lr=2e-3, seed=3)
    assert len(history) == 15
    result = model.evaluate(pairs)
    assert result["accuracy"] >= 0.9

    ranked = model.rank_pairs(pairs[:4], n_samples=10, rate=0.2, seed=1)
    assert len(ranked) == 4
    variances = [v for (_, v) in ranked]
    assert variances == sorted(variances, reverse=True)


def test_clustering():
    smiles = ["C" * n for n in range(2, 8)] + ["O" + "C" * n for n in range(2, 8)]
    assignment = sr.kmeans_assignments(smiles, k=2, seed=7)
    assert len(assignment) == len(smiles)
    assert len(set(assignment)) == 2
