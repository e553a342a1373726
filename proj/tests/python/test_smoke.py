# Copyright 2026 The trajmia Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import itertools
import math

import numpy as np
import pytest

import trajmia

SMALL_CONFIG = """
seed = 3
data.source = synth
synth.class_count = 3
synth.dim = 12
synth.per_class = 100
synth.cluster_spread = 0.6
split.target_train = 60
split.target_test = 60
split.shadow_train = 60
split.shadow_test = 60
target.hidden = 16
target.epochs = 8
distill.epochs = 4
attack.hidden = 8,8,8
attack.epochs = 5
baselines = yeom_loss,loss1
"""


def test_synth_generate_is_deterministic():
    x1, y1 = trajmia.synth_generate(4, 7, 5, 0.5, seed=11)
    x2, y2 = trajmia.synth_generate(4, 7, 5, 0.5, seed=11)
    assert x1.shape == (20, 7)
    assert np.array_equal(x1, x2)
    assert np.array_equal(y1, y2)
    assert sorted(set(y1.tolist())) == [0, 1, 2, 3]


def test_softmax_and_kl():
    p = trajmia.softmax([1.0, 2.0, 3.0])
    assert abs(p.sum() - 1.0) < 1e-12
    assert trajmia.kl_div(p, p) == pytest.approx(0.0, abs=1e-12)
    assert trajmia.cross_entropy(2, p) == pytest.approx(-math.log(p[2]))


def test_auc_matches_pair_count():
    rng = np.random.default_rng(0)
    scores = rng.integers(0, 5, size=40).astype(float)
    labels = rng.integers(0, 2, size=40)
    labels[:2] = [0, 1]
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = sum((a > b) + 0.5 * (a == b) for a, b in itertools.product(pos, neg))
    assert trajmia.auc(scores, labels) == pytest.approx(wins / (len(pos) * len(neg)))
    roc = trajmia.roc(scores, labels)
    assert roc[0].tolist() == [0.0, 0.0]
    assert roc[-1].tolist() == [1.0, 1.0]


def test_balanced_accuracy_perfect_split():
    value, threshold = trajmia.max_balanced_accuracy([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
    assert value == 1.0
    assert 0.2 < threshold <= 0.8


def test_config_errors_are_raised():
    with pytest.raises(trajmia.Error, match="parse"):
        trajmia.config_entries("seed = \nnot a line")
    entries = dict(trajmia.config_entries(SMALL_CONFIG, {"seed": 9}))
    assert entries["seed"] == "9"


def test_end_to_end_run(tmp_path):
    report = trajmia.run(SMALL_CONFIG, tmp_path / "run")
    methods = [m["method"] for m in report["methods"]]
    assert methods == ["ours", "yeom_loss", "loss1"]
    for m in report["methods"]:
        assert 0.0 <= m["auc"] <= 1.0
    traj = trajmia.load_trajectories(tmp_path / "run" / "trajectories" / "target_train.csv")
    assert traj["losses"].shape == (60, 5)
    scores = trajmia.score_trajectories(
        tmp_path / "run" / "attack_model.bin",
        tmp_path / "run" / "trajectories" / "target_train.csv")
    assert scores.shape == (60,)
    assert np.all((scores >= 0) & (scores <= 1))
    again = trajmia.run(SMALL_CONFIG, tmp_path / "run2")
    assert again == report
