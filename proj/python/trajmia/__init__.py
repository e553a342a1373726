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
"""Loss-trajectory membership inference toolkit."""

import json
import os

from trajmia._trajmia import (
    Error,
    auc,
    config_digest,
    config_entries,
    cross_entropy,
    kl_div,
    load_trajectories,
    max_balanced_accuracy,
    roc,
    score_trajectories,
    softmax,
    synth_generate,
    tpr_at_fpr,
)
from trajmia import _trajmia

__version__ = "0.1.0"


def run(config, out, overrides=None, jobs=1):
    """Runs the full pipeline and returns report.json as a dict.

    `config` is a config file path or the config text itself.
    """
    if os.path.exists(config):
        with open(config, encoding="utf-8") as f:
            config = f.read()
    overrides = {k: str(v) for k, v in (overrides or {}).items()}
    return json.loads(_trajmia.run_pipeline(config, str(out), overrides, jobs))


__all__ = [
    "Error",
    "auc",
    "config_digest",
    "config_entries",
    "cross_entropy",
    "kl_div",
    "load_trajectories",
    "max_balanced_accuracy",
    "roc",
    "run",
    "score_trajectories",
    "softmax",
    "synth_generate",
    "tpr_at_fpr",
]
