"""
Saving a model
==============

A saved model is a small JSON file: the configuration, a fingerprint of
the training data and the seed of every kept base model.  Loading rebuilds
the bootstrap samples from those seeds.
"""

import tempfile
from pathlib import Path

import numpy as np

from oexnrule import EnsembleConfig, fit, load_csv, split
from oexnrule.ensemble import load_model, save_model

data = Path(__file__).resolve().parents[1] / "data" / "sleep.csv"
parts = split(load_csv(data, "binaryClass", "P"), seed=3)
model = fit(parts.train, EnsembleConfig(n_models=200, seed=3))

with tempfile.TemporaryDirectory() as tmp:
    path = save_model(model, Path(tmp) / "sleep_model.json")
    print(path.read_text()[:300], "...")
    again = load_model(path, parts.train)

np.testing.assert_array_equal(model.predict_proba(parts.test.features),
                              again.predict_proba(parts.test.features))
print("reloaded model gives identical probabilities")
