"""
Fitting the selective ensemble
==============================

Each base model sees a bootstrap sample and a random feature subspace.
Models are scored on the rows their bootstrap left out, and only the best
quarter vote at prediction time.
"""

from pathlib import Path

import numpy as np

from oexnrule import EnsembleConfig, fit, load_csv, split
from oexnrule.metrics import evaluate

data = Path(__file__).resolve().parents[1] / "data" / "sleep.csv"
ds = load_csv(data, "binaryClass", positive_label="P", id="Sleep")
print(f"{ds.id}: n={ds.n}, p={ds.p}, class counts {ds.class_counts()}")

parts = split(ds, train_fraction=0.7, seed=11)
config = EnsembleConfig(n_models=500, select_fraction=0.25, k=3, seed=11)
model = fit(parts.train, config)

errors = np.array([e for e in model.all_errors if e is not None])
kept = np.array([m.oob_error for m in model.selected])
print(f"{len(errors)} scored models, OOB error range {errors.min():.3f} .. {errors.max():.3f}")
print(f"{len(kept)} kept, worst kept error {kept.max():.3f}")

pred = model.predict(parts.test.features)
prob = model.predict_proba(parts.test.features)
print(evaluate(parts.test.labels, pred, prob).as_dict())
