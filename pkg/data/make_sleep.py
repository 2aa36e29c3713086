"""Rebuild ``sleep.csv`` from the Allison & Cicchetti (1976) mammal sleep table.

The OpenML "sleep" binary task (id 739) uses seven predictors and a class
obtained by splitting ``total_sleep`` at its mean: lower values are the
positive class ``P``, everything else (including the four animals with no
recorded total sleep) is ``N``.  That reproduces the (29, 33) class counts.

``life_span`` and ``gestation`` each miss four values; they are filled with
the column median so the file loads without imputation downstream.

Needs the ``rdatasets`` package, which ships the table offline.
"""

from pathlib import Path

import rdatasets

FEATURES = {
    "body_wt": "body_weight",
    "brain_wt": "brain_weight",
    "life_span": "max_life_span",
    "gestation": "gestation_time",
    "predation": "predation_index",
    "exposure": "sleep_exposure_index",
    "danger": "danger_index",
}


def main():
    df = rdatasets.data("openintro", "mammals")
    out = df[list(FEATURES)].rename(columns=FEATURES).astype(float)
    out = out.fillna(out.median())
    cut = df["total_sleep"].mean()
    out["binaryClass"] = (df["total_sleep"] < cut).map({True: "P", False: "N"})
    path = Path(__file__).with_name("sleep.csv")
    out.to_csv(path, index=False, float_format="%.6g", lineterminator="\n")
    print(path, out.shape, out["binaryClass"].value_counts().to_dict())


if __name__ == "__main__":
    main()
