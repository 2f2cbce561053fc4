#!/usr/bin/env python3
"""Classify graph dynamics: planted-edge dataset, three feature extractors.

Class 1 series carry a 0.5 Hz oscillation on the D1-D2 edge, class 0 do not.
We compare the mode-spectrum features against the graph-Laplacian and
hand-crafted baselines under repeated stratified cross-validation, then ask
which individual features carry the signal via odds ratios.
"""

import numpy as np

import graphdmd as g
from graphdmd.classify import LabeledDataset

series, labels = g.gen_labeled_dataset(40, seed=0)
config = g.Config()
print(f"dataset: {len(series)} segments, {sum(labels)} of class 1")

# --- three feature extractors ----------------------------------------------

spectrum_rows, laplacian_rows, hand_rows = [], [], []
for s in series:
    wm = g.decompose_segment(s, config)
    spectrum_rows.append(g.gdmd_spectrum(wm.averaged_mode, "defence"))
    laplacian_rows.append(g.laplacian_eigs(wm.averaged_mode, k=10))
    hand_rows.append(g.handcrafted(s, "defence"))

datasets = {
    "mode spectrum": LabeledDataset.from_feature_vectors(spectrum_rows, labels),
    "laplacian eigs": LabeledDataset.from_feature_vectors(laplacian_rows, labels),
    "hand-crafted": LabeledDataset.from_feature_vectors(hand_rows, labels),
}

# --- cross-validated comparison ----------------------------------------------

print(f"\n{'extractor':>15}  {'accuracy':>16}  {'AUC':>16}  {'F':>16}")
for name, dataset in datasets.items():
    cv = g.cross_validate(dataset, l2=1e-4, repeats=5, folds=5, seed=0)
    fmt = lambda key: f"{cv.means[key]:.3f} +- {cv.sds[key]:.3f}"
    print(f"{name:>15}  {fmt('accuracy'):>16}  {fmt('auc'):>16}  {fmt('f_measure'):>16}")

# --- which features explain the labels? --------------------------------------

print("\nper-feature odds ratios (unregularised fits), strongest first:")
ratios = g.odds_ratios(datasets["mode spectrum"], mode="per_feature")
scored = [r for r in ratios if r.estimable and np.isfinite(r.odds_ratio)]
scored.sort(key=lambda r: abs(np.log(max(r.odds_ratio, 1e-300))), reverse=True)
for r in scored[:5]:
    flag = "  (separation suspected)" if r.flagged else ""
    print(
        f"  {r.name:>10}: OR {r.odds_ratio:10.3g}  p {r.p_value:8.2g}  "
        f"CI [{r.ci_low:.3g}, {r.ci_high:.3g}]{flag}"
    )
print("\nthe planted D1-D2 edge should sit on top")
