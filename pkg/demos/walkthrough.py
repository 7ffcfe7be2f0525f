"""Classify one synthetic window by hand, then compare the two rule aggregations.

Run from anywhere after installing the package: ``python3 demos/walkthrough.py``.
"""
import numpy as np

from drivestyle import (build_rulebase, default_variables, extract_features, fit_clusters,
                        assign_style_labels, infer_t1, infer_t2, owa_weights, read_judgments,
                        sg_smooth)
from drivestyle.features import kinematics_from_positions
from drivestyle.pipeline import PipelineConfig, data_path, read_trajectories, trajectory_features

inputs, output = default_variables()
judgments = read_judgments(data_path("judgments_synthetic.csv"))

print("weights for 8 experts, quantifier (0, 0.5):", owa_weights(8, 0, 0.5).w)
rb, provenance = build_rulebase(judgments, 0, 0.5, inputs, output)
print(f"{len(rb.rules)} rules; first: {rb.rules[0]}")

# one agent from the shipped corpus
traj = read_trajectories(data_path("corpus_synthetic.csv"))[250]
smooth = sg_smooth(traj)
fv = extract_features(kinematics_from_positions(smooth))
print("\nfeatures:", {k: round(v, 3) for k, v in fv._asdict().items()})

t2 = infer_t2(rb, tuple(fv))
t1 = infer_t1(rb, tuple(fv))
print(f"T2 reduced [{t2.reduced.left:.4f}, {t2.reduced.right:.4f}] -> {t2.crisp:.4f} {t2.label}")
print(f"T1 centroid {t1.crisp:.4f} {t1.label}")
print("fired rules:")
for i in (i for i, f in enumerate(t2.firings) if f.hi > 0):
    print(f"  {rb.rules[i]}  firing {t2.firings[i]}")

# whole corpus: OWA vs median rulebase, plus a k-means baseline
cfg = PipelineConfig()
X = np.array([r[4:] for tr in read_trajectories(data_path("corpus_synthetic.csv"))
              for r in trajectory_features(tr, "savgol", cfg)])
median_rb, _ = build_rulebase(judgments, 0, 0.5, inputs, output, method="median")
for name, base in (("OWA", rb), ("median", median_rb)):
    labels = [infer_t2(base, x).label for x in X]
    print(f"\n{name} rulebase:", {s: labels.count(s) for s in ("Calm", "Moderate", "Aggressive")})

model, assign = fit_clusters(X, "kmeans", k=3, seed=0)
names = assign_style_labels(model)
print("k-means centers (velocity km/h):",
      {names[j]: round(float(model.centers[j][0]), 1) for j in range(3)})
