"""Rebuild the synthetic files shipped in ``src/drivestyle/data``.

Run from the repository root: ``python3 demos/regenerate_fixtures.py``.
Every file is a deterministic function of the seeds below, so rerunning
this script must leave ``git status`` clean.
"""
from pathlib import Path

from drivestyle.experts import write_judgments
from drivestyle.partitions import default_variables
from drivestyle.pipeline import dump_default_config, write_trajectories
from drivestyle.synthetic import analytic_agents, style_corpus, synthetic_judgments

DATA = Path(__file__).resolve().parents[1] / "src" / "drivestyle" / "data"

inputs, _ = default_variables()
write_judgments(synthetic_judgments(inputs, n=8, seed=2023), DATA / "judgments_synthetic.csv")

write_trajectories(analytic_agents(), DATA / "trajectories_analytic.csv")

# 100 five-second windows per style, 1 cm position noise
rows, truth = style_corpus(per_style=100, seed=7, noise=0.01)
write_trajectories(rows, DATA / "corpus_synthetic.csv")
with open(DATA / "corpus_truth.csv", "w", encoding="utf-8") as fh:
    fh.write("agent_id,style\n")
    for agent, style in truth.items():
        fh.write(f"{agent},{style}\n")

dump_default_config(
    DATA / "default_config.json",
    paths={"trajectories": ["corpus_synthetic.csv"], "judgments": "judgments_synthetic.csv"},
    filter=["savgol", "ekf"],
    engine=["t2", "t1"],
    clustering={"methods": ["kmeans", "gmm", "fcm", "agglomerative"], "k": 3,
                "standardize": True, "max_iter": 300},
)
print("wrote", sorted(p.name for p in DATA.iterdir() if p.is_file()))
