"""Batch pipeline: configuration, file formats and the subcommands behind the CLI.

Every subcommand reads its inputs, computes in memory and then moves its
outputs into place; if anything fails the partially written files are
removed. Floats are written with ``repr`` so reruns are byte-identical.
"""
from __future__ import annotations

import copy
import csv
import json
import os
from collections import OrderedDict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .clustering import METHODS, assign_style_labels, fit_clusters, internal_validation
from .errors import AmbiguousOrdering, ConfigError, DataError, TooShort
from .experts import antecedent_combinations, build_rulebase, read_judgments
from .features import extract_features, kinematics_from_positions, kinematics_from_state, \
    split_windows
from .filters import EkfConfig, SgConfig, Trajectory, ekf_smooth, sg_smooth
from .mamdani import RuleBase, infer_t1, infer_t2, read_rulebase, write_rulebase
from .partitions import DEFAULT_PARTITIONS, INPUT_ORDER, STYLES, load_partitions, \
    variable_to_dict
from .stats import describe_by_class, report_rows, write_report_csv, write_report_json

OUTPUT_ENV = "DRIVESTYLE_OUTPUT_DIR"
FILTERS = ("savgol", "ekf", "raw")
ENGINES = ("t2", "t1")
FEATURE_COLUMNS = ["agent_id", "window", "t_start", "filter", *INPUT_ORDER]
LABEL_COLUMNS = ["agent_id", "window", "filter", "engine", "y_l", "y_r", "crisp", "label"]
ASSIGN_COLUMNS = ["agent_id", "window", "filter", "method", "cluster", "label"]

OUTPUT_FILES = {
    "rulebase": "rulebase.csv",
    "provenance": "provenance.json",
    "features": "features.csv",
    "labels": "labels.csv",
    "models": "cluster_models.json",
    "assignments": "assignments.csv",
    "metrics": "cluster_metrics.json",
    "report_csv": "report.csv",
    "report_json": "report.json",
}


def data_path(name: str) -> Path:
    """Location of a file shipped in the package's data directory."""
    return Path(str(resources.files("drivestyle") / "data" / name))


def default_config_path() -> Path:
    return data_path("default_config.json")


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass
class PipelineConfig:
    """Everything a run depends on.

    Input paths are resolved against ``base_dir`` (the config file's
    directory); the output directory is resolved against the working
    directory so that the shipped config never writes into the install.
    """

    partitions: dict = field(default_factory=lambda: copy.deepcopy(DEFAULT_PARTITIONS))
    filters: tuple[str, ...] = ("savgol",)
    savgol: dict = field(default_factory=dict)
    ekf: dict = field(default_factory=dict)
    window_seconds: float = 5.0
    unit_mode: str = "kmh"
    owa: dict = field(default_factory=lambda: {"a": 0.0, "b": 0.5})
    aggregation: str = "owa"
    engines: tuple[str, ...] = ("t2",)
    clustering: dict = field(default_factory=lambda: {
        "methods": ["kmeans"], "k": 3, "standardize": True, "max_iter": 300})
    trajectories: tuple[str, ...] = ()
    judgments: str | None = None
    rulebase: str | None = None
    output_dir: str = "drivestyle_out"
    seed: int = 0
    base_dir: Path = field(default_factory=Path.cwd)
    output_flag: str | None = None      # command-line override, outranks the env var

    # ---- loading -------------------------------------------------------
    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | str | None = None) -> "PipelineConfig":
        known = {"partitions", "filter", "savgol", "ekf", "window_seconds", "unit_mode", "owa",
                 "aggregation", "engine", "clustering", "paths", "seed"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        paths = d.get("paths", {}) or {}
        bad = set(paths) - {"trajectories", "judgments", "rulebase", "output_dir"}
        if bad:
            raise ConfigError(f"unknown path keys: {sorted(bad)}")
        cfg = cls()
        if "partitions" in d:
            cfg.partitions = d["partitions"]
        cfg.filters = _as_tuple(d.get("filter", cfg.filters))
        cfg.savgol = dict(d.get("savgol", {}))
        cfg.ekf = dict(d.get("ekf", {}))
        cfg.window_seconds = d.get("window_seconds", cfg.window_seconds)
        cfg.unit_mode = d.get("unit_mode", cfg.unit_mode)
        cfg.owa = {**cfg.owa, **d.get("owa", {})}
        cfg.aggregation = d.get("aggregation", cfg.aggregation)
        cfg.engines = _as_tuple(d.get("engine", cfg.engines))
        cfg.clustering = {**cfg.clustering, **d.get("clustering", {})}
        cfg.trajectories = _as_tuple(paths.get("trajectories", ()))
        cfg.judgments = paths.get("judgments")
        cfg.rulebase = paths.get("rulebase")
        cfg.output_dir = paths.get("output_dir", cfg.output_dir)
        cfg.seed = d.get("seed", cfg.seed)
        if base_dir is not None:
            cfg.base_dir = Path(base_dir)
        return cfg

    @classmethod
    def load(cls, path=None) -> "PipelineConfig":
        path = Path(path) if path is not None else default_config_path()
        try:
            d = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(d, path.resolve().parent)

    def to_dict(self) -> dict:
        return {
            "partitions": self.partitions,
            "filter": list(self.filters),
            "savgol": self.savgol,
            "ekf": self.ekf,
            "window_seconds": self.window_seconds,
            "unit_mode": self.unit_mode,
            "owa": self.owa,
            "aggregation": self.aggregation,
            "engine": list(self.engines),
            "clustering": self.clustering,
            "paths": {"trajectories": list(self.trajectories), "judgments": self.judgments,
                      "rulebase": self.rulebase, "output_dir": self.output_dir},
            "seed": self.seed,
        }

    # ---- validation ----------------------------------------------------
    def validate(self, need: tuple[str, ...] = ()) -> None:
        """Check values and that the input files named in ``need`` exist."""
        for f in self.filters:
            if f not in FILTERS:
                raise ConfigError(f"unknown filter {f!r}; choose from {FILTERS}")
        if not self.filters:
            raise ConfigError("no filter selected")
        for e in self.engines:
            if e not in ENGINES:
                raise ConfigError(f"unknown engine {e!r}; choose from {ENGINES}")
        if not isinstance(self.window_seconds, (int, float)) or not self.window_seconds > 0:
            raise ConfigError(f"window_seconds must be positive, got {self.window_seconds!r}")
        if self.unit_mode not in ("kmh", "ms"):
            raise ConfigError(f"unit_mode must be 'kmh' or 'ms', got {self.unit_mode!r}")
        if self.aggregation not in ("owa", "median"):
            raise ConfigError(f"aggregation must be 'owa' or 'median', got {self.aggregation!r}")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        a, b = self.owa.get("a"), self.owa.get("b")
        if not (isinstance(a, (int, float)) and isinstance(b, (int, float)) and 0 <= a < b <= 1):
            raise ConfigError(f"owa needs 0 <= a < b <= 1, got a={a!r}, b={b!r}")
        for m in self.clustering.get("methods", []):
            if m not in METHODS:
                raise ConfigError(f"unknown clustering method {m!r}; choose from {METHODS}")
        try:
            SgConfig(**self.savgol)
            EkfConfig(**self.ekf)
        except TypeError as exc:
            raise ConfigError(f"bad filter parameters: {exc}") from None
        except Exception as exc:
            raise ConfigError(str(exc)) from None
        self.variables()
        if "trajectories" in need:
            if not self.trajectories:
                raise ConfigError("no trajectory files configured")
            for p in self.trajectory_paths():
                if not p.is_file():
                    raise ConfigError(f"trajectory file not found: {p}")
        if "judgments" in need:
            p = self.judgments_path()
            if p is None or not p.is_file():
                raise ConfigError(f"judgments file not found: {p}")

    def variables(self):
        inputs, output = load_partitions(self.partitions)
        if tuple(v.name for v in inputs) != INPUT_ORDER:
            raise ConfigError(f"inputs must be {list(INPUT_ORDER)} in that order")
        if tuple(output.names) != STYLES:
            raise ConfigError(f"output subsets must be {list(STYLES)}")
        return inputs, output

    # ---- paths ---------------------------------------------------------
    def _resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def trajectory_paths(self) -> list[Path]:
        return [self._resolve(p) for p in self.trajectories]

    def judgments_path(self) -> Path | None:
        return None if self.judgments is None else self._resolve(self.judgments)

    def out_dir(self) -> Path:
        if self.output_flag:
            return Path(self.output_flag)
        env = os.environ.get(OUTPUT_ENV)
        return Path(env) if env else Path(self.output_dir)

    def out(self, key: str) -> Path:
        return self.out_dir() / OUTPUT_FILES[key]

    def rulebase_path(self) -> Path:
        return self._resolve(self.rulebase) if self.rulebase else self.out("rulebase")


def _as_tuple(v) -> tuple:
    if v is None:
        return ()
    if isinstance(v, str):
        return (v,)
    return tuple(v)


# --------------------------------------------------------------------------
# atomic output handling
# --------------------------------------------------------------------------

class _Outputs:
    """Collect outputs in temporary files; publish all of them only on success."""

    def __init__(self, directory: Path):
        self.directory = directory
        self.pending: list[tuple[Path, Path]] = []

    def __enter__(self):
        self.directory.mkdir(parents=True, exist_ok=True)
        return self

    def path(self, final: Path) -> Path:
        tmp = final.with_name(f".{final.name}.partial")
        self.pending.append((tmp, final))
        return tmp

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            for tmp, final in self.pending:
                os.replace(tmp, final)
        else:
            for tmp, final in self.pending:
                for p in (tmp, final):
                    if p.exists():
                        p.unlink()
        return False


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _read_csv(path: Path, required: list[str]) -> list[dict]:
    if not path.is_file():
        raise DataError(f"input file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        return list(reader)


# --------------------------------------------------------------------------
# trajectories and features
# --------------------------------------------------------------------------

def read_trajectories(path) -> list[Trajectory]:
    """Parse an ``agent_id,t,x,y`` CSV into one trajectory per agent, in file order."""
    rows = _read_csv(Path(path), ["agent_id", "t", "x", "y"])
    groups: OrderedDict[str, list] = OrderedDict()
    for lineno, r in enumerate(rows, start=2):
        try:
            groups.setdefault(r["agent_id"], []).append((float(r["t"]), float(r["x"]), float(r["y"])))
        except (TypeError, ValueError):
            raise DataError(f"{path}:{lineno}: non-numeric t/x/y") from None
    out = []
    for agent, samples in groups.items():
        t, x, y = (np.array(c) for c in zip(*samples))
        out.append(Trajectory(t, x, y, agent))
    return out


def write_trajectories(rows, path) -> None:
    _write_csv(Path(path), ["agent_id", "t", "x", "y"], rows)


def trajectory_features(traj: Trajectory, filt: str, cfg: PipelineConfig) -> list[tuple]:
    """Feature rows ``(agent, window, t_start, filter, *features)`` for one agent."""
    dt = traj.check_uniform()
    per = int(round(cfg.window_seconds / dt))
    if len(traj) < per:
        return []
    if filt == "savgol":
        ks = kinematics_from_positions(sg_smooth(traj, SgConfig(**cfg.savgol)))
    elif filt == "ekf":
        ks = kinematics_from_state(ekf_smooth(traj, EkfConfig(**cfg.ekf)))
    else:
        ks = kinematics_from_positions(traj)
    rows = []
    for i, w in split_windows(ks, cfg.window_seconds):
        fv = extract_features(w, cfg.window_seconds, cfg.unit_mode)
        rows.append((traj.agent_id, i, float(w.t[0]), filt, *fv))
    return rows


def _read_features(path: Path) -> list[dict]:
    rows = _read_csv(path, FEATURE_COLUMNS)
    for r in rows:
        try:
            r["_x"] = np.array([float(r[c]) for c in INPUT_ORDER])
        except ValueError:
            raise DataError(f"{path}: non-numeric feature value for {r['agent_id']}") from None
    return rows


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _load_rulebase(cfg: PipelineConfig, inputs, output) -> RuleBase:
    path = cfg.rulebase_path()
    if path.is_file():
        return read_rulebase(path, inputs, output)
    if cfg.judgments_path() is not None and cfg.judgments_path().is_file():
        rb, _ = _build(cfg, inputs, output)
        return rb
    raise DataError(f"no rulebase at {path} and no judgments to build one")


def _build(cfg, inputs, output):
    jt = read_judgments(cfg.judgments_path())
    n = cfg.owa.get("n")
    if n is not None and n != jt.n:
        raise ConfigError(f"owa.n={n} but the judgment file has {jt.n} experts")
    return build_rulebase(jt, cfg.owa["a"], cfg.owa["b"], inputs, output, method=cfg.aggregation)


def cmd_validate_config(cfg: PipelineConfig) -> dict:
    cfg.validate()
    inputs, output = cfg.variables()
    summary = {
        "status": "ok",
        "antecedent_combinations": len(antecedent_combinations(inputs)),
        "inputs": {v.name: v.names for v in inputs},
        "output": output.names,
    }
    if cfg.judgments is not None:
        cfg.validate(need=("judgments",))
        jt = read_judgments(cfg.judgments_path())
        _build(cfg, inputs, output)  # raises on missing or malformed rows
        summary["judgments"] = {"rows": len(jt.antecedents), "experts": jt.n}
    return summary


def cmd_build_rulebase(cfg: PipelineConfig) -> dict:
    cfg.validate(need=("judgments",))
    inputs, output = cfg.variables()
    rb, prov = _build(cfg, inputs, output)
    with _Outputs(cfg.out_dir()) as out:
        write_rulebase(rb, out.path(cfg.out("rulebase")))
        _write_json(out.path(cfg.out("provenance")), prov)
    counts = {s: sum(1 for r in rb.rules if output.names[r.consequent] == s) for s in STYLES}
    return {"status": "ok", "rules": len(rb.rules), "consequents": counts,
            "rulebase": str(cfg.out("rulebase"))}


def cmd_extract(cfg: PipelineConfig) -> dict:
    cfg.validate(need=("trajectories",))
    rows, skipped = [], []
    for path in cfg.trajectory_paths():
        for traj in read_trajectories(path):
            for filt in cfg.filters:
                try:
                    got = trajectory_features(traj, filt, cfg)
                except TooShort:
                    got = []
                if not got:
                    skipped.append(f"{traj.agent_id}/{filt}")
                rows.extend(got)
    if not rows:
        raise DataError("no complete window in any trajectory")
    with _Outputs(cfg.out_dir()) as out:
        _write_csv(out.path(cfg.out("features")), FEATURE_COLUMNS, rows)
    return {"status": "ok", "windows": len(rows), "skipped": skipped,
            "features": str(cfg.out("features"))}


def classify_rows(rb: RuleBase, feats: list[dict], engines) -> list[tuple]:
    rows = []
    for engine in engines:
        infer = infer_t2 if engine == "t2" else infer_t1
        for r in feats:
            res = infer(rb, r["_x"])
            rows.append((r["agent_id"], r["window"], r["filter"], engine,
                         float(res.reduced.left), float(res.reduced.right), float(res.crisp),
                         res.label))
    return rows


def cmd_classify(cfg: PipelineConfig) -> dict:
    cfg.validate()
    inputs, output = cfg.variables()
    feats = _read_features(cfg.out("features"))
    rb = _load_rulebase(cfg, inputs, output)
    rows = classify_rows(rb, feats, cfg.engines)
    with _Outputs(cfg.out_dir()) as out:
        _write_csv(out.path(cfg.out("labels")), LABEL_COLUMNS, rows)
    counts = {}
    for r in rows:
        key = f"{r[2]}/{r[3]}"
        counts.setdefault(key, {s: 0 for s in STYLES})[r[-1]] += 1
    return {"status": "ok", "labels": len(rows), "counts": counts}


def cmd_cluster(cfg: PipelineConfig) -> dict:
    cfg.validate()
    feats = _read_features(cfg.out("features"))
    opts = cfg.clustering
    k = int(opts.get("k", 3))
    models, assigns, metrics = [], [], []
    for filt in _ordered_unique(r["filter"] for r in feats):
        sub = [r for r in feats if r["filter"] == filt]
        X = np.array([r["_x"] for r in sub])
        for method in opts.get("methods", ["kmeans"]):
            model, labels = fit_clusters(X, method, k=k, seed=cfg.seed,
                                         max_iter=int(opts.get("max_iter", 300)),
                                         standardize=bool(opts.get("standardize", True)))
            try:
                names = assign_style_labels(model) if k == len(STYLES) else {}
            except AmbiguousOrdering:
                names = {}
            sil, ch, db = internal_validation(model.transform(X), labels)
            models.append({"filter": filt, "style_map": {str(c): s for c, s in names.items()},
                           **model.to_dict()})
            metrics.append({"filter": filt, "method": method, "silhouette": sil,
                            "calinski_harabasz": ch, "davies_bouldin": db})
            for r, c in zip(sub, labels):
                assigns.append((r["agent_id"], r["window"], filt, method, int(c),
                                names.get(int(c), f"cluster_{int(c)}")))
    with _Outputs(cfg.out_dir()) as out:
        _write_json(out.path(cfg.out("models")), models)
        _write_csv(out.path(cfg.out("assignments")), ASSIGN_COLUMNS, assigns)
        _write_json(out.path(cfg.out("metrics")), metrics)
    return {"status": "ok", "models": len(models), "metrics": metrics}


def _ordered_unique(it):
    return list(OrderedDict.fromkeys(it))


def cmd_report(cfg: PipelineConfig) -> dict:
    cfg.validate()
    feats = _read_features(cfg.out("features"))
    by_key = {(r["agent_id"], r["window"], r["filter"]): r["_x"] for r in feats}
    groups: OrderedDict[tuple[str, str], list[tuple[np.ndarray, str]]] = OrderedDict()

    def collect(rows, source_of):
        for r in rows:
            key = (r["agent_id"], r["window"], r["filter"])
            if key not in by_key:
                raise DataError(f"no feature row for {key}")
            groups.setdefault((source_of(r), r["filter"]), []).append((by_key[key], r["label"]))

    found = False
    if cfg.out("labels").is_file():
        collect(_read_csv(cfg.out("labels"), LABEL_COLUMNS), lambda r: f"fis-{r['engine']}")
        found = True
    if cfg.out("assignments").is_file():
        collect(_read_csv(cfg.out("assignments"), ASSIGN_COLUMNS), lambda r: r["method"])
        found = True
    if not found:
        raise DataError(f"nothing to report: neither {cfg.out('labels')} nor "
                        f"{cfg.out('assignments')} exists")
    tables = OrderedDict()
    for key, items in groups.items():
        X = np.array([x for x, _ in items])
        labels = [lab for _, lab in items]
        extra = sorted(set(labels) - set(STYLES))
        tables[key] = describe_by_class(X, labels, list(INPUT_ORDER), list(STYLES) + extra)
    with _Outputs(cfg.out_dir()) as out:
        write_report_csv(report_rows(tables), out.path(cfg.out("report_csv")))
        write_report_json(tables, out.path(cfg.out("report_json")))
    means = {f"{s}/{f}": {c: (None if t[c]["mean_velocity"] is None else t[c]["mean_velocity"].mean)
                          for c in STYLES}
             for (s, f), t in tables.items()}
    return {"status": "ok", "tables": len(tables), "mean_velocity": means}


def cmd_run(cfg: PipelineConfig) -> dict:
    """build-rulebase (when judgments are configured), extract, classify, cluster, report."""
    steps = {}
    if cfg.judgments is not None:
        steps["build-rulebase"] = cmd_build_rulebase(cfg)
    steps["extract"] = cmd_extract(cfg)
    steps["classify"] = cmd_classify(cfg)
    if cfg.clustering.get("methods"):
        steps["cluster"] = cmd_cluster(cfg)
    steps["report"] = cmd_report(cfg)
    return {"status": "ok", "steps": {k: v.get("status") for k, v in steps.items()}}


COMMANDS: dict[str, Callable[[PipelineConfig], dict]] = {
    "validate-config": cmd_validate_config,
    "build-rulebase": cmd_build_rulebase,
    "extract": cmd_extract,
    "classify": cmd_classify,
    "cluster": cmd_cluster,
    "report": cmd_report,
    "run": cmd_run,
}


def run_pipeline(cmd: str, cfg: PipelineConfig) -> dict:
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown subcommand {cmd!r}")
    return COMMANDS[cmd](cfg)


def dump_default_config(path, paths: dict | None = None, **settings) -> None:
    """Write a config holding the default partitions (with subsets as objects).

    ``settings`` replace top-level keys, ``paths`` is merged into the paths block.
    """
    inputs, output = load_partitions(DEFAULT_PARTITIONS)
    d = PipelineConfig().to_dict()
    d["partitions"] = {"inputs": [variable_to_dict(v) for v in inputs],
                       "output": variable_to_dict(output)}
    d.update(settings)
    d["paths"].update(paths or {})
    _write_json(Path(path), d)
