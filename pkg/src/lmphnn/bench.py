"""Experiment pipeline behind the command line: load, split, sweep, tabulate."""

from __future__ import annotations

import configparser
import logging
import os
import tempfile
from collections import defaultdict
from dataclasses import dataclass, field, replace

import numpy as np

from .classifiers import ALL_KINDS, ClassifierKind
from .dataset import Dataset, apply_normalization, load_csv, normalize, stratified_split
from .evaluation import METRICS, k_sensitivity, run_sweep, runs_to_csv, runs_to_jsonl

logger = logging.getLogger(__name__)

SEED_BASE_ENV = "LMPHNN_SEED_BASE"
FORMATS = ("csv", "md", "jsonl")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    data: tuple = ()
    label_col: str = "last"
    encode: str = "ordinal"
    normalize: str = "none"
    header: bool | None = None
    ratio: float = 0.5
    seeds: tuple = tuple(range(9))
    k_range: tuple = tuple(range(2, 11))
    kinds: tuple = ALL_KINDS
    out: str = "results"
    formats: tuple = ("csv", "md")
    timing: bool = False

    def validate(self) -> ExperimentConfig:
        if not self.data:
            raise ConfigError("no dataset given")
        if self.encode not in ("ordinal", "onehot", "one-hot"):
            raise ConfigError(f"unknown encoding {self.encode!r}")
        if self.normalize not in ("none", "zscore", "minmax"):
            raise ConfigError(f"unknown normalization {self.normalize!r}")
        if not 0.0 < self.ratio < 1.0:
            raise ConfigError(f"ratio must be in (0, 1), got {self.ratio}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not self.k_range or min(self.k_range) < 1 or max(self.k_range) > 50:
            raise ConfigError("k range must lie within [1, 50]")
        if not self.kinds:
            raise ConfigError("at least one classifier kind is required")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ConfigError(f"unknown output format(s): {sorted(bad)}")
        return self


# --------------------------------------------------------------------------
# parsing of flag / config-file values


def parse_k_range(text: str) -> tuple:
    """``"2..10"`` -> (2, ..., 10); a single integer is a one-element range."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise ConfigError(f"bad k range {text!r}; expected a..b") from None
    if lo > hi:
        raise ConfigError(f"empty k range {text!r}")
    return tuple(range(lo, hi + 1))


def parse_seeds(text: str, base: int = 0) -> tuple:
    """``"9"`` -> nine seeds starting at ``base``; ``"3,5,8"`` -> those seeds."""
    text = str(text).strip()
    try:
        if "," in text:
            return tuple(int(s) for s in text.split(",") if s.strip())
        n = int(text)
    except ValueError:
        raise ConfigError(f"bad seed spec {text!r}") from None
    if n < 1:
        raise ConfigError("seed count must be positive")
    return tuple(range(base, base + n))


def parse_kinds(text) -> tuple:
    if isinstance(text, str):
        if text.strip().lower() == "all":
            return ALL_KINDS
        text = [t for t in text.split(",") if t.strip()]
    try:
        return tuple(ClassifierKind.parse(t.strip()) for t in text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_formats(text: str) -> tuple:
    return tuple(f.strip().lower() for f in str(text).split(",") if f.strip())


def seed_base_from_env() -> int:
    raw = os.environ.get(SEED_BASE_ENV)
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_BASE_ENV} must be an integer, got {raw!r}") from None


def load_config_file(path) -> dict:
    """Read the ``[experiment]`` section of an INI file into config overrides.

    Keys mirror the command-line flags: ``data`` (whitespace separated),
    ``label_col``, ``encode``, ``normalize``, ``ratio``, ``seeds``,
    ``seed_base``, ``k``, ``kinds``, ``out``, ``format``, ``timing``.
    """
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise ConfigError(f"cannot read config file {path}")
    if not parser.has_section("experiment"):
        raise ConfigError(f"{path}: missing [experiment] section")
    sec = parser["experiment"]
    out: dict = {}
    try:
        if "data" in sec:
            out["data"] = tuple(sec["data"].split())
        for key in ("label_col", "encode", "normalize", "out"):
            if key in sec:
                out[key] = sec[key].strip()
        if "ratio" in sec:
            out["ratio"] = sec.getfloat("ratio")
        if "seed_base" in sec:
            out["seed_base"] = sec.getint("seed_base")
        if "seeds" in sec:
            out["seeds"] = sec["seeds"]
        if "k" in sec:
            out["k_range"] = parse_k_range(sec["k"])
        if "kinds" in sec:
            out["kinds"] = parse_kinds(sec["kinds"])
        if "format" in sec:
            out["formats"] = parse_formats(sec["format"])
        if "timing" in sec:
            out["timing"] = sec.getboolean("timing")
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return out


# --------------------------------------------------------------------------
# running


def load_dataset(path, config: ExperimentConfig) -> Dataset:
    return load_csv(path, label_column=config.label_col, encode=config.encode, header=config.header)


def run_dataset(dataset: Dataset, config: ExperimentConfig) -> list[dict]:
    """Raw per-run records for one dataset, ordered by seed, kind, k."""
    rows = []
    for seed in config.seeds:
        split = stratified_split(dataset, config.ratio, seed)
        train, scaler = normalize(split.train, config.normalize)
        test = apply_normalization(split.test, scaler)
        logger.info("%s seed=%d: %d train / %d test", dataset.name, seed, train.n_samples, test.n_samples)
        result = run_sweep(train, test, config.kinds, config.k_range, seed)
        rows.extend(result.rows(timing=config.timing))
    return rows


def run_experiment(config: ExperimentConfig) -> list[dict]:
    config.validate()
    rows = []
    for path in config.data:
        rows.extend(run_dataset(load_dataset(path, config), config))
    return rows


# --------------------------------------------------------------------------
# aggregation


def _ordered(values):
    return list(dict.fromkeys(values))


def summary_table(rows: list[dict], metric: str) -> dict:
    """``{dataset: {kind: mean of metric over seeds and k}}``."""
    acc = defaultdict(list)
    for r in rows:
        acc[r["dataset"], r["kind"]].append(r[metric])
    table: dict = {}
    for (ds, kind), vals in acc.items():
        table.setdefault(ds, {})[kind] = float(np.mean(vals))
    return table


def curve_points(rows: list[dict], kind: str, metric: str) -> list[tuple]:
    """``(dataset, k, mean, std)`` over seeds for one kind and metric."""
    acc = defaultdict(list)
    for r in rows:
        if r["kind"] == kind:
            acc[r["dataset"], r["k"]].append(r[metric])
    return [
        (ds, k, float(np.mean(v)), float(np.std(v))) for (ds, k), v in acc.items()
    ]


@dataclass
class Sensitivity:
    dataset: str
    kind: str
    metric: str
    sigma: float
    sigma_seed_mean: float
    sigma_seed_std: float
    per_seed: dict = field(default_factory=dict)


def sensitivity_table(rows: list[dict]) -> list[Sensitivity]:
    """k-sensitivity per (dataset, kind, metric).

    ``sigma`` is taken over the seed-averaged k curve; ``per_seed`` holds the
    sigma of each seed's own curve.
    """
    curves = defaultdict(lambda: defaultdict(dict))
    for r in rows:
        for m in METRICS:
            curves[r["dataset"], r["kind"], m][r["seed"]][r["k"]] = r[m]
    out = []
    for (ds, kind, m), by_seed in curves.items():
        ks = sorted(next(iter(by_seed.values())))
        if len(ks) < 2:
            raise ConfigError("k-sensitivity needs a k range of at least 2 values")
        grid = np.array([[by_seed[s][k] for k in ks] for s in by_seed])
        per_seed = {s: k_sensitivity(grid[i]) for i, s in enumerate(by_seed)}
        sig = np.array(list(per_seed.values()))
        out.append(
            Sensitivity(
                ds, kind, m, k_sensitivity(grid.mean(axis=0)),
                float(sig.mean()), float(sig.std()), per_seed,
            )
        )
    return out


# --------------------------------------------------------------------------
# rendering


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def _markdown_grid(title: str, row_names, col_names, cell) -> str:
    lines = [f"### {title}", "", "| | " + " | ".join(col_names) + " |"]
    lines.append("|---" * (len(col_names) + 1) + "|")
    for r in row_names:
        lines.append(f"| {r} | " + " | ".join(cell(r, c) for c in col_names) + " |")
    return "\n".join(lines) + "\n"


def render_summary_md(rows: list[dict]) -> str:
    datasets = _ordered(r["dataset"] for r in rows)
    kinds = _ordered(r["kind"] for r in rows)
    parts = []
    for m in METRICS:
        table = summary_table(rows, m)
        parts.append(_markdown_grid(m.capitalize(), datasets, kinds, lambda d, k: _fmt(table[d][k])))
    return "\n".join(parts)


def render_summary_csv(rows: list[dict]) -> str:
    kinds = _ordered(r["kind"] for r in rows)
    datasets = _ordered(r["dataset"] for r in rows)
    lines = [",".join(["dataset", "metric", *kinds])]
    for m in METRICS:
        table = summary_table(rows, m)
        for d in datasets:
            lines.append(",".join([d, m, *(repr(table[d][k]) for k in kinds)]))
    return "\n".join(lines) + "\n"


def render_curve_csv(rows: list[dict], kind: str) -> str:
    lines = ["dataset,metric,k,mean,std"]
    for m in METRICS:
        for ds, k, mean, std in curve_points(rows, kind, m):
            lines.append(f"{ds},{m},{k},{mean!r},{std!r}")
    return "\n".join(lines) + "\n"


def render_sensitivity_csv(table: list[Sensitivity]) -> str:
    lines = ["dataset,kind,metric,sigma,sigma_seed_mean,sigma_seed_std"]
    for s in table:
        lines.append(
            f"{s.dataset},{s.kind},{s.metric},{s.sigma!r},{s.sigma_seed_mean!r},{s.sigma_seed_std!r}"
        )
    return "\n".join(lines) + "\n"


def render_sensitivity_md(table: list[Sensitivity]) -> str:
    datasets = _ordered(s.dataset for s in table)
    kinds = _ordered(s.kind for s in table)
    lookup = {(s.dataset, s.kind, s.metric): s for s in table}
    parts = []
    for m in METRICS:
        parts.append(
            _markdown_grid(
                f"Standard deviation of {m} over k",
                datasets,
                kinds,
                lambda d, k: _fmt(lookup[d, k, m].sigma),
            )
        )
    return "\n".join(parts)


def bench_artifacts(rows: list[dict], formats) -> dict:
    files = {"runs.csv": runs_to_csv(rows)}
    if "jsonl" in formats:
        files["runs.jsonl"] = runs_to_jsonl(rows)
    if "csv" in formats:
        files["summary.csv"] = render_summary_csv(rows)
    if "md" in formats:
        files["summary.md"] = render_summary_md(rows)
    for kind in _ordered(r["kind"] for r in rows):
        files[os.path.join("curves", f"{kind}.csv")] = render_curve_csv(rows, kind)
    return files


def sensitivity_artifacts(rows: list[dict], formats) -> dict:
    table = sensitivity_table(rows)
    files = {"runs.csv": runs_to_csv(rows), "sensitivity.csv": render_sensitivity_csv(table)}
    if "md" in formats:
        files["sensitivity.md"] = render_sensitivity_md(table)
    if "jsonl" in formats:
        files["runs.jsonl"] = runs_to_jsonl(rows)
    return files


def write_artifacts(out_dir, files: dict) -> list[str]:
    """Write every file via a temporary sibling and an atomic rename."""
    written = []
    for rel, text in files.items():
        path = os.path.join(out_dir, rel)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        written.append(path)
    return written


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(config, **{k: v for k, v in changes.items() if v is not None})
