"""YAML experiment configs.

Every run is determined by the file plus its mandatory ``seed``.  Validation
errors name the offending key and the line it sits on.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import yaml

from .errors import ConfigError

EXPERIMENTS = ("E1", "E2", "E3", "E5", "custom")
REGIMES = ("fixed_exp", "fixed_linear", "heavy_tail")


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    n: list = field(default_factory=lambda: [5000])
    d: int = 1
    rho: float = 1.0
    lam: float | None = None
    target_mean_degree: float | None = None
    theta: list = field(default_factory=lambda: [0.0])
    alpha: list = field(default_factory=lambda: [2.5])
    regime: list = field(default_factory=lambda: ["fixed_linear"])
    replicates: int = 1
    output_dir: str = "out"
    options: dict = field(default_factory=dict)

    def to_yaml(self):
        return yaml.safe_dump(asdict(self), sort_keys=False, default_flow_style=None)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_yaml())

    @classmethod
    def from_yaml(cls, text):
        return _parse(text)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return _parse(text)


_LIST_KEYS = ("n", "theta", "alpha", "regime")


def _key_lines(text):
    """Top-level key -> 1-based line number."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark else ""
        raise ConfigError(f"{where}invalid YAML: {getattr(exc, 'problem', exc)}") from None
    if node is None or not isinstance(node, yaml.MappingNode):
        raise ConfigError("line 1: config must be a mapping of keys to values")
    return {k.value: k.start_mark.line + 1 for k, _ in node.value}


def _parse(text):
    lines = _key_lines(text)
    raw = yaml.safe_load(text)

    def fail(key, msg):
        where = f"line {lines[key]}: " if key in lines else ""
        raise ConfigError(f"{where}{key}: {msg}")

    known = {f.name for f in fields(ExperimentConfig)}
    for k in raw:
        if k not in known:
            fail(k, "unknown key")
    for k in ("experiment", "seed"):
        if k not in raw:
            raise ConfigError(f"missing required key '{k}'")
    for k in _LIST_KEYS:
        if k in raw and not isinstance(raw[k], list):
            raw[k] = [raw[k]]
    cfg = ExperimentConfig(**raw)

    if cfg.experiment not in EXPERIMENTS:
        fail("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
    if not isinstance(cfg.seed, int) or isinstance(cfg.seed, bool):
        fail("seed", "must be an integer")
    if not isinstance(cfg.replicates, int) or cfg.replicates < 1:
        fail("replicates", "must be an integer >= 1")
    if not cfg.n or any(not isinstance(v, int) or v < 1 for v in cfg.n):
        fail("n", "must be positive integers")
    if not isinstance(cfg.d, int) or cfg.d < 1:
        fail("d", "must be an integer >= 1")
    if not isinstance(cfg.rho, (int, float)) or not cfg.rho > 0:
        fail("rho", "must be positive")
    if cfg.lam is None and cfg.target_mean_degree is None:
        raise ConfigError("one of 'lam' or 'target_mean_degree' is required")
    if cfg.lam is not None and not cfg.lam > 0:
        fail("lam", "must be positive")
    if cfg.target_mean_degree is not None and not cfg.target_mean_degree > 0:
        fail("target_mean_degree", "must be positive")
    if any(not isinstance(t, (int, float)) or not 0 <= t <= 1 for t in cfg.theta):
        fail("theta", "values must lie in [0, 1]")
    if any(not isinstance(a, (int, float)) or not a > 1 for a in cfg.alpha):
        fail("alpha", "tail indices must exceed 1")
    if any(r not in REGIMES for r in cfg.regime):
        fail("regime", f"values must be among {', '.join(REGIMES)}")
    if not isinstance(cfg.options, dict):
        fail("options", "must be a mapping")
    return cfg
