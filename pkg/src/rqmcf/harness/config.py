from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from ..errors import ConfigError
from ..kernels import FAMILIES

EXPERIMENTS = ("approx_avg", "approx_sup_avg", "approx_det", "krr_bench")
FEATURE_SAMPLERS = ("mc", "halton", "sobol_owen", "sobol_cp")
DEFAULT_M_GRID = tuple(2**k for k in range(4, 13))
DEFAULT_D_GRID = (1, 2, 5, 10, 20)


def normalize_sampler(name: str) -> str:
    name = name.strip().lower().replace("-", "_")
    if name not in FEATURE_SAMPLERS:
        raise ConfigError(f"unknown sampler {name!r}; choose from {', '.join(FEATURE_SAMPLERS)}")
    return name


def parse_m_grid(text: str) -> tuple[int, ...]:
    """``"16,32,64"`` lists M values; ``"4:12"`` is the log2 range 2^4..2^12."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi = (int(v) for v in text.split(":"))
            return tuple(2**k for k in range(lo, hi + 1))
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse M grid {text!r}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one benchmark run.

    ``None`` for ``n_pairs``/``trials`` selects the experiment's default;
    ``None`` for ``sigma`` selects the median-heuristic bandwidth.
    """

    experiment: str = "approx_avg"
    d: int = 1
    kernel: str = "gaussian"
    samplers: tuple[str, ...] = ("mc", "halton", "sobol_owen")
    m_grid: tuple[int, ...] = DEFAULT_M_GRID
    n_pairs: int | None = None
    n_train: int = 2048
    n_test: int = 10**5
    trials: int | None = None
    r: float = 1.0
    master_seed: int = 0
    output: str = "results.csv"
    sigma: float | None = None
    bandwidth_probes: int = 10**6
    calibration_probes: int = 10**6
    lambda_coef: float = 0.25
    include_exact: bool = True
    workers: int = 1
    timing: bool = False

    def resolved(self) -> "ExperimentConfig":
        """Fill experiment-dependent defaults and validate."""
        cfg = self
        if cfg.n_pairs is None:
            cfg = replace(cfg, n_pairs=10**4 if cfg.experiment == "approx_det" else 10**3)
        if cfg.trials is None:
            cfg = replace(cfg, trials=50 if cfg.experiment == "krr_bench" else 100)
        cfg = replace(cfg, samplers=tuple(normalize_sampler(s) for s in cfg.samplers), m_grid=tuple(cfg.m_grid))
        cfg.validate()
        return cfg

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.kernel not in FAMILIES:
            raise ConfigError(f"unknown kernel {self.kernel!r}")
        if self.experiment == "krr_bench" and self.kernel != "gaussian":
            raise ConfigError("the KRR benchmark targets are defined for the gaussian kernel")
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        if not self.m_grid:
            raise ConfigError("M grid is empty")
        for a, b in zip(self.m_grid, self.m_grid[1:]):
            if b <= a:
                raise ConfigError("M grid must be strictly increasing")
        for M in self.m_grid:
            if M < 1 or M & (M - 1):
                raise ConfigError(f"M grid entries must be powers of two, got {M}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n_pairs is not None and self.n_pairs < 1:
            raise ConfigError("n_pairs must be >= 1")
        if self.n_train < 1 or self.n_test < 1:
            raise ConfigError("n_train and n_test must be >= 1")
        if self.experiment == "krr_bench" and self.r not in (0.5, 1.0):
            raise ConfigError("krr_bench needs r in {0.5, 1}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")

    def as_dict(self) -> dict:
        out = asdict(self)
        out["samplers"] = list(self.samplers)
        out["m_grid"] = list(self.m_grid)
        return out


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def coerce(key: str, value: str):
    """Convert one textual ``key=value`` setting to the field's type."""
    key = key.strip().replace("-", "_")
    if key == "seed":
        key = "master_seed"
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    value = value.strip()
    kind = _FIELD_TYPES[key]
    try:
        if key == "samplers":
            return key, tuple(v for v in value.split(",") if v.strip())
        if key == "m_grid":
            return key, parse_m_grid(value)
        if key == "d" and "," in value:
            return key, tuple(int(v) for v in value.split(",") if v.strip())
        if key in ("include_exact", "timing"):
            if value.lower() not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(value)
            return key, value.lower() in ("1", "true", "yes")
        if value.lower() in ("", "none") and "None" in kind:
            return key, None
        if "float" in kind:
            return key, float(value)
        if "int" in kind:
            return key, int(float(value)) if "e" in value.lower() else int(value)
        return key, value
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def read_config_file(path: str | Path) -> dict:
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        k, v = coerce(k, v)
        out[k] = v
    return out


def build_config(file_values: dict | None = None, overrides: dict | None = None, **base) -> ExperimentConfig:
    """Defaults, then config-file values, then explicit overrides."""
    values = dict(base)
    values.update(file_values or {})
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig(**values).resolved()
