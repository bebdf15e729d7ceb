"""Experiment configuration: fields, defaults, file parsing, validation.

Config files are flat ``key = value`` text: one pair per line, ``#`` starts
a comment, blank lines ignored.  Keys are exactly the ExperimentConfig field
names below.  Unknown or duplicate keys are rejected, as are parameters that
the selected algorithm does not use (p_prop is dl-only, t_rw is hybrid-only).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

ALGOS = ("rw", "prop", "dl", "hybrid")


class ConfigError(ValueError):
    """Invalid configuration; message always names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass
class ExperimentConfig:
    """One experiment cell: grid, task process, policy and run parameters.

    Defaults are the baseline setup used throughout the experiments:
    50x50 grid, 50 followers, demands N(6, 3), t_d=5, influence radii 2,
    propagation every 3 rounds up to distance 25, 2000 rounds, 50 trials.
    """

    algo: str
    m: int = 50                  # grid columns
    n: int = 50                  # grid rows
    follower_count: int = 50
    lambda_inv: float = 5e4      # mean rounds between arrivals per vertex
    demand_mean: float = 6.0
    demand_var: float = 3.0
    t_d: int = 5                 # consecutive rounds per unit of work
    i: int = 2                   # follower influence radius (Chebyshev)
    i_p: int = 2                 # propagator influence radius (Chebyshev)
    t_p: int = 3                 # rounds between propagation exchanges
    d_p: float = 25.0            # max Euclidean distance records travel
    p_prop: Optional[float] = None   # dl only: fraction of followers on prop
    t_rw: Optional[int] = None       # hybrid only: forced walk length, rounds
    levy_alpha: float = 1.5
    rounds: int = 2000
    trials: int = 50
    master_seed: int = 12345

    def validate(self) -> "ExperimentConfig":
        if self.algo not in ALGOS:
            raise ConfigError("algo", f"must be one of {', '.join(ALGOS)}")
        for field in ("m", "n", "follower_count", "t_d", "t_p", "rounds", "trials"):
            if getattr(self, field) < 1:
                raise ConfigError(field, "must be >= 1")
        for field in ("i", "i_p"):
            if getattr(self, field) < 0:
                raise ConfigError(field, "must be >= 0")
        if not self.lambda_inv > 0:
            raise ConfigError("lambda_inv", "must be > 0 (inf disables arrivals)")
        if not self.demand_var > 0:
            raise ConfigError("demand_var", "must be > 0")
        if self.d_p < 0:
            raise ConfigError("d_p", "must be >= 0")
        if self.levy_alpha <= 0:
            raise ConfigError("levy_alpha", "must be > 0")
        if self.algo == "dl":
            if self.p_prop is None:
                raise ConfigError("p_prop", "required when algo = dl")
            if not 0.0 <= self.p_prop <= 1.0:
                raise ConfigError("p_prop", "must be in [0, 1]")
        elif self.p_prop is not None:
            raise ConfigError("p_prop", "only valid when algo = dl")
        if self.algo == "hybrid":
            if self.t_rw is None:
                raise ConfigError("t_rw", "required when algo = hybrid")
            if self.t_rw < 0:
                raise ConfigError("t_rw", "must be >= 0")
        elif self.t_rw is not None:
            raise ConfigError("t_rw", "only valid when algo = hybrid")
        return self

    def replaced(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_INT_FIELDS = {"m", "n", "follower_count", "t_d", "i", "i_p", "t_p", "t_rw",
               "rounds", "trials", "master_seed"}
_FLOAT_FIELDS = {"lambda_inv", "demand_mean", "demand_var", "d_p", "p_prop",
                 "levy_alpha"}


def _coerce(field: str, raw: str):
    raw = raw.strip()
    if field == "algo":
        return raw.lower()
    try:
        if field in _INT_FIELDS:
            return int(raw, 10)
        if field in _FLOAT_FIELDS:
            value = float(raw)
            if math.isnan(value):
                raise ValueError
            return value
    except ValueError:
        raise ConfigError(field, f"cannot parse value {raw!r}") from None
    raise ConfigError(field, "unknown key")


def parse_config_text(text: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Parse key=value text into a validated ExperimentConfig."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip()
        if key not in {f.name for f in dataclasses.fields(ExperimentConfig)}:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "duplicate key")
        values[key] = _coerce(key, raw)
    if overrides:
        values.update(overrides)
    if "algo" not in values:
        raise ConfigError("algo", "required (one of %s)" % ", ".join(ALGOS))
    return ExperimentConfig(**values).validate()


def parse_config(path: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Read and validate a config file.  See module docstring for the format."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), overrides)
