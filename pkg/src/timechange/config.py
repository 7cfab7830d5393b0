"""Run configuration: a YAML file naming a model, an action and numeric settings.

Example::

    model:
      base: {name: brownian, drift: 0.0, variance: 1.0}
      clock: {name: selfdec, gamma: 1.0, nu: 0.5}
    action: charfn
    numeric:
      seed: 42
      t: 1.0
      u: [-2.0, -1.0, 1.0, 2.0]
    output: {path: out, format: csv}

``model: {name: selfdec, gamma: ..., nu: ...}`` is shorthand for standard
Brownian motion on the self-decomposable clock.  See the README for every key.
"""
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import levy, selfdec
from .errors import ConfigError
from .subordination import TimeChangedModel
from .subordinator import DEFAULT_EPS, drift_clock, exponential_kernel, trivial_clock

ACTIONS = ("simulate", "charfn", "triplet", "generator-check", "validate", "price")
FORMATS = ("csv", "json")


def _num(section, key, default=None, positive=False, nonneg=False):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing numeric key '{key}'")
        return default
    try:
        # YAML 1.1 reads '1e-4' as a string
        val = float(section[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{key}' must be a number, got {section[key]!r}") from exc
    if not np.isfinite(val):
        raise ConfigError(f"'{key}' must be finite")
    if positive and val <= 0.0:
        raise ConfigError(f"'{key}' must be positive")
    if nonneg and val < 0.0:
        raise ConfigError(f"'{key}' must be nonnegative")
    return val


def _num_list(section, key, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing key '{key}'")
        return np.asarray(default, dtype=float)
    raw = section[key]
    if isinstance(raw, dict):
        start = _num(raw, "start")
        stop = _num(raw, "stop")
        num = int(_num(raw, "num", positive=True))
        return np.linspace(start, stop, num)
    if not isinstance(raw, (list, tuple)):
        raw = [raw]
    try:
        return np.asarray([float(v) for v in raw], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{key}' must be a list of numbers") from exc


def _time_fn(raw, key):
    """Constant, or ``{coef: c, power: p}`` meaning ``c s^p``; returns (fn, integral)."""
    if isinstance(raw, dict):
        c = _num(raw, "coef", nonneg=True)
        p = _num(raw, "power", 0.0)
        if p <= -1.0:
            raise ConfigError(f"'{key}.power' must exceed -1")
        fn = lambda s: c * np.power(s, p)  # noqa: E731
        integral = lambda s0, s1: c * (s1 ** (p + 1.0) - s0 ** (p + 1.0)) / (p + 1.0)  # noqa: E731
        return fn, integral
    try:
        c = float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{key}' must be a number or {{coef, power}}") from exc
    return c, (lambda s0, s1: c * (s1 - s0))


def _params(section, allowed):
    extra = set(section) - set(allowed) - {"name"}
    if extra:
        raise ConfigError(f"unknown keys {sorted(extra)} for '{section.get('name')}'")


def build_base(section):
    name = section.get("name")
    if name == "brownian":
        _params(section, ("drift", "variance"))
        return levy.brownian(_num(section, "drift", 0.0), _num(section, "variance", 1.0, nonneg=True))
    if name == "pure_drift":
        _params(section, ("drift",))
        return levy.pure_drift(_num(section, "drift", 1.0))
    if name == "zero":
        _params(section, ())
        return levy.zero_process()
    if name == "merton":
        keys = ("drift", "variance", "rate", "jump_mean", "jump_std")
        _params(section, keys)
        return levy.merton(_num(section, "drift", 0.0), _num(section, "variance", 1.0, nonneg=True),
                           _num(section, "rate", 1.0, nonneg=True), _num(section, "jump_mean", 0.0),
                           _num(section, "jump_std", 0.5, nonneg=True))
    if name == "point_jumps":
        keys = ("rate", "size", "drift", "variance")
        _params(section, keys)
        return levy.point_jumps(_num(section, "rate", 1.0, nonneg=True), _num(section, "size", 1.0),
                                _num(section, "drift", 0.0), _num(section, "variance", 0.0, nonneg=True))
    raise ConfigError(f"unknown base process '{name}'")


def build_clock(section):
    name = section.get("name")
    if name == "trivial":
        _params(section, ())
        return trivial_clock()
    if name == "drift":
        _params(section, ("beta",))
        fn, integral = _time_fn(section.get("beta", 1.0), "beta")
        return drift_clock(fn, integral)
    if name == "exponential_kernel":
        _params(section, ("beta", "a", "b", "domain_start"))
        beta, _ = _time_fn(section.get("beta", 0.0), "beta")
        a, _ = _time_fn(section.get("a", 1.0), "a")
        b, _ = _time_fn(section.get("b", 1.0), "b")
        return exponential_kernel(beta, a, b, domain_start=_num(section, "domain_start", 0.0,
                                                                  nonneg=True))
    if name == "selfdec":
        _params(section, ("gamma", "nu", "domain_start"))
        p = selfdec.SelfDecParams(_num(section, "gamma", positive=True),
                                  _num(section, "nu", positive=True))
        return selfdec.clock(p, _num(section, "domain_start", selfdec.DOMAIN_START, positive=True))
    raise ConfigError(f"unknown clock '{name}'")


def build_model(section):
    if not isinstance(section, dict):
        raise ConfigError("'model' must be a mapping")
    if section.get("name") == "selfdec":
        _params(section, ("gamma", "nu", "domain_start"))
        return TimeChangedModel(levy.brownian(0.0, 1.0), build_clock(section))
    if "base" not in section or "clock" not in section:
        raise ConfigError("'model' needs 'base' and 'clock' sections (or name: selfdec)")
    if not isinstance(section["base"], dict) or not isinstance(section["clock"], dict):
        raise ConfigError("'model.base' and 'model.clock' must be mappings")
    return TimeChangedModel(build_base(section["base"]), build_clock(section["clock"]))


@dataclass
class RunConfig:
    model: TimeChangedModel
    action: str
    numeric: dict
    output_path: str = "out"
    output_format: str = "csv"
    market: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @property
    def seed(self):
        return int(self.numeric["seed"])

    @property
    def eps(self):
        return _num(self.numeric, "eps", DEFAULT_EPS, positive=True)


def parse_config(raw, seed_override=None):
    """Validate a parsed YAML mapping and build the model it names."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(raw) - {"model", "action", "numeric", "output", "market"}
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    action = raw.get("action")
    if action not in ACTIONS:
        raise ConfigError(f"'action' must be one of {ACTIONS}, got {action!r}")
    numeric = dict(raw.get("numeric") or {})
    if seed_override is not None:
        numeric["seed"] = seed_override
    if "seed" not in numeric:
        raise ConfigError("'numeric.seed' is required")
    try:
        seed = int(numeric["seed"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("'numeric.seed' must be an integer") from exc
    if seed < 0 or seed >= 2 ** 64:
        raise ConfigError("'numeric.seed' must fit in an unsigned 64-bit integer")
    numeric["seed"] = seed
    for key in ("n_paths", "eps", "t"):
        if key in numeric:
            _num(numeric, key, positive=True)
    output = raw.get("output") or {}
    fmt = output.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"'output.format' must be one of {FORMATS}")
    try:
        model = build_model(raw.get("model"))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc
    market = raw.get("market") or {}
    if action == "price" and not market:
        raise ConfigError("action 'price' needs a 'market' section")
    return RunConfig(model, action, numeric, str(output.get("path", "out")), fmt, market, raw)


def load_config(path, seed_override=None):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return parse_config(raw, seed_override)
