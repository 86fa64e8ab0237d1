"""Scenario files: flat ``key = value`` lines with ``#`` comments.

Unknown keys, duplicate keys and malformed lines are rejected.  Example::

    alpha = 0.1
    gamma = 3
    rm = 0.75
    wom = on
    warranty = off
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError, DomainError
from .params import DemandDensity, ModelParams

FLOAT_KEYS = ("alpha", "gamma", "c", "beta", "r0", "rm", "f0", "cw", "d", "b",
              "beta0", "beta1", "density_mu", "density_sigma", "r0_ue")
INT_KEYS = ("n_periods",)
SWITCH_KEYS = ("wom", "warranty")
REQUIRED_KEYS = ("alpha", "gamma", "rm")
WARRANTY_KEYS = ("f0", "cw", "d", "b", "beta0", "beta1")
KNOWN_KEYS = FLOAT_KEYS + INT_KEYS + SWITCH_KEYS + ("density", "estimation", "output")
_SWITCH = {"on": True, "off": False, "true": True, "false": False, "yes": True, "no": False}


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario.

    ``params.r0`` holds the configured ``r0``; :attr:`active_params`
    substitutes ``r0_ue`` when ``estimation = UE``.
    """

    params: ModelParams
    wom: bool = True
    warranty: bool = False
    estimation: str = "OE"
    r0_ue: Optional[float] = None
    output: Optional[str] = None

    @property
    def active_params(self) -> ModelParams:
        if self.estimation == "UE":
            return self.params.replace(r0=self.require_r0_ue())
        return self.params

    def require_r0_ue(self) -> float:
        if self.r0_ue is None:
            raise ConfigError("r0_ue is required for the underestimation case", key="r0_ue")
        return self.r0_ue

    def require_warranty(self) -> None:
        missing = [k for k in WARRANTY_KEYS if getattr(self.params, k) is None]
        if missing:
            raise ConfigError("warranty keys missing: " + ", ".join(missing), key=missing[0])


def parse_lines(text: str) -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", key=key)
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", key=key)
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}", key=key)
        raw[key] = value
    return raw


def _convert(key, value):
    try:
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            return int(value)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as a number", key=key) from None
    if key in SWITCH_KEYS:
        try:
            return _SWITCH[value.lower()]
        except KeyError:
            raise ConfigError(f"{key}: expected on/off, got {value!r}", key=key) from None
    return value


def _param_key(message):
    """Config key named at the start of a validation message."""
    words = message.split()
    if words[:1] == ["density"] and len(words) > 1:
        return "density_" + words[1]
    return words[0] if words and words[0] in KNOWN_KEYS else None


def build_config(raw: dict) -> ScenarioConfig:
    values = {k: _convert(k, v) for k, v in raw.items()}
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}", key=key)
    estimation = values.pop("estimation", "OE").upper()
    if estimation not in ("OE", "UE"):
        raise ConfigError(f"estimation: expected OE or UE, got {estimation!r}", key="estimation")
    kind = values.pop("density", "uniform")
    mu, sigma = values.pop("density_mu", 0.5), values.pop("density_sigma", 0.2)
    use_wom, use_warranty = values.pop("wom", True), values.pop("warranty", False)
    r0_ue, output = values.pop("r0_ue", None), values.pop("output", None)
    if r0_ue is not None and not 0.0 <= r0_ue <= 1.0:
        raise ConfigError(f"r0_ue must lie in [0, 1], got {r0_ue}", key="r0_ue")
    if kind not in ("uniform", "truncnorm"):
        raise ConfigError(f"density: expected uniform or truncnorm, got {kind!r}", key="density")
    try:
        params = ModelParams(density=DemandDensity(kind, mu, sigma), **values)
    except DomainError as exc:
        raise ConfigError(str(exc), key=_param_key(str(exc))) from None
    cfg = ScenarioConfig(params, use_wom, use_warranty, estimation, r0_ue, output)
    if use_warranty:
        cfg.require_warranty()
    if estimation == "UE":
        cfg.require_r0_ue()
    return cfg


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return build_config(parse_lines(text))
