"""Network parameterization shared by the analytic and simulation code.

Distances are in km and densities in km^-1 (per line) or km^-2 (per area).
Powers are linear and only the ratios p_t/sigma2 and beta matter.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Mapping
from pathlib import Path

__all__ = [
    "InvalidParameter",
    "DivergentPathLoss",
    "ConfigError",
    "NetworkParams",
    "FIELDS",
    "DEFAULTS",
    "validate",
    "parse_config",
    "load_config",
]

FIELDS = ("mu_l", "lambda_v", "p", "d", "alpha", "beta", "p_t", "sigma2")

# The only keys that may be omitted from a config: unit transmit power and an
# interference-limited (noise-free) link.
DEFAULTS = {"p_t": 1.0, "sigma2": 0.0}


class InvalidParameter(ValueError):
    """A model parameter violates its admissible range."""

    def __init__(self, name, value, constraint):
        self.name = name
        self.value = value
        self.constraint = constraint
        super().__init__(f"invalid parameter {name}={value!r}: requires {constraint}")


class DivergentPathLoss(InvalidParameter):
    """Path-loss exponent alpha <= 2; the aggregate interference is infinite."""

    def __init__(self, value):
        super().__init__("alpha", value, "alpha > 2")


class ConfigError(ValueError):
    pass


_BOUNDS = {
    "mu_l": (lambda v: v >= 0, "mu_l >= 0"),
    "lambda_v": (lambda v: v >= 0, "lambda_v >= 0"),
    "p": (lambda v: 0 <= v <= 1, "0 <= p <= 1"),
    "d": (lambda v: v > 0, "d > 0"),
    "alpha": (lambda v: v > 2, "alpha > 2"),
    "p_t": (lambda v: v > 0, "p_t > 0"),
    "sigma2": (lambda v: v >= 0, "sigma2 >= 0"),
    "beta": (lambda v: v >= 0, "beta >= 0"),
}


@dataclasses.dataclass(frozen=True)
class NetworkParams:
    """Validated, immutable parameter set of the Cox bipolar network.

    Attributes:
        mu_l: line (road) density, km^-1.
        lambda_v: node density on each line, nodes/km.
        p: ALOHA transmission probability.
        d: transmitter-receiver distance, km.
        alpha: path-loss exponent, must exceed 2.
        beta: SINR threshold (linear).
        p_t: transmit power.
        sigma2: noise power, same units as ``p_t``.
    """

    mu_l: float
    lambda_v: float
    p: float
    d: float
    alpha: float
    beta: float
    p_t: float = 1.0
    sigma2: float = 0.0

    def __post_init__(self):
        for name in FIELDS:
            raw = getattr(self, name)
            try:
                value = float(raw)
            except (TypeError, ValueError):
                raise InvalidParameter(name, raw, "a real number") from None
            if not math.isfinite(value):
                raise InvalidParameter(name, raw, "a finite number")
            ok, constraint = _BOUNDS[name]
            if not ok(value):
                if name == "alpha":
                    raise DivergentPathLoss(raw)
                raise InvalidParameter(name, raw, constraint)
            object.__setattr__(self, name, value)

    @property
    def lambda_l(self) -> float:
        """Density of the line process in its (rho, theta) representation space."""
        return self.mu_l / math.pi

    @property
    def lambda_active(self) -> float:
        """Active transmitters per km^2, ``pi * lambda_l * p * lambda_v``."""
        return self.mu_l * self.p * self.lambda_v

    @property
    def noise_exponent(self) -> float:
        """``beta * sigma2 * d**alpha / p_t``; the noise factor is exp(-this)."""
        return self.beta * self.sigma2 * self.d**self.alpha / self.p_t

    def replace(self, **changes) -> NetworkParams:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FIELDS}


def validate(raw) -> NetworkParams:
    """Build a :class:`NetworkParams` from a mapping or an existing instance.

    Missing ``p_t``/``sigma2`` fall back to :data:`DEFAULTS`; any other missing
    or unknown key is an error.
    """
    if isinstance(raw, NetworkParams):
        # Already checked at construction; re-running the checks is a no-op.
        return NetworkParams(**raw.as_dict())
    if not isinstance(raw, Mapping):
        raise TypeError(f"expected a mapping or NetworkParams, got {type(raw).__name__}")
    unknown = sorted(set(raw) - set(FIELDS))
    if unknown:
        raise ConfigError(f"unknown parameter(s): {', '.join(unknown)}")
    values = {**DEFAULTS, **raw}
    missing = [name for name in FIELDS if name not in values]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)}")
    return NetworkParams(**{name: values[name] for name in FIELDS})


def parse_config(text: str) -> dict[str, float]:
    """Parse ``key=value`` lines. ``#`` starts a comment; keys are case-sensitive.

    Returns the raw (unvalidated) mapping so that command-line overrides can be
    merged before :func:`validate`.
    """
    out: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        if key not in FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: {key} is not a number: {value!r}") from None
    return out


def load_config(path) -> dict[str, float]:
    return parse_config(Path(path).read_text())
