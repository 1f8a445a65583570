"""Experiment configuration files: a strict, flat key-value format.

Configs are INI-style text with fixed sections.  The schema is strict:
unknown sections or keys are rejected, and the physical constants
(epsilon, gamma, A, B, tau) plus M and the seed must always be spelled
out -- there are no silent defaults for them.  Only the [adaptive]
controller block has defaults, and those apply only when the block itself
is present.

Example::

    [model]
    epsilon = 0.05
    gamma = 0.0025
    potential = quartic

    [scheme]
    A = 1.0
    B = 0.25
    tau = 0.01

    [space]
    M = 63

    [run]
    T = 3.0
    seed = 1

    [adaptive]
    tol = 1e-3
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace
from configparser import ConfigParser, Error as ConfigParserError

from .adaptive import AdaptiveConfig
from .potential import PotentialSpec
from .scheme import SchemeParams


class ConfigError(ValueError):
    """A configuration file is missing, malformed, or violates the schema."""


@dataclass(frozen=True)
class TemporalStudy:
    """Step sizes to test against a small-step reference run."""

    tau_list: tuple[float, ...]
    tau_ref: float


@dataclass(frozen=True)
class SpatialStudy:
    """Resolutions to test against a finer-space reference run."""

    M_list: tuple[int, ...]
    M_ref: int


@dataclass(frozen=True)
class StabilityStudy:
    """Scan one stabilization constant for the smallest stable value."""

    axis: str  # "A" | "B"
    candidates: tuple[float, ...]
    tau_list: tuple[float, ...]
    steps: int = 4096


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully explicit description of one experiment."""

    epsilon: float
    gamma: float
    A: float
    B: float
    tau: float
    potential: str
    M: int
    seed: int
    T: float | None = None
    adaptive: AdaptiveConfig | None = None
    temporal: TemporalStudy | None = None
    spatial: SpatialStudy | None = None
    stability: StabilityStudy | None = None

    def scheme_params(self, tau: float | None = None, A: float | None = None,
                      B: float | None = None) -> SchemeParams:
        return SchemeParams(
            eps=self.epsilon,
            gamma=self.gamma,
            tau=self.tau if tau is None else tau,
            A=self.A if A is None else A,
            B=self.B if B is None else B,
            potential=PotentialSpec(self.potential),
        )

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        out = {
            "model": {"epsilon": self.epsilon, "gamma": self.gamma, "potential": self.potential},
            "scheme": {"A": self.A, "B": self.B, "tau": self.tau},
            "space": {"M": self.M},
            "run": {"seed": self.seed},
        }
        if self.T is not None:
            out["run"]["T"] = self.T
        if self.adaptive is not None:
            out["adaptive"] = asdict(self.adaptive)
        if self.temporal is not None:
            out["temporal"] = {"tau_list": list(self.temporal.tau_list),
                               "tau_ref": self.temporal.tau_ref}
        if self.spatial is not None:
            out["spatial"] = {"M_list": list(self.spatial.M_list),
                              "M_ref": self.spatial.M_ref}
        if self.stability is not None:
            out["stability"] = {"axis": self.stability.axis,
                                "candidates": list(self.stability.candidates),
                                "tau_list": list(self.stability.tau_list),
                                "steps": self.stability.steps}
        return out

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        model, scheme, space, run = data["model"], data["scheme"], data["space"], data["run"]
        return ExperimentConfig(
            epsilon=float(model["epsilon"]),
            gamma=float(model["gamma"]),
            A=float(scheme["A"]),
            B=float(scheme["B"]),
            tau=float(scheme["tau"]),
            potential=str(model["potential"]),
            M=int(space["M"]),
            seed=int(run["seed"]),
            T=float(run["T"]) if "T" in run else None,
            adaptive=AdaptiveConfig(**data["adaptive"]) if "adaptive" in data else None,
            temporal=TemporalStudy(tuple(float(x) for x in data["temporal"]["tau_list"]),
                                   float(data["temporal"]["tau_ref"]))
            if "temporal" in data else None,
            spatial=SpatialStudy(tuple(int(x) for x in data["spatial"]["M_list"]),
                                 int(data["spatial"]["M_ref"]))
            if "spatial" in data else None,
            stability=StabilityStudy(str(data["stability"]["axis"]),
                                     tuple(float(x) for x in data["stability"]["candidates"]),
                                     tuple(float(x) for x in data["stability"]["tau_list"]),
                                     int(data["stability"].get("steps", 4096)))
            if "stability" in data else None,
        )


_SCHEMA = {
    "model": {"epsilon", "gamma", "potential"},
    "scheme": {"A", "B", "tau"},
    "space": {"M"},
    "run": {"T", "seed"},
    "adaptive": {"rho", "tol", "tau_min", "tau_max", "tau_init"},
    "temporal": {"tau_list", "tau_ref"},
    "spatial": {"M_list", "M_ref"},
    "stability": {"axis", "candidates", "tau_list", "steps"},
}


def _get(parser: ConfigParser, section: str, key: str, conv, required: bool = True, default=None):
    if not parser.has_option(section, key):
        if required:
            raise ConfigError(f"missing required key '{section}.{key}'")
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for '{section}.{key}': {raw!r} ({exc})") from exc


def _float_list(raw: str) -> tuple[float, ...]:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(float(s) for s in items)


def _int_list(raw: str) -> tuple[int, ...]:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(int(s) for s in items)


def parse_config(path) -> ExperimentConfig:
    """Read and validate an experiment configuration file."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh, source=path)
    except ConfigParserError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{section}.{key}' in {path}")
    for section in ("model", "scheme", "space", "run"):
        if not parser.has_section(section):
            raise ConfigError(f"missing required section [{section}] in {path}")

    epsilon = _get(parser, "model", "epsilon", float)
    gamma = _get(parser, "model", "gamma", float)
    potential = _get(parser, "model", "potential", str, required=False, default="quartic")
    stab_a = _get(parser, "scheme", "A", float)
    stab_b = _get(parser, "scheme", "B", float)
    tau = _get(parser, "scheme", "tau", float)
    M = _get(parser, "space", "M", int)
    T = _get(parser, "run", "T", float, required=False)
    seed = _get(parser, "run", "seed", int)

    if not 0.0 < epsilon < 1.0:
        raise ConfigError("model.epsilon must lie in (0, 1)")
    if gamma <= 0.0:
        raise ConfigError("model.gamma must be positive")
    if potential not in ("quartic", "truncated"):
        raise ConfigError("model.potential must be 'quartic' or 'truncated'")
    if tau <= 0.0:
        raise ConfigError("scheme.tau must be positive")
    if stab_a < 0.0 or stab_b < 0.0:
        raise ConfigError("scheme.A and scheme.B must be nonnegative")
    if M < 2:
        raise ConfigError("space.M must be at least 2")
    if T is not None and T <= 0.0:
        raise ConfigError("run.T must be positive")
    if seed < 0:
        raise ConfigError("run.seed must be nonnegative")

    adaptive = None
    if parser.has_section("adaptive"):
        defaults = AdaptiveConfig()
        try:
            adaptive = AdaptiveConfig(
                rho=_get(parser, "adaptive", "rho", float, required=False, default=defaults.rho),
                tol=_get(parser, "adaptive", "tol", float, required=False, default=defaults.tol),
                tau_min=_get(parser, "adaptive", "tau_min", float, required=False,
                             default=defaults.tau_min),
                tau_max=_get(parser, "adaptive", "tau_max", float, required=False,
                             default=defaults.tau_max),
                tau_init=_get(parser, "adaptive", "tau_init", float, required=False,
                              default=defaults.tau_init),
            )
        except ValueError as exc:
            raise ConfigError(f"bad [adaptive] block: {exc}") from exc

    temporal = None
    if parser.has_section("temporal"):
        temporal = TemporalStudy(
            tau_list=_get(parser, "temporal", "tau_list", _float_list),
            tau_ref=_get(parser, "temporal", "tau_ref", float),
        )
        if temporal.tau_ref <= 0.0 or any(x <= 0.0 for x in temporal.tau_list):
            raise ConfigError("temporal step sizes must be positive")
        if temporal.tau_ref >= min(temporal.tau_list):
            raise ConfigError("temporal.tau_ref must be smaller than every tested step")

    spatial = None
    if parser.has_section("spatial"):
        spatial = SpatialStudy(
            M_list=_get(parser, "spatial", "M_list", _int_list),
            M_ref=_get(parser, "spatial", "M_ref", int),
        )
        if any(m < 2 for m in spatial.M_list):
            raise ConfigError("spatial.M_list entries must be at least 2")
        if spatial.M_ref <= max(spatial.M_list):
            raise ConfigError("spatial.M_ref must exceed every tested resolution")

    stability = None
    if parser.has_section("stability"):
        stability = StabilityStudy(
            axis=_get(parser, "stability", "axis", str),
            candidates=_get(parser, "stability", "candidates", _float_list),
            tau_list=_get(parser, "stability", "tau_list", _float_list),
            steps=_get(parser, "stability", "steps", int, required=False, default=4096),
        )
        if stability.axis not in ("A", "B"):
            raise ConfigError("stability.axis must be 'A' or 'B'")
        if list(stability.candidates) != sorted(stability.candidates):
            raise ConfigError("stability.candidates must be ascending")
        if any(x < 0.0 for x in stability.candidates):
            raise ConfigError("stability.candidates must be nonnegative")
        if stability.steps < 1:
            raise ConfigError("stability.steps must be positive")

    return ExperimentConfig(
        epsilon=epsilon, gamma=gamma, A=stab_a, B=stab_b, tau=tau,
        potential=potential, M=M, seed=seed, T=T,
        adaptive=adaptive, temporal=temporal, spatial=spatial, stability=stability,
    )
