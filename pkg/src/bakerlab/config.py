"""Flat key = value experiment configuration with section headers."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .mapfamily import MapModel, PoleCase, build_map
from .render import Viewport


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run needs, validated at construction."""

    case: PoleCase
    epsilon: float = 0.1
    decay: float = 0.25
    safety: float = 0.9
    tail_tol: float = 1e-14

    seeds: tuple[complex, ...] = field(default_factory=tuple)
    n_steps: int = 1000

    tau_zero: float | None = None
    tau_pos: float = 0.05
    decay_factor: float = 0.25

    loop_center: complex = 0j
    loop_half_side: float = 0.5
    loop_max_gap: float = 0.1
    loop_n_max: int = 20

    abel_tol: float = 2.5e-10

    viewport: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)
    render_width: int = 400
    render_height: int = 400

    out_dir: str = "out"
    prefix: str = "run"
    rng_seed: int = 20240809

    def __post_init__(self) -> None:
        try:
            self.model()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.n_steps < 1:
            raise ConfigError("n_steps must be positive")
        if self.loop_n_max < 1:
            raise ConfigError("loop n_max must be positive")
        if self.render_width < 1 or self.render_height < 1:
            raise ConfigError("render resolution must be positive")
        if not self.loop_half_side > 0 or not self.loop_max_gap > 0:
            raise ConfigError("loop half_side and max_gap must be positive")
        try:
            self.render_viewport()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def model(self) -> MapModel:
        return build_map(self.case, self.epsilon, self.decay, self.safety,
                         self.tail_tol)

    def render_viewport(self) -> Viewport:
        return Viewport(*self.viewport)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        return cls.from_parser(parser)

    @classmethod
    def from_parser(cls, parser: configparser.ConfigParser) -> "ExperimentConfig":
        if not parser.has_section("model"):
            raise ConfigError("missing required [model] section")
        if not parser.has_option("model", "case"):
            raise ConfigError("missing required key: [model] case")
        kwargs: dict = {}
        try:
            kwargs["case"] = PoleCase.from_tag(parser.get("model", "case"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        def grab(section: str, key: str, name: str, conv):
            if parser.has_option(section, key):
                raw = parser.get(section, key)
                try:
                    kwargs[name] = conv(raw)
                except (ValueError, TypeError) as exc:
                    raise ConfigError(
                        f"bad value for [{section}] {key}: {raw!r} ({exc})") from exc

        grab("model", "epsilon", "epsilon", float)
        grab("model", "decay", "decay", float)
        grab("model", "safety", "safety", float)
        grab("model", "tail_tol", "tail_tol", float)

        grab("orbit", "seeds", "seeds", _parse_seeds)
        grab("orbit", "n_steps", "n_steps", int)

        grab("classify", "tau_zero", "tau_zero", float)
        grab("classify", "tau_pos", "tau_pos", float)
        grab("classify", "decay_factor", "decay_factor", float)

        grab("loop", "center", "loop_center", _parse_complex)
        grab("loop", "half_side", "loop_half_side", float)
        grab("loop", "max_gap", "loop_max_gap", float)
        grab("loop", "n_max", "loop_n_max", int)

        grab("abel", "tol", "abel_tol", float)

        grab("render", "viewport", "viewport", _parse_viewport)
        grab("render", "width", "render_width", int)
        grab("render", "height", "render_height", int)

        grab("output", "dir", "out_dir", str)
        grab("output", "prefix", "prefix", str)
        grab("output", "rng_seed", "rng_seed", int)

        known = {"model": {"case", "epsilon", "decay", "safety", "tail_tol"},
                 "orbit": {"seeds", "n_steps"},
                 "classify": {"tau_zero", "tau_pos", "decay_factor"},
                 "loop": {"center", "half_side", "max_gap", "n_max"},
                 "abel": {"tol"},
                 "render": {"viewport", "width", "height"},
                 "output": {"dir", "prefix", "rng_seed"}}
        for section in parser.sections():
            if section not in known:
                raise ConfigError(f"unknown config section [{section}]")
            for key in parser.options(section):
                if key not in known[section]:
                    raise ConfigError(f"unknown config key [{section}] {key}")
        return cls(**kwargs)


def _parse_complex(raw: str) -> complex:
    return complex(raw.strip().replace(" ", ""))


def _parse_seeds(raw: str) -> tuple[complex, ...]:
    tokens = [t for t in (s.strip() for s in raw.split(",")) if t]
    if not tokens:
        raise ValueError("empty seed list")
    return tuple(_parse_complex(t) for t in tokens)


def _parse_viewport(raw: str) -> tuple[float, float, float, float]:
    parts = [p for p in (s.strip() for s in raw.replace(";", ",").split(",")) if p]
    if len(parts) != 4:
        raise ValueError("viewport needs four numbers: x_min, x_max, y_min, y_max")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]
