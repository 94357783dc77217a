"""Experiment configuration: a flat ``key = value`` file with dotted keys.

Example::

    # default Case-1 experiment
    stress.a = 1
    stress.b = 1
    stress.k = 0.5
    data.v_minus = 0
    data.v_plus = 2
    mu = 0.5
    grid.h = 0.05
    solver.T = 200

Unknown keys and unparsable values are errors reported with their line.
Grid bounds left unset are sized from the wave speeds and the end time.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .riemann import CaseLabel, FarFieldData, build_case1, classify
from .solver import Grid, PerturbationSpec, SolverConfig, domain_for
from .stress import StressModel
from .waves import WaveAnsatz


def _opt_float(text):
    return None if text.lower() in ("", "none", "auto") else float(text)


def _opt_int(text):
    return None if text.lower() in ("", "none", "auto") else int(text)


# key -> (section, attribute, parser)
SCHEMA = {
    "stress.a": ("stress", "a", float),
    "stress.b": ("stress", "b", float),
    "stress.k": ("stress", "k", float),
    "data.v_minus": ("data", "v_minus", float),
    "data.v_plus": ("data", "v_plus", float),
    "mu": (None, "mu", float),
    "waves.width": ("waves", "width", float),
    "waves.time_shift": ("waves", "time_shift", float),
    "grid.x_left": ("grid", "x_left", _opt_float),
    "grid.x_right": ("grid", "x_right", _opt_float),
    "grid.n": ("grid", "n", _opt_int),
    "grid.h": ("grid", "h", _opt_float),
    "solver.cfl": ("solver", "cfl", float),
    "solver.T": ("solver", "T", float),
    "solver.snapshot_dt": ("solver", "snapshot_dt", float),
    "perturbation.amplitude": ("perturbation", "amplitude", float),
    "perturbation.center": ("perturbation", "center", float),
    "perturbation.radius": ("perturbation", "radius", float),
    "verification.eps": ("verification", "eps", float),
    "verification.beta": ("verification", "beta", float),
    "verification.t_samples": ("verification", "t_samples", int),
    "verification.t_max": ("verification", "t_max", float),
    "output.directory": ("output", "directory", str),
    "output.snapshot_stride": ("output", "snapshot_stride", int),
    "seed": (None, "seed", int),
}


@dataclass(frozen=True)
class DataSection:
    v_minus: float = 0.0
    v_plus: float = 2.0


@dataclass(frozen=True)
class WavesSection:
    width: float = 1.0
    time_shift: float = 1.0


@dataclass(frozen=True)
class GridSection:
    x_left: float | None = None
    x_right: float | None = None
    n: int | None = None
    h: float | None = 0.05


@dataclass(frozen=True)
class VerificationSection:
    eps: float = 0.25
    beta: float = 0.25
    t_samples: int = 50
    t_max: float = 1e4

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ConfigError(f"verification.eps must lie in (0, 1), got {self.eps}")
        if not self.beta > 0:
            raise ConfigError(f"verification.beta must be positive, got {self.beta}")
        if self.t_samples < 2:
            raise ConfigError("verification.t_samples must be at least 2")


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    # 0 writes only the first and last snapshots; k > 0 every k-th one too.
    snapshot_stride: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    stress: StressModel = field(default_factory=StressModel)
    data: DataSection = field(default_factory=DataSection)
    mu: float = 0.5
    waves: WavesSection = field(default_factory=WavesSection)
    grid: GridSection = field(default_factory=GridSection)
    solver: SolverConfig = field(default_factory=SolverConfig)
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    verification: VerificationSection = field(default_factory=VerificationSection)
    output: OutputSection = field(default_factory=OutputSection)
    seed: int = 20240531

    def __post_init__(self):
        if not self.mu > 0:
            raise ConfigError(f"mu must be positive, got {self.mu}")

    def case(self) -> CaseLabel:
        return classify(self.stress, self.data.v_minus, self.data.v_plus)

    def far_field(self) -> FarFieldData:
        return build_case1(self.stress, self.data.v_minus, self.data.v_plus)

    def ansatz(self) -> WaveAnsatz:
        return WaveAnsatz(
            self.stress, self.far_field(), self.mu,
            time_shift=self.waves.time_shift, width=self.waves.width,
        )

    def make_grid(self, ans: WaveAnsatz | None = None) -> Grid:
        g = self.grid
        x_left, x_right = g.x_left, g.x_right
        if x_left is None or x_right is None:
            auto_left, auto_right = domain_for(ans or self.ansatz(), self.solver.T)
            x_left = auto_left if x_left is None else x_left
            x_right = auto_right if x_right is None else x_right
        if g.n is not None:
            return Grid(x_left, x_right, g.n)
        if g.h is None or not g.h > 0:
            raise ConfigError("set grid.n or a positive grid.h")
        return Grid.from_spacing(x_left, x_right, g.h)


def apply_settings(cfg: ExperimentConfig, settings: dict) -> ExperimentConfig:
    """Return ``cfg`` with ``{dotted_key: text}`` applied (validated)."""
    sections: dict = {}
    top: dict = {}
    for key, (text, where) in settings.items():
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key {key!r}")
        section, attr, parse = SCHEMA[key]
        try:
            value = parse(text)
        except ValueError:
            raise ConfigError(f"{where}: cannot parse {key} = {text!r}") from None
        if section is None:
            top[attr] = value
        else:
            sections.setdefault(section, {})[attr] = value
    try:
        for section, values in sections.items():
            top[section] = replace(getattr(cfg, section), **values)
        return replace(cfg, **top)
    except (ConfigError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None


def parse_lines(lines, source="<config>") -> dict:
    settings = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: missing key")
        settings[key] = (value, f"{source}:{lineno}")
    return settings


def load_config(path=None, overrides=()) -> ExperimentConfig:
    """Read a config file (optional) and then ``key=value`` override strings."""
    cfg = ExperimentConfig()
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        cfg = apply_settings(cfg, parse_lines(text.splitlines(), str(path)))
    if overrides:
        cfg = apply_settings(cfg, parse_lines(overrides, "--set"))
    return cfg


def dump_config(cfg: ExperimentConfig) -> dict:
    """Flat ``{dotted_key: value}`` view, in schema order."""
    out = {}
    for key, (section, attr, _) in SCHEMA.items():
        holder = cfg if section is None else getattr(cfg, section)
        out[key] = getattr(holder, attr)
    return out
