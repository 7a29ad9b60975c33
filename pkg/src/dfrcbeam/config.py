"""Scenario configuration: YAML schema, dB/degree conversion, channel sources.

Configs carry user-facing units (degrees, dB, dBm) and are converted exactly
once when resolved; 20 dBm maps to a linear budget of 100 in the unit-noise
normalization used throughout the library.
"""

from dataclasses import dataclass, field, asdict

import numpy as np
import yaml

from .arrays import ArrayGeometry, ChannelSet, Scene


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


def db_to_linear(db):
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class SweepSpec:
    start: float
    stop: float
    step: float

    def values(self):
        if self.step <= 0:
            raise ConfigError("sweep step must be positive")
        out = []
        v = self.start
        while v <= self.stop + 1e-9:
            out.append(round(v, 12))
            v += self.step
        return out


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    geometry: dict
    scene: dict
    p0_dbm: float
    channels: dict
    gammas_db: object
    mode: str = "non-dedicated"
    mc_trials: int = 0
    sim: dict = field(default_factory=lambda: {"n_symbols": 100000, "seed": 0, "draw_interferer_phase": True})
    output_path: str = ""
    k_sweep: tuple = ()
    antenna_sweep: tuple = ()
    antenna_variants: tuple = ()
    angle_grid_deg: dict = field(default_factory=lambda: {"start": -90.0, "stop": 90.0, "step": 0.25})
    convergence_delta: float = 1e-3
    max_iters: int = 50
    empirical: bool = False

    def __post_init__(self):
        if self.mode not in ("non-dedicated", "dedicated", "both"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "k_sweep", tuple(int(k) for k in self.k_sweep))
        object.__setattr__(self, "antenna_sweep", tuple(int(n) for n in self.antenna_sweep))
        object.__setattr__(self, "antenna_variants", tuple(
            {"n": int(v["n"]), "channels": tuple(tuple(str(c) for c in row) for row in v["channels"])}
            for v in self.antenna_variants
        ) if self.antenna_variants else ())

    # -- resolved physics ---------------------------------------------------

    def resolve_geometry(self, n=None) -> ArrayGeometry:
        g = self.geometry
        n_tx = int(n if n is not None else g["n_tx"])
        n_rx = int(n if n is not None else g["n_rx"])
        return ArrayGeometry(n_tx, n_rx, float(g.get("spacing_tx", 0.5)), float(g.get("spacing_rx", 0.5)))

    def resolve_scene(self) -> Scene:
        s = self.scene
        interferers = [
            (np.deg2rad(float(i["angle_deg"])), db_to_linear(i["power_db"]))
            for i in s.get("interferers", [])
        ]
        return Scene(
            target_angle=float(np.deg2rad(float(s["target_angle_deg"]))),
            target_power=db_to_linear(s["target_power_db"]),
            interferers=interferers,
        )

    @property
    def p0(self) -> float:
        return db_to_linear(self.p0_dbm)

    def gamma_values_db(self):
        if isinstance(self.gammas_db, dict):
            return SweepSpec(**{k: float(v) for k, v in self.gammas_db.items()}).values()
        return [float(g) for g in self.gammas_db]

    def explicit_channels(self, variant=None) -> ChannelSet:
        src = variant["channels"] if variant is not None else self.channels.get("explicit")
        if src is None:
            raise ConfigError("scenario has no explicit channels")
        rows = [[complex(str(c).replace(" ", "")) for c in row] for row in src]
        return ChannelSet(np.asarray(rows, dtype=complex))

    @property
    def rayleigh(self):
        return self.channels.get("rayleigh")

    def draw_channels(self, n_tx, k, point_index, trial, seed=None) -> ChannelSet:
        """Per-trial i.i.d. CN(0,1) channels, reproducible per (seed, point, trial)."""
        spec = self.rayleigh
        if spec is None:
            raise ConfigError("scenario channels are not 'rayleigh'")
        base = int(seed if seed is not None else spec.get("seed", 0))
        rng = np.random.default_rng([base, int(point_index), int(trial)])
        h = (rng.standard_normal((k, n_tx)) + 1j * rng.standard_normal((k, n_tx))) / np.sqrt(2.0)
        return ChannelSet(h)

    # -- (de)serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k_sweep"] = list(self.k_sweep)
        d["antenna_sweep"] = list(self.antenna_sweep)
        d["antenna_variants"] = [
            {"n": v["n"], "channels": [list(row) for row in v["channels"]]}
            for v in self.antenna_variants
        ]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"name", "geometry", "scene", "p0_dbm", "channels", "gammas_db"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        return cls(**data)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return ScenarioConfig.from_dict(data)


def save_config(config: ScenarioConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=False)
