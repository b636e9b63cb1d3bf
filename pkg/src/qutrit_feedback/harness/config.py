"""Experiment configuration, named initial states and phenomenon presets."""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass

import numpy as np
import yaml

from ..channels import ChannelSet, ladder_indistinguishable, ladder_split, local_channels, structure_ops
from ..codes import CodeSpec, diffusion_code, jump_code
from ..errors import ConfigError
from ..qcore import normalize, product_ket
from ..trajectories import SimParams

SWEEP_PARAMETERS = ("tau", "eta", "alpha", "beta", "delta_var")
UNRAVELINGS = ("jump", "diffusion", "none")
STRUCTURES = ("ladder", "E", "V", "Lambda")

_COEFFS = re.compile(r"^coeffs\(\s*([^,]+),\s*([^,]+),\s*([^,]+)\)$")


def named_state(name: str) -> np.ndarray:
    """Normalized ket for a named initial state.

    ``bell12_21``  (|12> + |21>)/sqrt 2, the two-qutrit W state;
    ``w3``         (|112> + |121> + |211>)/sqrt 3;
    ``plus11_22``  (|11> + |22>)/sqrt 2;
    ``bell00_22``  (|00> + |22>)/sqrt 2, inside the diffusion codespace;
    ``coeffs(a,b,c)``  a|00> + b|11> + c|22>, normalized.
    """
    key = name.replace(" ", "")
    if key == "bell12_21":
        return normalize(product_ket(1, 2) + product_ket(2, 1))
    if key == "w3":
        return normalize(product_ket(1, 1, 2) + product_ket(1, 2, 1) + product_ket(2, 1, 1))
    if key == "plus11_22":
        return normalize(product_ket(1, 1) + product_ket(2, 2))
    if key == "bell00_22":
        return normalize(product_ket(0, 0) + product_ket(2, 2))
    m = _COEFFS.match(key)
    if m:
        try:
            a, b, c = (float(x) for x in m.groups())
        except ValueError as exc:
            raise ConfigError(f"initial_state: cannot parse {name!r}") from exc
        v = a * product_ket(0, 0) + b * product_ket(1, 1) + c * product_ket(2, 2)
        if np.linalg.norm(v) == 0:
            raise ConfigError("initial_state: coefficients all zero")
        return normalize(v)
    raise ConfigError(f"initial_state: unknown state {name!r}")


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one run or sweep (units with gamma = 1)."""

    experiment: str = "custom"
    structure: str = "ladder"
    gamma: float = 1.0
    alpha: float = 0.5
    beta: float = 1.0
    unraveling: str = "jump"
    feedback: bool = True
    initial_state: str = "bell12_21"
    dt: float = 1e-3
    t_max: float = 10.0
    eta: float = 1.0
    tau: float = 0.0
    delta_var: float = 0.0
    seed: int = 0
    record_stride: int = 10
    sweep: dict | None = None
    n_traj: int = 200
    output_path: str | None = None
    chunk_size: int = 500
    workers: int = 1
    export_trajectory: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.structure not in STRUCTURES:
            raise ConfigError(f"structure: expected one of {STRUCTURES}, got {self.structure!r}")
        if self.unraveling not in UNRAVELINGS:
            raise ConfigError(f"unraveling: expected one of {UNRAVELINGS}, got {self.unraveling!r}")
        if self.structure != "ladder" and self.feedback and self.unraveling != "none":
            raise ConfigError("feedback: the E/V/Lambda structures have no recycling code")
        if not isinstance(self.n_traj, int) or self.n_traj < 1:
            raise ConfigError("n_traj: must be a positive integer")
        if self.sweep is not None:
            if not isinstance(self.sweep, dict) or set(self.sweep) != {"parameter", "values"}:
                raise ConfigError("sweep: expected a mapping with keys 'parameter' and 'values'")
            if self.sweep["parameter"] not in SWEEP_PARAMETERS:
                raise ConfigError(f"sweep.parameter: must be one of {SWEEP_PARAMETERS}, "
                                  f"got {self.sweep['parameter']!r}")
            vals = self.sweep["values"]
            if not isinstance(vals, (list, tuple)) or not vals:
                raise ConfigError("sweep.values: must be a non-empty list")
            self.sweep = {"parameter": self.sweep["parameter"], "values": [float(v) for v in vals]}
        self.state()
        for value in self.sweep_values():
            try:
                self.channel_set(value)
                self.sim_params(value)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc

    # --- derived objects -------------------------------------------------

    def state(self) -> np.ndarray:
        return named_state(self.initial_state)

    @property
    def n_sites(self) -> int:
        return int(round(np.log(self.state().size) / np.log(3)))

    def sweep_values(self) -> list:
        return [None] if self.sweep is None else list(self.sweep["values"])

    def _value(self, name, override):
        if override is not None and self.sweep is not None and self.sweep["parameter"] == name:
            return override
        return getattr(self, name)

    def channel_set(self, override=None) -> ChannelSet:
        alpha, beta = self._value("alpha", override), self._value("beta", override)
        if self.structure == "ladder":
            single = (ladder_indistinguishable(self.gamma, beta) if alpha == 0.5
                      else ladder_split(self.gamma, alpha, beta))
        else:
            single = structure_ops(self.structure, self.gamma, self.gamma)
        return local_channels(single, self.n_sites)

    def code(self) -> CodeSpec | None:
        if not self.feedback or self.unraveling == "none":
            return None
        return jump_code(self.gamma) if self.unraveling == "jump" else diffusion_code(self.gamma)

    def sim_params(self, override=None) -> SimParams:
        return SimParams(dt=self.dt, t_max=self.t_max, eta=self._value("eta", override),
                         tau=self._value("tau", override),
                         delta_var=self._value("delta_var", override), seed=self.seed,
                         record_stride=self.record_stride)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


PRESETS: dict[str, dict] = {
    "delay-sweep": dict(initial_state="bell12_21", eta=1.0, t_max=10.0, n_traj=400,
                        sweep={"parameter": "tau", "values": [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]}),
    "single-delay": dict(initial_state="bell12_21", tau=0.7, t_max=10.0, n_traj=1,
                         record_stride=1, export_trajectory=True),
    "efficiency-single": dict(initial_state="bell12_21", eta=0.98, t_max=10.0, n_traj=1,
                              record_stride=1, export_trajectory=True),
    "efficiency-sweep": dict(initial_state="bell12_21", t_max=10.0, n_traj=400,
                             sweep={"parameter": "eta", "values": [0.8, 0.85, 0.9, 0.95, 1.0]}),
    "alpha-sweep": dict(initial_state="bell12_21", t_max=10.0, n_traj=400,
                        sweep={"parameter": "alpha", "values": [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]}),
    "beta-sweep": dict(initial_state="bell12_21", t_max=10.0, n_traj=400,
                       sweep={"parameter": "beta", "values": [1.0, 1.25, 1.5, 1.75, 2.0]}),
    "disorder-sweep": dict(initial_state="bell12_21", t_max=10.0, n_traj=400,
                           sweep={"parameter": "delta_var", "values": [0.0, 0.05, 0.1, 0.2, 0.4]}),
    "diffusion-protection": dict(initial_state="bell00_22", unraveling="diffusion", dt=1e-4,
                                 t_max=2.0, n_traj=100, record_stride=100),
}

_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def config_from_mapping(data: dict, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from a preset name plus explicit keys and overrides.

    Keys are applied in order: preset values, then ``data``, then
    non-``None`` ``overrides``.  Unknown keys raise :class:`ConfigError`.
    """
    data = dict(data or {})
    for k in list(data) + list(overrides or {}):
        if k not in _FIELDS:
            raise ConfigError(f"unknown configuration key {k!r}")
    name = (overrides or {}).get("experiment") or data.get("experiment", "custom")
    merged = {}
    if name != "custom":
        if name not in PRESETS:
            raise ConfigError(f"experiment: unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
        merged.update(PRESETS[name])
    merged.update(data)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    merged["experiment"] = name
    if merged.get("sweep") is not None and overrides:
        # an explicit override of the swept parameter pins it
        p = merged["sweep"].get("parameter") if isinstance(merged["sweep"], dict) else None
        if p in overrides and overrides[p] is not None:
            merged["sweep"] = None
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    """Read a YAML experiment file."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return config_from_mapping(data, overrides)
