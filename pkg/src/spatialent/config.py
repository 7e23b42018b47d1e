"""Key-value run configuration.

INI-style files with one section per subcommand plus shared [field],
[truncation] and [run] sections.  Every key is validated against the
schema below; unknown sections or keys are rejected.  Any key can be
overridden on the command line with ``--set section.key=value``.

Grid-valued keys accept either a comma-separated list of numbers or the
forms ``lin(start,stop,n)`` / ``log(start,stop,n)`` for linear and
logarithmic spacing.
"""

from __future__ import annotations

import configparser
import hashlib
import re
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .field import ThermalFieldConfig
from .modes import TruncationSpec

__all__ = ["RunConfig", "SCHEMA"]


@dataclass(frozen=True)
class Key:
    kind: str  # float | int | bool | str | choice | grid
    default: object
    choices: tuple = ()


SCHEMA = {
    "field": {
        "box_length": Key("float", 1.0),
        "mass": Key("float", 0.5),
        "hbar": Key("float", 1.0),
        "boltzmann": Key("float", 1.0),
        "temperature": Key("float", 1.0),
        "chemical_potential": Key("float", 0.0),
    },
    "truncation": {
        "l_min": Key("int", 1),
        "l_max": Key("int", 256),
        "hard_cap": Key("int", 100_000),
        "convergence_tol": Key("float", 1e-8),
    },
    "verdict": {
        "profile": Key("choice", "gaussian", ("gaussian", "top_hat")),
        "width": Key("float", 0.1),
        "separation": Key("float", 0.1),
        "prepared": Key("bool", False),
        "gaussian_width": Key("float", 0.0),
        "inverse_k_weighting": Key("bool", False),
    },
    "sweep": {
        "profile": Key("choice", "gaussian", ("gaussian", "top_hat")),
        "width": Key("float", 0.1),
        "separations": Key("grid", "lin(0.02,0.7,20)"),
        "temperatures": Key("grid", "log(0.01,1000,20)"),
    },
    "window": {
        "widths": Key("grid", "0.25,0.166666666666666657,0.125,"
                              "0.0833333333333333287,0.0625"),
        "temperature": Key("float", 10.0),
        "cap": Key("int", 4096),
    },
    "tc": {
        "widths": Key("grid", "0.5,0.33333333333333331,0.25,0.2,"
                              "0.166666666666666657,0.125,0.1,"
                              "0.0833333333333333287"),
        "route": Key("choice", "top_hat", ("top_hat", "gaussian")),
        "cap": Key("int", 4096),
        "t_cap": Key("float", 1e6),
        "rel_width": Key("float", 1e-3),
    },
    "extract": {
        "gamma_eff": Key("float", 0.05),
        "probe_frequency": Key("float", 8.0),
        "probe_mass": Key("float", 1.0),
    },
    "run": {
        "seed": Key("int", 12345),
        "threads": Key("int", 1),
        "out_dir": Key("str", "out"),
    },
    "selftest": {
        "cm_samples": Key("int", 1000),
        "eigen_tol": Key("float", 1e-9),
        "mc_samples": Key("int", 1_000_000),
        "mc_sigma": Key("float", 3.0),
        "quad_modes": Key("int", 10),
        "quad_tol": Key("float", 1e-10),
        "fit_tol": Key("float", 1e-9),
    },
}

_GRID_RE = re.compile(r"^(lin|log)\(([^,]+),([^,]+),(\d+)\)$")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValidationError(f"cannot parse boolean from {text!r}")


def _parse_grid(text: str) -> tuple:
    text = text.strip()
    match = _GRID_RE.match(text.replace(" ", ""))
    if match:
        kind, start, stop, count = match.groups()
        start, stop, count = float(start), float(stop), int(count)
        if count < 1:
            raise ValidationError(f"grid {text!r} needs at least one point")
        if kind == "lin":
            values = np.linspace(start, stop, count)
        else:
            if start <= 0 or stop <= 0:
                raise ValidationError(
                    f"log grid {text!r} needs positive endpoints"
                )
            values = np.geomspace(start, stop, count)
        return tuple(float(v) for v in values)
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse grid from {text!r}") from exc


def _parse_value(section: str, key: str, text: str):
    spec = SCHEMA[section][key]
    try:
        if spec.kind == "float":
            return float(text)
        if spec.kind == "int":
            return int(text)
        if spec.kind == "bool":
            return _parse_bool(text)
        if spec.kind == "str":
            return text.strip()
        if spec.kind == "choice":
            value = text.strip()
            if value not in spec.choices:
                raise ValidationError(
                    f"[{section}] {key} must be one of {spec.choices}, "
                    f"got {value!r}"
                )
            return value
        if spec.kind == "grid":
            return _parse_grid(text)
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(
            f"[{section}] {key}: cannot parse {text!r} as {spec.kind}"
        ) from exc
    raise ValidationError(f"unknown schema kind {spec.kind}")


class RunConfig:
    """Validated configuration values for one invocation."""

    def __init__(self, values: dict):
        self._values = values

    @classmethod
    def defaults(cls) -> "RunConfig":
        values = {}
        for section, keys in SCHEMA.items():
            values[section] = {}
            for key, spec in keys.items():
                default = spec.default
                if spec.kind == "grid":
                    default = _parse_grid(default)
                values[section][key] = default
        return cls(values)

    @classmethod
    def load(cls, path: str | None = None, overrides=()) -> "RunConfig":
        """Parse an INI file (optional) and apply ``section.key=value``
        overrides on top of the defaults."""
        config = cls.defaults()
        if path is not None:
            parser = configparser.ConfigParser(interpolation=None)
            try:
                with open(path, "r", encoding="utf-8") as handle:
                    parser.read_file(handle)
            except configparser.Error as exc:
                raise ValidationError(f"cannot parse config {path}: {exc}") from exc
            for section in parser.sections():
                if section not in SCHEMA:
                    raise ValidationError(
                        f"unknown config section [{section}] in {path}"
                    )
                for key, text in parser.items(section):
                    if key not in SCHEMA[section]:
                        raise ValidationError(
                            f"unknown key {key!r} in section [{section}]"
                        )
                    config._values[section][key] = _parse_value(
                        section, key, text
                    )
        for item in overrides:
            config.apply_override(item)
        return config

    def apply_override(self, item: str):
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ValidationError(
                f"override must look like section.key=value, got {item!r}"
            )
        target, text = item.split("=", 1)
        section, key = target.split(".", 1)
        section, key = section.strip(), key.strip()
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ValidationError(f"unknown config key {section}.{key}")
        self._values[section][key] = _parse_value(section, key, text)

    def get(self, section: str, key: str):
        return self._values[section][key]

    def set(self, section: str, key: str, value):
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ValidationError(f"unknown config key {section}.{key}")
        self._values[section][key] = value

    def field_config(self) -> ThermalFieldConfig:
        f = self._values["field"]
        return ThermalFieldConfig(
            box_length=f["box_length"],
            mass=f["mass"],
            hbar=f["hbar"],
            boltzmann=f["boltzmann"],
            temperature=f["temperature"],
            chemical_potential=f["chemical_potential"],
        )

    def truncation(self, prepared: bool = False) -> TruncationSpec:
        t = self._values["truncation"]
        return TruncationSpec(
            l_min=t["l_min"],
            l_max=t["l_max"],
            convergence_tol=t["convergence_tol"],
            hard_cap=t["hard_cap"],
            prepared=prepared,
        )

    # keys that steer execution but never change emitted data
    _HASH_EXEMPT = {("run", "threads"), ("run", "out_dir")}

    def canonical_text(self) -> str:
        lines = []
        for section in sorted(self._values):
            for key in sorted(self._values[section]):
                if (section, key) in self._HASH_EXEMPT:
                    continue
                value = self._values[section][key]
                if isinstance(value, tuple):
                    rendered = ",".join(f"{v!r}" for v in value)
                else:
                    rendered = repr(value)
                lines.append(f"{section}.{key}={rendered}")
        return "\n".join(lines)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()
