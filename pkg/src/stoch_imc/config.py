"""Flat dotted-key JSON configuration mirroring the runtime dataclasses.

Keys are ``arch.<field>``, ``arch.dims.rows``/``arch.dims.cols``,
``arch.gate_energy.<KIND>``, and ``mtj.<field>``.  Command-line overrides use
the same keys (``--set arch.bitstream_length=512``) and win over the file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields

from .arch import ArchConfig, DEFAULT_GATE_ENERGY_AJ
from .mtj import MtjParams, default_params
from .netlist import Kind
from .scheduler import SubarrayDims

__all__ = [
    "ConfigError",
    "ConfigBundle",
    "ENV_CONFIG_VAR",
    "load_config",
    "config_schema",
]

ENV_CONFIG_VAR = "STOCH_IMC_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ConfigBundle:
    arch: ArchConfig
    mtj: MtjParams


_ARCH_FIELDS = {f.name: f for f in fields(ArchConfig)}
_MTJ_FIELDS = {f.name: f for f in fields(MtjParams)}
# composite keys handled specially
_SKIP_ARCH = {"dims", "gate_energy_aj"}


def config_schema() -> dict[str, str]:
    """Valid keys and their value types, for documentation and validation."""
    schema: dict[str, str] = {
        "arch.dims.rows": "int",
        "arch.dims.cols": "int",
    }
    for name, f in sorted(_ARCH_FIELDS.items()):
        if name in _SKIP_ARCH:
            continue
        schema[f"arch.{name}"] = _type_name(f.type)
    for kind in Kind:
        if kind in DEFAULT_GATE_ENERGY_AJ:
            schema[f"arch.gate_energy.{kind.value}"] = "float"
    for name, f in sorted(_MTJ_FIELDS.items()):
        schema[f"mtj.{name}"] = _type_name(f.type)
    return schema


def _type_name(t) -> str:
    s = str(t)
    for prim in ("int", "float", "str", "bool"):
        if prim in s:
            return prim
    return "str"


def _coerce(key: str, value, target: str):
    try:
        if target == "int":
            if isinstance(value, bool):
                raise ValueError("bool is not an int")
            return int(value)
        if target == "float":
            return float(value)
        if target == "bool":
            if isinstance(value, bool):
                return value
            if str(value).lower() in ("true", "1", "yes"):
                return True
            if str(value).lower() in ("false", "0", "no"):
                return False
            raise ValueError(f"not a bool: {value!r}")
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None


def _parse_override(item: str) -> tuple[str, str]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, _, value = item.partition("=")
    return key.strip(), value.strip()


def load_config(
    path: str | None = None,
    overrides: list[str] | None = None,
) -> ConfigBundle:
    """Build the runtime configuration from defaults, file, then overrides.

    With no explicit path the STOCH_IMC_CONFIG environment variable is
    consulted; absent both, defaults apply.
    """
    doc: dict = {}
    effective = path or os.environ.get(ENV_CONFIG_VAR)
    if effective:
        try:
            with open(effective) as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {effective}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"malformed config JSON at line {exc.lineno}, col {exc.colno}"
            ) from None
        if not isinstance(doc, dict):
            raise ConfigError("config root must be a JSON object")
    for item in overrides or []:
        key, value = _parse_override(item)
        doc[key] = value

    schema = config_schema()
    arch_kwargs: dict = {}
    dims_kwargs: dict = {}
    gate_energy = dict(DEFAULT_GATE_ENERGY_AJ)
    mtj_kwargs: dict = {}
    for key, value in doc.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {key!r}")
        target = schema[key]
        if key.startswith("arch.dims."):
            dims_kwargs[key.rsplit(".", 1)[1]] = _coerce(key, value, target)
        elif key.startswith("arch.gate_energy."):
            gate_energy[Kind[key.rsplit(".", 1)[1]]] = _coerce(key, value, "float")
        elif key.startswith("arch."):
            name = key[len("arch."):]
            v = value
            if name in ("e_sbg_aj", "transfer_cycles") and v in (None, "none", "null", ""):
                arch_kwargs[name] = None
                continue
            arch_kwargs[name] = _coerce(key, v, target)
        elif key.startswith("mtj."):
            mtj_kwargs[key[len("mtj."):]] = _coerce(key, value, target)

    try:
        dims = SubarrayDims(**dims_kwargs) if dims_kwargs else SubarrayDims()
        arch = ArchConfig(dims=dims, gate_energy_aj=gate_energy, **arch_kwargs)
        mtj = default_params(**mtj_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ConfigBundle(arch=arch, mtj=mtj)
