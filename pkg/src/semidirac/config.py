"""Flat typed key-value run configuration.

Grammar (one entry per line)::

    # comment
    key = value

Keys are case-insensitive and ``-``/``_`` are interchangeable.  Values are
parsed according to the key's declared type: ``int``, ``float``, ``str``,
``bool`` (true/false/yes/no/1/0) or ``vec`` (comma-separated floats).
Unknown keys and malformed values are errors.  Command-line flags override
file values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Key:
    type: str
    default: Any
    help: str
    choices: tuple | None = None


def _vec(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"bad vector {text!r}") from exc


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}

SCHEMA: dict[str, Key] = {
    # shared
    "seed": Key("int", 0, "RNG seed (unsigned 64-bit)"),
    "out": Key("str", None, "output path (default: stdout)"),
    "format": Key("str", "csv", "output format", ("csv", "json")),
    "strict": Key("bool", False, "escalate truncation warnings to errors"),
    "workers": Key("int", 1, "threads for Monte Carlo blocks"),
    # torus
    "l1": Key("float", 2 * math.pi, "torus length L1"),
    "l2": Key("float", 2 * math.pi, "torus length L2"),
    "amp": Key("float", 1.0, "field amplitude A (special mode)"),
    "coupling": Key("float", 1.0, "gauge coupling g"),
    "hbar": Key("float", 1.0, "Planck constant"),
    "mode": Key("str", "special", "torus field mode", ("special", "general")),
    "a1": Key("vec", None, "colour vector A_1 (general mode)"),
    "a2": Key("vec", None, "colour vector A_2 (general mode)"),
    "nmax": Key("int", None, "lattice cutoff |n_mu| <= nmax"),
    "kmax": Key("int", 40, "winding cutoff |k_mu| <= kmax"),
    "width": Key("float", 0.2, "Gaussian smoothing width"),
    "lambda_min": Key("float", None, "first lambda of the grid"),
    "lambda_max": Key("float", None, "last lambda of the grid"),
    "lambda_points": Key("int", None, "number of lambda grid points"),
    # weyl
    "dim": Key("int", 4, "spacetime dimension d"),
    "volume": Key("float", 1.0, "volume V"),
    "colour_dim": Key("int", 3, "colour multiplicity J"),
    "spin": Key("float", 0.5, "spin quantum number s"),
    "group": Key("int", 3, "gauge group SU(N)"),
    "sigma": Key("float", None, "standard deviation of each E/B component"),
    "v": Key("float", None, "field-strength scale v (alternative to sigma)"),
    "samples": Key("int", 100_000, "Monte Carlo samples"),
    "sites": Key("int", 4, "lattice sites for the local-field average"),
    "c2_mode": Key("str", "orbit", "classical |s|^2 and C^aC^a", ("orbit", "quantum")),
    "c2_spin": Key("float", None, "override for |s|^2"),
    "c2_colour": Key("float", None, "override for C^aC^a"),
    "field_scale": Key("float", 0.3, "scale of the random constant potential"),
    # chiral
    "zeta_min": Key("float", 0.2, "first zeta"),
    "zeta_max": Key("float", 3.0, "last zeta"),
    "points": Key("int", 57, "number of zeta points"),
    # wong
    "t_final": Key("float", 10.0, "integration time T"),
    "dt": Key("float", 1e-3, "RK4 step"),
    "flow": Key("str", "wong", "Hamiltonian family", ("free", "wong", "triple")),
    "branch": Key("int", 1, "virtuality branch", (1, -1)),
    "p0": Key("vec", (0.1, 0.2, 0.3, 3.0), "initial canonical momentum"),
    "x0": Key("vec", (0.0, 0.0, 0.0, 0.0), "initial position"),
    "s0": Key("vec", (0.0, 0.0, 0.5), "initial spin vector"),
    "store_every": Key("int", 100, "record every n-th step"),
    "transport": Key("bool", True, "co-integrate transport matrices"),
}


def normalise_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def parse_value(key: str, text: str):
    spec = SCHEMA[key]
    text = text.strip()
    try:
        if spec.type == "int":
            val = int(text)
        elif spec.type == "float":
            val = float(text)
        elif spec.type == "bool":
            val = _BOOL[text.lower()]
        elif spec.type == "vec":
            val = _vec(text)
        else:
            val = text
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{key}: cannot parse {text!r} as {spec.type}") from exc
    check_choice(key, val)
    return val


def check_choice(key: str, val):
    spec = SCHEMA[key]
    if spec.choices is not None and val is not None and val not in spec.choices:
        raise ConfigError(f"{key}: {val!r} not in {spec.choices}")


def read_config(path) -> dict:
    """Parse a config file into a dict of typed values."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, val = line.split("=", 1)
        key = normalise_key(key)
        if key not in SCHEMA:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = parse_value(key, val)
    return out


def merge(file_values: dict, flag_values: dict, command_defaults: dict | None = None) -> dict:
    """Defaults, then command defaults, then file, then flags (flags win)."""
    cfg = {k: v.default for k, v in SCHEMA.items()}
    cfg.update(command_defaults or {})
    cfg.update(file_values)
    for k, v in flag_values.items():
        if v is not None:
            check_choice(k, v)
            cfg[k] = v
    return cfg
