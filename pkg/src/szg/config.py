"""Run configuration: TOML text -> validated RunConfig.

See docs/config.md for the grammar. Unknown keys are errors.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .geometry import PRESETS

WEIGHT_FAMILIES = ("constant", "exp-cos", "abs2", "poly-abs2")
CONVERGE_KINDS = ("interior", "closure", "boundary-point", "zeros", "garabedian")
SWEEP_FAMILIES = ("exp-cos", "poly-abs2", "constant-blend")
COMMANDS = ("domain", "szego", "garabedian", "zeros", "ahlfors", "interp-check", "bergman",
            "reduced", "converge", "selftest")

DEFAULT_TOLERANCES = {
    "linear_residual": 1e-10,
    "reproducing": 1e-8,
    "boundary_identity": 1e-8,
    "zero_abs": 1e-8,
    "ahlfors_modulus": 1e-8,
    "interpolation": 1e-6,
}


class ConfigError(ValueError):
    """Invalid configuration; `path` names the offending key."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def parse_complex(value, path: str = "") -> complex:
    """Accepts a number, a [re, im] pair or a string such as "0.3+0.1j" or "0.3+0.1i"."""
    if isinstance(value, bool):
        raise ConfigError("expected a complex number", path)
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    if isinstance(value, str):
        text = value.strip().replace(" ", "").replace("i", "j")
        try:
            return complex(text)
        except ValueError:
            pass
    raise ConfigError(f"cannot read {value!r} as a complex number", path)


@dataclass(frozen=True)
class DomainSpec:
    preset: str
    params: tuple[float, ...] = ()
    nodes: int = 256


@dataclass(frozen=True)
class WeightSpec:
    family: str = "constant"
    params: tuple[float, ...] = ()


@dataclass(frozen=True)
class TaskSpec:
    command: str | None = None
    pole: complex | None = None
    points: tuple[complex, ...] = ()
    pairs: tuple[tuple[complex, complex], ...] = ()
    kind: str = "interior"
    family: str = "exp-cos"
    family_scale: float = 1.0
    components: str = "outer"
    kmax: int = 16
    order: int = 1
    zeta: complex | None = None
    basis: str | None = None
    gram: str | None = None
    node: int = 0


@dataclass(frozen=True)
class RunConfig:
    domain: DomainSpec
    weight: WeightSpec = WeightSpec()
    task: TaskSpec = TaskSpec()
    output: str | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))


def _check_keys(table: dict, allowed: set, path: str) -> None:
    for key in table:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError("unknown key", where)


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("expected an integer", path)
    return value


def _float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("expected a number", path)
    return float(value)


def _str(value, path: str, choices=None) -> str:
    if not isinstance(value, str):
        raise ConfigError("expected a string", path)
    if choices is not None and value not in choices:
        raise ConfigError(f"must be one of {', '.join(choices)}", path)
    return value


def _floats(value, path: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ConfigError("expected a list of numbers", path)
    return tuple(_float(v, f"{path}[{i}]") for i, v in enumerate(value))


def _domain(t, path="domain") -> DomainSpec:
    if not isinstance(t, dict):
        raise ConfigError("expected a table", path)
    _check_keys(t, {"preset", "params", "nodes"}, path)
    if "preset" not in t:
        raise ConfigError("missing key", f"{path}.preset")
    preset = _str(t["preset"], f"{path}.preset", PRESETS)
    params = _floats(t.get("params", []), f"{path}.params")
    nodes = _int(t.get("nodes", 256), f"{path}.nodes")
    if nodes < 16 or nodes % 2:
        raise ConfigError("node count must be even and at least 16", f"{path}.nodes")
    return DomainSpec(preset, params, nodes)


def _weight(t, path="weight") -> WeightSpec:
    if not isinstance(t, dict):
        raise ConfigError("expected a table", path)
    _check_keys(t, {"family", "params"}, path)
    family = _str(t.get("family", "constant"), f"{path}.family", WEIGHT_FAMILIES)
    return WeightSpec(family, _floats(t.get("params", []), f"{path}.params"))


def _task(t, path="task") -> TaskSpec:
    if not isinstance(t, dict):
        raise ConfigError("expected a table", path)
    allowed = set(TaskSpec.__dataclass_fields__)
    _check_keys(t, allowed, path)
    kw = {}
    if "command" in t:
        kw["command"] = _str(t["command"], f"{path}.command", COMMANDS)
    for key in ("pole", "zeta"):
        if key in t:
            kw[key] = parse_complex(t[key], f"{path}.{key}")
    if "points" in t:
        if not isinstance(t["points"], list):
            raise ConfigError("expected a list", f"{path}.points")
        kw["points"] = tuple(parse_complex(v, f"{path}.points[{i}]") for i, v in enumerate(t["points"]))
    if "pairs" in t:
        pairs = t["pairs"]
        if not isinstance(pairs, list) or not all(isinstance(p, list) and len(p) == 2 for p in pairs):
            raise ConfigError("expected a list of [z, w] pairs", f"{path}.pairs")
        kw["pairs"] = tuple(
            (parse_complex(p[0], f"{path}.pairs[{i}][0]"), parse_complex(p[1], f"{path}.pairs[{i}][1]"))
            for i, p in enumerate(pairs)
        )
    if "kind" in t:
        kw["kind"] = _str(t["kind"], f"{path}.kind", CONVERGE_KINDS)
    if "family" in t:
        kw["family"] = _str(t["family"], f"{path}.family", SWEEP_FAMILIES)
    if "family_scale" in t:
        kw["family_scale"] = _float(t["family_scale"], f"{path}.family_scale")
    if "components" in t:
        kw["components"] = _str(t["components"], f"{path}.components", ("outer", "all"))
    for key in ("kmax", "order", "node"):
        if key in t:
            kw[key] = _int(t[key], f"{path}.{key}")
    if kw.get("kmax", 16) < 2:
        raise ConfigError("kmax must be at least 2", f"{path}.kmax")
    if not 1 <= kw.get("order", 1) <= 4:
        raise ConfigError("order must be between 1 and 4", f"{path}.order")
    if "basis" in t:
        kw["basis"] = _str(t["basis"], f"{path}.basis", ("analytic-annulus", "szego-span"))
    if "gram" in t:
        kw["gram"] = _str(t["gram"], f"{path}.gram", ("closed-form", "boundary-integral", "grid"))
    return TaskSpec(**kw)


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        where = ""
        if getattr(exc, "lineno", None) is not None:
            where = f" at line {exc.lineno}, column {exc.colno}"
        msg = getattr(exc, "msg", str(exc))
        raise ConfigError(f"parse error{where}: {msg}") from exc
    _check_keys(data, {"domain", "weight", "task", "output", "tolerances"}, "")
    if "domain" not in data:
        raise ConfigError("missing table", "domain")
    domain = _domain(data["domain"])
    weight = _weight(data.get("weight", {}))
    task = _task(data.get("task", {}))
    output = None
    if "output" in data:
        out = data["output"]
        if not isinstance(out, dict):
            raise ConfigError("expected a table", "output")
        _check_keys(out, {"path"}, "output")
        output = _str(out.get("path", ""), "output.path") or None
    tol = dict(DEFAULT_TOLERANCES)
    if "tolerances" in data:
        t = data["tolerances"]
        if not isinstance(t, dict):
            raise ConfigError("expected a table", "tolerances")
        _check_keys(t, set(DEFAULT_TOLERANCES), "tolerances")
        for key, value in t.items():
            v = _float(value, f"tolerances.{key}")
            if v <= 0:
                raise ConfigError("tolerance must be positive", f"tolerances.{key}")
            tol[key] = v
    return RunConfig(domain, weight, task, output, tol)


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
