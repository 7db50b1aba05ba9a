"""
Experiment configuration files.

Configs are TOML documents. Every numeric value is written as a quoted
decimal string (``"0.05"``, ``"512"``) so that nothing passes through a
binary float on the way in; booleans and lists are plain TOML. The layout:

.. code-block:: toml

    name = "joint-ergodicity-q"
    kind = "joint-ergodicity"
    tags = ["acceptance", "averages"]
    seed = "0"
    description = "..."

    [system]            # ring and rotation matrix rows
    ring = "Q"
    phi = [["1"]]

    [folner]            # Folner family for the experiment
    family = "rational_ladder"
    half_open = false

    [params]            # kind-specific inputs
    [checks]            # kind-specific verdict thresholds
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import tomli
import tomli_w

from ..algebra import ConfigurationError, FolnerSequence, Ring
from ..polynomials import PolySystem, PolynomialSyntaxError
from ..systems import RotationSystem, parse_observable, parse_rotation

KINDS = ("joint-ergodicity", "counterexample", "equidistribution", "pet-trace",
         "seminorm-table", "vdc-check", "mean-ergodic")

_TOP_KEYS = {"name", "kind", "tags", "seed", "description", "system", "folner", "params",
             "checks"}
# [params] and [checks] depend on the kind and are checked after a run
_SECTION_KEYS = {"system": {"ring", "phi"},
                 "folner": {"family", "offset", "half_open", "max_size"}}


class ConfigError(ValueError):
    """Parse or validation failure, with the config line when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass
class ExperimentConfig:
    name: str
    kind: str
    tags: list = field(default_factory=list)
    seed: int = 0
    description: str = ""
    system: dict = field(default_factory=dict)
    folner: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    source: str = field(default="", compare=False, repr=False)
    path: str | None = field(default=None, compare=False, repr=False)
    _read: set = field(default_factory=set, compare=False, repr=False)

    # -- typed accessors ---------------------------------------------------
    def error(self, message: str, key: str | None = None) -> ConfigError:
        return ConfigError(message, _line_of(self.source, key) if key else None, self.path)

    def get(self, section: str, key: str, default=None, required: bool = False):
        table = getattr(self, section)
        self._read.add((section, key))
        if key not in table:
            if required:
                raise self.error(f"missing [{section}] {key}", section)
            return default
        return table[key]

    def number(self, section: str, key: str, default=None, required: bool = False) -> Fraction:
        v = self.get(section, key, default, required)
        return None if v is None else decimal_value(v, key, self)

    def integer(self, section: str, key: str, default=None, required: bool = False) -> int:
        v = self.number(section, key, default, required)
        if v is None:
            return None
        if v.denominator != 1:
            raise self.error(f"{key} must be an integer, got {v}", key)
        return int(v)

    def real(self, section: str, key: str, default=None, required: bool = False) -> float:
        v = self.number(section, key, default, required)
        return None if v is None else float(v)

    def flag(self, section: str, key: str, default: bool = False) -> bool:
        v = self.get(section, key, default)
        if not isinstance(v, bool):
            raise self.error(f"{key} must be true or false", key)
        return v

    def int_list(self, section: str, key: str, required: bool = True) -> list:
        v = self.get(section, key, None, required)
        if v is None:
            return []
        if not isinstance(v, list):
            raise self.error(f"{key} must be a list of decimal strings", key)
        out = []
        for x in v:
            q = decimal_value(x, key, self)
            if q.denominator != 1:
                raise self.error(f"{key} entries must be integers", key)
            out.append(int(q))
        return out

    def str_list(self, section: str, key: str, required: bool = True) -> list:
        v = self.get(section, key, None, required)
        if v is None:
            return []
        if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
            raise self.error(f"{key} must be a list of strings", key)
        return list(v)

    def unread_keys(self) -> list:
        """``[params]`` and ``[checks]`` keys no runner or verdict has asked for."""
        return [(sec, k) for sec in ("params", "checks") for k in getattr(self, sec)
                if (sec, k) not in self._read]

    # -- builders ----------------------------------------------------------
    def ring(self, table: dict | None = None, key_section: str = "system") -> Ring:
        table = self.system if table is None else table
        name = table.get("ring")
        if not isinstance(name, str):
            raise self.error(f"[{key_section}] ring must be a string", "ring")
        try:
            return Ring.from_name(name)
        except ConfigurationError as exc:
            raise self.error(str(exc), "ring") from None

    def rotation(self, table: dict | None = None) -> RotationSystem:
        table = self.system if table is None else table
        ring = self.ring(table)
        phi = table.get("phi")
        if phi is None:
            raise self.error("[system] needs phi", "system")
        _reject_floats(phi, "phi", self)
        try:
            return parse_rotation(ring, phi)
        except (ConfigurationError, ValueError) as exc:
            raise self.error(f"bad rotation: {exc}", "phi") from None

    def folner_sequence(self, ring: Ring, table: dict | None = None) -> FolnerSequence:
        table = self.folner if table is None else table
        family = table.get("family")
        if family is None:
            family = "rational_ladder" if ring.is_field() else "centered_box"
        offset = table.get("offset")
        if offset is not None:
            _reject_floats(offset, "offset", self)
            offset = _ring_value(ring, offset, self)
        max_size = table.get("max_size", "200000")
        try:
            return FolnerSequence(ring, family, offset=offset,
                                  half_open=bool(table.get("half_open", False)),
                                  max_size=int(decimal_value(max_size, "max_size", self)))
        except ConfigurationError as exc:
            raise self.error(str(exc), "family") from None

    def polys(self, ring: Ring, key: str = "polys", texts=None) -> PolySystem:
        texts = self.str_list("params", key) if texts is None else texts
        try:
            return PolySystem.parse(texts, ring)
        except PolynomialSyntaxError as exc:
            raise self.error(f"polynomial syntax: {exc}", key) from None

    def observables(self, dim: int, key: str = "observables", texts=None) -> list:
        texts = self.str_list("params", key) if texts is None else texts
        out = []
        for t in texts:
            try:
                out.append(parse_observable(t, dim))
            except ValueError as exc:
                raise self.error(f"observable syntax: {exc}", key) from None
        return out

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "tags": list(self.tags),
               "seed": str(self.seed)}
        if self.description:
            out["description"] = self.description
        for sec in ("system", "folner", "params", "checks"):
            table = getattr(self, sec)
            if table:
                out[sec] = table
        return out


def decimal_value(v, key: str, cfg: ExperimentConfig | None = None) -> Fraction:
    """Exact value of a decimal-string literal; bare TOML numbers are rejected."""
    if isinstance(v, bool) or isinstance(v, (int, float)):
        msg = f"{key}: numeric literals must be quoted decimal strings, got {v!r}"
        raise cfg.error(msg, key) if cfg else ConfigError(msg)
    if not isinstance(v, str):
        msg = f"{key}: expected a decimal string, got {type(v).__name__}"
        raise cfg.error(msg, key) if cfg else ConfigError(msg)
    try:
        return Fraction(v.strip())
    except (ValueError, ZeroDivisionError):
        msg = f"{key}: {v!r} is not a decimal literal"
        raise cfg.error(msg, key) if cfg else ConfigError(msg) from None


def _reject_floats(v, key, cfg):
    if isinstance(v, float) or (isinstance(v, int) and not isinstance(v, bool)):
        raise cfg.error(f"{key}: numeric literals must be quoted decimal strings", key)
    if isinstance(v, list):
        for x in v:
            _reject_floats(x, key, cfg)


def _ring_value(ring: Ring, text, cfg):
    from ..polynomials import parse_polynomial

    try:
        p = parse_polynomial(str(text), ring, names=["n"])
    except PolynomialSyntaxError as exc:
        raise cfg.error(f"bad ring element {text!r}: {exc}", None) from None
    if not p.is_constant():
        raise cfg.error(f"{text!r} is not a constant", None)
    return ring.coerce(p.constant_term)


def _line_of(source: str, key: str | None) -> int | None:
    if not source or not key:
        return None
    pat = re.compile(rf"^\s*(\[+\s*{re.escape(key)}\s*\]+|{re.escape(key)}\s*=)", re.M)
    m = pat.search(source)
    if not m:
        return None
    return source.count("\n", 0, m.start()) + 1


def parse_config(text: str, path: str | None = None) -> ExperimentConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"TOML syntax: {exc}", int(m.group(1)) if m else None, path) from None
    return config_from_dict(data, text, path)


def config_from_dict(data: dict, source: str = "", path: str | None = None) -> ExperimentConfig:
    unknown = set(data) - _TOP_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key!r}", _line_of(source, key), path)
    for sec, allowed in _SECTION_KEYS.items():
        table = data.get(sec, {})
        if not isinstance(table, dict):
            raise ConfigError(f"[{sec}] must be a table", _line_of(source, sec), path)
        extra = sorted(set(table) - allowed)
        if extra:
            raise ConfigError(f"unknown [{sec}] key {extra[0]!r}; known: {', '.join(sorted(allowed))}",
                              _line_of(source, extra[0]), path)
    for key in ("name", "kind"):
        if not isinstance(data.get(key), str):
            raise ConfigError(f"{key} must be a string", _line_of(source, key), path)
    if data["kind"] not in KINDS:
        raise ConfigError(f"unknown kind {data['kind']!r}; known: {', '.join(KINDS)}",
                          _line_of(source, "kind"), path)
    tags = data.get("tags", [])
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise ConfigError("tags must be a list of strings", _line_of(source, "tags"), path)
    cfg = ExperimentConfig(name=data["name"], kind=data["kind"], tags=list(tags),
                           description=str(data.get("description", "")),
                           system=dict(data.get("system", {})),
                           folner=dict(data.get("folner", {})),
                           params=dict(data.get("params", {})),
                           checks=dict(data.get("checks", {})),
                           source=source, path=path)
    seed = decimal_value(data.get("seed", "0"), "seed", cfg)
    if seed.denominator != 1:
        raise cfg.error("seed must be an integer", "seed")
    cfg.seed = int(seed)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", None, str(path)) from None
    return parse_config(text, str(path))


def dump_config(cfg: ExperimentConfig) -> str:
    return tomli_w.dumps(cfg.to_dict())
