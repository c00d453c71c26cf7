"""Run configuration, report assembly and deterministic JSON / CSV output."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import PreconditionError
from .lattice import GeneratingSet, LengthOracle, NormSpec


@dataclass
class RunConfig:
    """Everything a command needs; loaded from JSON with defaults filled in."""

    generating_set: list | None = None
    norm: dict | None = None
    theta: list | None = None
    truncation_tol: float = 1e-3
    run_length: int | None = None
    window_radius: int = 3
    seed: int = 0
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.truncation_tol > 0:
            raise PreconditionError("truncation_tol must be positive")
        if self.run_length is not None and self.run_length <= 0:
            raise PreconditionError("run_length must be positive")
        if self.window_radius <= 0:
            raise PreconditionError("window_radius must be positive")
        if self.seed < 0 or self.seed >= 2**64:
            raise PreconditionError("seed must fit in an unsigned 64-bit integer")

    @classmethod
    def from_json(cls, data: Mapping) -> "RunConfig":
        known = {k for k in cls.__dataclass_fields__ if k != "extra"}
        bad = [k for k in data if k not in known and k != "extra"]
        extra = dict(data.get("extra", {}))
        for k in bad:
            extra[k] = data[k]
        return cls(**{k: v for k, v in data.items() if k in known}, extra=extra)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise PreconditionError(f"cannot read config {path}: {exc}") from None

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def oracle(self, default: Sequence = (1, 2)) -> LengthOracle:
        """Length oracle from the generating set, else the norm, else word({±default})."""
        if self.generating_set is not None:
            return LengthOracle.word(GeneratingSet.symmetric(self.generating_set))
        if self.norm is not None:
            poly = self.norm.get("polytope")
            spec = NormSpec(self.norm["kind"], int(self.norm["dim"]),
                            GeneratingSet.symmetric(poly) if poly else None)
            return LengthOracle.norm(spec)
        return LengthOracle.word(GeneratingSet.symmetric(default))


@dataclass
class Assertion:
    label: str
    lhs: Any
    rhs: Any
    relation: str
    passed: bool

    def to_json(self) -> dict:
        return {"label": self.label, "lhs": self.lhs, "relation": self.relation,
                "rhs": self.rhs, "passed": self.passed}


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)

    def check(self, label: str, lhs, relation: str, rhs, passed: bool) -> bool:
        self.assertions.append(Assertion(label, lhs, rhs, relation, bool(passed)))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "results": self.results,
                "diagnostics": self.diagnostics,
                "assertions": [a.to_json() for a in self.assertions], "passed": self.passed}


def to_plain(obj):
    """Convert numbers, tuples, numpy values and objects with to_json into JSON types."""
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    if isinstance(obj, Mapping):
        return {str(k) if not isinstance(k, str) else k: to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_plain(v) for v in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([json.dumps(to_plain(c)) if isinstance(c, (list, tuple)) else to_plain(c) for c in r])
    return buf.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows))
    return path
