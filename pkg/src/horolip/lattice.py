"""Lattice points, generating sets and length functions on Z^d.

Points are plain tuples of ints.  A :class:`LengthOracle` wraps one of the
supported length functions (word length of a symmetric generating set, the
restriction of a norm, ``|n|**beta``, or a user table) behind a memoized,
thread-safe ``__call__``.  The derived functions

    phi_y(x) = l(x) - l(x - y)

are the building blocks of the horofunction boundary.
"""
from __future__ import annotations

import math
import threading
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import NamedTuple, Union

from .errors import DimensionError, GenerationError, InsufficientDataError, PreconditionError
from .hnf import spans_full_lattice

Point = tuple[int, ...]
Real = Union[int, float, Fraction]


def as_point(x: Iterable[int] | int) -> Point:
    if isinstance(x, int):
        return (x,)
    return tuple(int(c) for c in x)


def neg(x: Point) -> Point:
    return tuple(-c for c in x)


def add(x: Point, y: Point) -> Point:
    return tuple(a + b for a, b in zip(x, y))


def sub(x: Point, y: Point) -> Point:
    return tuple(a - b for a, b in zip(x, y))


def zero(dim: int) -> Point:
    return (0,) * dim


def box(radius: int, dim: int) -> list[Point]:
    rng = range(-radius, radius + 1)
    return [tuple(p) for p in product(rng, repeat=dim)]


@dataclass(frozen=True)
class GeneratingSet:
    """Finite symmetric subset of Z^d not containing 0."""

    dim: int
    elements: tuple[Point, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be positive")
        pts = tuple(sorted({as_point(s) for s in self.elements}))
        object.__setattr__(self, "elements", pts)
        for s in pts:
            if len(s) != self.dim:
                raise DimensionError(f"{s} is not in Z^{self.dim}")
        if zero(self.dim) in pts:
            raise PreconditionError("0 may not belong to a generating set")
        members = set(pts)
        if any(neg(s) not in members for s in pts):
            raise PreconditionError("generating set must satisfy S = -S")

    @classmethod
    def symmetric(cls, half: Iterable[Iterable[int] | int]) -> "GeneratingSet":
        """Build S from one representative of each pair {s, -s}."""
        pts = [as_point(s) for s in half]
        if not pts:
            raise PreconditionError("empty generating set")
        return cls(len(pts[0]), tuple(pts) + tuple(neg(p) for p in pts))

    def generates(self) -> bool:
        return spans_full_lattice(self.elements, self.dim)

    def require_generating(self) -> None:
        if not self.generates():
            raise GenerationError(f"{list(self.elements)} does not generate Z^{self.dim}")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def to_json(self) -> dict:
        return {"dim": self.dim, "elements": [list(s) for s in self.elements]}

    @classmethod
    def from_json(cls, data: Mapping) -> "GeneratingSet":
        return cls(int(data["dim"]), tuple(as_point(e) for e in data["elements"]))


@dataclass(frozen=True)
class NormSpec:
    """A norm on R^d: ``l1``, ``l2``, ``linf`` or the gauge of ``polytope``."""

    kind: str
    dim: int
    polytope: GeneratingSet | None = None

    def __post_init__(self):
        if self.kind not in ("l1", "l2", "linf", "gauge"):
            raise PreconditionError(f"unknown norm kind {self.kind!r}")
        if self.kind == "gauge":
            if self.polytope is None or self.polytope.dim != self.dim:
                raise PreconditionError("gauge norm needs a polytope of matching dimension")

    def __call__(self, x: Sequence[float]) -> float:
        if self.kind == "l1":
            return float(sum(abs(c) for c in x))
        if self.kind == "l2":
            return math.sqrt(sum(float(c) * float(c) for c in x))
        if self.kind == "linf":
            return float(max(abs(c) for c in x))
        from .convexgeom import gauge_value

        return float(gauge_value(self.polytope, x))

    def box_radius(self, r: float) -> int:
        """Half-width of a cube containing the norm ball of radius ``r``."""
        if self.kind == "gauge":
            m = max(max(abs(c) for c in s) for s in self.polytope)
            return int(math.floor(r * m + 1e-9))
        return int(math.floor(r + 1e-9))


class _WordBall:
    """Breadth-first ball in the Cayley graph, grown on demand."""

    def __init__(self, gens: GeneratingSet):
        self.gens = gens.elements
        origin = zero(gens.dim)
        self.dist: dict[Point, int] = {origin: 0}
        self.layers: list[list[Point]] = [[origin]]

    @property
    def radius(self) -> int:
        return len(self.layers) - 1

    def grow(self) -> None:
        frontier = self.layers[-1]
        r = len(self.layers)
        dist = self.dist
        new: list[Point] = []
        for x in frontier:
            for s in self.gens:
                y = tuple(a + b for a, b in zip(x, s))
                if y not in dist:
                    dist[y] = r
                    new.append(y)
        new.sort()
        self.layers.append(new)


class LengthOracle:
    """Memoized length function on Z^d.

    Use the constructors :meth:`word`, :meth:`norm`, :meth:`beta`,
    :meth:`custom` and :meth:`sum_of` rather than ``__init__``.
    """

    def __init__(self, kind: str, dim: int, func: Callable[[Point], Real] | None = None, *,
                 generating_set: GeneratingSet | None = None, norm_spec: NormSpec | None = None,
                 beta_exponent: float | None = None, box_bound: Callable[[float], int] | None = None,
                 proper: bool | None = True, label: str = ""):
        self.kind = kind
        self.dim = dim
        self.generating_set = generating_set
        self.norm_spec = norm_spec
        self.beta_exponent = beta_exponent
        self.proper = proper
        self.label = label or kind
        self._func = func
        self._box_bound = box_bound
        self._cache: dict[Point, Real] = {}
        self._lock = threading.Lock()
        self._ball: _WordBall | None = None
        if kind == "word":
            generating_set.require_generating()
            self._ball = _WordBall(generating_set)

    # constructors ---------------------------------------------------------
    @classmethod
    def word(cls, gens: GeneratingSet) -> "LengthOracle":
        return cls("word", gens.dim, generating_set=gens,
                   label=f"word{[list(s) for s in gens.elements]}")

    @classmethod
    def norm(cls, spec: NormSpec) -> "LengthOracle":
        return cls("norm", spec.dim, spec, norm_spec=spec, box_bound=spec.box_radius,
                   label=f"norm:{spec.kind}")

    @classmethod
    def beta(cls, exponent: float, dim: int = 1) -> "LengthOracle":
        if not 0 < exponent <= 1:
            raise PreconditionError("beta must lie in (0, 1]")

        def f(x: Point) -> float:
            if dim == 1:
                return float(abs(x[0])) ** exponent
            return math.sqrt(sum(c * c for c in x)) ** exponent

        return cls("beta", dim, f, beta_exponent=exponent,
                   box_bound=lambda r: int(math.floor(max(r, 0.0) ** (1.0 / exponent) + 1e-9)),
                   label=f"beta:{exponent}")

    @classmethod
    def custom(cls, table: Mapping[Point, Real] | Callable[[Point], Real], dim: int, *,
               box_bound: Callable[[float], int] | None = None, proper: bool | None = None,
               label: str = "custom") -> "LengthOracle":
        """Wrap a table or callable.  ``proper`` is recorded, never inferred."""
        if isinstance(table, Mapping):
            frozen = {as_point(k): v for k, v in table.items()}

            def f(x: Point) -> Real:
                try:
                    return frozen[x]
                except KeyError:
                    raise InsufficientDataError(f"{x} missing from length table") from None
        else:
            f = table
        return cls("custom", dim, f, box_bound=box_bound, proper=proper, label=label)

    @classmethod
    def sum_of(cls, first: "LengthOracle", second: "LengthOracle") -> "LengthOracle":
        """Length on Z^(d1+d2) given by l1(x) + l2(y) (sum of metrics)."""
        d1 = first.dim

        def f(x: Point) -> Real:
            return first(x[:d1]) + second(x[d1:])

        def bound(r: float) -> int:
            return max(first.box_radius(r), second.box_radius(r))

        return cls("custom", d1 + second.dim, f, box_bound=bound,
                   proper=bool(first.proper and second.proper),
                   label=f"sum({first.label},{second.label})")

    # evaluation -----------------------------------------------------------
    @property
    def integer_valued(self) -> bool:
        return self.kind == "word"

    def __call__(self, x: Iterable[int] | int) -> Real:
        x = as_point(x)
        if len(x) != self.dim:
            raise DimensionError(f"{x} is not in Z^{self.dim}")
        cached = self._cache.get(x)
        if cached is not None:
            return cached
        if self.kind == "word":
            return self._word_length(x)
        value = self._func(x)
        with self._lock:
            self._cache[x] = value
        return value

    def _word_length(self, x: Point) -> int:
        ball = self._ball
        with self._lock:
            while x not in ball.dist:
                ball.grow()
                if ball.radius > 10_000_000:  # unreachable for generating sets
                    raise GenerationError(f"{x} not reached by breadth-first search")
            value = ball.dist[x]
            self._cache[x] = value
        return value

    length = __call__

    @property
    def origin(self) -> Point:
        return zero(self.dim)

    def distance(self, x: Point, y: Point) -> Real:
        return self(sub(x, y))

    def phi(self, y: Point, x: Point) -> Real:
        return self(x) - self(sub(x, y))

    def box_radius(self, r: float) -> int:
        if self.kind == "word":
            m = max(max(abs(c) for c in s) for s in self.generating_set)
            return int(math.floor(r)) * m
        if self._box_bound is None:
            raise InsufficientDataError(f"{self.label}: no ball enumerator available")
        return self._box_bound(r)

    def ball(self, r: float) -> list[Point]:
        """Points with length <= r, sorted by (length, coordinates)."""
        if self.kind == "word":
            ball = self._ball
            with self._lock:
                while ball.radius < int(math.floor(r)):
                    ball.grow()
                layers = ball.layers[: int(math.floor(r)) + 1]
            return [p for layer in layers for p in layer]
        pts = [p for p in box(self.box_radius(r), self.dim) if self(p) <= r + 1e-12]
        pts.sort(key=lambda p: (self(p), p))
        return pts

    def __repr__(self):
        return f"LengthOracle({self.label})"


def word_length_ball(gens: GeneratingSet, radius: int) -> dict[Point, int]:
    """Word lengths of every point at distance <= radius from 0."""
    gens.require_generating()
    oracle = LengthOracle.word(gens)
    return {p: oracle(p) for p in oracle.ball(radius)}


def length(oracle: LengthOracle, x) -> Real:
    return oracle(x)


def phi(oracle: LengthOracle, y, x) -> Real:
    return oracle.phi(as_point(y), as_point(x))


class TranslationBound(NamedTuple):
    value: Real
    radius: float
    certified: bool


def translation_bound(oracle: LengthOracle, y, radius: float) -> TranslationBound:
    """sup |phi_y| over the ball of the given radius.

    ``certified`` is true when the supremum reaches l(y), the global bound
    for length functions.
    """
    y = as_point(y)
    ly = oracle(y)
    if radius < ly:
        raise PreconditionError(f"radius {radius} below l(y) = {ly}")
    best = max(abs(oracle.phi(y, x)) for x in oracle.ball(radius))
    return TranslationBound(best, radius, bool(best >= ly - 1e-12))


def cocycle_identity_check(oracle: LengthOracle, y, z, radius: float) -> bool:
    """phi_{y+z}(x) == phi_y(x) + phi_z(x - y) on the ball."""
    y, z = as_point(y), as_point(z)
    yz = add(y, z)
    exact = oracle.integer_valued
    for x in oracle.ball(radius):
        lhs = oracle.phi(yz, x)
        rhs = oracle.phi(y, x) + oracle.phi(z, sub(x, y))
        if exact:
            if lhs != rhs:
                return False
        elif abs(lhs - rhs) > 1e-12:
            return False
    return True


@dataclass
class CoefficientFunction:
    """Finitely supported complex function on Z^d (zeros are dropped)."""

    dim: int
    values: dict[Point, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.values.items():
            k = as_point(k)
            if len(k) != self.dim:
                raise DimensionError(f"{k} is not in Z^{self.dim}")
            v = complex(v)
            if v != 0:
                clean[k] = v
        self.values = clean

    @classmethod
    def delta(cls, point, value: complex = 1.0) -> "CoefficientFunction":
        p = as_point(point)
        return cls(len(p), {p: value})

    @property
    def support(self) -> list[Point]:
        return sorted(self.values)

    def __call__(self, x) -> complex:
        return self.values.get(as_point(x), 0j)

    def __abs__(self) -> "CoefficientFunction":
        return CoefficientFunction(self.dim, {k: abs(v) for k, v in self.values.items()})

    def is_zero(self) -> bool:
        return not self.values

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "support": [{"point": list(p), "re": self.values[p].real, "im": self.values[p].imag}
                            for p in self.support]}

    @classmethod
    def from_json(cls, data: Mapping) -> "CoefficientFunction":
        entries = data["support"]
        dim = int(data["dim"]) if "dim" in data else len(entries[0]["point"])
        return cls(dim, {as_point(e["point"]): complex(e.get("re", 0.0), e.get("im", 0.0))
                         for e in entries})


def pk_norm(f: CoefficientFunction, p: float, k: float, oracle: LengthOracle) -> float:
    """(sum (|f(x)| (1 + l(x))^k)^p)^(1/p)."""
    if p < 1 or k < 0:
        raise PreconditionError("need p >= 1 and k >= 0")
    terms = [abs(v) * (1.0 + float(oracle(x))) ** k for x, v in f.values.items()]
    if not terms:
        return 0.0
    if math.isinf(p):
        return max(terms)
    return sum(t ** p for t in terms) ** (1.0 / p)


def order_lipnorm(f: CoefficientFunction, weight: LengthOracle) -> float:
    """sum w(x) |f(x)|, the l^1 instance of L(f) = || w |f| ||."""
    return float(sum(float(weight(x)) * abs(v) for x, v in f.values.items()))


def min_nonzero_length(oracle: LengthOracle, radius: float) -> Real:
    """Smallest length of a nonzero point in the ball (the s of finite-radius bounds)."""
    origin = zero(oracle.dim)
    return min(oracle(p) for p in oracle.ball(radius) if p != origin)


def length_table_rows(oracle: LengthOracle, radius: float) -> list[tuple[Point, Real]]:
    return [(p, oracle(p)) for p in oracle.ball(radius)]
