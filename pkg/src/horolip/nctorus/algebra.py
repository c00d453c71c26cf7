"""Twisted group algebra of Z^d with the cocycle exp(i pi <x, Theta y>)."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import CocycleMismatchError, DimensionError, PreconditionError
from ..lattice import CoefficientFunction, Point, as_point, neg

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Cocycle:
    theta: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        t = np.asarray(self.theta, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise DimensionError("theta must be square")
        if not np.allclose(t, -t.T, atol=0.0):
            raise PreconditionError("theta must be antisymmetric")
        object.__setattr__(self, "theta", tuple(tuple(float(c) for c in row) for row in t))

    @classmethod
    def trivial(cls, dim: int) -> "Cocycle":
        return cls(tuple((0.0,) * dim for _ in range(dim)))

    @classmethod
    def rotation(cls, dim: int, theta: float) -> "Cocycle":
        """Block diagonal theta * [[0, 1], [-1, 0]] blocks; a trailing odd coordinate is untwisted."""
        t = np.zeros((dim, dim))
        for i in range(0, dim - 1, 2):
            t[i, i + 1] = theta
            t[i + 1, i] = -theta
        return cls(tuple(map(tuple, t)))

    @property
    def dim(self) -> int:
        return len(self.theta)

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=float)

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.matrix)

    def __call__(self, x: Sequence[int], y: Sequence[int]) -> complex:
        if len(x) != self.dim or len(y) != self.dim:
            raise DimensionError("dimension mismatch")
        return cmath.exp(1j * math.pi * float(np.dot(x, self.matrix @ np.asarray(y, dtype=float))))

    def phases(self, y: Sequence[int], zs: np.ndarray) -> np.ndarray:
        """c(y, z) for every row z of ``zs``."""
        w = np.asarray(y, dtype=float) @ self.matrix
        return np.exp(1j * math.pi * (zs @ w))

    def to_json(self) -> dict:
        return {"theta": [list(r) for r in self.theta]}


def cocycle_eval(c: Cocycle, x, y) -> complex:
    return c(as_point(x), as_point(y))


class AlgebraElement:
    """Finitely supported f on Z^d inside the twisted group algebra."""

    def __init__(self, coeffs: CoefficientFunction | Mapping, cocycle: Cocycle):
        if not isinstance(coeffs, CoefficientFunction):
            coeffs = CoefficientFunction(cocycle.dim, dict(coeffs))
        if coeffs.dim != cocycle.dim:
            raise DimensionError("coefficients and cocycle differ in dimension")
        self.coeffs = coeffs
        self.cocycle = cocycle

    @classmethod
    def delta(cls, y, cocycle: Cocycle, value: complex = 1.0) -> "AlgebraElement":
        return cls(CoefficientFunction.delta(y, value), cocycle)

    @classmethod
    def zero(cls, cocycle: Cocycle) -> "AlgebraElement":
        return cls(CoefficientFunction(cocycle.dim), cocycle)

    @property
    def dim(self) -> int:
        return self.cocycle.dim

    @property
    def support(self) -> list[Point]:
        return self.coeffs.support

    @property
    def items(self):
        return self.coeffs.values.items()

    def __call__(self, x) -> complex:
        return self.coeffs(x)

    def support_radius(self) -> int:
        return max((max(abs(c) for c in p) for p in self.support), default=0)

    def _check(self, other: "AlgebraElement"):
        if other.cocycle != self.cocycle:
            raise CocycleMismatchError("elements use different cocycles")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        vals = dict(self.coeffs.values)
        for k, v in other.items:
            vals[k] = vals.get(k, 0) + v
        return AlgebraElement(CoefficientFunction(self.dim, vals), self.cocycle)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + other.scale(-1)

    def scale(self, a: complex) -> "AlgebraElement":
        return AlgebraElement(CoefficientFunction(self.dim, {k: a * v for k, v in self.items}),
                              self.cocycle)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return twisted_convolve(self, other)

    def map_coeffs(self, fn) -> "AlgebraElement":
        return AlgebraElement(CoefficientFunction(self.dim, {k: fn(k, v) for k, v in self.items}),
                              self.cocycle)

    def max_diff(self, other: "AlgebraElement") -> float:
        keys = set(self.coeffs.values) | set(other.coeffs.values)
        return max((abs(self(k) - other(k)) for k in keys), default=0.0)

    def to_json(self) -> dict:
        return {"coeffs": self.coeffs.to_json(), "cocycle": self.cocycle.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "AlgebraElement":
        coeffs = CoefficientFunction.from_json(data["coeffs"] if "coeffs" in data else data)
        theta = data.get("cocycle", {}).get("theta") if "cocycle" in data else data.get("theta")
        cocycle = Cocycle(tuple(map(tuple, theta))) if theta is not None else Cocycle.trivial(coeffs.dim)
        return cls(coeffs, cocycle)

    def __repr__(self):
        return f"AlgebraElement({dict(self.items)})"


def twisted_convolve(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """(f*g)(x) = sum_y f(y) g(x - y) c(y, x - y)."""
    f._check(g)
    c = f.cocycle
    out: dict[Point, complex] = {}
    for y, a in f.items:
        for z, b in g.items:
            x = tuple(p + q for p, q in zip(y, z))
            out[x] = out.get(x, 0) + a * b * c(y, z)
    return AlgebraElement(CoefficientFunction(f.dim, out), c)


def involution(f: AlgebraElement) -> AlgebraElement:
    """f*(x) = conj f(-x) conj c(x, -x); the cocycle factor is 1 here."""
    c = f.cocycle
    return AlgebraElement(
        CoefficientFunction(f.dim, {neg(x): (v * c(x, neg(x))).conjugate() for x, v in f.items}), c)


def X_sigma(f: AlgebraElement, sigma: Sequence) -> AlgebraElement:
    """Coefficients x -> sigma(x) f(x)."""
    if len(sigma) != f.dim:
        raise DimensionError("functional and element differ in dimension")
    s = [float(Fraction(v)) if isinstance(v, (Fraction, int, str)) else float(v) for v in sigma]
    return f.map_coeffs(lambda x, v: sum(a * b for a, b in zip(s, x)) * v)


def dual_action(f: AlgebraElement, p: Sequence[float]) -> AlgebraElement:
    """Multiply f(m) by the character exp(2 pi i <m, p>)."""
    if len(p) != f.dim:
        raise DimensionError("point of the torus has wrong dimension")
    return f.map_coeffs(lambda x, v: v * cmath.exp(2j * math.pi * sum(a * b for a, b in zip(x, p))))


def random_element(rng: np.random.Generator, cocycle: Cocycle, radius: int,
                   density: float = 0.6, zero_at_origin: bool = False) -> AlgebraElement:
    """Random complex coefficients on a random subset of the box of given radius."""
    from ..lattice import box

    pts = box(radius, cocycle.dim)
    vals = {}
    for p in pts:
        if zero_at_origin and not any(p):
            continue
        if rng.random() < density:
            vals[p] = complex(rng.normal(), rng.normal())
    if not vals:
        p = pts[0] if not zero_at_origin else (radius,) + (0,) * (cocycle.dim - 1)
        vals[p] = 1.0
    return AlgebraElement(CoefficientFunction(cocycle.dim, vals), cocycle)


def fourier_sup(f: AlgebraElement, grid: int = 4096, refine: bool = False) -> float:
    """max of |sum f(n) e^{2 pi i <n, t>}| over the grid (Z/grid)^d.

    With ``refine`` the best grid point is polished by a local search; the
    result is still a value of |f^| and so never exceeds the supremum.
    """
    if not f.support:
        return 0.0
    shape = (grid,) * f.dim
    arr = np.zeros(shape, dtype=complex)
    for x, v in f.items:
        arr[tuple(c % grid for c in x)] += v
    vals = np.abs(np.fft.ifftn(arr) * arr.size)
    best = float(vals.max())
    if refine:
        from scipy.optimize import minimize

        start = np.array(np.unravel_index(int(vals.argmax()), shape), dtype=float) / grid
        pts = np.array(f.support, dtype=float)
        coef = np.array([f(p) for p in f.support])

        def neg_abs(t):
            return -abs(coef @ np.exp(2j * math.pi * (pts @ t)))

        res = minimize(neg_abs, start, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
        best = max(best, -float(res.fun))
    return best


def fourier_eval(f: AlgebraElement, t: float | Sequence[float]) -> complex:
    t = [t] if isinstance(t, (int, float)) else list(t)
    return sum(v * cmath.exp(2j * math.pi * sum(a * b for a, b in zip(x, t))) for x, v in f.items)


def elements_from(items: Iterable[tuple[Sequence[int], complex]], cocycle: Cocycle) -> AlgebraElement:
    return AlgebraElement(CoefficientFunction(cocycle.dim, {as_point(p): v for p, v in items}), cocycle)
