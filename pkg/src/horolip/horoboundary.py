"""Horofunction windows, ray classification and Busemann points of faces.

A boundary point is represented by a :class:`HorofunctionWindow`: the
values phi_y(b) for y in a finite window W.  Windows are obtained as limits
of phi_y along sampled rays.  The helpers here only need a metric object
with ``distance(x, y)`` and ``origin``, so the same code serves lattices
and the free group.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .convexgeom import Face, enumerate_faces, facets as facet_list
from .errors import (BudgetError, InsufficientDataError, InsufficientSampleError,
                     InvariantViolation, PreconditionError, WindowExhaustedError)
from .lattice import (GeneratingSet, LengthOracle, NormSpec, Point, add, as_point, neg, sub,
                      zero)

REAL_TOL = 1e-9

GEODESIC = "geodesic"
ALMOST_GEODESIC = "almost_geodesic"
WEAKLY_GEODESIC = "weakly_geodesic"
NONE = "none"


@dataclass(frozen=True)
class RaySample:
    domain: tuple
    points: tuple
    label: str = ""

    def __post_init__(self):
        if len(self.domain) != len(self.points):
            raise PreconditionError("domain and points differ in length")
        if not self.domain:
            raise PreconditionError("empty ray")
        if self.domain[0] != 0:
            raise PreconditionError("ray domain must start at 0")
        if any(b <= a for a, b in zip(self.domain, self.domain[1:])):
            raise PreconditionError("ray domain must be strictly increasing")

    def __len__(self):
        return len(self.points)

    @classmethod
    def integer_ray(cls, step: Sequence[int], n: int, offset: Sequence[int] | None = None,
                    speed: int = 1, label: str = "") -> "RaySample":
        """Points offset + k*step for k = 0..n, at times k*speed."""
        step = as_point(step)
        off = as_point(offset) if offset is not None else zero(len(step))
        pts = tuple(tuple(o + k * s for o, s in zip(off, step)) for k in range(n + 1))
        return cls(tuple(k * speed for k in range(n + 1)), pts, label or f"{off}+k*{step}")


@dataclass(frozen=True)
class RayVerdict:
    kind: str
    violations: tuple[str, ...] = ()

    def __eq__(self, other):
        if isinstance(other, str):
            return self.kind == other
        return isinstance(other, RayVerdict) and (self.kind, self.violations) == (
            other.kind, other.violations)

    def __hash__(self):
        return hash(self.kind)


def _close(a, b, exact: bool, tol: float = 1e-12) -> bool:
    return a == b if exact else abs(a - b) <= tol


def _exact(metric) -> bool:
    return bool(getattr(metric, "integer_valued", False))


def classify_ray(metric, ray: RaySample, eps: float, N: float,
                 test_points: Iterable | None = None) -> RayVerdict:
    """Strongest of geodesic / almost / weakly geodesic that holds on the sample.

    The almost- and weakly-geodesic conditions are tested for sample times
    t >= s >= N.  Weak geodesicity is tested against ``test_points`` (by
    default the first few sample points).
    """
    dom = ray.domain
    pts = ray.points
    n = len(pts)
    exact = _exact(metric)
    d = metric.distance
    geodesic = all(_close(d(pts[i], pts[j]), abs(dom[i] - dom[j]), exact)
                   for i in range(n) for j in range(i))
    if geodesic:
        return RayVerdict(GEODESIC)
    tail = [i for i in range(n) if dom[i] >= N]
    to0 = [d(p, pts[0]) for p in pts]

    almost = all(abs(d(pts[i], pts[j]) + to0[j] - dom[i]) < eps for i in tail for j in tail if j <= i)
    violations: list[str] = []
    if almost:
        for i in tail:
            if not abs(to0[i] - dom[i]) < eps:
                violations.append(f"|rho(g(t),g(0)) - t| >= eps at t={dom[i]}")
            for j in tail:
                if j >= i:
                    continue
                rij = d(pts[i], pts[j])
                if not abs(rij - (dom[i] - dom[j])) < 2 * eps:
                    violations.append(f"|rho(g(t),g(s)) - (t-s)| >= 2eps at t={dom[i]}, s={dom[j]}")
                if not rij < to0[i] - to0[j] + 2 * eps:
                    violations.append(f"triangle defect at t={dom[i]}, s={dom[j]}")
        return RayVerdict(ALMOST_GEODESIC, tuple(violations))

    if test_points is None:
        test_points = pts[: min(4, n)]
    test_points = list(test_points)
    weakly = all(abs(to0[i] - dom[i]) < eps for i in tail)
    if weakly:
        for y in test_points:
            dy = [d(pts[i], y) - dom[i] for i in tail]
            if dy and max(dy) - min(dy) >= eps:
                weakly = False
                break
    return RayVerdict(WEAKLY_GEODESIC if weakly else NONE)


@dataclass
class HorofunctionWindow:
    """Values phi_y(b) on a finite window of points y."""

    window: tuple
    values: dict
    stabilized: dict
    source: str = ""
    exact: bool = True

    def __post_init__(self):
        self.window = tuple(sorted(self.window))

    def __call__(self, y):
        return self.values[y]

    def same_as(self, other: "HorofunctionWindow", on: Iterable | None = None) -> bool:
        keys = set(self.window) & set(other.window) if on is None else list(on)
        for y in keys:
            if not _close(self.values[y], other.values[y], self.exact and other.exact, REAL_TOL):
                return False
        return True

    def key(self) -> tuple:
        if self.exact:
            return tuple(self.values[y] for y in self.window)
        return tuple(round(float(self.values[y]), 9) for y in self.window)

    @property
    def all_stabilized(self) -> bool:
        return all(self.stabilized.values())

    def restricted(self, points: Iterable) -> "HorofunctionWindow":
        pts = [p for p in points if p in self.values]
        return HorofunctionWindow(tuple(pts), {p: self.values[p] for p in pts},
                                  {p: self.stabilized[p] for p in pts}, self.source, self.exact)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v)
            return v

        return {
            "source": self.source,
            "points": [list(y) if isinstance(y, tuple) else y for y in self.window],
            "values": [enc(self.values[y]) for y in self.window],
            "stabilized": [self.stabilized[y] for y in self.window],
        }


def phi_metric(metric, y, x):
    """phi_y(x) = d(x, origin) - d(x, y)."""
    if isinstance(metric, LengthOracle):
        return metric.phi(y, x)
    return metric.distance(x, metric.origin) - metric.distance(x, y)


def phi_trace(metric, ray: RaySample, y) -> list:
    return [phi_metric(metric, y, x) for x in ray.points]


def ray_limit_window(metric, ray: RaySample, window: Iterable, run_length: int,
                     check_monotone: bool = False) -> HorofunctionWindow:
    """Final values of phi_y along the ray, with stabilization flags.

    ``stabilized[y]`` is true when phi_y was constant over the last
    ``run_length`` steps.  With ``check_monotone`` the traces must be
    nondecreasing (geodesic rays) and integral for word metrics.
    """
    window = list(window)
    if len(ray) <= run_length:
        raise InsufficientSampleError(f"ray of {len(ray)} samples, run length {run_length}")
    exact = _exact(metric)
    values, stab = {}, {}
    for y in window:
        trace = phi_trace(metric, ray, y)
        last = trace[-1]
        tail = trace[-run_length - 1:]
        values[y] = last
        stab[y] = all(_close(v, last, exact, REAL_TOL) for v in tail)
        if check_monotone:
            if any(b < a - (0 if exact else 1e-12) for a, b in zip(trace, trace[1:])):
                raise InvariantViolation(f"phi_{y} decreases along a geodesic ray")
            if exact and any(not isinstance(v, int) for v in trace):
                raise InvariantViolation("non-integer phi value for a word metric")
        ly = metric.distance(y, metric.origin)
        if abs(last) > ly + (0 if exact else 1e-12):
            raise InvariantViolation(f"|phi_{y}| exceeds the length of {y}")
    return HorofunctionWindow(tuple(window), values, stab, ray.label, exact)


# faces and Busemann points ----------------------------------------------


def default_window(oracle: LengthOracle, face: Face | None = None, radius: int = 3) -> list[Point]:
    """Word ball of radius 3 + the word diameter of the coset representatives."""
    extra = 0
    if face is not None and face.coset_reps:
        extra = max(oracle(sub(a, b)) for a in face.coset_reps for b in face.coset_reps)
    return oracle.ball(radius + extra)


def default_run_length(oracle: LengthOracle, face: Face, window: Iterable) -> int:
    return 2 * len(face.members) * (1 + max(int(math.ceil(oracle(y))) for y in window))


def face_ray(face: Face, n: int, offset: Point | None = None) -> RaySample:
    return RaySample.integer_ray(face.z, n, offset, speed=len(face.members),
                                 label=f"face{[list(s) for s in face.members]}"
                                       + (f"+{list(offset)}" if offset else ""))


def busemann_from_face(oracle: LengthOracle, face: Face, window: Iterable | None = None,
                       run_length: int | None = None, offset: Point | None = None,
                       check: bool = True) -> HorofunctionWindow:
    """Window of b_F (or of its translate by ``offset``) along n -> n z_F.

    The sampled ray is twice the run length, so a plateau must persist over
    the second half of the horizon.  For the untranslated point the values
    on the subgroup generated by F are checked against sigma_F exactly.
    """
    window = list(window) if window is not None else default_window(oracle, face)
    if run_length is None:
        run_length = default_run_length(oracle, face, window)
    ray = face_ray(face, 2 * run_length, offset)
    w = ray_limit_window(oracle, ray, window, run_length, check_monotone=offset is None)
    if check and offset is None:
        for u in window:
            if face.in_subgroup(u) and w.stabilized[u] and w.values[u] != face.sigma_at(u):
                raise InvariantViolation(f"phi_{u}(b_F) = {w.values[u]} != sigma_F(u) = {face.sigma_at(u)}")
    return w


def translate_window(b: HorofunctionWindow, z, metric=None) -> HorofunctionWindow:
    """Window of the translate of b by z: values'(y) = values(y - z) - values(-z)."""
    z = as_point(z) if not isinstance(z, str) else z
    if isinstance(z, str):
        from .freegroup import inverse, multiply

        shift = lambda y: multiply(inverse(z), y)  # noqa: E731
        mz = inverse(z)
    else:
        shift = lambda y: sub(y, z)  # noqa: E731
        mz = neg(z)
    if mz not in b.values:
        raise WindowExhaustedError(f"{mz} outside window")
    pts = [y for y in b.window if shift(y) in b.values]
    if not pts:
        raise WindowExhaustedError("translated window is empty")
    values = {y: b.values[shift(y)] - b.values[mz] for y in pts}
    stab = {y: b.stabilized[shift(y)] and b.stabilized[mz] for y in pts}
    return HorofunctionWindow(tuple(pts), values, stab, f"{b.source} translated by {z}", b.exact)


@dataclass
class BusemannRecord:
    face: Face
    window: HorofunctionWindow
    orbit: list
    orbit_complete: bool
    representatives: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "face": self.face.to_json(),
            "orbit_size": len(self.orbit),
            "orbit_complete": self.orbit_complete,
            "representatives": [list(q) for q in self.representatives],
            "orbit": [w.to_json() for w in self.orbit],
        }


def orbit(oracle: LengthOracle, face: Face, window: Iterable | None = None,
          run_length: int | None = None) -> BusemannRecord:
    """Orbit of b_F under translation, one window per coset representative.

    Each translate is computed from the shifted ray n z_F + q and
    cross-checked against :func:`translate_window` on the overlap.
    """
    if not face.is_facet or face.index is None:
        raise PreconditionError("orbit needs a facet with coset data")
    window = list(window) if window is not None else default_window(oracle, face)
    if run_length is None:
        run_length = default_run_length(oracle, face, window)
    base = busemann_from_face(oracle, face, window, run_length)
    translates: list[tuple[Point, HorofunctionWindow]] = []
    for q in face.coset_reps:
        wq = base if not any(q) else busemann_from_face(oracle, face, window, run_length, offset=q)
        try:
            shifted = translate_window(base, q)
        except WindowExhaustedError:
            shifted = None
        if shifted is not None and base.all_stabilized and wq.all_stabilized:
            if not wq.same_as(shifted):
                raise InvariantViolation(f"shifted ray and translated window disagree for q={q}")
        translates.append((q, wq))
    distinct: list[tuple[Point, HorofunctionWindow]] = []
    for q, wq in translates:
        if not any(wq.same_as(other) for _, other in distinct):
            distinct.append((q, wq))
    complete = len(distinct) == face.index and all(w.all_stabilized for _, w in distinct)
    if complete:
        for u in face.members:
            for _, wq in distinct:
                try:
                    moved = translate_window(wq, u)
                except WindowExhaustedError:
                    complete = False
                    continue
                if not moved.same_as(wq):
                    complete = False
    if len(distinct) > face.index:
        raise InvariantViolation("more orbit points than cosets")
    return BusemannRecord(face, base, [w for _, w in distinct], complete, [q for q, _ in distinct])


def _limit_values(oracle: LengthOracle, face: Face, points: Iterable, run_length: int,
                  offset: Point | None = None) -> dict:
    w = busemann_from_face(oracle, face, list(dict.fromkeys(points)), run_length, offset, check=False)
    if not w.all_stabilized:
        raise InvariantViolation("values did not stabilize; increase run_length")
    return w.values


@dataclass(frozen=True)
class NonconstancyWitness:
    s: Point
    value_at_b: int
    value_at_translate: int
    phi_minus_s: int


def nonconstancy_check(oracle: LengthOracle, face: Face, y, run_length: int | None = None) -> NonconstancyWitness:
    """Find s outside F moving phi_y by 1 - phi_{-s}(b_F), with phi_{-s}(b_F) in {0, -1}."""
    y = as_point(y)
    if face.in_subgroup(y):
        raise PreconditionError(f"{y} lies in the subgroup generated by the face")
    gens = face.generating_set
    pts = [y] + [neg(s) for s in gens] + [sub(y, s) for s in gens]
    if run_length is None:
        run_length = default_run_length(oracle, face, pts)
    at_b = _limit_values(oracle, face, pts, run_length)
    members = set(face.members)
    for s in gens:
        if s in members:
            continue
        pm = at_b[neg(s)]
        if pm not in (0, -1):
            continue
        moved = _limit_values(oracle, face, [y], run_length, offset=s)[y]
        if moved == at_b[y] + (1 - pm) and moved == at_b[sub(y, s)] - pm:
            return NonconstancyWitness(s, at_b[y], moved, pm)
    raise InvariantViolation(f"no witness s for y={y}: phi_y constant along S-translates")


def boundary_census(oracle: LengthOracle, window: Iterable | None = None,
                    run_length: int | None = None) -> list[HorofunctionWindow]:
    """Distinct windows from all face rays and their coset translates.

    This is a lower bound for the boundary: only points reachable this way
    are listed.  Output is sorted by the window values.
    """
    gens = oracle.generating_set
    faces = enumerate_faces(gens)
    fac = [f for f in faces if f.is_facet]
    if window is None:
        window = default_window(oracle, max(fac, key=lambda f: f.index))
    window = list(window)
    offsets = sorted({q for f in fac for q in f.coset_reps})
    found: dict[tuple, HorofunctionWindow] = {}
    for f in faces:
        rl = run_length or default_run_length(oracle, f, window)
        for q in offsets:
            w = busemann_from_face(oracle, f, window, rl, offset=q if any(q) else None,
                                   check=f.is_facet)
            found.setdefault(w.key(), w)
    return [found[k] for k in sorted(found)]


def product_split_check(lx: LengthOracle, ly: LengthOracle, ray_x: RaySample, ray_y: RaySample,
                        wx: Iterable, wy: Iterable, run_length: int,
                        point_radius: int = 3) -> bool:
    """Check phi_(u,v) = phi_u + phi_v for the sum metric, pointwise and in the limit."""
    prod = LengthOracle.sum_of(lx, ly)
    wx, wy = list(wx), list(wy)
    exact = lx.integer_valued and ly.integer_valued
    for x in lx.ball(point_radius):
        for y in ly.ball(point_radius):
            for u in wx:
                for v in wy:
                    lhs = prod.phi(u + v, x + y)
                    rhs = lx.phi(u, x) + ly.phi(v, y)
                    if not _close(lhs, rhs, exact):
                        return False
    n = min(len(ray_x), len(ray_y))
    pts = tuple(a + b for a, b in zip(ray_x.points[:n], ray_y.points[:n]))
    ray = RaySample(tuple(range(n)), pts, f"({ray_x.label}, {ray_y.label})")
    bx = ray_limit_window(lx, RaySample(tuple(range(n)), ray_x.points[:n]), wx, run_length)
    by = ray_limit_window(ly, RaySample(tuple(range(n)), ray_y.points[:n]), wy, run_length)
    bp = ray_limit_window(prod, ray, [u + v for u in wx for v in wy], run_length)
    return all(_close(bp.values[u + v], bx.values[u] + by.values[v], exact)
               for u in wx for v in wy)


def variation(oracle: LengthOracle, g: Callable | Mapping, r: float, x, R: float) -> float:
    """sup |g(x) - g(y)| over y with d(y, x) <= r."""
    if R < r:
        raise InsufficientDataError(f"data radius {R} smaller than r = {r}")
    x = as_point(x)
    get = g.__getitem__ if isinstance(g, Mapping) else g
    try:
        gx = get(x)
        return max(abs(gx - get(add(x, b))) for b in oracle.ball(r))
    except KeyError as exc:
        raise InsufficientDataError(f"g undefined at {exc}") from None


def lattice_approx_ray(norm: NormSpec, v: Sequence[float], k_max: int,
                       search_radius: int = 10**6) -> RaySample:
    """Times t_k and lattice points x_k with ||x_k - t_k v|| < 1/k.

    Scans times at which the dominant coordinate of t v is an integer and
    rounds the others.
    """
    v = np.asarray(v, dtype=float)
    if abs(norm(v) - 1) > 1e-9:
        raise PreconditionError("direction must have norm 1")
    j = int(np.argmax(np.abs(v)))
    times, points = [0.0], [zero(len(v))]
    a = 0
    for k in range(1, k_max + 1):
        while True:
            a += 1
            if a > search_radius:
                raise BudgetError(f"no lattice point within 1/{k} of the ray up to {search_radius}")
            t = a / abs(v[j])
            x = tuple(int(c) for c in np.rint(t * v))
            if norm(np.asarray(x) - t * v) < 1.0 / k:
                times.append(t)
                points.append(x)
                break
    return RaySample(tuple(times), tuple(points), f"approx direction {list(map(float, v))}")


def beta_collapse(beta: float, p: int, N: int) -> float:
    """max over N <= n <= 2N of |phi_p(n)| for the length |n|^beta."""
    n = np.arange(N, 2 * N + 1, dtype=float)
    return float(np.max(np.abs(n ** beta - np.abs(n - p) ** beta)))


def trace_csv(metric, ray: RaySample, window: Iterable) -> str:
    window = list(window)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["t", "point"] + [f"phi_{y}" for y in window])
    traces = [phi_trace(metric, ray, y) for y in window]
    for i, (t, x) in enumerate(zip(ray.domain, ray.points)):
        out.writerow([t, x] + [tr[i] for tr in traces])
    return buf.getvalue()
