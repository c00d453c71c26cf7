"""Truncated regular representation and the seminorms built on it.

On the box [-R, R]^d the matrix of pi_f has entries f(x - z) c(x - z, z)
and the commutator [M_l, pi_f] multiplies them by l(x) - l(z).  Norms of
compressions only grow with R, so every truncated value is a lower bound
and the schedule reports the whole trace.
"""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar

from ..errors import InvariantViolation, PreconditionError
from ..lattice import LengthOracle, NormSpec, Point
from .algebra import AlgebraElement, X_sigma
from .opnorm import DENSE_LIMIT, op_norm, sparse_norm

DEFAULT_R_MAX = {1: 256, 2: 48, 3: 16}
START_RADIUS = 8


def box_coords(R: int, d: int) -> np.ndarray:
    """Points of [-R, R]^d in lexicographic order, one per row."""
    axes = [np.arange(-R, R + 1)] * d
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def _box_index(coords: np.ndarray, R: int) -> np.ndarray:
    d = coords.shape[1]
    return np.ravel_multi_index(tuple((coords + R).T), (2 * R + 1,) * d)


_length_cache: "weakref.WeakKeyDictionary[LengthOracle, dict]" = weakref.WeakKeyDictionary()


def box_lengths(oracle: LengthOracle, R: int, center: Point | None = None) -> np.ndarray:
    """Lengths of the points of the box, read at x + center when a center is given."""
    per = _length_cache.setdefault(oracle, {})
    key = (R, center)
    if key not in per:
        coords = box_coords(R, oracle.dim)
        if center is not None:
            coords = coords + np.asarray(center)
        per[key] = np.array([float(oracle(tuple(int(c) for c in p))) for p in coords])
    return per[key]


@dataclass
class TruncatedRep:
    box_radius: int
    points: np.ndarray
    matrix: sp.csr_matrix

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def index_of(self, x: Sequence[int]) -> int:
        return int(_box_index(np.asarray([x]), self.box_radius)[0])


def truncated_pi(f: AlgebraElement, R: int, oracle: LengthOracle | None = None,
                 center: Point | None = None) -> TruncatedRep:
    """Compression of pi_f (or of [M_l, pi_f] when ``oracle`` is given) to the box.

    With ``center`` the commutator is compressed to the box moved to
    ``center``.  Right translation commutes with pi_f and the leftover
    cocycle phase is a diagonal unitary, so that compression is unitarily
    equivalent to the centred matrix with lengths read at x + center.
    """
    if R < 0:
        raise PreconditionError("radius must be nonnegative")
    d = f.dim
    coords = box_coords(R, d)
    n = coords.shape[0]
    rows, cols, data = [], [], []
    for y, v in f.items:
        target = coords + np.asarray(y)
        ok = np.all(np.abs(target) <= R, axis=1)
        if not ok.any():
            continue
        z = coords[ok]
        rows.append(_box_index(target[ok], R))
        cols.append(np.flatnonzero(ok))
        data.append(v * f.cocycle.phases(y, z.astype(float)))
    if rows:
        r, c, val = np.concatenate(rows), np.concatenate(cols), np.concatenate(data)
    else:
        r = c = np.zeros(0, dtype=int)
        val = np.zeros(0, dtype=complex)
    if oracle is not None:
        lens = box_lengths(oracle, R, center)
        val = val * (lens[r] - lens[c])
    m = sp.csr_matrix((val, (r, c)), shape=(n, n))
    m.eliminate_zeros()
    return TruncatedRep(R, coords, m)


def commutator(f: AlgebraElement, oracle: LengthOracle, R: int) -> TruncatedRep:
    return truncated_pi(f, R, oracle)


@dataclass
class SeminormEstimate:
    value: float
    lower_companion: float
    upper_companion: float
    trace: list = field(default_factory=list)
    converged: bool = False
    tol: float = 1e-3

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "lower_companion": self.lower_companion,
            "upper_companion": self.upper_companion,
            "trace": [[r, v] for r, v in self.trace],
            "converged": self.converged,
            "tol": self.tol,
        }


def radius_schedule(f: AlgebraElement, R_max: int | None = None) -> list[int]:
    d = f.dim
    R_max = R_max or DEFAULT_R_MAX.get(d, 8)
    R = max(START_RADIUS, f.support_radius())
    out = []
    while R < R_max:
        out.append(R)
        R *= 2
    out.append(max(R_max, f.support_radius()))
    return out


def _embed(vec: np.ndarray, R_old: int, R_new: int, d: int) -> np.ndarray:
    idx = _box_index(box_coords(R_old, d), R_new)
    out = np.zeros((2 * R_new + 1) ** d, dtype=complex)
    out[idx] = vec
    # a little noise keeps Lanczos from stalling on an exact subspace
    out += 1e-6 * np.linalg.norm(vec) / math.sqrt(out.size)
    return out


def _run_schedule(f: AlgebraElement, oracle: LengthOracle | None, radii: Sequence[int],
                  tol: float, method: str, center: Point | None = None) -> tuple[list, bool]:
    trace: list[tuple[int, float]] = []
    converged = False
    vec, last_R = None, None
    for R in radii:
        rep = truncated_pi(f, R, oracle, center)
        m = rep.matrix
        n = m.shape[0]
        if m.nnz == 0:
            value = 0.0
        elif method == "auto" and n > DENSE_LIMIT:
            v0 = _embed(vec, last_R, R, f.dim) if vec is not None else None
            value, vec = sparse_norm(m, v0=v0)
            last_R = R
        else:
            value = op_norm(m, method if method != "auto" else "dense_svd")
        if trace and value < trace[-1][1]:
            # compressions cannot shrink the norm; allow only rounding noise
            if value < trace[-1][1] * (1 - 1e-9):
                raise InvariantViolation(f"truncation trace decreased at R={R}")
        trace.append((R, value))
        if len(trace) >= 2:
            prev = trace[-2][1]
            if value == 0.0 or (value - prev) <= tol * value:
                converged = True
                break
    return trace, converged


def _weighted(f: AlgebraElement, w) -> np.ndarray:
    return np.array([float(w(x)) * abs(v) for x, v in f.items])


def a_norm(f: AlgebraElement, R_max: int | None = None, tol: float = 1e-3,
           radii: Sequence[int] | None = None, method: str = "auto") -> SeminormEstimate:
    """Norm of pi_f on the doubling schedule of boxes; companions ||f||_2 and ||f||_1."""
    radii = list(radii) if radii is not None else radius_schedule(f, R_max)
    trace, conv = _run_schedule(f, None, radii, tol, method)
    absf = np.array([abs(v) for _, v in f.items])
    lo = float(np.linalg.norm(absf)) if absf.size else 0.0
    hi = float(absf.sum()) if absf.size else 0.0
    return SeminormEstimate(trace[-1][1] if trace else 0.0, lo, hi, trace, conv, tol)


def L_ell(f: AlgebraElement, oracle: LengthOracle, R_max: int | None = None, tol: float = 1e-3,
          radii: Sequence[int] | None = None, method: str = "auto",
          center: Point | None = None) -> SeminormEstimate:
    """Norm of [M_l, pi_f]; companions ||l f||_2 <= L <= ||l f||_1.

    ``center`` moves the boxes (see :func:`truncated_pi`); every value is
    still a compression norm and so a lower bound.
    """
    radii = list(radii) if radii is not None else radius_schedule(f, R_max)
    trace, conv = _run_schedule(f, oracle, radii, tol, method, center)
    w = _weighted(f, oracle)
    lo = float(np.linalg.norm(w)) if w.size else 0.0
    hi = float(w.sum()) if w.size else 0.0
    return SeminormEstimate(trace[-1][1] if trace else 0.0, lo, hi, trace, conv, tol)


# a faithful one-dimensional picture for d = 2 ----------------------------


def fibre_matrix(f: AlgebraElement, N: int, x: float = 0.0) -> np.ndarray:
    """Matrix of f on l^2({-N..N}) in the representation U = shift, V = e^{2 pi i(x - n theta)}.

    Here pi_(a,b) = e^{-i pi theta a b} U^a V^b satisfies the same product
    rule as the regular representation, and theta = Theta[0, 1].
    """
    if f.dim != 2:
        raise PreconditionError("the fibre picture is for d = 2")
    theta = f.cocycle.matrix[0, 1]
    n = np.arange(-N, N + 1)
    size = n.size
    out = np.zeros((size, size), dtype=complex)
    for (a, b), v in f.items:
        m = n - a  # source index
        ok = np.abs(m) <= N
        phase = np.exp(-1j * math.pi * theta * a * b) * np.exp(2j * math.pi * b * (x - m[ok] * theta))
        out[(n[ok] + N), (m[ok] + N)] += v * phase
    return out


def fibre_offsets(theta: float, samples: int = 16, max_den: int = 64) -> tuple[float, ...]:
    """Values of x to scan.

    The norm of the fibre at x only depends on the orbit of x under
    rotation by theta.  For irrational theta every orbit is dense and one x
    suffices; for theta = p/q the fibre norm has period 1/q in x.
    """
    frac = Fraction(theta).limit_denominator(max_den)
    if abs(float(frac) - theta) > 1e-9:
        return (0.0,)
    q = frac.denominator
    return tuple(k / (samples * q) for k in range(samples))


def fibre_norm(f: AlgebraElement, sizes: Sequence[int] = (64, 128, 256),
               xs: Sequence[float] | None = None, tol: float = 1e-3) -> SeminormEstimate:
    """Norm of f in the fibre picture, max over the sampled x, on growing truncations."""
    if xs is None:
        xs = fibre_offsets(float(f.cocycle.matrix[0, 1]))
    trace = []
    conv = False
    for N in sizes:
        N = max(N, f.support_radius())
        value = max(op_norm(fibre_matrix(f, N, x), "dense_svd") for x in xs)
        trace.append((N, value))
        if len(trace) >= 2 and value - trace[-2][1] <= tol * value:
            conv = True
            break
    absf = np.array([abs(v) for _, v in f.items])
    return SeminormEstimate(trace[-1][1], float(np.linalg.norm(absf)), float(absf.sum()), trace, conv, tol)


def faithful_norm(f: AlgebraElement, R_max: int | None = None, tol: float = 1e-3) -> float:
    """||f|| by the cheapest faithful route: Fourier sup when untwisted, fibres in d = 2."""
    from .algebra import fourier_sup

    if not f.support:
        return 0.0
    if f.cocycle.is_trivial:
        return fourier_sup(f, 4096 if f.dim == 1 else 256, refine=True)
    if f.dim == 2:
        return fibre_norm(f, tol=tol).value
    return a_norm(f, R_max=R_max, tol=tol).value


# differentials -------------------------------------------------------------


def _as_functional(item) -> tuple:
    sigma = getattr(item, "sigma", item)
    return tuple(float(Fraction(c)) if isinstance(c, (Fraction, str)) else float(c) for c in sigma)


def dual_ball_functionals(norm: NormSpec, samples: int = 64) -> list[tuple]:
    """Functionals whose convex hull is the dual unit ball (sampled for l2)."""
    d = norm.dim
    if norm.kind == "l1":
        return [tuple(float(s) for s in signs) for signs in np.array(np.meshgrid(*[[1, -1]] * d)).T.reshape(-1, d)]
    if norm.kind == "linf":
        out = []
        for i in range(d):
            for sgn in (1.0, -1.0):
                e = [0.0] * d
                e[i] = sgn
                out.append(tuple(e))
        return out
    if norm.kind == "gauge":
        from ..convexgeom import facets

        return [_as_functional(F) for F in facets(norm.polytope, with_cosets=False)]
    if d == 1:
        return [(1.0,), (-1.0,)]
    if d == 2:
        ang = 2 * np.pi * np.arange(samples) / samples
        return [(float(np.cos(a)), float(np.sin(a))) for a in ang]
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(samples, d))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return [tuple(map(float, p)) for p in pts]


@dataclass
class DfNorm:
    value: float
    best: tuple
    values: list
    round_refined: bool = False

    def to_json(self) -> dict:
        return {"value": self.value, "best_functional": list(self.best),
                "per_functional": [[list(s), v] for s, v in self.values],
                "round_refined": self.round_refined}


def df_norm(f: AlgebraElement, functionals: Iterable, R_max: int | None = None, tol: float = 1e-3,
            radii: Sequence[int] | None = None, refine_circle: bool = False,
            method: str = "regular") -> DfNorm:
    """max over functionals sigma of ||X_sigma f||.

    For polytope norms the functionals are the facet functionals, the
    extreme points of the dual ball.  With ``refine_circle`` (round dual
    ball in d=2) the best sampled angle is refined by a bounded 1-d search,
    giving a lower bound for the supremum over the circle.  ``method`` is
    ``regular`` (box truncations of the regular representation) or
    ``faithful`` (see :func:`faithful_norm`).
    """
    funcs = [_as_functional(s) for s in functionals]
    if not funcs:
        raise PreconditionError("no functionals given")
    if not f.support:
        return DfNorm(0.0, funcs[0], [(s, 0.0) for s in funcs])
    if radii is None:
        radii = radius_schedule(f, R_max)

    def value(sigma) -> float:
        g = X_sigma(f, sigma)
        if not g.support:
            return 0.0
        if method == "faithful":
            return faithful_norm(g, R_max=R_max, tol=tol)
        return a_norm(g, radii=radii, tol=tol).value

    vals = [(s, value(s)) for s in funcs]
    best, best_val = max(vals, key=lambda p: p[1])
    refined = False
    if refine_circle and f.dim == 2 and len(funcs) > 2:
        a0 = math.atan2(best[1], best[0])
        step = 2 * math.pi / len(funcs)
        res = minimize_scalar(lambda a: -value((math.cos(a), math.sin(a))),
                              bounds=(a0 - step, a0 + step), method="bounded",
                              options={"xatol": 1e-4})
        if -res.fun > best_val:
            best, best_val = (math.cos(res.x), math.sin(res.x)), -res.fun
        refined = True
    return DfNorm(best_val, best, vals, refined)


# constants for word lengths -------------------------------------------------


@dataclass
class CosetConstant:
    q: Point
    sigma_q: Fraction
    values: list
    pair: tuple | None
    k: Fraction
    k_as_stated: Fraction


@dataclass
class KConstants:
    face_members: tuple
    per_coset: list
    k_F: Fraction
    k_F_as_stated: Fraction

    def to_json(self) -> dict:
        return {
            "face": [list(s) for s in self.face_members],
            "k_F": str(self.k_F),
            "k_F_as_stated": str(self.k_F_as_stated),
            "cosets": [{"q": list(c.q), "sigma_q": str(c.sigma_q), "psi_values": [str(v) for v in c.values],
                        "m1_m2": None if c.pair is None else [str(c.pair[0]), str(c.pair[1])],
                        "k_q": str(c.k), "k_q_as_stated": str(c.k_as_stated)} for c in self.per_coset],
        }


def k_constants(face, oracle: LengthOracle, record) -> KConstants:
    """Constants bounding ||X_F f|| by a multiple of L(f).

    Split f over the cosets q + G_F.  On coset q the boundary points of the
    orbit give ||b_q + m a_q|| <= L(f) for every value m of psi_q = phi_q.
    Writing sigma(q) as an affine combination of two such values m1, m2
    yields ||b_q + sigma(q) a_q|| <= c_q L(f) with
    c_q = (|sigma(q) - m2| + |m1 - sigma(q)|) / |m1 - m2|, and k_F = sum c_q.

    ``k_as_stated`` records the alternative (|m1| + |m2|) / |m1 - m2| with the
    zero-value shortcut: k_0 = 1 plus the other cosets weighted by |sigma(q)|.
    """
    if not record.orbit_complete:
        raise PreconditionError("orbit record is incomplete; widen the window")
    per = []
    total = Fraction(0)
    stated = Fraction(0)
    for q in face.coset_reps:
        sq = face.sigma_at(q)
        if not any(q):
            per.append(CosetConstant(q, sq, [Fraction(0)], None, Fraction(1), Fraction(1)))
            total += 1
            stated += 1
            continue
        vals = sorted({Fraction(w.values[q]) for w in record.orbit})
        if len(vals) < 2:
            raise InvariantViolation(f"psi_q constant on the orbit for q={q}")
        best = None
        for i, m1 in enumerate(vals):
            for m2 in vals[i + 1:]:
                c = (abs(sq - m2) + abs(m1 - sq)) / abs(m1 - m2)
                if best is None or c < best[0]:
                    best = (c, (m1, m2))
        nonzero = [m for m in vals if m != 0]
        if 0 in vals:
            ks = 1 / max(abs(m) for m in nonzero)
        else:
            ks = min((abs(a) + abs(b)) / abs(a - b) for i, a in enumerate(vals) for b in vals[i + 1:])
        per.append(CosetConstant(q, sq, vals, best[1], best[0], ks))
        total += best[0]
        stated += abs(sq) * ks
    return KConstants(face.members, per, total, max(Fraction(1), stated))


@dataclass
class InequalityReport:
    label: str
    lhs: float
    rhs: float
    L: float
    df: float
    k: float
    tol: float
    passed: bool

    @property
    def slack(self) -> float:
        return self.rhs * (1 + self.tol) - self.lhs

    def to_json(self) -> dict:
        return {"label": self.label, "lhs": self.lhs, "rhs": self.rhs, "L": self.L, "df": self.df,
                "k": self.k, "tol": self.tol, "slack": self.slack, "passed": self.passed}


def main_inequality_check(f: AlgebraElement, oracle: LengthOracle, functionals: Iterable,
                          k: float = 1.0, tol: float = 1e-3, R_max: int | None = None,
                          refine_circle: bool = False, L: SeminormEstimate | None = None,
                          method: str = "regular",
                          label: str = "differential bounded by Lip seminorm") -> InequalityReport:
    """Check ||df|| <= k L(f) (1 + tol); k = 1 for norm restrictions."""
    if L is None:
        L = L_ell(f, oracle, R_max=R_max)
    d = df_norm(f, functionals, R_max=R_max, refine_circle=refine_circle, method=method)
    rhs = float(k) * L.value
    return InequalityReport(label, d.value, rhs, L.value, d.value, float(k), tol,
                            d.value <= rhs * (1 + tol))
