"""Exact rational geometry of the hull of a generating set.

Facets are found by solving ``sigma(s) = 1`` on every spanning d-subset of
S with Fractions and keeping the functionals that stay <= 1 on all of S.
Lower-dimensional faces are intersections of facets.  Nothing here touches
floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DimensionError, RankError
from .hnf import hermite_normal_form, lattice_determinant, reduce_mod
from .lattice import GeneratingSet, LengthOracle, Point, add, as_point, zero

RationalVector = tuple[Fraction, ...]


def rational_vector(v: Iterable) -> RationalVector:
    return tuple(Fraction(c) for c in v)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def solve_exact(rows: Sequence[Sequence[int]], rhs: Sequence) -> RationalVector | None:
    """Solve the square system rows @ x = rhs; None when singular."""
    n = len(rows)
    m = [[Fraction(c) for c in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [c / p for c in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return tuple(m[i][n] for i in range(n))


def rank(vectors: Sequence[Sequence[int]]) -> int:
    return len(hermite_normal_form(vectors, len(vectors[0]))) if vectors else 0


@dataclass(frozen=True)
class Face:
    """A face of conv(S): members, a support functional and coset data."""

    members: tuple[Point, ...]
    sigma: RationalVector
    is_facet: bool
    sigma_unique: bool
    generating_set: GeneratingSet = field(repr=False, compare=False)
    index: int | None = None
    coset_reps: tuple[Point, ...] | None = None

    @property
    def dim(self) -> int:
        return len(self.sigma)

    @property
    def z(self) -> Point:
        total = zero(self.dim)
        for s in self.members:
            total = add(total, s)
        return total

    def sigma_at(self, x: Sequence[int]) -> Fraction:
        return dot(self.sigma, x)

    def subgroup_basis(self) -> list[tuple[int, ...]]:
        return hermite_normal_form(self.members, self.dim)

    def in_subgroup(self, x: Sequence[int]) -> bool:
        return not any(reduce_mod(self.subgroup_basis(), x))

    def to_json(self) -> dict:
        return {
            "members": [list(s) for s in self.members],
            "sigma": [str(c) for c in self.sigma],
            "is_facet": self.is_facet,
            "sigma_unique": self.sigma_unique,
            "index": self.index,
            "coset_reps": None if self.coset_reps is None else [list(q) for q in self.coset_reps],
        }


@lru_cache(maxsize=None)
def _facet_functionals(gens: GeneratingSet) -> tuple[RationalVector, ...]:
    pts = list(gens.elements)
    d = gens.dim
    if rank(pts) < d:
        raise DimensionError("convex hull of S is not full-dimensional")
    found: set[RationalVector] = set()
    for subset in combinations(pts, d):
        sigma = solve_exact(subset, [1] * d)
        if sigma is None or sigma in found:
            continue
        if all(dot(sigma, s) <= 1 for s in pts):
            found.add(sigma)
    return tuple(sorted(found, reverse=True))


def extreme_points(gens: GeneratingSet) -> list[Point]:
    """Vertices of conv(S): points lying on at least d facets with independent functionals."""
    sigmas = _facet_functionals(gens)
    out = []
    for s in gens.elements:
        active = [sig for sig in sigmas if dot(sig, s) == 1]
        if active and _rational_rank(active) == gens.dim:
            out.append(s)
    return out


def _rational_rank(vectors: Sequence[RationalVector]) -> int:
    rows = [list(v) for v in vectors]
    r = 0
    ncols = len(rows[0])
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col] / rows[r][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def enumerate_faces(gens: GeneratingSet, with_cosets: bool = True) -> list[Face]:
    """All nonempty proper faces of conv(S), facets first.

    Facet functionals are unique.  A lower-dimensional face carries the
    average of the functionals of the facets containing it, which equals 1
    exactly on the face; ``sigma_unique`` is False for those.
    """
    pts = list(gens.elements)
    sigmas = _facet_functionals(gens)
    facets: list[Face] = []
    member_sets: dict[frozenset, list[RationalVector]] = {}
    for sig in sigmas:
        members = tuple(s for s in pts if dot(sig, s) == 1)
        facets.append(_make_face(gens, members, sig, True, True, with_cosets))
        member_sets[frozenset(members)] = [sig]
    # close under intersection
    frontier = list(member_sets)
    while frontier:
        nxt = []
        for a in frontier:
            for f in facets:
                inter = a & frozenset(f.members)
                if inter and inter not in member_sets:
                    member_sets[inter] = []
                    nxt.append(inter)
        frontier = nxt
    facet_sets = {frozenset(f.members) for f in facets}
    lower: list[Face] = []
    for ms in member_sets:
        if ms in facet_sets:
            continue
        containing = [f.sigma for f in facets if ms <= frozenset(f.members)]
        n = len(containing)
        sig = tuple(sum((c[i] for c in containing), Fraction(0)) / n for i in range(gens.dim))
        members = tuple(s for s in pts if s in ms)
        lower.append(_make_face(gens, members, sig, False, False, with_cosets))
    lower.sort(key=lambda f: (-len(f.members), f.members))
    return facets + lower


def facets(gens: GeneratingSet, with_cosets: bool = True) -> list[Face]:
    return [f for f in enumerate_faces(gens, with_cosets) if f.is_facet]


def _make_face(gens, members, sigma, is_facet, unique, with_cosets) -> Face:
    index = reps = None
    if with_cosets and rank(list(members)) == gens.dim:
        index, reps = _coset_data(gens, members)
    return Face(tuple(sorted(members)), sigma, is_facet, unique, gens, index, reps)


def face_from_members(gens: GeneratingSet, members: Iterable) -> Face:
    """Look up the face of conv(S) whose member set is ``members``."""
    target = frozenset(as_point(m) for m in members)
    for f in enumerate_faces(gens):
        if frozenset(f.members) == target:
            return f
    raise ValueError(f"{sorted(target)} is not a face of conv(S)")


def subgroup_data(face: Face) -> tuple[int, tuple[Point, ...]]:
    """Index of the subgroup generated by the face and minimal coset representatives."""
    if rank(list(face.members)) < face.dim:
        raise RankError("subgroup generated by the face is not of full rank")
    if face.index is not None:
        return face.index, face.coset_reps
    return _coset_data(face.generating_set, face.members)


def _coset_data(gens: GeneratingSet, members) -> tuple[int, tuple[Point, ...]]:
    d = gens.dim
    basis = hermite_normal_form(members, d)
    index = lattice_determinant(basis, d)
    oracle = _word_oracle(gens)
    best: dict[tuple[int, ...], Point] = {}
    r = 0
    while len(best) < index:
        # within a sphere prefer the lexicographically largest point, so Q={0,1} not {0,-1}
        layer = sorted((p for p in oracle.ball(r) if oracle(p) == r), reverse=True)
        for p in layer:
            best.setdefault(reduce_mod(basis, p), p)
        r += 1
    reps = sorted(best.values(), key=lambda p: (oracle(p), tuple(-c for c in p)))
    return index, tuple(reps)


@lru_cache(maxsize=None)
def _word_oracle(gens: GeneratingSet) -> LengthOracle:
    return LengthOracle.word(gens)


def gauge_value(gens: GeneratingSet, x: Sequence) -> Fraction:
    """Minkowski gauge of conv(S) at x, as the largest facet functional value."""
    if len(x) != gens.dim:
        raise DimensionError("dimension mismatch")
    xv = [Fraction(c) for c in x]
    return max(Fraction(0), max(dot(sig, xv) for sig in _facet_functionals(gens)))


def gauge_norm(gens: GeneratingSet, x: Sequence) -> Fraction:
    return gauge_value(gens, x)


def dual_norm(gens: GeneratingSet, tau: Sequence) -> Fraction:
    """max over s in S of tau(s)."""
    if len(tau) != gens.dim:
        raise DimensionError("dimension mismatch")
    t = rational_vector(tau)
    return max(Fraction(0), max(dot(t, s) for s in gens.elements))


def support_bound_check(face: Face, oracle: LengthOracle, radius: int) -> bool:
    """|sigma_F(x)| <= l(x) on the ball, compared exactly."""
    for x in oracle.ball(radius):
        lx = oracle(x)
        value = abs(face.sigma_at(x))
        if value > (lx if isinstance(lx, int) else Fraction(lx)):
            return False
    return True


def word_gauge_gap(gens: GeneratingSet, radius: int) -> int:
    """max over the ball of l(x) - ceil(gauge(x)); reported, not asserted."""
    oracle = _word_oracle(gens)
    gap = 0
    for x in oracle.ball(radius):
        g = gauge_value(gens, x)
        ceil = -((-g.numerator) // g.denominator)
        gap = max(gap, oracle(x) - ceil)
    return gap
