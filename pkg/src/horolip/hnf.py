"""Exact integer row-Hermite normal form and sublattice helpers.

Rows of the input matrix span a sublattice of Z^d.  The normal form is
upper triangular with positive pivots and entries above each pivot reduced
into ``[0, pivot)``.  Everything stays in Python ints.
"""
from __future__ import annotations

from typing import Iterable, Sequence

Vector = tuple[int, ...]


def _rows(vectors: Iterable[Sequence[int]]) -> list[list[int]]:
    return [[int(c) for c in v] for v in vectors]


def hermite_normal_form(vectors: Iterable[Sequence[int]], dim: int | None = None) -> list[Vector]:
    """Return the nonzero rows of the row-HNF of ``vectors``.

    The result is a basis of the lattice the vectors span.
    """
    rows = _rows(vectors)
    if dim is None:
        if not rows:
            return []
        dim = len(rows[0])
    rows = [r for r in rows if any(r)]
    basis: list[list[int]] = []
    col = 0
    while rows and col < dim:
        active = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not active:
            col += 1
            continue
        # Euclid on column ``col`` until a single row carries a nonzero entry.
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            pivot = active[0]
            nxt = [pivot]
            for r in active[1:]:
                q = r[col] // pivot[col]
                r = [a - q * b for a, b in zip(r, pivot)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        pivot = active[0]
        if pivot[col] < 0:
            pivot = [-a for a in pivot]
        basis.append(pivot)
        rows = rest
        col += 1
    # reduce entries above each pivot
    pivots = [next(i for i, a in enumerate(b) if a != 0) for b in basis]
    for i in range(len(basis)):
        p = pivots[i]
        for j in range(i):
            q = basis[j][p] // basis[i][p]
            if q:
                basis[j] = [a - q * b for a, b in zip(basis[j], basis[i])]
    return [tuple(b) for b in basis]


def pivots_of(basis: Sequence[Vector]) -> list[int]:
    return [next(i for i, a in enumerate(b) if a != 0) for b in basis]


def lattice_determinant(basis: Sequence[Vector], dim: int) -> int:
    """Index of the lattice in Z^dim; raises if the basis is not full rank."""
    if len(basis) != dim:
        raise ValueError(f"rank {len(basis)} < dimension {dim}")
    det = 1
    for b, p in zip(basis, pivots_of(basis)):
        det *= b[p]
    return abs(det)


def reduce_mod(basis: Sequence[Vector], x: Sequence[int]) -> Vector:
    """Canonical representative of ``x`` modulo the lattice spanned by ``basis``.

    Coordinates at pivot columns end up in ``[0, pivot)``.  Two vectors are
    congruent exactly when their reductions agree.
    """
    v = [int(c) for c in x]
    for b, p in zip(basis, pivots_of(basis)):
        q = v[p] // b[p]
        if q:
            v = [a - q * c for a, c in zip(v, b)]
    return tuple(v)


def in_lattice(basis: Sequence[Vector], x: Sequence[int]) -> bool:
    return not any(reduce_mod(basis, x))


def spans_full_lattice(vectors: Iterable[Sequence[int]], dim: int) -> bool:
    basis = hermite_normal_form(vectors, dim)
    return len(basis) == dim and lattice_determinant(basis, dim) == 1
