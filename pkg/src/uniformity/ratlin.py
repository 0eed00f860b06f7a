"""Exact rational linear algebra: reduced row echelon form and null spaces.

All entries are `fractions.Fraction`; no pivoting heuristics are needed
because arithmetic is exact, so the reduced echelon form is canonical.
"""
from __future__ import annotations

import math
from fractions import Fraction

__all__ = ["rref", "nullspace", "solve", "integer_primitive"]


def rref(rows):
    """Reduced row echelon form.

    Returns (reduced_nonzero_rows, pivot_columns).  Rows are tuples of
    Fractions; zero rows are dropped.
    """
    mat = [list(map(Fraction, r)) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = Fraction(1) / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def nullspace(rows, ncols=None):
    """Canonical basis of {v : A v = 0}, one vector per free column.

    Each basis vector has entry 1 at its free column and the reduced
    solution values at the pivot columns; vectors are ordered by free column.
    """
    if ncols is None:
        if not rows:
            raise ValueError("need ncols for an empty matrix")
        ncols = len(rows[0])
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in zip(red, pivots):
            v[pc] = -r[fc]
        basis.append(tuple(v))
    return basis


def solve(rows, rhs):
    """One exact solution of A v = rhs, or None if inconsistent."""
    if not rows:
        return None
    ncols = len(rows[0])
    aug = [list(r) + [Fraction(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    v = [Fraction(0)] * ncols
    for r, pc in zip(red, pivots):
        v[pc] = r[-1]
    return tuple(v)


def integer_primitive(vec):
    """Scale a rational vector to coprime integers with first nonzero entry > 0."""
    vec = [Fraction(v) for v in vec]
    denoms = [v.denominator for v in vec]
    L = math.lcm(*denoms) if denoms else 1
    ints = [int(v * L) for v in vec]
    g = math.gcd(*ints) if any(ints) else 1
    if g:
        ints = [v // g for v in ints]
    lead = next((v for v in ints if v), 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(ints)
